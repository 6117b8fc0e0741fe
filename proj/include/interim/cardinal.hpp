// Cardinal-type mechanisms: vertical/horizontal type spaces, virtual values,
// the design order, type-specific serial dictatorships, threshold payments,
// incentive checks, and the half-of-benchmark virtual surplus comparison.
#pragma once

#include "interim/border.hpp"
#include "interim/instance.hpp"
#include "interim/matching.hpp"

#include <string>
#include <vector>

namespace interim {

struct CardinalAgent {
    std::vector<Rational> verticals;                   // strictly increasing, >= 0
    // Conditional mass f(v|h): one row per horizontal type, or a single row
    // shared by all (vertical independent of horizontal).
    std::vector<std::vector<Rational>> vertical_mass;
    std::vector<std::vector<int>> horizontals;         // each: items best-first
    std::vector<Rational> horizontal_mass;             // g(h)
};

class CardinalTypeSpace {
  public:
    // rank_values: the common decreasing item-value grid h^1 > ... > h^N; a
    // horizontal type assigns rank_values[pos] to its pos-th ranked item.
    // When `uniform` is set, rank values are forced to N, N-1, ..., 1, every
    // permutation appears, and horizontal masses are uniform.
    CardinalTypeSpace(std::vector<std::string> agent_names, std::vector<std::string> item_names,
                      std::vector<Rational> rank_values, std::vector<CardinalAgent> agents,
                      bool uniform_horizontals);
    static CardinalTypeSpace uniform(std::vector<std::string> agent_names,
                                     std::vector<std::string> item_names,
                                     std::vector<CardinalAgent> agents);

    int num_agents() const { return static_cast<int>(agents_.size()); }
    int num_items() const { return static_cast<int>(item_names_.size()); }
    const CardinalAgent& agent(int i) const { return agents_[i]; }
    bool uniform_horizontals() const { return uniform_; }
    bool vertical_independent(int i) const { return agents_[i].vertical_mass.size() == 1; }

    // Type index packing: type = h * |V| + v.
    int type_of(int agent, int v_idx, int h_idx) const {
        return h_idx * static_cast<int>(agents_[agent].verticals.size()) + v_idx;
    }
    int vertical_of(int agent, int type) const {
        return type % static_cast<int>(agents_[agent].verticals.size());
    }
    int horizontal_of(int agent, int type) const {
        return type / static_cast<int>(agents_[agent].verticals.size());
    }

    const Rational& rank_value(int pos) const { return rank_values_[pos]; }
    // h(n): the value a horizontal type attaches to an item.
    Rational item_value(int agent, int h_idx, int item) const;
    Rational vertical_mass(int agent, int v_idx, int h_idx) const;
    Rational type_mass(int agent, int type) const;

    // nu(v|h) = v - (1 - F(v|h)) / f(v|h) on the grid.
    Rational virtual_value(int agent, int v_idx, int h_idx) const;
    bool monotone_virtuals() const;

    // The induced matching instance: independent prior, type (v,h) with mass
    // f(v|h) g(h), rankings from the horizontal permutation.
    const Instance& instance() const { return instance_; }

  private:
    std::vector<std::string> agent_names_, item_names_;
    std::vector<Rational> rank_values_;
    std::vector<CardinalAgent> agents_;
    bool uniform_ = false;
    Instance instance_;
};

// T* ordered by decreasing nu(v|h) h(n); ties by base agent priority, then
// item, then vertical, then horizontal index.
PriorityOrder design_order(const CardinalTypeSpace& space, const std::vector<int>& base_priority);

// T* elements with strictly negative nu(v|h) h(n) are excluded from greedy
// assignment.
TSubset design_active_set(const CardinalTypeSpace& space);

// Sequential top-choice assignment; returns matched item per agent.
std::vector<int> serial_dictatorship_run(const CardinalTypeSpace& space,
                                         const std::vector<int>& horizontal_profile,
                                         const std::vector<int>& agent_order);

// Whether q is, per vertical profile, a serial dictatorship: some agent
// order reproduces q across all horizontal profiles of that vertical
// profile. Searches all |I|! orders (|I| <= 5).
bool is_type_specific_sd(const AllocationRule& q, const CardinalTypeSpace& space);

enum class CardinalMode { KnownH, UnknownH };

struct PaymentRule {
    CardinalMode mode = CardinalMode::KnownH;
    // KnownH: per (state, agent). UnknownH: per (agent, type) interim table.
    std::vector<std::vector<Rational>> by_state;
    std::vector<std::vector<Rational>> interim;
};

// Myerson-style threshold payments along the vertical grid for the given
// (integral) allocation rule. KnownH: ex-post, per state. UnknownH: interim;
// requires independence and uniform horizontals, and the constructed tables
// coincide across horizontal reports.
PaymentRule payments_for(const AllocationRule& q, const CardinalTypeSpace& space,
                         CardinalMode mode);

struct IcCheck {
    bool ok = true;
    int agent = -1;
    int state = -1;     // KnownH
    int type = -1;      // UnknownH: truthful type
    int misreport = -1; // offending report
};

IcCheck ic_check(const AllocationRule& q, const PaymentRule& p, const CardinalTypeSpace& space,
                 CardinalMode mode);

struct TwoApproxCheck {
    Rational surplus;            // expected virtual surplus of the design greedy
    Rational surplus_benchmark;  // per-state max-weight matching on positive nu h
    bool surplus_pass = false;
    Rational welfare;            // gross value v h of the same allocation
    Rational welfare_benchmark;
    Rational surplus_ratio, welfare_ratio;
};

TwoApproxCheck revenue_2approx_check(const CardinalTypeSpace& space,
                                     const std::vector<int>& base_priority);

} // namespace interim
