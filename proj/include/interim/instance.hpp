// Problem instances: finite unit/agent/item sets, exact rational joint prior
// with derived marginals, the non-null disjoint union of types T*, allocation
// rules and the interim transform Q(u,tau) = E[q(u,t) | t_u = tau].
//
// Two kinds are supported. General: units carry their own types and the
// ex-post polytope lives over unit coordinates. Matching: units are
// agent-item pairs sharing the agent's type; T* elements are (agent, type,
// item) triples and assignments live on the I x N grid.
#pragma once

#include "interim/rational.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace interim {

enum class Kind { General, Matching };

// One element of T*: (agent, type) for General (item == -1), (agent, type,
// item) for Matching. Only pairs with strictly positive marginal appear.
struct TStarElem {
    int agent = 0;
    int type = 0;
    int item = -1;

    friend bool operator==(const TStarElem&, const TStarElem&) = default;
};

// Subsets of T* as bitmasks; enumeration caps keep |T*| well below 64.
using TSubset = std::uint64_t;
// Subsets of units, same representation.
using UnitSet = std::uint64_t;

struct InstanceDescription {
    Kind kind = Kind::General;
    std::vector<std::string> agents;            // units when kind == General
    std::vector<std::string> items;             // Matching only
    std::vector<std::vector<std::string>> type_labels;  // per agent
    // Optional per-agent, per-type strict ranking over items (best first);
    // required by the DA machinery, ignored for General.
    std::vector<std::vector<std::vector<int>>> rankings;

    // Exactly one of: explicit joint table (profiles by type index, missing
    // profiles have probability zero) or per-agent marginals with
    // independent == true.
    std::vector<std::pair<std::vector<int>, Rational>> joint;
    std::vector<std::vector<Rational>> marginals;
    bool independent = false;

    int max_states = 10000;
};

class Instance {
  public:
    static Instance build(const InstanceDescription& description);

    Kind kind() const { return kind_; }
    int num_agents() const { return static_cast<int>(agent_names_.size()); }
    int num_items() const { return static_cast<int>(item_names_.size()); }
    int num_states() const { return num_states_; }
    int num_units() const {
        return kind_ == Kind::Matching ? num_agents() * num_items() : num_agents();
    }
    int num_types(int agent) const { return static_cast<int>(type_names_[agent].size()); }

    const std::string& agent_name(int agent) const { return agent_names_[agent]; }
    const std::string& item_name(int item) const { return item_names_[item]; }
    const std::string& type_name(int agent, int type) const { return type_names_[agent][type]; }
    int agent_index(const std::string& name) const;
    int item_index(const std::string& name) const;
    int type_index(int agent, const std::string& label) const;

    // Ranking of items (best first) attached to a type; empty if not provided.
    const std::vector<int>& ranking(int agent, int type) const { return rankings_[agent][type]; }
    bool has_rankings() const;

    // Units. General: unit == agent. Matching: unit == agent * N + item.
    int unit_index(int agent, int item) const {
        return kind_ == Kind::Matching ? agent * num_items() + item : agent;
    }
    int unit_agent(int unit) const {
        return kind_ == Kind::Matching ? unit / num_items() : unit;
    }
    int unit_item(int unit) const {
        return kind_ == Kind::Matching ? unit % num_items() : -1;
    }
    std::string unit_name(int unit) const;

    // States are flat indices over the product of agent type sets.
    int state_type(int state, int agent) const {
        return static_cast<int>((state / stride_[agent]) % radix_[agent]);
    }
    int state_index(const std::vector<int>& profile) const;
    std::vector<int> state_profile(int state) const;
    // Replaces one agent's type in a state.
    int state_with(int state, int agent, int type) const {
        int cur = state_type(state, agent);
        return state + (type - cur) * static_cast<int>(stride_[agent]);
    }

    const Rational& prob(int state) const { return joint_[state]; }
    const Rational& marginal(int agent, int type) const { return marginal_[agent][type]; }
    // mu_u(t_{-u} | t_u) for the t_{-u} embedded in `state`; requires
    // marginal(agent, state_type(state, agent)) > 0.
    Rational conditional(int state, int agent) const;

    std::span<const TStarElem> tstar() const { return tstar_; }
    int tstar_size() const { return static_cast<int>(tstar_.size()); }
    const TStarElem& tstar_elem(int k) const { return tstar_[k]; }
    // -1 when (agent, type[, item]) has zero marginal.
    int tstar_lookup(int agent, int type, int item = -1) const;
    int tstar_unit(int k) const {
        const TStarElem& e = tstar_[k];
        return unit_index(e.agent, e.item);
    }
    bool realized(int k, int state) const {
        return state_type(state, tstar_[k].agent) == tstar_[k].type;
    }
    const Rational& tstar_marginal(int k) const {
        return marginal_[tstar_[k].agent][tstar_[k].type];
    }
    std::string tstar_name(int k) const;

  private:
    Kind kind_ = Kind::General;
    std::vector<std::string> agent_names_;
    std::vector<std::string> item_names_;
    std::vector<std::vector<std::string>> type_names_;
    std::vector<std::vector<std::vector<int>>> rankings_;
    std::vector<Rational> joint_;
    std::vector<std::vector<Rational>> marginal_;
    std::vector<TStarElem> tstar_;
    std::vector<std::vector<std::vector<int>>> tstar_index_;  // [agent][type][item or 0]
    std::vector<std::size_t> radix_, stride_;
    int num_states_ = 0;
};

// Ex-post allocation rule: q(state, unit) >= 0, one row per state.
class AllocationRule {
  public:
    AllocationRule() = default;
    AllocationRule(int num_states, int num_units)
        : num_states_(num_states), num_units_(num_units),
          values_(static_cast<std::size_t>(num_states) * num_units, Rational(0)) {}
    static AllocationRule zeros(const Instance& inst) {
        return AllocationRule(inst.num_states(), inst.num_units());
    }

    int num_states() const { return num_states_; }
    int num_units() const { return num_units_; }
    Rational& at(int state, int unit) {
        return values_[static_cast<std::size_t>(state) * num_units_ + unit];
    }
    const Rational& at(int state, int unit) const {
        return values_[static_cast<std::size_t>(state) * num_units_ + unit];
    }
    std::vector<Rational> state_row(int state) const;
    void set_state_row(int state, const std::vector<Rational>& row);

    friend bool operator==(const AllocationRule&, const AllocationRule&) = default;

  private:
    int num_states_ = 0;
    int num_units_ = 0;
    std::vector<Rational> values_;
};

// Interim allocation: one value per T* element.
struct InterimAllocation {
    std::vector<Rational> values;

    InterimAllocation() = default;
    explicit InterimAllocation(int tstar_size) : values(tstar_size, Rational(0)) {}

    Rational& operator[](int k) { return values[k]; }
    const Rational& operator[](int k) const { return values[k]; }
    int size() const { return static_cast<int>(values.size()); }

    friend bool operator==(const InterimAllocation&, const InterimAllocation&) = default;
};

// Q(u,tau) = sum over t ~ (u,tau) of q(u,t) mu(t) / mu_u(tau), exact.
InterimAllocation interim_of(const AllocationRule& q, const Instance& inst);

// Pointwise alpha * Q for alpha in [0,1].
InterimAllocation scale(const InterimAllocation& q, const Rational& alpha);

// S(A,t): units whose realized (unit, type[, item]) lies in A.
UnitSet active_set(TSubset a, int state, const Instance& inst);

// Ex-ante mass sum over T* of Q(u,tau) mu_u(tau).
Rational ex_ante_mass(const InterimAllocation& q, const Instance& inst);

// Guard helpers for mask-based subset work.
void require_mask_capacity(int size, const char* what);

} // namespace interim
