// School-choice machinery: blocked triples of a principal priority order,
// the welfarist and item-ranking-consistency predicates, item priority
// extraction, agent-proposing deferred acceptance, the greedy/DA equivalence
// and stability checks, objective evaluation, and the half-of-benchmark
// guarantee for FOSD-monotone objectives.
#pragma once

#include "interim/border.hpp"
#include "interim/instance.hpp"
#include "interim/matching.hpp"

#include <optional>
#include <string>
#include <vector>

namespace interim {

// Priority order over T* triples of a matching instance whose types carry
// item rankings; blocked flags are computed on construction by brute force
// over co-type profiles.
class PrincipalPriority {
  public:
    PrincipalPriority(PriorityOrder order, const Instance& inst);

    const PriorityOrder& order() const { return order_; }
    bool blocked(int k) const { return blocked_[k]; }
    const std::vector<char>& blocked_flags() const { return blocked_; }

  private:
    PriorityOrder order_;
    std::vector<char> blocked_;
};

struct WelfaristCheck {
    bool ok = true;
    int high = -1, low = -1;  // witnessing T* indices on failure
};

// An unblocked triple ranked above another triple of the same (agent, type)
// must point to a weakly preferred item.
WelfaristCheck is_welfarist(const PrincipalPriority& p, const Instance& inst);

struct ItemRankingCheck {
    bool ok = true;
    std::vector<std::vector<int>> rankings;  // per item, agents best-first
    // Violation witness: unblocked (a1 with t1) above (a2 with t2) on `item`,
    // yet some (a1, t3) below some unblocked (a2, t4).
    int item = -1, t1 = -1, t2 = -1, t3 = -1, t4 = -1;
};

// Constructive check: agents with an unblocked triple for an item are
// ordered by their best such triple; agents without any are appended by
// index. Fails with a witness when the induced relation is contradictory.
ItemRankingCheck is_item_ranking_consistent(const PrincipalPriority& p, const Instance& inst);

// Agent-proposing deferred acceptance. prefs: per agent, items best-first.
// priorities: per item, agents best-first. Returns matched item per agent
// (-1 when unmatched).
std::vector<int> deferred_acceptance(const std::vector<std::vector<int>>& prefs,
                                     const std::vector<std::vector<int>>& priorities);

// All blocking-pair-free matchings of a profile (desk scale).
std::vector<std::vector<int>> enumerate_stable_matchings(
    const std::vector<std::vector<int>>& prefs, const std::vector<std::vector<int>>& priorities);

bool is_stable(const std::vector<int>& match_agent, const std::vector<std::vector<int>>& prefs,
               const std::vector<std::vector<int>>& priorities);

struct GreedyDaCheck {
    bool equal = true;
    bool stable = true;
    bool agent_optimal = true;
    int state = -1;  // first offending state
};

// Requires welfarist + item-ranking consistent. Verifies per state that the
// greedy assignment equals deferred acceptance under the derived item
// priorities, is stable, and (up to 4x4) is agent-optimal among all stable
// matchings.
GreedyDaCheck greedy_equals_da(const PrincipalPriority& p, const Instance& inst);

struct TruthfulnessCheck {
    bool ok = true;
    int agent = -1, state = -1, misreport = -1;
};

// Brute force over all single-agent misreports: the truthful greedy outcome
// is weakly preferred under the true ranking (unmatched ranks last).
TruthfulnessCheck truthful_dominant(const PrincipalPriority& p, const Instance& inst);

// Piecewise-linear function through (x, y) breakpoints starting at (0, 0),
// extended beyond the last breakpoint with the final slope.
struct PiecewiseLinear {
    std::vector<std::pair<Rational, Rational>> breakpoints;

    static PiecewiseLinear identity();
    Rational eval(const Rational& x) const;
    bool increasing_concave_from_zero() const;
    // Affine pieces (slope, intercept); the function is their lower envelope.
    std::vector<std::pair<Rational, Rational>> pieces() const;
};

struct Objective {
    enum class Kind { Utilitarian, RankDependent, MaxMin };
    Kind kind = Kind::Utilitarian;
    std::vector<Rational> weights;                 // per T* element
    PiecewiseLinear transform;                     // RankDependent
    std::vector<std::vector<Rational>> weight_set; // MaxMin members

    static Objective utilitarian(std::vector<Rational> weights);
    static Objective rank_dependent(std::vector<Rational> weights, PiecewiseLinear f);
    static Objective max_min(std::vector<std::vector<Rational>> members);
};

Rational evaluate_objective(const Objective& obj, const InterimAllocation& q,
                            const Instance& inst);

// True when every pair k,l orders the two weight vectors consistently.
bool comonotone(const std::vector<Rational>& a, const std::vector<Rational>& b);

// Monotonicity certificate for FOSD shifts along the priority order:
// utilitarian / rank-dependent weights nonnegative and nonincreasing along
// it; max-min members each so, and pairwise comonotone.
bool fosd_monotone_for(const Objective& obj, const PriorityOrder& order, const Instance& inst);

struct GuaranteeCheck {
    Rational value;      // objective at the greedy/DA interim allocation
    Rational benchmark;  // utilitarian: per-state max matching; else LP optimum
    bool pass = false;   // 2 * value >= benchmark
    Rational ratio;      // value / benchmark (1 when benchmark is zero)
};

GuaranteeCheck da_guarantee_check(const Objective& obj, const PrincipalPriority& p,
                                  const Instance& inst);

} // namespace interim
