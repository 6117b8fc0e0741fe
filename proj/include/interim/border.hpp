// Exact characterization machinery for polymatroid-constrained instances:
// priority orders on T*, truncated greedy allocations, the aggregate
// Border-style subset check, R-FOSD dominance, and step weight vectors.
#pragma once

#include "interim/instance.hpp"
#include "interim/polytopes.hpp"
#include "interim/weights.hpp"

#include <optional>
#include <vector>

namespace interim {

// Strict total order on T*; order[0] is the highest-priority element.
struct PriorityOrder {
    std::vector<int> order;
    std::vector<int> position;  // inverse permutation

    static PriorityOrder of(std::vector<int> order);
    static PriorityOrder identity(int n);
    int size() const { return static_cast<int>(order.size()); }
    // Upper set consisting of the top k elements.
    TSubset prefix(int k) const;
    bool is_upper_set(TSubset a) const;
};

// Order R plus an active set A of T* elements; greedy assigns zero outside A.
struct TruncatedGreedySpec {
    PriorityOrder order;
    TSubset active = 0;

    static TruncatedGreedySpec from_prefix(PriorityOrder order, int k);
};

// First submodularity violation of C(.,state), if any (spec op shape).
std::optional<SubmodularityViolation> is_submodular(const ConstraintFunction& c, int state);

// Marginal-gain greedy along `unit_order`; other units get zero. Assumes
// C(empty) = 0; with submodular monotone C and weights decreasing along the
// order this maximizes any nonnegative decreasing linear objective.
std::vector<Rational> greedy_polymatroid(const ConstraintFunction& c, int state,
                                         const std::vector<int>& unit_order);

struct GreedyAllocation {
    AllocationRule rule;
    InterimAllocation interim;
};

// Per state, greedy over the realized active T* elements in R order.
GreedyAllocation greedy_allocation(const TruncatedGreedySpec& spec, const Instance& inst,
                                   const ConstraintFunction& c);

struct BorderCheck {
    bool ok = true;
    TSubset worst = 0;   // violating subset maximizing lhs - rhs
    Rational lhs, rhs;   // sides of the worst subset (violations only)
};

// Exhaustive subset test: sum_{A} Q mu <= sum_t mu(t) C(S(A,t), t) for all
// A subseteq T*. Gray-code enumeration with incremental updates.
BorderCheck border_check(const InterimAllocation& q, const Instance& inst,
                         const ConstraintFunction& c, int max_tstar = 22);

struct FosdCheck {
    bool dominated = true;
    int failing_prefix = -1;  // 1-based length of the first failing prefix
    Rational lo, hi;          // cumulative masses at the failure
};

// Prefix-cumulative dominance of `lo` by `hi` along R, in ex-ante mass.
FosdCheck r_fosd_dominates(const InterimAllocation& hi, const InterimAllocation& lo,
                           const PriorityOrder& r, const Instance& inst);

// Step weight vector of a set A: lambda(u,tau) = mu_u(tau) on A, zero off A
// (normalized form equals the indicator of A).
WeightVector step_lambda(TSubset a, const Instance& inst);
// Same, but requires A to be an upper set of R.
WeightVector step_lambda(TSubset a, const PriorityOrder& r, const Instance& inst);

} // namespace interim
