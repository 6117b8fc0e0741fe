// One-to-one matching machinery: the greedy-matching allocation and its
// truncations, the aggregate bipartite-matching feasibility check (the
// matching analogue of the Border inequalities), projection coverage, the
// half-capacity bound, verification of half-scale realizability, and the
// truncation tightening step.
#pragma once

#include "interim/border.hpp"
#include "interim/cover.hpp"
#include "interim/instance.hpp"
#include "interim/lp_oracle.hpp"
#include "interim/polytopes.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace interim {

struct GreedyMatching {
    AllocationRule rule;
    InterimAllocation interim;
};

// Per state, scan T* triples in R-decreasing order and match each realized
// triple whose agent and item are both still free. Only triples in `active`
// participate (defaults to all of T*).
GreedyMatching greedy_matching(const PriorityOrder& r, const Instance& inst);
GreedyMatching greedy_matching(const PriorityOrder& r, const Instance& inst, TSubset active);

// State assignment of the greedy scan, as matched item per agent (-1 free).
std::vector<int> greedy_state_assignment(const PriorityOrder& r, const Instance& inst,
                                         int state, TSubset active);

// Interim allocation agreeing with the greedy one on the top-k prefix of R
// and vanishing below it.
InterimAllocation truncate_greedy(const PriorityOrder& r, int k, const Instance& inst);

// sum_{A} Q mu <= sum_t mu(t) C(S(t,A)) over all subsets of T*, with
// bipartite matching capacities on the right. Memoized via the polytope's
// capacity cache.
BorderCheck bm_check(const InterimAllocation& q, const Instance& inst,
                     const ExPostPolytope& poly, int max_tstar = 22);

// Gamma*(rho, a): union of the rows and columns of pairs in `a` matched by
// the integral assignment rho. Coverage holds when a is inside it.
UnitSet pair_projection(const std::vector<Rational>& rho, UnitSet a, int num_agents,
                        int num_items);
bool projection_covers(const std::vector<Rational>& rho, UnitSet a, int num_agents,
                       int num_items);

struct HalfboundCheck {
    bool ok = true;
    Rational matched_mass;  // sum of rho over a
    Rational capacity;      // max matching within a
};

// Requires projection coverage; verifies matched mass >= capacity / 2.
HalfboundCheck halfbound_check(const std::vector<Rational>& rho, UnitSet a,
                               const ExPostPolytope& poly);

enum class HalfCharMode { FosdAllOrders, ConvexHullLp, RealizableHalf };

struct HalfCharOptions {
    int full_order_limit = 8;   // enumerate all orders up to this |T*|
    int sampled_orders = 64;
    std::uint64_t seed = 1;
    int convex_hull_limit = 5;  // |T*| cap for the convex-combination LP
    RealizeOptions realize;
};

struct HalfCharReport {
    bool bm_ok = false;
    BorderCheck bm;
    bool verified = false;       // the requested mode's conclusion
    int orders_checked = 0;      // FosdAllOrders
    FosdCheck fosd_failure;      // FosdAllOrders, on failure
    bool convex_combination = false;
    RealizeResult half_realization;  // RealizableHalf
};

// Checks the chosen consequence of the aggregate condition for Q: half of Q
// is R-FOSD dominated by every greedy interim allocation / lies in the
// convex hull of truncated greedy interims / is realizable.
HalfCharReport half_char_verify(const InterimAllocation& q, const Instance& inst,
                                const ExPostPolytope& poly, HalfCharMode mode,
                                const HalfCharOptions& options = {});

struct TighteningResult {
    Rational alpha;             // half of Q's ex-ante mass over the greedy mass
    int ell = 0;                // smallest prefix carrying alpha of the greedy mass
    InterimAllocation truncated;  // greedy above ell, zero below
};

// Truncates the R-greedy interim allocation at the smallest prefix whose
// mass reaches alpha * total; the result still R-FOSD dominates Q/2.
TighteningResult tighten(const InterimAllocation& q, const PriorityOrder& r,
                         const Instance& inst);

// Half-approximation cover from greedy truncations over the given orders.
CoverCandidate matching_greedy_cover(const Instance& inst,
                                     const std::vector<PriorityOrder>& orders);

} // namespace interim
