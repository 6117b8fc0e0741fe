// Ground-truth realizability: membership of an interim allocation in the
// realizable set, decided by an exact feasibility LP. Feasible answers carry
// a realizing allocation rule; infeasible answers carry a Farkas certificate
// and the separating weight vector extracted from it.
#pragma once

#include "interim/instance.hpp"
#include "interim/lp.hpp"
#include "interim/polytopes.hpp"
#include "interim/weights.hpp"

#include <vector>

namespace interim {

struct RealizeOptions {
    int max_variables = 20000;
    LpOptions lp;
};

struct RealizeResult {
    bool feasible = false;
    AllocationRule witness;          // interim_of(witness) == Q exactly
    std::vector<Rational> farkas;    // per LP row, in the order described below
    WeightVector separating_lambda;  // lambda(Q) > max over realizable Q' of lambda(Q')

    explicit operator bool() const { return feasible; }
};

// Variables are x_t(u) = mu(t) q(u,t) for states with mu(t) > 0. Rows: for
// each such state the polytope halfspaces scaled by mu(t), then one interim
// equality per T* element. A feasible point is converted back to q; zero
// probability states get q = 0.
RealizeResult realizable(const InterimAllocation& q, const Instance& inst,
                         const ExPostPolytope& poly, const RealizeOptions& options = {});

} // namespace interim
