#include "interim/lp_oracle.hpp"

namespace interim {

RealizeResult realizable(const InterimAllocation& q, const Instance& inst,
                         const ExPostPolytope& poly, const RealizeOptions& options) {
    if (q.size() != inst.tstar_size())
        throw InputError("interim allocation must be defined on all of T*");

    std::vector<int> live_states;
    for (int s = 0; s < inst.num_states(); ++s)
        if (inst.prob(s) != 0) live_states.push_back(s);
    const int units = inst.num_units();
    const std::size_t vars = live_states.size() * static_cast<std::size_t>(units);
    if (vars > static_cast<std::size_t>(options.max_variables))
        throw CapExceeded("realizability LP exceeds the variable cap (" +
                          std::to_string(vars) + " > " +
                          std::to_string(options.max_variables) + ")");

    std::vector<int> var_base(inst.num_states(), -1);
    for (std::size_t idx = 0; idx < live_states.size(); ++idx)
        var_base[live_states[idx]] = static_cast<int>(idx) * units;

    LinearProgram lp(static_cast<int>(vars));
    for (int s : live_states) {
        for (const Halfspace& h : poly.halfspaces(s)) {
            std::vector<Rational> row(vars, Rational(0));
            for (int u = 0; u < units; ++u)
                if (h.coeffs[u] != 0) row[var_base[s] + u] = h.coeffs[u];
            lp.add_row(std::move(row), Relation::LessEq, h.rhs * inst.prob(s));
        }
    }
    const int first_interim_row = static_cast<int>(lp.rows.size());
    for (int k = 0; k < inst.tstar_size(); ++k) {
        std::vector<Rational> row(vars, Rational(0));
        for (int s : live_states)
            if (inst.realized(k, s)) row[var_base[s] + inst.tstar_unit(k)] = 1;
        lp.add_row(std::move(row), Relation::Eq, q[k] * inst.tstar_marginal(k));
    }

    LpResult res = solve(lp, options.lp);
    RealizeResult out;
    if (res.status == LpStatus::Optimal) {
        out.feasible = true;
        out.witness = AllocationRule::zeros(inst);
        for (int s : live_states)
            for (int u = 0; u < units; ++u)
                out.witness.at(s, u) = res.primal[var_base[s] + u] / inst.prob(s);
        return out;
    }

    out.feasible = false;
    out.farkas = res.farkas;
    // The multipliers on the interim equalities give the separating
    // functional: with y the equality multipliers, lambda(u,tau) =
    // -y(u,tau) mu(tau) satisfies lambda(Q) > max over realizable Q'.
    out.separating_lambda = WeightVector(inst.tstar_size());
    for (int k = 0; k < inst.tstar_size(); ++k)
        out.separating_lambda[k] = -res.farkas[first_interim_row + k] * inst.tstar_marginal(k);
    out.separating_lambda.normalize(inst);
    return out;
}

} // namespace interim
