#include "interim/border.hpp"

#include <algorithm>
#include <numeric>

namespace interim {

PriorityOrder PriorityOrder::of(std::vector<int> order) {
    PriorityOrder r;
    r.position.assign(order.size(), -1);
    for (int pos = 0; pos < static_cast<int>(order.size()); ++pos) {
        int k = order[pos];
        if (k < 0 || k >= static_cast<int>(order.size()) || r.position[k] != -1)
            throw InputError("priority order must be a permutation of T*");
        r.position[k] = pos;
    }
    r.order = std::move(order);
    return r;
}

PriorityOrder PriorityOrder::identity(int n) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    return of(std::move(order));
}

TSubset PriorityOrder::prefix(int k) const {
    if (k < 0 || k > size()) throw InputError("prefix length out of range");
    TSubset a = 0;
    for (int i = 0; i < k; ++i) a |= TSubset(1) << order[i];
    return a;
}

bool PriorityOrder::is_upper_set(TSubset a) const {
    bool gap = false;
    for (int i = 0; i < size(); ++i) {
        bool in = a >> order[i] & 1;
        if (in && gap) return false;
        if (!in) gap = true;
    }
    return true;
}

TruncatedGreedySpec TruncatedGreedySpec::from_prefix(PriorityOrder order, int k) {
    TruncatedGreedySpec spec;
    spec.active = order.prefix(k);
    spec.order = std::move(order);
    return spec;
}

std::optional<SubmodularityViolation> is_submodular(const ConstraintFunction& c, int state) {
    return ExPostPolytope::polymatroid(c).submodularity_violation(state);
}

std::vector<Rational> greedy_polymatroid(const ConstraintFunction& c, int state,
                                         const std::vector<int>& unit_order) {
    if (c.value(0, state) != 0)
        throw InputError("constraint function must vanish on the empty set");
    std::vector<Rational> rho(c.num_units(), Rational(0));
    UnitSet prefix = 0;
    Rational prev = 0;
    for (int u : unit_order) {
        prefix |= UnitSet(1) << u;
        Rational cur = c.value(prefix, state);
        rho[u] = cur - prev;
        prev = std::move(cur);
    }
    return rho;
}

GreedyAllocation greedy_allocation(const TruncatedGreedySpec& spec, const Instance& inst,
                                   const ConstraintFunction& c) {
    require_mask_capacity(inst.tstar_size(), "T*");
    GreedyAllocation out;
    out.rule = AllocationRule(inst.num_states(), inst.num_units());
    for (int s = 0; s < inst.num_states(); ++s) {
        std::vector<int> units;
        for (int pos = 0; pos < spec.order.size(); ++pos) {
            int k = spec.order.order[pos];
            if ((spec.active >> k & 1) && inst.realized(k, s))
                units.push_back(inst.tstar_unit(k));
        }
        std::vector<Rational> rho = greedy_polymatroid(c, s, units);
        out.rule.set_state_row(s, rho);
    }
    out.interim = interim_of(out.rule, inst);
    return out;
}

BorderCheck border_check(const InterimAllocation& q, const Instance& inst,
                         const ConstraintFunction& c, int max_tstar) {
    const int k = inst.tstar_size();
    if (k > max_tstar)
        throw CapExceeded("border check subset cap exceeded (|T*| = " + std::to_string(k) + ")");
    require_mask_capacity(k, "T*");

    // Gray-code walk over subsets; each step toggles one element, updating
    // the lhs mass and every affected state's active-unit mask.
    std::vector<UnitSet> active(inst.num_states(), 0);
    std::vector<std::vector<int>> states_of(k);
    for (int e = 0; e < k; ++e)
        for (int s = 0; s < inst.num_states(); ++s)
            if (inst.prob(s) != 0 && inst.realized(e, s)) states_of[e].push_back(s);

    BorderCheck result;
    Rational lhs = 0, rhs = 0, worst_gap = 0;
    TSubset gray = 0;
    for (std::uint64_t i = 1; i < (std::uint64_t(1) << k); ++i) {
        const int flip = static_cast<int>(std::countr_zero(i));
        const TSubset bit = TSubset(1) << flip;
        const bool adding = !(gray & bit);
        gray ^= bit;
        const UnitSet unit_bit = UnitSet(1) << inst.tstar_unit(flip);
        if (adding) lhs += q[flip] * inst.tstar_marginal(flip);
        else lhs -= q[flip] * inst.tstar_marginal(flip);
        for (int s : states_of[flip]) {
            rhs -= inst.prob(s) * c.value(active[s], s);
            active[s] ^= unit_bit;
            rhs += inst.prob(s) * c.value(active[s], s);
        }
        if (lhs > rhs && lhs - rhs > worst_gap) {
            worst_gap = lhs - rhs;
            result.ok = false;
            result.worst = gray;
            result.lhs = lhs;
            result.rhs = rhs;
        }
    }
    return result;
}

FosdCheck r_fosd_dominates(const InterimAllocation& hi, const InterimAllocation& lo,
                           const PriorityOrder& r, const Instance& inst) {
    FosdCheck out;
    Rational cum_hi = 0, cum_lo = 0;
    for (int pos = 0; pos < r.size(); ++pos) {
        const int k = r.order[pos];
        cum_hi += hi[k] * inst.tstar_marginal(k);
        cum_lo += lo[k] * inst.tstar_marginal(k);
        if (cum_lo > cum_hi) {
            out.dominated = false;
            out.failing_prefix = pos + 1;
            out.lo = cum_lo;
            out.hi = cum_hi;
            return out;
        }
    }
    return out;
}

WeightVector step_lambda(TSubset a, const Instance& inst) {
    require_mask_capacity(inst.tstar_size(), "T*");
    WeightVector lambda(inst.tstar_size());
    for (int k = 0; k < inst.tstar_size(); ++k)
        if (a >> k & 1) lambda[k] = inst.tstar_marginal(k);
    return lambda;
}

WeightVector step_lambda(TSubset a, const PriorityOrder& r, const Instance& inst) {
    if (!r.is_upper_set(a))
        throw InputError("step weight vector requires an upper set of the order");
    return step_lambda(a, inst);
}

} // namespace interim
