#include "interim/matching.hpp"

#include <algorithm>

namespace interim {

namespace {

void require_matching(const Instance& inst) {
    if (inst.kind() != Kind::Matching)
        throw InputError("operation requires a matching-kind instance");
}

} // namespace

std::vector<int> greedy_state_assignment(const PriorityOrder& r, const Instance& inst,
                                         int state, TSubset active) {
    std::vector<int> match_agent(inst.num_agents(), -1);
    std::vector<char> item_used(inst.num_items(), 0);
    for (int pos = 0; pos < r.size(); ++pos) {
        const int k = r.order[pos];
        if (!(active >> k & 1) || !inst.realized(k, state)) continue;
        const TStarElem& e = inst.tstar_elem(k);
        if (match_agent[e.agent] >= 0 || item_used[e.item]) continue;
        match_agent[e.agent] = e.item;
        item_used[e.item] = 1;
    }
    return match_agent;
}

GreedyMatching greedy_matching(const PriorityOrder& r, const Instance& inst, TSubset active) {
    require_matching(inst);
    require_mask_capacity(inst.tstar_size(), "T*");
    if (r.size() != inst.tstar_size())
        throw InputError("priority order must cover all of T*");
    GreedyMatching out;
    out.rule = AllocationRule::zeros(inst);
    for (int s = 0; s < inst.num_states(); ++s) {
        std::vector<int> match_agent = greedy_state_assignment(r, inst, s, active);
        for (int i = 0; i < inst.num_agents(); ++i)
            if (match_agent[i] >= 0) out.rule.at(s, inst.unit_index(i, match_agent[i])) = 1;
    }
    out.interim = interim_of(out.rule, inst);
    return out;
}

GreedyMatching greedy_matching(const PriorityOrder& r, const Instance& inst) {
    require_mask_capacity(inst.tstar_size(), "T*");
    return greedy_matching(r, inst, ~TSubset(0));
}

InterimAllocation truncate_greedy(const PriorityOrder& r, int k, const Instance& inst) {
    if (k < 0 || k > r.size()) throw InputError("truncation index out of range");
    // Acceptance of a triple never depends on lower-priority triples, so the
    // truncated rule's interim equals the full one on the prefix.
    InterimAllocation full = greedy_matching(r, inst).interim;
    InterimAllocation out(inst.tstar_size());
    for (int pos = 0; pos < k; ++pos) out[r.order[pos]] = full[r.order[pos]];
    return out;
}

BorderCheck bm_check(const InterimAllocation& q, const Instance& inst,
                     const ExPostPolytope& poly, int max_tstar) {
    require_matching(inst);
    if (poly.variant() != ExPostPolytope::Variant::Matching)
        throw InputError("bm_check needs the matching polytope");
    ConstraintFunction capacity(inst.num_units(), true,
                                [&poly](UnitSet a, int) { return poly.capacity(a); });
    return border_check(q, inst, capacity, max_tstar);
}

UnitSet pair_projection(const std::vector<Rational>& rho, UnitSet a, int num_agents,
                        int num_items) {
    UnitSet projection = 0;
    for (int i = 0; i < num_agents; ++i) {
        for (int n = 0; n < num_items; ++n) {
            const int u = i * num_items + n;
            if (!(a >> u & 1)) continue;
            const Rational& v = rho[u];
            if (v == 0) continue;
            if (v != 1) throw InputError("projection requires an integral assignment");
            for (int m = 0; m < num_items; ++m) projection |= UnitSet(1) << (i * num_items + m);
            for (int j = 0; j < num_agents; ++j) projection |= UnitSet(1) << (j * num_items + n);
        }
    }
    return projection;
}

bool projection_covers(const std::vector<Rational>& rho, UnitSet a, int num_agents,
                       int num_items) {
    return (a & ~pair_projection(rho, a, num_agents, num_items)) == 0;
}

HalfboundCheck halfbound_check(const std::vector<Rational>& rho, UnitSet a,
                               const ExPostPolytope& poly) {
    if (!projection_covers(rho, a, poly.num_agents(), poly.num_items()))
        throw InputError("halfbound_check requires the projection to cover the set");
    HalfboundCheck out;
    out.matched_mass = 0;
    for (int u = 0; u < poly.num_units(); ++u)
        if (a >> u & 1) out.matched_mass += rho[u];
    out.capacity = poly.capacity(a);
    out.ok = 2 * out.matched_mass >= out.capacity;
    return out;
}

HalfCharReport half_char_verify(const InterimAllocation& q, const Instance& inst,
                                const ExPostPolytope& poly, HalfCharMode mode,
                                const HalfCharOptions& options) {
    require_matching(inst);
    HalfCharReport report;
    report.bm = bm_check(q, inst, poly);
    report.bm_ok = report.bm.ok;
    if (!report.bm_ok) return report;

    const InterimAllocation half = scale(q, Rational(1, 2));
    switch (mode) {
        case HalfCharMode::FosdAllOrders: {
            std::vector<PriorityOrder> orders =
                cover_orders(inst, options.full_order_limit, options.sampled_orders, options.seed);
            if (inst.tstar_size() > options.full_order_limit) {
                // Adversarial separation order when Q itself is unrealizable.
                RealizeResult direct = realizable(q, inst, poly, options.realize);
                if (!direct.feasible)
                    orders.push_back(order_from_weights(direct.separating_lambda, inst));
                WeightVector mass(inst.tstar_size());
                for (int k = 0; k < inst.tstar_size(); ++k)
                    mass[k] = q[k] * inst.tstar_marginal(k);
                orders.push_back(order_from_weights(mass, inst));
            }
            report.verified = true;
            for (const PriorityOrder& r : orders) {
                ++report.orders_checked;
                InterimAllocation greedy = greedy_matching(r, inst).interim;
                FosdCheck check = r_fosd_dominates(greedy, half, r, inst);
                if (!check.dominated) {
                    report.verified = false;
                    report.fosd_failure = check;
                    break;
                }
            }
            return report;
        }
        case HalfCharMode::ConvexHullLp: {
            if (inst.tstar_size() > options.convex_hull_limit)
                throw CapExceeded("convex-combination check capped at |T*| <= " +
                                  std::to_string(options.convex_hull_limit));
            std::vector<PriorityOrder> orders = cover_orders(inst, options.convex_hull_limit);
            std::vector<InterimAllocation> columns;
            for (const PriorityOrder& r : orders) {
                InterimAllocation full = greedy_matching(r, inst).interim;
                for (int k = 0; k <= r.size(); ++k) {
                    InterimAllocation q_k(inst.tstar_size());
                    for (int pos = 0; pos < k; ++pos) q_k[r.order[pos]] = full[r.order[pos]];
                    columns.push_back(std::move(q_k));
                }
            }
            LinearProgram lp(static_cast<int>(columns.size()));
            for (int j = 0; j < inst.tstar_size(); ++j) {
                std::vector<Rational> row(columns.size());
                for (std::size_t c = 0; c < columns.size(); ++c) row[c] = columns[c][j];
                lp.add_row(std::move(row), Relation::Eq, half[j]);
            }
            lp.add_row(std::vector<Rational>(columns.size(), Rational(1)), Relation::Eq,
                       Rational(1));
            report.convex_combination = solve(lp).status == LpStatus::Optimal;
            report.verified = report.convex_combination;
            return report;
        }
        case HalfCharMode::RealizableHalf: {
            report.half_realization = realizable(half, inst, poly, options.realize);
            report.verified = report.half_realization.feasible;
            return report;
        }
    }
    return report;
}

TighteningResult tighten(const InterimAllocation& q, const PriorityOrder& r,
                         const Instance& inst) {
    require_matching(inst);
    BorderCheck bm = bm_check(q, inst, ExPostPolytope::matching(inst.num_agents(),
                                                                inst.num_items()));
    if (!bm.ok) throw InputError("tighten requires the aggregate condition to hold");

    InterimAllocation greedy = greedy_matching(r, inst).interim;
    Rational q_mass = ex_ante_mass(q, inst);
    Rational greedy_mass = ex_ante_mass(greedy, inst);

    TighteningResult out;
    if (q_mass == 0) {
        out.alpha = 0;
        out.ell = 0;
        out.truncated = InterimAllocation(inst.tstar_size());
        return out;
    }
    if (greedy_mass == 0)
        throw InputError("greedy mass vanished while Q carries mass");  // excluded by (BM)
    out.alpha = q_mass / (2 * greedy_mass);

    Rational target = out.alpha * greedy_mass;
    Rational cum = 0;
    int ell = 0;
    while (cum < target && ell < r.size()) {
        cum += greedy[r.order[ell]] * inst.tstar_marginal(r.order[ell]);
        ++ell;
    }
    out.ell = ell;
    out.truncated = InterimAllocation(inst.tstar_size());
    for (int pos = 0; pos < ell; ++pos)
        out.truncated[r.order[pos]] = greedy[r.order[pos]];
    return out;
}

CoverCandidate matching_greedy_cover(const Instance& inst,
                                     const std::vector<PriorityOrder>& orders) {
    require_matching(inst);
    CoverCandidate cover;
    cover.alpha = Rational(1, 2);
    for (const PriorityOrder& r : orders) {
        GreedyMatching full = greedy_matching(r, inst);
        for (int k = 0; k <= r.size(); ++k) {
            CoverEntry entry;
            // Truncated witness: greedy acceptances within the prefix.
            entry.witness = AllocationRule::zeros(inst);
            for (int s = 0; s < inst.num_states(); ++s) {
                std::vector<int> match = greedy_state_assignment(r, inst, s, ~TSubset(0));
                for (int pos = 0; pos < k; ++pos) {
                    const int t = r.order[pos];
                    const TStarElem& e = inst.tstar_elem(t);
                    if (inst.realized(t, s) && match[e.agent] == e.item)
                        entry.witness.at(s, inst.tstar_unit(t)) = 1;
                }
            }
            entry.point = InterimAllocation(inst.tstar_size());
            for (int pos = 0; pos < k; ++pos)
                entry.point[r.order[pos]] = full.interim[r.order[pos]];
            for (int j = 0; j <= k; ++j)
                entry.extreme_lambdas.push_back(step_lambda(r.prefix(j), r, inst));
            cover.entries.push_back(std::move(entry));
        }
    }
    return cover;
}

} // namespace interim
