#include <doctest.h>

#include "support.hpp"

using namespace interim;
using namespace testsup;

TEST_SUITE_BEGIN("cover");

namespace {

// Full ex-ante LP: maximize lambda(Q) over realizable allocations, without
// the per-state decomposition. The independent route for the support value.
Rational support_via_lp(const WeightVector& lambda, const Instance& inst,
                        const ExPostPolytope& poly) {
    std::vector<int> live;
    for (int s = 0; s < inst.num_states(); ++s)
        if (inst.prob(s) != 0) live.push_back(s);
    const int units = inst.num_units();
    std::vector<int> base(inst.num_states(), -1);
    for (std::size_t i = 0; i < live.size(); ++i)
        base[live[i]] = static_cast<int>(i) * units;
    LinearProgram lp(static_cast<int>(live.size()) * units);
    for (int s : live)
        for (const Halfspace& h : poly.halfspaces(s)) {
            std::vector<Rational> row(lp.num_vars, Rational(0));
            for (int u = 0; u < units; ++u)
                if (h.coeffs[u] != 0) row[base[s] + u] = h.coeffs[u];
            lp.add_row(std::move(row), Relation::LessEq, h.rhs * inst.prob(s));
        }
    // lambda(Q) = sum_k lambda_k / mu_k * X_k with X_k the ex-ante mass.
    for (int k = 0; k < inst.tstar_size(); ++k) {
        const Rational coeff = lambda[k] / inst.tstar_marginal(k);
        if (coeff == 0) continue;
        for (int s : live)
            if (inst.realized(k, s)) lp.objective[base[s] + inst.tstar_unit(k)] += coeff;
    }
    LpResult res = solve(lp);
    REQUIRE(res.status == LpStatus::Optimal);
    return res.value;
}

WeightVector random_normalized_weight(Rng& rng, const Instance& inst) {
    WeightVector lambda(inst.tstar_size());
    for (int k = 0; k < inst.tstar_size(); ++k)
        lambda[k] = Rational(pick(rng, -4, 4), 4) * inst.tstar_marginal(k);
    return lambda;
}

} // namespace

TEST_CASE("support of nonpositive weights is zero") {
    Instance inst = uniform_iid_general(2, 2);
    ExPostPolytope poly = ExPostPolytope::polymatroid(unit_capacity(2));
    WeightVector lambda(inst.tstar_size());
    lambda[0] = -inst.tstar_marginal(0);
    CHECK(support_value(lambda, inst, poly) == 0);
}

TEST_CASE("support of a step weight equals the expected capacity of its active set") {
    Rng rng(61);
    for (int rep = 0; rep < 10; ++rep) {
        Instance inst = random_general_instance(rng, 2, 2);
        ConstraintFunction c = coverage_constraint(rng, 2, inst.num_states(), true);
        ExPostPolytope poly = ExPostPolytope::polymatroid(c);
        PriorityOrder r = random_order(rng, inst.tstar_size());
        for (int k = 0; k <= r.size(); ++k) {
            TSubset a = r.prefix(k);
            Rational expected = 0;
            for (int s = 0; s < inst.num_states(); ++s)
                expected += inst.prob(s) * c.value(active_set(a, s, inst), s);
            CHECK(support_value(step_lambda(a, inst), inst, poly) == expected);
        }
    }
}

TEST_CASE("matching support with unit weights is the expected max matching") {
    Rng rng(67);
    Instance inst = random_matching_instance(rng, 2, 2, 1);
    ExPostPolytope poly = ExPostPolytope::matching(2, 2);
    WeightVector lambda(inst.tstar_size());
    for (int k = 0; k < inst.tstar_size(); ++k) lambda[k] = inst.tstar_marginal(k);
    CHECK(support_value(lambda, inst, poly) == 2);
}

TEST_CASE("state-separable support equals the full ex-ante LP optimum") {
    Rng rng(71);
    for (int rep = 0; rep < 8; ++rep) {
        Instance inst = random_general_instance(rng, 2, 2);
        ConstraintFunction c = coverage_constraint(rng, 2, inst.num_states(), true);
        ExPostPolytope poly = ExPostPolytope::polymatroid(c);
        WeightVector lambda = random_normalized_weight(rng, inst);
        SupportResult direct = support_maximizer(lambda, inst, poly);
        CHECK(direct.value == support_via_lp(lambda, inst, poly));
        CHECK(lambda.apply(interim_of(direct.argmax, inst)) == direct.value);
        CHECK(rule_feasible(direct.argmax, inst, poly));
    }
    for (int rep = 0; rep < 4; ++rep) {
        Instance inst = random_matching_instance(rng, 2, 2, 2);
        ExPostPolytope poly = ExPostPolytope::matching(2, 2);
        WeightVector lambda = random_normalized_weight(rng, inst);
        CHECK(support_value(lambda, inst, poly) == support_via_lp(lambda, inst, poly));
    }
}

TEST_CASE("support is convex in the weight vector") {
    Rng rng(73);
    Instance inst = random_general_instance(rng, 2, 2);
    ConstraintFunction c = coverage_constraint(rng, 2, inst.num_states(), true);
    ExPostPolytope poly = ExPostPolytope::polymatroid(c);
    for (int rep = 0; rep < 20; ++rep) {
        WeightVector a = random_normalized_weight(rng, inst);
        WeightVector b = random_normalized_weight(rng, inst);
        WeightVector mid(inst.tstar_size());
        for (int k = 0; k < inst.tstar_size(); ++k) mid[k] = (a[k] + b[k]) / 2;
        CHECK(2 * support_value(mid, inst, poly) <=
              support_value(a, inst, poly) + support_value(b, inst, poly));
    }
}

TEST_CASE("the polymatroid greedy family is an exact cover") {
    Rng rng(79);
    Instance inst = random_general_instance(rng, 2, 2);
    ConstraintFunction c = coverage_constraint(rng, 2, inst.num_states(), true);
    ExPostPolytope poly = ExPostPolytope::polymatroid(c);
    CoverCandidate cover = polymatroid_equivalence_cover(inst, c, cover_orders(inst));
    CHECK_FALSE(validate_cover(cover, inst, poly).has_value());
}

TEST_CASE("a null entry with a positive-support weight is rejected") {
    Instance inst = uniform_iid_general(2, 2);
    ExPostPolytope poly = ExPostPolytope::polymatroid(unit_capacity(2));
    CoverCandidate cover;
    cover.alpha = 1;
    CoverEntry entry;
    entry.point = InterimAllocation(inst.tstar_size());
    entry.witness = AllocationRule::zeros(inst);
    entry.extreme_lambdas.push_back(
        step_lambda((TSubset(1) << inst.tstar_size()) - 1, inst));
    cover.entries.push_back(std::move(entry));
    auto violation = validate_cover(cover, inst, poly);
    REQUIRE(violation.has_value());
    CHECK(violation->lhs == 0);
    CHECK(violation->rhs > 0);
}

TEST_CASE("membership: null and realizable points pass, violators fail through their set") {
    Rng rng(83);
    Instance inst = random_matching_instance(rng, 2, 2, 1);
    ExPostPolytope poly = ExPostPolytope::matching(2, 2);
    CoverCandidate cover = matching_greedy_cover(inst, cover_orders(inst, 4, 8, 5));
    CHECK_FALSE(validate_cover(cover, inst, poly).has_value());

    CHECK(approx_membership(InterimAllocation(inst.tstar_size()), cover, inst, poly).member);
    InterimAllocation good = interim_of(random_feasible_matching_rule(rng, inst), inst);
    CHECK(approx_membership(good, cover, inst, poly).member);

    // Everything at 3/4 violates the aggregate condition on the full set;
    // the step weight of a violating set must reject it.
    InterimAllocation bad(inst.tstar_size());
    for (int k = 0; k < bad.size(); ++k) bad[k] = Rational(3, 4);
    BorderCheck bm = bm_check(bad, inst, poly);
    REQUIRE_FALSE(bm.ok);
    WeightVector violating = step_lambda(bm.worst, inst);
    CHECK(violating.apply(bad) > support_value(violating, inst, poly));
    CHECK_FALSE(approx_membership(bad, cover, inst, poly).member);
}

TEST_CASE("lifting per-state certificates") {
    Rng rng(89);

    SUBCASE("null selection with nonpositive candidates") {
        Instance inst = uniform_iid_general(2, 2);
        ExPostPolytope poly = ExPostPolytope::polymatroid(unit_capacity(2));
        ExPostCoverEntry entry;
        entry.select = [&](int) { return std::vector<Rational>(2, Rational(0)); };
        WeightVector negative(inst.tstar_size());
        for (int k = 0; k < inst.tstar_size(); ++k)
            negative[k] = -inst.tstar_marginal(k);
        entry.candidate_lambdas = {negative};
        CoverCandidate cover = lift_expost_cover({entry}, Rational(1), inst, poly);
        REQUIRE(cover.entries.size() == 1);
        CHECK(cover.entries[0].extreme_lambdas.size() == 1);
        for (int k = 0; k < inst.tstar_size(); ++k) CHECK(cover.entries[0].point[k] == 0);
    }

    SUBCASE("greedy selections reproduce the directly built covers") {
        Instance inst = random_general_instance(rng, 2, 2);
        ConstraintFunction c = coverage_constraint(rng, 2, inst.num_states(), true);
        ExPostPolytope poly = ExPostPolytope::polymatroid(c);
        std::vector<PriorityOrder> orders = cover_orders(inst);
        CoverCandidate direct = polymatroid_equivalence_cover(inst, c, orders);

        std::vector<ExPostCoverEntry> entries;
        for (const PriorityOrder& r : orders) {
            for (int k = 0; k <= r.size(); ++k) {
                ExPostCoverEntry e;
                TruncatedGreedySpec spec = TruncatedGreedySpec::from_prefix(r, k);
                e.select = [spec, &inst, &c](int s) {
                    std::vector<int> units;
                    for (int pos = 0; pos < spec.order.size(); ++pos) {
                        int t = spec.order.order[pos];
                        if ((spec.active >> t & 1) && inst.realized(t, s))
                            units.push_back(inst.tstar_unit(t));
                    }
                    return greedy_polymatroid(c, s, units);
                };
                for (int j = 0; j <= k; ++j)
                    e.candidate_lambdas.push_back(step_lambda(r.prefix(j), r, inst));
                entries.push_back(std::move(e));
            }
        }
        CoverCandidate lifted = lift_expost_cover(entries, Rational(1), inst, poly);
        REQUIRE(lifted.entries.size() == direct.entries.size());
        for (std::size_t e = 0; e < lifted.entries.size(); ++e) {
            CHECK(lifted.entries[e].point == direct.entries[e].point);
            // Every candidate is certified at alpha = 1 for its own prefix.
            CHECK(lifted.entries[e].extreme_lambdas.size() ==
                  direct.entries[e].extreme_lambdas.size());
        }
        CHECK_FALSE(validate_cover(lifted, inst, poly).has_value());
    }

    SUBCASE("matching greedy selections lift to the half cover") {
        Instance inst = random_matching_instance(rng, 2, 2, 2);
        ExPostPolytope poly = ExPostPolytope::matching(2, 2);
        std::vector<PriorityOrder> orders = cover_orders(inst, 3, 6, 7);
        CoverCandidate direct = matching_greedy_cover(inst, orders);

        std::vector<ExPostCoverEntry> entries;
        for (const PriorityOrder& r : orders) {
            for (int k = 0; k <= r.size(); ++k) {
                ExPostCoverEntry e;
                const int prefix = k;
                e.select = [&inst, r, prefix](int s) {
                    std::vector<Rational> rho(inst.num_units(), Rational(0));
                    std::vector<int> match = greedy_state_assignment(r, inst, s, ~TSubset(0));
                    for (int pos = 0; pos < prefix; ++pos) {
                        int t = r.order[pos];
                        const TStarElem& el = inst.tstar_elem(t);
                        if (inst.realized(t, s) && match[el.agent] == el.item)
                            rho[inst.tstar_unit(t)] = 1;
                    }
                    return rho;
                };
                for (int j = 0; j <= k; ++j)
                    e.candidate_lambdas.push_back(step_lambda(r.prefix(j), r, inst));
                entries.push_back(std::move(e));
            }
        }
        CoverCandidate lifted = lift_expost_cover(entries, Rational(1, 2), inst, poly);
        REQUIRE(lifted.entries.size() == direct.entries.size());
        for (std::size_t e = 0; e < lifted.entries.size(); ++e)
            CHECK(lifted.entries[e].point == direct.entries[e].point);
        CHECK_FALSE(validate_cover(lifted, inst, poly).has_value());
    }
}

TEST_CASE("membership through a half cover certifies half-scale realizability") {
    Rng rng(97);
    Instance inst = random_matching_instance(rng, 2, 2, 2);
    ExPostPolytope poly = ExPostPolytope::matching(2, 2);
    CoverCandidate cover = matching_greedy_cover(inst, cover_orders(inst, 4, 24, 11));
    int members = 0;
    for (int draw = 0; draw < 30; ++draw) {
        InterimAllocation q = draw % 2 == 0
                                  ? interim_of(random_feasible_matching_rule(rng, inst), inst)
                                  : random_grid_interim(rng, inst, 4);
        MembershipCheck membership = approx_membership(q, cover, inst, poly);
        if (!membership.member) continue;
        ++members;
        CHECK(realizable(scale(q, cover.alpha), inst, poly).feasible);
    }
    CHECK(members > 5);
}

TEST_CASE("separation orders sort by normalized weight") {
    Instance inst = uniform_iid_general(2, 2);
    WeightVector lambda(inst.tstar_size());
    lambda[2] = inst.tstar_marginal(2);
    lambda[0] = inst.tstar_marginal(0) / 2;
    PriorityOrder r = order_from_weights(lambda, inst);
    CHECK(r.order[0] == 2);
    CHECK(r.order[1] == 0);
}

TEST_SUITE_END();
