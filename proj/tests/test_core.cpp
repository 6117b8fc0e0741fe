#include <doctest.h>

#include "support.hpp"

using namespace interim;
using namespace testsup;

TEST_SUITE_BEGIN("core");

TEST_CASE("uniform product prior") {
    Instance inst = uniform_iid_general(2, 2);
    CHECK(inst.num_states() == 4);
    for (int s = 0; s < 4; ++s) CHECK(inst.prob(s) == Rational(1, 4));
    CHECK(inst.tstar_size() == 4);
    for (int k = 0; k < 4; ++k) CHECK(inst.tstar_marginal(k) == Rational(1, 2));
}

TEST_CASE("zero-probability types are excluded from T*") {
    InstanceDescription d;
    d.kind = Kind::General;
    d.agents = {"u1", "u2"};
    d.type_labels = {{"a", "b"}, {"a"}};
    d.joint = {{{0, 0}, Rational(1)}};  // type b never realizes
    Instance inst = Instance::build(d);
    CHECK(inst.tstar_size() == 2);
    CHECK(inst.tstar_lookup(0, 1) == -1);
    CHECK(inst.tstar_lookup(0, 0) >= 0);
}

TEST_CASE("school example instance has 15 triples") {
    Instance inst = example_school_instance();
    CHECK(inst.tstar_size() == (2 + 2 + 1) * 3);
}

TEST_CASE("build rejects malformed priors") {
    InstanceDescription d;
    d.kind = Kind::General;
    d.agents = {"u1"};
    d.type_labels = {{"a", "b"}};
    d.joint = {{{0}, Rational(1, 2)}, {{1}, Rational(1, 4)}};
    CHECK_THROWS_AS(Instance::build(d), InputError);  // sums to 3/4

    d.joint = {{{0}, Rational(3, 2)}, {{1}, Rational(-1, 2)}};
    CHECK_THROWS_AS(Instance::build(d), InputError);  // negative entry

    d.joint = {{{0}, Rational(1)}};
    d.type_labels = {{}};
    CHECK_THROWS_AS(Instance::build(d), InputError);  // empty type set
}

TEST_CASE("interim of the null and constant rules") {
    Instance inst = uniform_iid_general(2, 2);
    AllocationRule zero = AllocationRule::zeros(inst);
    InterimAllocation qz = interim_of(zero, inst);
    for (int k = 0; k < inst.tstar_size(); ++k) CHECK(qz[k] == 0);

    AllocationRule constant = AllocationRule::zeros(inst);
    for (int s = 0; s < inst.num_states(); ++s) {
        constant.at(s, 0) = Rational(1, 3);
        constant.at(s, 1) = Rational(2, 3);
    }
    InterimAllocation qc = interim_of(constant, inst);
    for (int k = 0; k < inst.tstar_size(); ++k) {
        const TStarElem& e = inst.tstar_elem(k);
        CHECK(qc[k] == (e.agent == 0 ? Rational(1, 3) : Rational(2, 3)));
    }
}

TEST_CASE("interim of the threshold rule, frozen by state enumeration") {
    // Single item, two agents, two equally likely independent types; agent 1
    // gets the item iff its type is t2 (the high one), agent 2 otherwise.
    Instance inst = uniform_iid_general(2, 2);
    AllocationRule q = AllocationRule::zeros(inst);
    for (int s = 0; s < inst.num_states(); ++s) {
        if (inst.state_type(s, 0) == 1) q.at(s, 0) = 1;
        else q.at(s, 1) = 1;
    }
    InterimAllocation interim = interim_of(q, inst);
    CHECK(interim[inst.tstar_lookup(0, 1)] == 1);
    CHECK(interim[inst.tstar_lookup(0, 0)] == 0);
    CHECK(interim[inst.tstar_lookup(1, 0)] == Rational(1, 2));
    CHECK(interim[inst.tstar_lookup(1, 1)] == Rational(1, 2));
}

TEST_CASE("active sets") {
    Instance inst = uniform_iid_general(2, 2);
    CHECK(active_set(0, 0, inst) == 0);
    TSubset all = (TSubset(1) << inst.tstar_size()) - 1;
    for (int s = 0; s < inst.num_states(); ++s)
        CHECK(active_set(all, s, inst) == UnitSet(0b11));
    // A = {(u1,t2),(u2,t1)}, state (t2,t2) -> {u1}
    TSubset a = (TSubset(1) << inst.tstar_lookup(0, 1)) | (TSubset(1) << inst.tstar_lookup(1, 0));
    const int state = inst.state_index({1, 1});
    CHECK(active_set(a, state, inst) == UnitSet(0b01));
}

TEST_CASE("scaling") {
    Instance inst = uniform_iid_general(2, 2);
    InterimAllocation q(inst.tstar_size());
    for (int k = 0; k < q.size(); ++k) q[k] = 1;
    CHECK(scale(q, Rational(1)) == q);
    InterimAllocation half = scale(q, Rational(1, 2));
    for (int k = 0; k < q.size(); ++k) CHECK(half[k] == Rational(1, 2));
    InterimAllocation zero = scale(q, Rational(0));
    for (int k = 0; k < q.size(); ++k) CHECK(zero[k] == 0);
    CHECK_THROWS_AS(scale(q, Rational(3, 2)), InputError);
    CHECK_THROWS_AS(scale(q, Rational(-1, 2)), InputError);
}

TEST_CASE("interim transform is linear and conserves ex-ante mass") {
    Rng rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        Instance inst = random_matching_instance(rng, 2, 2, 2);
        AllocationRule qa = random_feasible_matching_rule(rng, inst);
        AllocationRule qb = random_feasible_matching_rule(rng, inst);
        const Rational beta(pick(rng, 0, 5), 5);

        AllocationRule mix = AllocationRule::zeros(inst);
        for (int s = 0; s < inst.num_states(); ++s)
            for (int u = 0; u < inst.num_units(); ++u)
                mix.at(s, u) = beta * qa.at(s, u) + (1 - beta) * qb.at(s, u);

        InterimAllocation ia = interim_of(qa, inst), ib = interim_of(qb, inst),
                          im = interim_of(mix, inst);
        for (int k = 0; k < inst.tstar_size(); ++k)
            CHECK(im[k] == beta * ia[k] + (1 - beta) * ib[k]);

        Rational direct = 0;
        for (int s = 0; s < inst.num_states(); ++s)
            for (int u = 0; u < inst.num_units(); ++u)
                direct += inst.prob(s) * qa.at(s, u);
        CHECK(ex_ante_mass(ia, inst) == direct);
    }
}

TEST_CASE("unresponsive rules round-trip through the interim transform") {
    Rng rng(11);
    Instance inst = random_general_instance(rng, 3, 2);
    AllocationRule q = AllocationRule::zeros(inst);
    std::vector<Rational> row = {Rational(1, 5), Rational(2, 5), Rational(1, 10)};
    for (int s = 0; s < inst.num_states(); ++s) q.set_state_row(s, row);
    InterimAllocation interim = interim_of(q, inst);
    AllocationRule rebuilt = AllocationRule::zeros(inst);
    for (int s = 0; s < inst.num_states(); ++s)
        for (int k = 0; k < inst.tstar_size(); ++k)
            if (inst.realized(k, s)) rebuilt.at(s, inst.tstar_unit(k)) = interim[k];
    CHECK(rebuilt == q);
}

TEST_SUITE_END();
