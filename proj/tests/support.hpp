// Shared test fixtures: deterministic random instances, feasible allocation
// rules, constraint generators, and the worked three-agent school-choice
// example used across the DA tests.
#pragma once

#include "interim/border.hpp"
#include "interim/cardinal.hpp"
#include "interim/cover.hpp"
#include "interim/da.hpp"
#include "interim/instance.hpp"
#include "interim/io.hpp"
#include "interim/lp_oracle.hpp"
#include "interim/matching.hpp"
#include "interim/polytopes.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace testsup {

using namespace interim;
using Rng = std::mt19937_64;

inline int pick(Rng& rng, int lo, int hi) {  // inclusive
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline Rational grid_rational(Rng& rng, int den, int max_num) {
    return Rational(pick(rng, 0, max_num), den);
}

inline std::vector<std::string> names(const std::string& prefix, int n) {
    std::vector<std::string> out;
    for (int i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

// Random full-support joint prior (correlated in general).
inline Instance random_general_instance(Rng& rng, int units, int types) {
    InstanceDescription d;
    d.kind = Kind::General;
    d.agents = names("u", units);
    d.type_labels.assign(units, names("t", types));
    int states = 1;
    for (int u = 0; u < units; ++u) states *= types;
    std::vector<int> numerators(states);
    int total = 0;
    for (int s = 0; s < states; ++s) {
        numerators[s] = pick(rng, 1, 6);
        total += numerators[s];
    }
    for (int s = 0; s < states; ++s) {
        std::vector<int> profile(units);
        int rem = s;
        for (int u = 0; u < units; ++u) {
            profile[u] = rem % types;
            rem /= types;
        }
        d.joint.emplace_back(std::move(profile), Rational(numerators[s], total));
    }
    return Instance::build(d);
}

inline Instance uniform_iid_general(int units, int types) {
    InstanceDescription d;
    d.kind = Kind::General;
    d.agents = names("u", units);
    d.type_labels.assign(units, names("t", types));
    d.independent = true;
    d.marginals.assign(units, std::vector<Rational>(types, Rational(1, types)));
    return Instance::build(d);
}

// Matching instance; types are plain labels (no rankings).
inline Instance random_matching_instance(Rng& rng, int agents, int items, int types) {
    InstanceDescription d;
    d.kind = Kind::Matching;
    d.agents = names("i", agents);
    d.items = names("n", items);
    d.type_labels.assign(agents, names("t", types));
    int states = 1;
    for (int a = 0; a < agents; ++a) states *= types;
    std::vector<int> numerators(states);
    int total = 0;
    for (int s = 0; s < states; ++s) {
        numerators[s] = pick(rng, 1, 6);
        total += numerators[s];
    }
    for (int s = 0; s < states; ++s) {
        std::vector<int> profile(agents);
        int rem = s;
        for (int a = 0; a < agents; ++a) {
            profile[a] = rem % types;
            rem /= types;
        }
        d.joint.emplace_back(std::move(profile), Rational(numerators[s], total));
    }
    return Instance::build(d);
}

inline ConstraintFunction unit_capacity(int units) {
    return ConstraintFunction(units, true,
                              [](UnitSet a, int) { return Rational(a == 0 ? 0 : 1); });
}

// Random weighted coverage function, monotone and submodular; optionally a
// different draw per state.
inline ConstraintFunction coverage_constraint(Rng& rng, int units, int num_states,
                                              bool state_dependent) {
    struct Layer {
        std::vector<Rational> weights;        // per ground element
        std::vector<UnitSet> covered_by;      // per ground element: units covering it
    };
    auto layers = std::make_shared<std::vector<Layer>>();
    const int ground = units + 2;
    const int draws = state_dependent ? num_states : 1;
    for (int s = 0; s < draws; ++s) {
        Layer layer;
        for (int e = 0; e < ground; ++e) {
            layer.weights.push_back(Rational(pick(rng, 0, 4), 4));
            UnitSet covers = 0;
            for (int u = 0; u < units; ++u)
                if (pick(rng, 0, 2) == 0) covers |= UnitSet(1) << u;
            layer.covered_by.push_back(covers);
        }
        layers->push_back(std::move(layer));
    }
    return ConstraintFunction(units, !state_dependent,
                              [layers, state_dependent](UnitSet a, int state) {
                                  const Layer& layer =
                                      (*layers)[state_dependent ? state : 0];
                                  Rational total = 0;
                                  for (std::size_t e = 0; e < layer.weights.size(); ++e)
                                      if (layer.covered_by[e] & a) total += layer.weights[e];
                                  return total;
                              });
}

inline PriorityOrder random_order(Rng& rng, int n) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    return PriorityOrder::of(std::move(order));
}

// Random vertex of the matching polytope: scan agents in random order, each
// taking a random free item or nothing.
inline std::vector<Rational> random_partial_matching(Rng& rng, int agents, int items) {
    std::vector<Rational> rho(static_cast<std::size_t>(agents) * items, Rational(0));
    std::vector<int> order(agents);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<char> used(items, 0);
    for (int i : order) {
        if (pick(rng, 0, 2) == 0) continue;
        std::vector<int> free;
        for (int n = 0; n < items; ++n)
            if (!used[n]) free.push_back(n);
        if (free.empty()) continue;
        int n = free[pick(rng, 0, static_cast<int>(free.size()) - 1)];
        used[n] = 1;
        rho[i * items + n] = 1;
    }
    return rho;
}

// Random convex combination of vertices, one row per state.
inline AllocationRule random_feasible_matching_rule(Rng& rng, const Instance& inst) {
    AllocationRule q = AllocationRule::zeros(inst);
    for (int s = 0; s < inst.num_states(); ++s) {
        const int mixes = pick(rng, 1, 3);
        std::vector<int> shares(mixes);
        int total = 0;
        for (int& w : shares) {
            w = pick(rng, 1, 4);
            total += w;
        }
        std::vector<Rational> row(inst.num_units(), Rational(0));
        for (int m = 0; m < mixes; ++m) {
            std::vector<Rational> vertex =
                random_partial_matching(rng, inst.num_agents(), inst.num_items());
            for (int u = 0; u < inst.num_units(); ++u)
                row[u] += Rational(shares[m], total) * vertex[u];
        }
        q.set_state_row(s, row);
    }
    return q;
}

inline AllocationRule random_feasible_polymatroid_rule(Rng& rng, const Instance& inst,
                                                       const ConstraintFunction& c) {
    AllocationRule q = AllocationRule::zeros(inst);
    for (int s = 0; s < inst.num_states(); ++s) {
        const int mixes = pick(rng, 1, 3);
        std::vector<int> shares(mixes);
        int total = 0;
        for (int& w : shares) {
            w = pick(rng, 1, 4);
            total += w;
        }
        std::vector<Rational> row(inst.num_units(), Rational(0));
        for (int m = 0; m < mixes; ++m) {
            std::vector<int> order(inst.num_units());
            std::iota(order.begin(), order.end(), 0);
            std::shuffle(order.begin(), order.end(), rng);
            order.resize(pick(rng, 0, inst.num_units()));
            std::vector<Rational> vertex = greedy_polymatroid(c, s, order);
            for (int u = 0; u < inst.num_units(); ++u)
                row[u] += Rational(shares[m], total) * vertex[u];
        }
        q.set_state_row(s, row);
    }
    return q;
}

inline InterimAllocation random_grid_interim(Rng& rng, const Instance& inst, int den) {
    InterimAllocation q(inst.tstar_size());
    for (int k = 0; k < inst.tstar_size(); ++k) q[k] = grid_rational(rng, den, den);
    return q;
}

// The worked school-choice example: three agents, three items, type labels
// naming each agent's ranking.
inline Instance example_school_instance() {
    InstanceDescription d;
    d.kind = Kind::Matching;
    d.agents = {"i1", "i2", "i3"};
    d.items = {"n1", "n2", "n3"};
    d.type_labels = {{"123", "321"}, {"213", "321"}, {"321"}};
    d.rankings = {{{0, 1, 2}, {2, 1, 0}}, {{1, 0, 2}, {2, 1, 0}}, {{2, 1, 0}}};
    d.independent = true;
    d.marginals = {{Rational(1, 2), Rational(1, 2)},
                   {Rational(1, 2), Rational(1, 2)},
                   {Rational(1)}};
    return Instance::build(d);
}

// The listed priority order, segments top to bottom, as T* indices.
inline PriorityOrder example_school_priority(const Instance& inst) {
    auto ts = [&](const char* agent, const char* type, const char* item) {
        int a = inst.agent_index(agent);
        return inst.tstar_lookup(a, inst.type_index(a, type), inst.item_index(item));
    };
    std::vector<int> order = {
        ts("i1", "123", "n1"), ts("i1", "123", "n2"), ts("i1", "123", "n3"),
        ts("i2", "213", "n2"), ts("i2", "213", "n1"), ts("i2", "213", "n3"),
        ts("i2", "321", "n3"), ts("i2", "321", "n2"), ts("i2", "321", "n1"),
        ts("i3", "321", "n3"), ts("i3", "321", "n2"), ts("i3", "321", "n1"),
        ts("i1", "321", "n3"), ts("i1", "321", "n2"), ts("i1", "321", "n1"),
    };
    return PriorityOrder::of(std::move(order));
}

// Same order with the first agent-type segment moved between the fourth and
// fifth (the variant that must preserve every property).
inline PriorityOrder example_school_priority_moved(const Instance& inst) {
    PriorityOrder base = example_school_priority(inst);
    std::vector<int> order;
    for (int pos = 3; pos < 12; ++pos) order.push_back(base.order[pos]);
    for (int pos = 0; pos < 3; ++pos) order.push_back(base.order[pos]);
    for (int pos = 12; pos < 15; ++pos) order.push_back(base.order[pos]);
    return PriorityOrder::of(std::move(order));
}

inline bool rule_feasible(const AllocationRule& q, const Instance& inst,
                          const ExPostPolytope& poly) {
    for (int s = 0; s < inst.num_states(); ++s)
        if (!poly.contains(s, q.state_row(s))) return false;
    return true;
}

} // namespace testsup
