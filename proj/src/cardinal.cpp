#include "interim/cardinal.hpp"

#include <algorithm>
#include <numeric>

namespace interim {

namespace {

std::vector<std::vector<int>> all_permutations(int n) {
    std::vector<int> base(n);
    std::iota(base.begin(), base.end(), 0);
    std::vector<std::vector<int>> out;
    do out.push_back(base);
    while (std::next_permutation(base.begin(), base.end()));
    return out;
}

} // namespace

CardinalTypeSpace::CardinalTypeSpace(std::vector<std::string> agent_names,
                                     std::vector<std::string> item_names,
                                     std::vector<Rational> rank_values,
                                     std::vector<CardinalAgent> agents, bool uniform_horizontals)
    : agent_names_(std::move(agent_names)), item_names_(std::move(item_names)),
      rank_values_(std::move(rank_values)), agents_(std::move(agents)),
      uniform_(uniform_horizontals) {
    const int n = num_items();
    if (static_cast<int>(rank_values_.size()) != n)
        throw InputError("rank values must cover every item position");
    for (int pos = 0; pos + 1 < n; ++pos)
        if (rank_values_[pos] <= rank_values_[pos + 1])
            throw InputError("rank values must be strictly decreasing");
    if (rank_values_.back() < 0) throw InputError("rank values must be nonnegative");

    for (int i = 0; i < num_agents(); ++i) {
        CardinalAgent& a = agents_[i];
        if (a.verticals.empty()) throw InputError("agent without vertical types");
        for (std::size_t j = 0; j < a.verticals.size(); ++j) {
            if (a.verticals[j] < 0) throw InputError("vertical types must be nonnegative");
            if (j > 0 && a.verticals[j] <= a.verticals[j - 1])
                throw InputError("vertical grid must be strictly increasing");
        }
        if (uniform_) {
            a.horizontals = all_permutations(n);
            a.horizontal_mass.assign(a.horizontals.size(),
                                     Rational(1, static_cast<long>(a.horizontals.size())));
            if (a.vertical_mass.size() != 1)
                throw InputError("uniform horizontals require verticals independent of h");
        }
        if (a.horizontals.empty()) throw InputError("agent without horizontal types");
        for (const auto& h : a.horizontals) {
            std::vector<int> sorted = h;
            std::sort(sorted.begin(), sorted.end());
            for (int pos = 0; pos < n; ++pos)
                if (pos >= static_cast<int>(sorted.size()) || sorted[pos] != pos)
                    throw InputError("horizontal type must rank every item exactly once");
        }
        if (a.horizontal_mass.size() != a.horizontals.size())
            throw InputError("horizontal mass size mismatch");
        Rational hsum = 0;
        for (const Rational& g : a.horizontal_mass) {
            if (g <= 0) throw InputError("horizontal masses must be positive");
            hsum += g;
        }
        if (hsum != 1) throw InputError("horizontal masses must sum to 1");
        if (a.vertical_mass.size() != 1 && a.vertical_mass.size() != a.horizontals.size())
            throw InputError("vertical masses must be shared or given per horizontal type");
        for (const auto& row : a.vertical_mass) {
            if (row.size() != a.verticals.size())
                throw InputError("vertical mass row size mismatch");
            Rational sum = 0;
            for (const Rational& f : row) {
                if (f <= 0) throw InputError("vertical masses must be positive");
                sum += f;
            }
            if (sum != 1) throw InputError("vertical masses must sum to 1");
        }
    }

    InstanceDescription d;
    d.kind = Kind::Matching;
    d.agents = agent_names_;
    d.items = item_names_;
    d.independent = true;
    d.type_labels.resize(num_agents());
    d.rankings.resize(num_agents());
    d.marginals.resize(num_agents());
    for (int i = 0; i < num_agents(); ++i) {
        const CardinalAgent& a = agents_[i];
        for (std::size_t h = 0; h < a.horizontals.size(); ++h) {
            std::string hname;
            for (int pos = 0; pos < n; ++pos) {
                if (pos) hname += ">";
                hname += item_names_[a.horizontals[h][pos]];
            }
            for (std::size_t v = 0; v < a.verticals.size(); ++v) {
                d.type_labels[i].push_back("v=" + to_string(a.verticals[v]) + "|" + hname);
                d.rankings[i].push_back(a.horizontals[h]);
                d.marginals[i].push_back(vertical_mass(i, static_cast<int>(v),
                                                       static_cast<int>(h)) *
                                         a.horizontal_mass[h]);
            }
        }
    }
    instance_ = Instance::build(d);
}

CardinalTypeSpace CardinalTypeSpace::uniform(std::vector<std::string> agent_names,
                                             std::vector<std::string> item_names,
                                             std::vector<CardinalAgent> agents) {
    const int n = static_cast<int>(item_names.size());
    std::vector<Rational> rank_values;
    for (int pos = 0; pos < n; ++pos) rank_values.emplace_back(n - pos);
    return CardinalTypeSpace(std::move(agent_names), std::move(item_names),
                             std::move(rank_values), std::move(agents), true);
}

Rational CardinalTypeSpace::item_value(int agent, int h_idx, int item) const {
    const auto& perm = agents_[agent].horizontals[h_idx];
    auto it = std::find(perm.begin(), perm.end(), item);
    return rank_values_[it - perm.begin()];
}

Rational CardinalTypeSpace::vertical_mass(int agent, int v_idx, int h_idx) const {
    const auto& rows = agents_[agent].vertical_mass;
    return rows.size() == 1 ? rows[0][v_idx] : rows[h_idx][v_idx];
}

Rational CardinalTypeSpace::type_mass(int agent, int type) const {
    const int v = vertical_of(agent, type), h = horizontal_of(agent, type);
    return vertical_mass(agent, v, h) * agents_[agent].horizontal_mass[h];
}

Rational CardinalTypeSpace::virtual_value(int agent, int v_idx, int h_idx) const {
    const CardinalAgent& a = agents_[agent];
    Rational cdf = 0;
    for (int j = 0; j <= v_idx; ++j) cdf += vertical_mass(agent, j, h_idx);
    return a.verticals[v_idx] - (1 - cdf) / vertical_mass(agent, v_idx, h_idx);
}

bool CardinalTypeSpace::monotone_virtuals() const {
    for (int i = 0; i < num_agents(); ++i) {
        const CardinalAgent& a = agents_[i];
        for (std::size_t h = 0; h < a.horizontals.size(); ++h) {
            Rational prev;
            for (std::size_t v = 0; v < a.verticals.size(); ++v) {
                Rational nu = virtual_value(i, static_cast<int>(v), static_cast<int>(h));
                if (v > 0 && nu < prev) return false;
                prev = std::move(nu);
            }
        }
    }
    return true;
}

namespace {

Rational design_key(const CardinalTypeSpace& space, const TStarElem& e) {
    const int v = space.vertical_of(e.agent, e.type);
    const int h = space.horizontal_of(e.agent, e.type);
    return space.virtual_value(e.agent, v, h) * space.item_value(e.agent, h, e.item);
}

} // namespace

PriorityOrder design_order(const CardinalTypeSpace& space, const std::vector<int>& base_priority) {
    const Instance& inst = space.instance();
    if (static_cast<int>(base_priority.size()) != inst.num_agents())
        throw InputError("base priority must order all agents");
    std::vector<int> base_pos(inst.num_agents());
    for (int pos = 0; pos < inst.num_agents(); ++pos) base_pos[base_priority[pos]] = pos;

    std::vector<Rational> keys(inst.tstar_size());
    for (int k = 0; k < inst.tstar_size(); ++k)
        keys[k] = design_key(space, inst.tstar_elem(k));

    std::vector<int> order(inst.tstar_size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (keys[a] != keys[b]) return keys[a] > keys[b];
        const TStarElem& ea = inst.tstar_elem(a);
        const TStarElem& eb = inst.tstar_elem(b);
        if (ea.agent != eb.agent) return base_pos[ea.agent] < base_pos[eb.agent];
        if (ea.item != eb.item) return ea.item < eb.item;
        return ea.type < eb.type;
    });
    return PriorityOrder::of(std::move(order));
}

TSubset design_active_set(const CardinalTypeSpace& space) {
    const Instance& inst = space.instance();
    require_mask_capacity(inst.tstar_size(), "T*");
    TSubset active = 0;
    for (int k = 0; k < inst.tstar_size(); ++k)
        if (design_key(space, inst.tstar_elem(k)) >= 0) active |= TSubset(1) << k;
    return active;
}

std::vector<int> serial_dictatorship_run(const CardinalTypeSpace& space,
                                         const std::vector<int>& horizontal_profile,
                                         const std::vector<int>& agent_order) {
    std::vector<int> match(space.num_agents(), -1);
    std::vector<char> taken(space.num_items(), 0);
    for (int i : agent_order) {
        const auto& ranking = space.agent(i).horizontals[horizontal_profile[i]];
        for (int item : ranking) {
            if (taken[item]) continue;
            taken[item] = 1;
            match[i] = item;
            break;
        }
    }
    return match;
}

namespace {

// Matched item per agent for an integral state row; throws on fractions.
std::vector<int> state_matching(const AllocationRule& q, const Instance& inst, int state) {
    std::vector<int> match(inst.num_agents(), -1);
    for (int i = 0; i < inst.num_agents(); ++i) {
        for (int n = 0; n < inst.num_items(); ++n) {
            const Rational& v = q.at(state, inst.unit_index(i, n));
            if (v == 0) continue;
            if (v != 1 || match[i] >= 0)
                throw InputError("allocation rule is not an integral matching");
            match[i] = n;
        }
    }
    return match;
}

} // namespace

bool is_type_specific_sd(const AllocationRule& q, const CardinalTypeSpace& space) {
    const Instance& inst = space.instance();
    if (inst.num_agents() > 5)
        throw CapExceeded("serial dictatorship search capped at 5 agents");

    // Group states by vertical profile.
    std::vector<int> vcount(inst.num_agents());
    int vprofiles = 1;
    for (int i = 0; i < inst.num_agents(); ++i) {
        vcount[i] = static_cast<int>(space.agent(i).verticals.size());
        vprofiles *= vcount[i];
    }
    std::vector<std::vector<int>> orders = all_permutations(inst.num_agents());

    for (int vp = 0; vp < vprofiles; ++vp) {
        std::vector<int> verticals(inst.num_agents());
        int rem = vp;
        for (int i = 0; i < inst.num_agents(); ++i) {
            verticals[i] = rem % vcount[i];
            rem /= vcount[i];
        }
        std::vector<int> states;
        for (int s = 0; s < inst.num_states(); ++s) {
            bool in = true;
            for (int i = 0; i < inst.num_agents() && in; ++i)
                in = space.vertical_of(i, inst.state_type(s, i)) == verticals[i];
            if (in) states.push_back(s);
        }
        bool found = false;
        for (const auto& order : orders) {
            bool all = true;
            for (int s : states) {
                std::vector<int> hp(inst.num_agents());
                for (int i = 0; i < inst.num_agents(); ++i)
                    hp[i] = space.horizontal_of(i, inst.state_type(s, i));
                if (serial_dictatorship_run(space, hp, order) != state_matching(q, inst, s)) {
                    all = false;
                    break;
                }
            }
            if (all) { found = true; break; }
        }
        if (!found) return false;
    }
    return true;
}

namespace {

// Quality (reported-h value of the assigned item) of agent i in a state.
Rational state_quality(const AllocationRule& q, const CardinalTypeSpace& space, int state,
                       int agent) {
    const Instance& inst = space.instance();
    const int h = space.horizontal_of(agent, inst.state_type(state, agent));
    std::vector<int> match = state_matching(q, inst, state);
    return match[agent] < 0 ? Rational(0) : space.item_value(agent, h, match[agent]);
}

// Interim item distribution of agent i reporting `type`.
std::vector<Rational> interim_items(const AllocationRule& q, const CardinalTypeSpace& space,
                                    int agent, int type) {
    const Instance& inst = space.instance();
    std::vector<Rational> dist(inst.num_items(), Rational(0));
    for (int s = 0; s < inst.num_states(); ++s) {
        if (inst.prob(s) == 0 || inst.state_type(s, agent) != type) continue;
        const Rational c = inst.conditional(s, agent);
        for (int n = 0; n < inst.num_items(); ++n) {
            const Rational& v = q.at(s, inst.unit_index(agent, n));
            if (v != 0) dist[n] += c * v;
        }
    }
    return dist;
}

Rational valued_at(const CardinalTypeSpace& space, int agent, int h_idx,
                   const std::vector<Rational>& item_dist) {
    Rational v = 0;
    for (int n = 0; n < space.num_items(); ++n)
        if (item_dist[n] != 0) v += space.item_value(agent, h_idx, n) * item_dist[n];
    return v;
}

} // namespace

PaymentRule payments_for(const AllocationRule& q, const CardinalTypeSpace& space,
                         CardinalMode mode) {
    const Instance& inst = space.instance();
    PaymentRule out;
    out.mode = mode;
    if (mode == CardinalMode::KnownH) {
        out.by_state.assign(inst.num_states(),
                            std::vector<Rational>(inst.num_agents(), Rational(0)));
        for (int s = 0; s < inst.num_states(); ++s) {
            for (int i = 0; i < inst.num_agents(); ++i) {
                const int type = inst.state_type(s, i);
                const int h = space.horizontal_of(i, type);
                const int own_v = space.vertical_of(i, type);
                const auto& verticals = space.agent(i).verticals;
                Rational payment = 0, prev_quality = 0;
                for (int j = 0; j <= own_v; ++j) {
                    const int report = space.type_of(i, j, h);
                    Rational quality = state_quality(q, space, inst.state_with(s, i, report), i);
                    if (quality < prev_quality)
                        throw InputError("allocation quality not monotone in the vertical type");
                    payment += verticals[j] * (quality - prev_quality);
                    prev_quality = std::move(quality);
                }
                out.by_state[s][i] = std::move(payment);
            }
        }
        return out;
    }

    // UnknownH: interim thresholds; under independence + uniform horizontals
    // the tables coincide across horizontal reports.
    out.interim.assign(inst.num_agents(), {});
    for (int i = 0; i < inst.num_agents(); ++i) {
        out.interim[i].assign(inst.num_types(i), Rational(0));
        const auto& verticals = space.agent(i).verticals;
        for (std::size_t h = 0; h < space.agent(i).horizontals.size(); ++h) {
            Rational payment = 0, prev_quality = 0;
            for (std::size_t j = 0; j < verticals.size(); ++j) {
                const int report = space.type_of(i, static_cast<int>(j), static_cast<int>(h));
                Rational quality = valued_at(space, i, static_cast<int>(h),
                                             interim_items(q, space, i, report));
                if (quality < prev_quality)
                    throw InputError("interim quality not monotone in the vertical type");
                payment += verticals[j] * (quality - prev_quality);
                prev_quality = std::move(quality);
                out.interim[i][report] = payment;
            }
        }
    }
    return out;
}

IcCheck ic_check(const AllocationRule& q, const PaymentRule& p, const CardinalTypeSpace& space,
                 CardinalMode mode) {
    const Instance& inst = space.instance();
    if (mode == CardinalMode::KnownH) {
        for (int s = 0; s < inst.num_states(); ++s) {
            for (int i = 0; i < inst.num_agents(); ++i) {
                const int type = inst.state_type(s, i);
                const int h = space.horizontal_of(i, type);
                const Rational& v_true = space.agent(i).verticals[space.vertical_of(i, type)];
                const Rational truthful = v_true * state_quality(q, space, s, i) -
                                          p.by_state[s][i];
                for (std::size_t j = 0; j < space.agent(i).verticals.size(); ++j) {
                    const int report = space.type_of(i, static_cast<int>(j), h);
                    if (report == type) continue;
                    const int s2 = inst.state_with(s, i, report);
                    const Rational deviant =
                        v_true * state_quality(q, space, s2, i) - p.by_state[s2][i];
                    if (deviant > truthful) return {false, i, s, type, report};
                }
            }
        }
        return {};
    }

    for (int i = 0; i < inst.num_agents(); ++i) {
        // Interim quantities are type-to-type; cache item distributions.
        std::vector<std::vector<Rational>> dist(inst.num_types(i));
        for (int ty = 0; ty < inst.num_types(i); ++ty)
            dist[ty] = interim_items(q, space, i, ty);
        for (int ty = 0; ty < inst.num_types(i); ++ty) {
            const int h_true = space.horizontal_of(i, ty);
            const Rational& v_true = space.agent(i).verticals[space.vertical_of(i, ty)];
            const Rational truthful =
                v_true * valued_at(space, i, h_true, dist[ty]) - p.interim[i][ty];
            for (int rep = 0; rep < inst.num_types(i); ++rep) {
                if (rep == ty) continue;
                const Rational deviant =
                    v_true * valued_at(space, i, h_true, dist[rep]) - p.interim[i][rep];
                if (deviant > truthful) return {false, i, -1, ty, rep};
            }
        }
    }
    return {};
}

TwoApproxCheck revenue_2approx_check(const CardinalTypeSpace& space,
                                     const std::vector<int>& base_priority) {
    const Instance& inst = space.instance();
    if (!space.monotone_virtuals())
        throw InputError("virtual values must be monotone in the vertical type");
    const PriorityOrder order = design_order(space, base_priority);
    const TSubset active = design_active_set(space);
    GreedyMatching greedy = greedy_matching(order, inst, active);

    TwoApproxCheck out;
    out.surplus = 0;
    out.welfare = 0;
    for (int k = 0; k < inst.tstar_size(); ++k) {
        if (greedy.interim[k] == 0) continue;
        const TStarElem& e = inst.tstar_elem(k);
        const Rational mass = greedy.interim[k] * inst.tstar_marginal(k);
        out.surplus += mass * design_key(space, e);
        const int h = space.horizontal_of(e.agent, e.type);
        const Rational& v = space.agent(e.agent).verticals[space.vertical_of(e.agent, e.type)];
        out.welfare += mass * v * space.item_value(e.agent, h, e.item);
    }

    ExPostPolytope poly = ExPostPolytope::matching(inst.num_agents(), inst.num_items());
    out.surplus_benchmark = 0;
    out.welfare_benchmark = 0;
    for (int s = 0; s < inst.num_states(); ++s) {
        if (inst.prob(s) == 0) continue;
        GammaVector nu_weights(inst.num_units()), value_weights(inst.num_units());
        for (int i = 0; i < inst.num_agents(); ++i) {
            const int type = inst.state_type(s, i);
            const int h = space.horizontal_of(i, type);
            const Rational& v = space.agent(i).verticals[space.vertical_of(i, type)];
            const Rational nu = space.virtual_value(i, space.vertical_of(i, type), h);
            for (int n = 0; n < inst.num_items(); ++n) {
                const Rational hv = space.item_value(i, h, n);
                if (nu > 0) nu_weights[inst.unit_index(i, n)] = nu * hv;
                value_weights[inst.unit_index(i, n)] = v * hv;
            }
        }
        out.surplus_benchmark += inst.prob(s) * poly.maximize_linear(s, nu_weights).value;
        out.welfare_benchmark += inst.prob(s) * poly.maximize_linear(s, value_weights).value;
    }
    out.surplus_pass = 2 * out.surplus >= out.surplus_benchmark;
    out.surplus_ratio =
        out.surplus_benchmark == 0 ? Rational(1) : out.surplus / out.surplus_benchmark;
    out.welfare_ratio =
        out.welfare_benchmark == 0 ? Rational(1) : out.welfare / out.welfare_benchmark;
    return out;
}

} // namespace interim
