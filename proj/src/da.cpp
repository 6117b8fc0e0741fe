#include "interim/da.hpp"

#include <algorithm>
#include <numeric>

namespace interim {

namespace {

void require_ordinal(const Instance& inst) {
    if (inst.kind() != Kind::Matching || !inst.has_rankings())
        throw InputError("operation requires a matching instance with item rankings");
}

// Position of an item in a best-first ranking; unmatched (-1) ranks last.
int pref_rank(const std::vector<int>& ranking, int item) {
    if (item < 0) return static_cast<int>(ranking.size());
    auto it = std::find(ranking.begin(), ranking.end(), item);
    return static_cast<int>(it - ranking.begin());
}

} // namespace

PrincipalPriority::PrincipalPriority(PriorityOrder order, const Instance& inst)
    : order_(std::move(order)) {
    if (inst.kind() != Kind::Matching)
        throw InputError("principal priorities require a matching instance");
    if (order_.size() != inst.tstar_size())
        throw InputError("priority order must cover all of T*");
    GreedyMatching greedy = greedy_matching(order_, inst);
    blocked_.assign(inst.tstar_size(), 1);
    for (int k = 0; k < inst.tstar_size(); ++k) {
        for (int s = 0; s < inst.num_states(); ++s) {
            if (inst.prob(s) == 0 || !inst.realized(k, s)) continue;
            if (greedy.rule.at(s, inst.tstar_unit(k)) == 1) {
                blocked_[k] = 0;
                break;
            }
        }
    }
}

WelfaristCheck is_welfarist(const PrincipalPriority& p, const Instance& inst) {
    require_ordinal(inst);
    const PriorityOrder& r = p.order();
    for (int k = 0; k < inst.tstar_size(); ++k) {
        if (p.blocked(k)) continue;
        const TStarElem& hi = inst.tstar_elem(k);
        const std::vector<int>& ranking = inst.ranking(hi.agent, hi.type);
        for (int l = 0; l < inst.tstar_size(); ++l) {
            const TStarElem& lo = inst.tstar_elem(l);
            if (l == k || lo.agent != hi.agent || lo.type != hi.type) continue;
            if (r.position[k] < r.position[l] &&
                pref_rank(ranking, hi.item) > pref_rank(ranking, lo.item))
                return {false, k, l};
        }
    }
    return {};
}

ItemRankingCheck is_item_ranking_consistent(const PrincipalPriority& p, const Instance& inst) {
    if (inst.kind() != Kind::Matching)
        throw InputError("item rankings require a matching instance");
    const PriorityOrder& r = p.order();
    ItemRankingCheck out;
    out.rankings.assign(inst.num_items(), {});
    for (int n = 0; n < inst.num_items(); ++n) {
        // Best unblocked / worst arbitrary position per agent for this item.
        const int inf = inst.tstar_size() + 1;
        std::vector<int> best_unblocked(inst.num_agents(), inf);
        std::vector<int> best_unblocked_idx(inst.num_agents(), -1);
        std::vector<int> worst_any(inst.num_agents(), -1);
        std::vector<int> worst_any_idx(inst.num_agents(), -1);
        for (int k = 0; k < inst.tstar_size(); ++k) {
            const TStarElem& e = inst.tstar_elem(k);
            if (e.item != n) continue;
            if (!p.blocked(k) && r.position[k] < best_unblocked[e.agent]) {
                best_unblocked[e.agent] = r.position[k];
                best_unblocked_idx[e.agent] = k;
            }
            if (r.position[k] > worst_any[e.agent]) {
                worst_any[e.agent] = r.position[k];
                worst_any_idx[e.agent] = k;
            }
        }
        for (int i = 0; i < inst.num_agents(); ++i) {
            if (best_unblocked_idx[i] < 0) continue;
            for (int j = 0; j < inst.num_agents(); ++j) {
                if (j == i || worst_any_idx[j] < 0) continue;
                // Some unblocked (i,.,n) above some (j,.,n) forces every
                // (i,.,n) above every unblocked (j,.,n).
                if (best_unblocked[i] < worst_any[j] && best_unblocked_idx[j] >= 0 &&
                    worst_any[i] > best_unblocked[j]) {
                    out.ok = false;
                    out.item = n;
                    out.t1 = best_unblocked_idx[i];
                    out.t2 = worst_any_idx[j];
                    out.t3 = worst_any_idx[i];
                    out.t4 = best_unblocked_idx[j];
                    return out;
                }
            }
        }
        std::vector<int> with, without;
        for (int i = 0; i < inst.num_agents(); ++i)
            (best_unblocked_idx[i] >= 0 ? with : without).push_back(i);
        std::sort(with.begin(), with.end(),
                  [&](int a, int b) { return best_unblocked[a] < best_unblocked[b]; });
        out.rankings[n] = std::move(with);
        for (int i : without) out.rankings[n].push_back(i);
    }
    return out;
}

std::vector<int> deferred_acceptance(const std::vector<std::vector<int>>& prefs,
                                     const std::vector<std::vector<int>>& priorities) {
    const int num_agents = static_cast<int>(prefs.size());
    const int num_items = static_cast<int>(priorities.size());
    std::vector<std::vector<int>> prio_pos(num_items, std::vector<int>(num_agents, num_agents));
    for (int n = 0; n < num_items; ++n)
        for (int pos = 0; pos < static_cast<int>(priorities[n].size()); ++pos)
            prio_pos[n][priorities[n][pos]] = pos;

    std::vector<int> next(num_agents, 0), match_agent(num_agents, -1),
        match_item(num_items, -1);
    for (;;) {
        int proposer = -1;
        for (int i = 0; i < num_agents; ++i) {
            if (match_agent[i] < 0 && next[i] < static_cast<int>(prefs[i].size())) {
                proposer = i;
                break;
            }
        }
        if (proposer < 0) break;
        const int n = prefs[proposer][next[proposer]++];
        const int holder = match_item[n];
        if (holder < 0) {
            match_item[n] = proposer;
            match_agent[proposer] = n;
        } else if (prio_pos[n][proposer] < prio_pos[n][holder]) {
            match_item[n] = proposer;
            match_agent[proposer] = n;
            match_agent[holder] = -1;
        }
    }
    return match_agent;
}

bool is_stable(const std::vector<int>& match_agent, const std::vector<std::vector<int>>& prefs,
               const std::vector<std::vector<int>>& priorities) {
    const int num_agents = static_cast<int>(prefs.size());
    const int num_items = static_cast<int>(priorities.size());
    std::vector<int> match_item(num_items, -1);
    for (int i = 0; i < num_agents; ++i)
        if (match_agent[i] >= 0) match_item[match_agent[i]] = i;
    std::vector<std::vector<int>> prio_pos(num_items, std::vector<int>(num_agents, num_agents));
    for (int n = 0; n < num_items; ++n)
        for (int pos = 0; pos < static_cast<int>(priorities[n].size()); ++pos)
            prio_pos[n][priorities[n][pos]] = pos;
    for (int i = 0; i < num_agents; ++i) {
        const int own_rank = pref_rank(prefs[i], match_agent[i]);
        for (int n = 0; n < num_items; ++n) {
            if (pref_rank(prefs[i], n) >= own_rank) continue;
            const int holder = match_item[n];
            if (holder < 0 || prio_pos[n][i] < prio_pos[n][holder]) return false;
        }
    }
    return true;
}

std::vector<std::vector<int>> enumerate_stable_matchings(
    const std::vector<std::vector<int>>& prefs,
    const std::vector<std::vector<int>>& priorities) {
    const int num_agents = static_cast<int>(prefs.size());
    const int num_items = static_cast<int>(priorities.size());
    if (num_agents > 4 || num_items > 4)
        throw CapExceeded("stable matching enumeration capped at 4x4");
    std::vector<std::vector<int>> stable;
    std::vector<int> match(num_agents, -1);
    std::vector<char> used(num_items, 0);
    auto rec = [&](auto&& self, int agent) -> void {
        if (agent == num_agents) {
            if (is_stable(match, prefs, priorities)) stable.push_back(match);
            return;
        }
        self(self, agent + 1);
        for (int n = 0; n < num_items; ++n) {
            if (used[n]) continue;
            used[n] = 1;
            match[agent] = n;
            self(self, agent + 1);
            match[agent] = -1;
            used[n] = 0;
        }
    };
    rec(rec, 0);
    return stable;
}

GreedyDaCheck greedy_equals_da(const PrincipalPriority& p, const Instance& inst) {
    require_ordinal(inst);
    if (!is_welfarist(p, inst).ok)
        throw InputError("greedy/DA equivalence requires a welfarist priority order");
    ItemRankingCheck rankings = is_item_ranking_consistent(p, inst);
    if (!rankings.ok)
        throw InputError("greedy/DA equivalence requires item-ranking consistency");

    const bool enumerate = inst.num_agents() <= 4 && inst.num_items() <= 4;
    GreedyDaCheck out;
    for (int s = 0; s < inst.num_states(); ++s) {
        std::vector<std::vector<int>> prefs(inst.num_agents());
        for (int i = 0; i < inst.num_agents(); ++i)
            prefs[i] = inst.ranking(i, inst.state_type(s, i));
        std::vector<int> greedy = greedy_state_assignment(p.order(), inst, s, ~TSubset(0));
        std::vector<int> da = deferred_acceptance(prefs, rankings.rankings);
        if (greedy != da) {
            out.equal = false;
            out.state = s;
            return out;
        }
        if (!is_stable(greedy, prefs, rankings.rankings)) {
            out.stable = false;
            out.state = s;
            return out;
        }
        if (enumerate) {
            for (const std::vector<int>& other :
                 enumerate_stable_matchings(prefs, rankings.rankings)) {
                for (int i = 0; i < inst.num_agents(); ++i) {
                    if (pref_rank(prefs[i], greedy[i]) > pref_rank(prefs[i], other[i])) {
                        out.agent_optimal = false;
                        out.state = s;
                        return out;
                    }
                }
            }
        }
    }
    return out;
}

TruthfulnessCheck truthful_dominant(const PrincipalPriority& p, const Instance& inst) {
    require_ordinal(inst);
    for (int s = 0; s < inst.num_states(); ++s) {
        for (int i = 0; i < inst.num_agents(); ++i) {
            const int truth = inst.state_type(s, i);
            const std::vector<int>& ranking = inst.ranking(i, truth);
            std::vector<int> honest = greedy_state_assignment(p.order(), inst, s, ~TSubset(0));
            for (int lie = 0; lie < inst.num_types(i); ++lie) {
                if (lie == truth) continue;
                std::vector<int> devious = greedy_state_assignment(
                    p.order(), inst, inst.state_with(s, i, lie), ~TSubset(0));
                if (pref_rank(ranking, devious[i]) < pref_rank(ranking, honest[i]))
                    return {false, i, s, lie};
            }
        }
    }
    return {};
}

PiecewiseLinear PiecewiseLinear::identity() {
    return {{{Rational(0), Rational(0)}, {Rational(1), Rational(1)}}};
}

Rational PiecewiseLinear::eval(const Rational& x) const {
    if (breakpoints.empty() || breakpoints.front().first != 0 ||
        breakpoints.front().second != 0)
        throw InputError("piecewise-linear transform must start at (0,0)");
    if (x < 0) throw InputError("piecewise-linear transform evaluated below zero");
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (x <= breakpoints[i + 1].first) {
            const auto& [x0, y0] = breakpoints[i];
            const auto& [x1, y1] = breakpoints[i + 1];
            return y0 + (x - x0) * (y1 - y0) / (x1 - x0);
        }
    }
    if (breakpoints.size() == 1) return 0;
    const auto& [x0, y0] = breakpoints[breakpoints.size() - 2];
    const auto& [x1, y1] = breakpoints.back();
    return y1 + (x - x1) * (y1 - y0) / (x1 - x0);
}

bool PiecewiseLinear::increasing_concave_from_zero() const {
    if (breakpoints.empty() || breakpoints.front() != std::pair{Rational(0), Rational(0)})
        return false;
    Rational prev_slope;
    bool have_prev = false;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const auto& [x0, y0] = breakpoints[i];
        const auto& [x1, y1] = breakpoints[i + 1];
        if (x1 <= x0 || y1 < y0) return false;
        Rational slope = (y1 - y0) / (x1 - x0);
        if (have_prev && slope > prev_slope) return false;
        prev_slope = std::move(slope);
        have_prev = true;
    }
    return true;
}

std::vector<std::pair<Rational, Rational>> PiecewiseLinear::pieces() const {
    std::vector<std::pair<Rational, Rational>> out;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const auto& [x0, y0] = breakpoints[i];
        const auto& [x1, y1] = breakpoints[i + 1];
        Rational slope = (y1 - y0) / (x1 - x0);
        out.emplace_back(slope, y0 - slope * x0);
    }
    if (out.empty()) out.emplace_back(Rational(0), Rational(0));
    return out;
}

Objective Objective::utilitarian(std::vector<Rational> weights) {
    Objective o;
    o.kind = Kind::Utilitarian;
    o.weights = std::move(weights);
    return o;
}

Objective Objective::rank_dependent(std::vector<Rational> weights, PiecewiseLinear f) {
    Objective o;
    o.kind = Kind::RankDependent;
    o.weights = std::move(weights);
    o.transform = std::move(f);
    if (!o.transform.increasing_concave_from_zero())
        throw InputError("rank-dependent transform must be increasing, concave, with f(0)=0");
    return o;
}

Objective Objective::max_min(std::vector<std::vector<Rational>> members) {
    if (members.empty()) throw InputError("max-min objective needs at least one member");
    Objective o;
    o.kind = Kind::MaxMin;
    o.weight_set = std::move(members);
    return o;
}

namespace {

Rational utilitarian_value(const std::vector<Rational>& weights, const InterimAllocation& q,
                           const Instance& inst) {
    Rational v = 0;
    for (int k = 0; k < inst.tstar_size(); ++k)
        if (weights[k] != 0 && q[k] != 0) v += weights[k] * q[k] * inst.tstar_marginal(k);
    return v;
}

// T* indices in decreasing-weight order, ties by index.
std::vector<int> weight_order(const std::vector<Rational>& weights) {
    std::vector<int> idx(weights.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return weights[a] > weights[b]; });
    return idx;
}

} // namespace

Rational evaluate_objective(const Objective& obj, const InterimAllocation& q,
                            const Instance& inst) {
    switch (obj.kind) {
        case Objective::Kind::Utilitarian:
            return utilitarian_value(obj.weights, q, inst);
        case Objective::Kind::RankDependent: {
            std::vector<int> idx = weight_order(obj.weights);
            Rational value = 0, prefix = 0;
            for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
                prefix += q[idx[k]] * inst.tstar_marginal(idx[k]);
                const Rational gap = obj.weights[idx[k]] - obj.weights[idx[k + 1]];
                if (gap != 0) value += gap * obj.transform.eval(prefix);
            }
            return value;
        }
        case Objective::Kind::MaxMin: {
            Rational best;
            bool first = true;
            for (const auto& member : obj.weight_set) {
                Rational v = utilitarian_value(member, q, inst);
                if (first || v < best) best = std::move(v);
                first = false;
            }
            return best;
        }
    }
    throw InputError("unknown objective");
}

bool comonotone(const std::vector<Rational>& a, const std::vector<Rational>& b) {
    for (std::size_t k = 0; k < a.size(); ++k)
        for (std::size_t l = k + 1; l < a.size(); ++l)
            if ((a[k] < a[l] && b[k] > b[l]) || (a[k] > a[l] && b[k] < b[l])) return false;
    return true;
}

namespace {

bool nonneg_decreasing_along(const std::vector<Rational>& weights, const PriorityOrder& order) {
    Rational prev;
    bool have_prev = false;
    for (int pos = 0; pos < order.size(); ++pos) {
        const Rational& w = weights[order.order[pos]];
        if (w < 0) return false;
        if (have_prev && w > prev) return false;
        prev = w;
        have_prev = true;
    }
    return true;
}

} // namespace

bool fosd_monotone_for(const Objective& obj, const PriorityOrder& order, const Instance& inst) {
    if (order.size() != inst.tstar_size()) return false;
    switch (obj.kind) {
        case Objective::Kind::Utilitarian:
            return nonneg_decreasing_along(obj.weights, order);
        case Objective::Kind::RankDependent:
            return obj.transform.increasing_concave_from_zero() &&
                   nonneg_decreasing_along(obj.weights, order);
        case Objective::Kind::MaxMin: {
            for (const auto& member : obj.weight_set)
                if (!nonneg_decreasing_along(member, order)) return false;
            for (std::size_t a = 0; a < obj.weight_set.size(); ++a)
                for (std::size_t b = a + 1; b < obj.weight_set.size(); ++b)
                    if (!comonotone(obj.weight_set[a], obj.weight_set[b])) return false;
            return true;
        }
    }
    return false;
}

namespace {

// LP benchmark: maximize the objective over all realizable interim
// allocations, with epigraph rows for the concave pieces.
Rational lp_benchmark(const Objective& obj, const Instance& inst, const ExPostPolytope& poly) {
    std::vector<int> live_states;
    for (int s = 0; s < inst.num_states(); ++s)
        if (inst.prob(s) != 0) live_states.push_back(s);
    const int units = inst.num_units();
    const int base_vars = static_cast<int>(live_states.size()) * units;
    std::vector<int> var_base(inst.num_states(), -1);
    for (std::size_t idx = 0; idx < live_states.size(); ++idx)
        var_base[live_states[idx]] = static_cast<int>(idx) * units;

    int extra = 0;
    std::vector<int> idx;  // RankDependent weight order
    if (obj.kind == Objective::Kind::RankDependent) {
        idx = weight_order(obj.weights);
        extra = std::max(0, static_cast<int>(idx.size()) - 1);
    } else if (obj.kind == Objective::Kind::MaxMin) {
        extra = 1;
    }

    LinearProgram lp(base_vars + extra);
    for (int s : live_states) {
        for (const Halfspace& h : poly.halfspaces(s)) {
            std::vector<Rational> row(lp.num_vars, Rational(0));
            for (int u = 0; u < units; ++u)
                if (h.coeffs[u] != 0) row[var_base[s] + u] = h.coeffs[u];
            lp.add_row(std::move(row), Relation::LessEq, h.rhs * inst.prob(s));
        }
    }
    // X_k = sum over states of x_s(unit_k) equals Q_k mu_k.
    auto add_mass = [&](std::vector<Rational>& row, int k, const Rational& coeff) {
        for (int s : live_states)
            if (inst.realized(k, s)) row[var_base[s] + inst.tstar_unit(k)] += coeff;
    };

    switch (obj.kind) {
        case Objective::Kind::Utilitarian: {
            for (int k = 0; k < inst.tstar_size(); ++k)
                add_mass(lp.objective, k, obj.weights[k]);
            break;
        }
        case Objective::Kind::RankDependent: {
            const auto pieces = obj.transform.pieces();
            for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
                const int zk = base_vars + static_cast<int>(k);
                for (const auto& [slope, intercept] : pieces) {
                    std::vector<Rational> row(lp.num_vars, Rational(0));
                    row[zk] = 1;
                    for (std::size_t j = 0; j <= k; ++j) add_mass(row, idx[j], -slope);
                    lp.add_row(std::move(row), Relation::LessEq, intercept);
                }
                lp.objective[zk] = obj.weights[idx[k]] - obj.weights[idx[k + 1]];
            }
            break;
        }
        case Objective::Kind::MaxMin: {
            const int m = base_vars;
            for (const auto& member : obj.weight_set) {
                std::vector<Rational> row(lp.num_vars, Rational(0));
                row[m] = 1;
                for (int k = 0; k < inst.tstar_size(); ++k)
                    add_mass(row, k, -member[k]);
                lp.add_row(std::move(row), Relation::LessEq, Rational(0));
            }
            lp.objective[m] = 1;
            break;
        }
    }
    LpResult res = solve(lp);
    if (res.status != LpStatus::Optimal)
        throw InputError("benchmark LP did not solve");
    return res.value;
}

} // namespace

GuaranteeCheck da_guarantee_check(const Objective& obj, const PrincipalPriority& p,
                                  const Instance& inst) {
    if (!fosd_monotone_for(obj, p.order(), inst))
        throw InputError("objective is not certified monotone along the priority order");
    ExPostPolytope poly = ExPostPolytope::matching(inst.num_agents(), inst.num_items());

    GuaranteeCheck out;
    out.value = evaluate_objective(obj, greedy_matching(p.order(), inst).interim, inst);

    if (obj.kind == Objective::Kind::Utilitarian) {
        // Full information: best matching state by state.
        out.benchmark = 0;
        for (int s = 0; s < inst.num_states(); ++s) {
            if (inst.prob(s) == 0) continue;
            GammaVector gamma(inst.num_units());
            for (int k = 0; k < inst.tstar_size(); ++k)
                if (inst.realized(k, s)) gamma[inst.tstar_unit(k)] = obj.weights[k];
            out.benchmark += inst.prob(s) * poly.maximize_linear(s, gamma).value;
        }
    } else {
        out.benchmark = lp_benchmark(obj, inst, poly);
    }
    out.pass = 2 * out.value >= out.benchmark;
    out.ratio = out.benchmark == 0 ? Rational(1) : out.value / out.benchmark;
    return out;
}

} // namespace interim
