#include "interim/polytopes.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace interim {

namespace {

constexpr int kMaxSubsetUnits = 20;      // 2^U membership / submodularity scans
constexpr int kMaxHalfspaceUnits = 16;   // emitting all subset rows
constexpr int kMaxVertexUnits = 12;
constexpr std::size_t kVertexWorkCap = 2'000'000;

// Exact solve of a dense square system; nullopt when singular.
std::optional<std::vector<Rational>> gauss_solve(std::vector<std::vector<Rational>> a,
                                                 std::vector<Rational> b) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int r = col; r < n; ++r)
            if (a[r][col] != 0) { pivot = r; break; }
        if (pivot < 0) return std::nullopt;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        const Rational p = a[col][col];
        for (int j = col; j < n; ++j) a[col][j] /= p;
        b[col] /= p;
        for (int r = 0; r < n; ++r) {
            if (r == col || a[r][col] == 0) continue;
            const Rational f = a[r][col];
            for (int j = col; j < n; ++j) a[r][j] -= f * a[col][j];
            b[r] -= f * b[col];
        }
    }
    return b;
}

} // namespace

Rational ConstraintFunction::value(UnitSet a, int state) const {
    if (!fn_) throw InputError("constraint function not set");
    const int key_state = state_invariant_ ? 0 : state;
    {
        std::lock_guard lock(memo_->mutex);
        auto it = memo_->values.find({a, key_state});
        if (it != memo_->values.end()) return it->second;
    }
    Rational v = fn_(a, state);
    if (a == 0 && v != 0) throw InputError("constraint function must vanish on the empty set");
    std::lock_guard lock(memo_->mutex);
    return memo_->values.emplace(std::make_pair(a, key_state), std::move(v)).first->second;
}

ExPostPolytope ExPostPolytope::polymatroid(ConstraintFunction c) {
    ExPostPolytope p;
    p.variant_ = Variant::Polymatroid;
    p.num_units_ = c.num_units();
    p.constraint_ = std::move(c);
    return p;
}

ExPostPolytope ExPostPolytope::matching(int num_agents, int num_items) {
    ExPostPolytope p;
    p.variant_ = Variant::Matching;
    p.num_agents_ = num_agents;
    p.num_items_ = num_items;
    p.num_units_ = num_agents * num_items;
    return p;
}

ExPostPolytope ExPostPolytope::explicit_halfspaces(int num_units, std::vector<Halfspace> shared) {
    ExPostPolytope p;
    p.variant_ = Variant::Explicit;
    p.num_units_ = num_units;
    p.explicit_.push_back(std::move(shared));
    return p;
}

ExPostPolytope ExPostPolytope::explicit_per_state(int num_units,
                                                  std::vector<std::vector<Halfspace>> per_state) {
    ExPostPolytope p;
    p.variant_ = Variant::Explicit;
    p.num_units_ = num_units;
    p.explicit_ = std::move(per_state);
    return p;
}

const ConstraintFunction& ExPostPolytope::constraint() const {
    if (variant_ != Variant::Polymatroid)
        throw InputError("constraint() is only defined for the polymatroid variant");
    return constraint_;
}

bool ExPostPolytope::contains(int state, const std::vector<Rational>& rho) const {
    if (static_cast<int>(rho.size()) != num_units_)
        throw InputError("assignment vector has wrong dimension");
    for (const Rational& v : rho)
        if (v < 0) return false;
    switch (variant_) {
        case Variant::Polymatroid: {
            if (num_units_ > kMaxSubsetUnits)
                throw CapExceeded("polymatroid membership cap (|U| <= 20) exceeded");
            for (UnitSet a = 1; a < (UnitSet(1) << num_units_); ++a) {
                Rational sum = 0;
                for (int u = 0; u < num_units_; ++u)
                    if (a >> u & 1) sum += rho[u];
                if (sum > constraint_.value(a, state)) return false;
            }
            return true;
        }
        case Variant::Matching: {
            for (int i = 0; i < num_agents_; ++i) {
                Rational sum = 0;
                for (int n = 0; n < num_items_; ++n) sum += rho[i * num_items_ + n];
                if (sum > 1) return false;
            }
            for (int n = 0; n < num_items_; ++n) {
                Rational sum = 0;
                for (int i = 0; i < num_agents_; ++i) sum += rho[i * num_items_ + n];
                if (sum > 1) return false;
            }
            return true;
        }
        case Variant::Explicit: {
            for (const Halfspace& h : halfspaces(state)) {
                Rational sum = 0;
                for (int u = 0; u < num_units_; ++u)
                    if (h.coeffs[u] != 0) sum += h.coeffs[u] * rho[u];
                if (sum > h.rhs) return false;
            }
            return true;
        }
    }
    return false;
}

std::vector<Halfspace> ExPostPolytope::halfspaces(int state) const {
    switch (variant_) {
        case Variant::Polymatroid: {
            if (num_units_ > kMaxHalfspaceUnits)
                throw CapExceeded("halfspace emission cap (|U| <= 16) exceeded");
            std::vector<Halfspace> rows;
            for (UnitSet a = 1; a < (UnitSet(1) << num_units_); ++a) {
                Halfspace h;
                h.coeffs.assign(num_units_, Rational(0));
                for (int u = 0; u < num_units_; ++u)
                    if (a >> u & 1) h.coeffs[u] = 1;
                h.rhs = constraint_.value(a, state);
                rows.push_back(std::move(h));
            }
            return rows;
        }
        case Variant::Matching: {
            std::vector<Halfspace> rows;
            for (int i = 0; i < num_agents_; ++i) {
                Halfspace h;
                h.coeffs.assign(num_units_, Rational(0));
                for (int n = 0; n < num_items_; ++n) h.coeffs[i * num_items_ + n] = 1;
                h.rhs = 1;
                rows.push_back(std::move(h));
            }
            for (int n = 0; n < num_items_; ++n) {
                Halfspace h;
                h.coeffs.assign(num_units_, Rational(0));
                for (int i = 0; i < num_agents_; ++i) h.coeffs[i * num_items_ + n] = 1;
                h.rhs = 1;
                rows.push_back(std::move(h));
            }
            return rows;
        }
        case Variant::Explicit:
            return explicit_.size() == 1 ? explicit_[0] : explicit_.at(state);
    }
    return {};
}

std::optional<SubmodularityViolation> ExPostPolytope::submodularity_violation(int state) const {
    if (variant_ != Variant::Polymatroid)
        throw InputError("submodularity is a polymatroid-variant question");
    if (num_units_ > kMaxSubsetUnits)
        throw CapExceeded("submodularity scan cap (|U| <= 20) exceeded");
    // Local characterization: C is submodular iff for every A and i,j not in
    // A, C(A+i) + C(A+j) >= C(A+i+j) + C(A).
    for (UnitSet base = 0; base < (UnitSet(1) << num_units_); ++base) {
        for (int i = 0; i < num_units_; ++i) {
            if (base >> i & 1) continue;
            for (int j = i + 1; j < num_units_; ++j) {
                if (base >> j & 1) continue;
                const UnitSet a = base | (UnitSet(1) << i);
                const UnitSet b = base | (UnitSet(1) << j);
                Rational lhs = constraint_.value(a, state) + constraint_.value(b, state);
                Rational rhs = constraint_.value(a | b, state) + constraint_.value(base, state);
                if (lhs < rhs) return SubmodularityViolation{a, b, lhs, rhs};
            }
        }
    }
    return std::nullopt;
}

bool ExPostPolytope::submodular(int state) const {
    const int key = constraint_.state_invariant() ? 0 : state;
    {
        std::lock_guard lock(submod_->mutex);
        auto it = submod_->flags.find(key);
        if (it != submod_->flags.end()) return it->second;
    }
    bool flag = !submodularity_violation(state).has_value();
    std::lock_guard lock(submod_->mutex);
    submod_->flags.emplace(key, flag);
    return flag;
}

std::pair<Rational, std::vector<Rational>>
max_weight_matching(int num_agents, int num_items, const std::vector<Rational>& weights) {
    auto w = [&](int i, int n) -> const Rational& { return weights[i * num_items + n]; };
    std::vector<int> match_agent(num_agents, -1), match_item(num_items, -1);

    // Successive max-gain augmenting paths (Bellman-Ford on the alternating
    // graph); the matching stays optimal at each cardinality, so no positive
    // alternating cycle exists and the relaxation settles.
    for (;;) {
        std::vector<char> reach_a(num_agents, 0), reach_i(num_items, 0);
        std::vector<Rational> dist_a(num_agents, Rational(0)), dist_i(num_items, Rational(0));
        std::vector<int> pred_item(num_items, -1);
        for (int i = 0; i < num_agents; ++i)
            if (match_agent[i] < 0) reach_a[i] = 1;

        for (int round = 0; round <= num_agents + num_items; ++round) {
            bool changed = false;
            for (int i = 0; i < num_agents; ++i) {
                if (!reach_a[i]) continue;
                for (int n = 0; n < num_items; ++n) {
                    if (w(i, n) <= 0 || match_agent[i] == n) continue;
                    Rational cand = dist_a[i] + w(i, n);
                    if (!reach_i[n] || cand > dist_i[n]) {
                        reach_i[n] = 1;
                        dist_i[n] = cand;
                        pred_item[n] = i;
                        changed = true;
                    }
                }
            }
            for (int n = 0; n < num_items; ++n) {
                if (!reach_i[n] || match_item[n] < 0) continue;
                const int i = match_item[n];
                Rational cand = dist_i[n] - w(i, n);
                if (!reach_a[i] || cand > dist_a[i]) {
                    reach_a[i] = 1;
                    dist_a[i] = cand;
                    changed = true;
                }
            }
            if (!changed) break;
        }

        int best_item = -1;
        for (int n = 0; n < num_items; ++n) {
            if (!reach_i[n] || match_item[n] >= 0 || dist_i[n] <= 0) continue;
            if (best_item < 0 || dist_i[n] > dist_i[best_item]) best_item = n;
        }
        if (best_item < 0) break;
        int n = best_item;
        for (;;) {
            const int i = pred_item[n];
            const int prev = match_agent[i];
            match_agent[i] = n;
            match_item[n] = i;
            if (prev < 0) break;
            n = prev;
        }
    }

    std::vector<Rational> rho(static_cast<std::size_t>(num_agents) * num_items, Rational(0));
    Rational value = 0;
    for (int i = 0; i < num_agents; ++i) {
        if (match_agent[i] < 0) continue;
        rho[i * num_items + match_agent[i]] = 1;
        value += w(i, match_agent[i]);
    }
    return {value, rho};
}

namespace {

bool kuhn_try(int i, int num_items, const std::vector<char>& edge, std::vector<char>& seen,
              std::vector<int>& match_item) {
    for (int n = 0; n < num_items; ++n) {
        if (!edge[i * num_items + n] || seen[n]) continue;
        seen[n] = 1;
        if (match_item[n] < 0 ||
            kuhn_try(match_item[n], num_items, edge, seen, match_item)) {
            match_item[n] = i;
            return true;
        }
    }
    return false;
}

} // namespace

int max_cardinality_matching(int num_agents, int num_items, UnitSet pairs) {
    std::vector<char> edge(static_cast<std::size_t>(num_agents) * num_items, 0);
    for (int i = 0; i < num_agents; ++i)
        for (int n = 0; n < num_items; ++n)
            if (pairs >> (i * num_items + n) & 1) edge[i * num_items + n] = 1;
    std::vector<int> match_item(num_items, -1);
    int size = 0;
    for (int i = 0; i < num_agents; ++i) {
        std::vector<char> seen(num_items, 0);
        if (kuhn_try(i, num_items, edge, seen, match_item)) ++size;
    }
    return size;
}

Rational ExPostPolytope::capacity(UnitSet pairs) const {
    if (variant_ != Variant::Matching)
        throw InputError("capacity is defined for the matching variant");
    require_mask_capacity(num_units_, "units");
    {
        std::lock_guard lock(capacity_->mutex);
        auto it = capacity_->values.find(pairs);
        if (it != capacity_->values.end()) return it->second;
    }
    Rational v(max_cardinality_matching(num_agents_, num_items_, pairs));
    std::lock_guard lock(capacity_->mutex);
    return capacity_->values.emplace(pairs, std::move(v)).first->second;
}

LinearMaxResult ExPostPolytope::maximize_linear(int state, const GammaVector& gamma) const {
    if (gamma.size() != num_units_)
        throw InputError("weight vector has wrong dimension");
    switch (variant_) {
        case Variant::Matching: {
            auto [value, rho] = max_weight_matching(num_agents_, num_items_, gamma.values);
            return {value, rho};
        }
        case Variant::Polymatroid: {
            if (submodular(state)) {
                // Greedy over strictly positive weights in decreasing order.
                std::vector<int> order;
                for (int u = 0; u < num_units_; ++u)
                    if (gamma[u] > 0) order.push_back(u);
                std::stable_sort(order.begin(), order.end(),
                                 [&](int a, int b) { return gamma[a] > gamma[b]; });
                std::vector<Rational> rho(num_units_, Rational(0));
                UnitSet prefix = 0;
                Rational prev = 0, value = 0;
                bool monotone = true;
                for (int u : order) {
                    prefix |= UnitSet(1) << u;
                    Rational cur = constraint_.value(prefix, state);
                    rho[u] = cur - prev;
                    if (rho[u] < 0) { monotone = false; break; }
                    value += gamma[u] * rho[u];
                    prev = cur;
                }
                if (monotone) return {value, rho};
                // Submodular but not monotone: fall through to the LP.
            }
            break;
        }
        case Variant::Explicit:
            break;
    }
    // LP route over the halfspace description.
    LinearProgram lp(num_units_);
    lp.objective = gamma.values;
    for (Halfspace& h : [&] { return halfspaces(state); }())
        lp.add_row(std::move(h.coeffs), Relation::LessEq, std::move(h.rhs));
    LpResult res = solve(lp);
    if (res.status == LpStatus::Unbounded)
        throw InputError("ex-post polytope is unbounded");
    if (res.status != LpStatus::Optimal)
        throw InputError("ex-post polytope is empty");
    return {res.value, res.primal};
}

std::vector<std::vector<Rational>> ExPostPolytope::extreme_points(int state) const {
    if (num_units_ > kMaxVertexUnits)
        throw CapExceeded("vertex enumeration cap (|U| <= 12) exceeded");
    switch (variant_) {
        case Variant::Matching: {
            // All partial permutation matrices.
            std::vector<std::vector<Rational>> out;
            std::vector<int> assign(num_agents_, -1);
            std::vector<char> used(num_items_, 0);
            auto emit = [&] {
                std::vector<Rational> rho(num_units_, Rational(0));
                for (int i = 0; i < num_agents_; ++i)
                    if (assign[i] >= 0) rho[i * num_items_ + assign[i]] = 1;
                out.push_back(std::move(rho));
                if (out.size() > kVertexWorkCap)
                    throw CapExceeded("vertex enumeration work cap exceeded");
            };
            auto rec = [&](auto&& self, int agent) -> void {
                if (agent == num_agents_) { emit(); return; }
                assign[agent] = -1;
                self(self, agent + 1);
                for (int n = 0; n < num_items_; ++n) {
                    if (used[n]) continue;
                    used[n] = 1;
                    assign[agent] = n;
                    self(self, agent + 1);
                    assign[agent] = -1;
                    used[n] = 0;
                }
            };
            rec(rec, 0);
            return out;
        }
        case Variant::Polymatroid: {
            if (num_units_ > 8)
                throw CapExceeded("polymatroid vertex enumeration cap (|U| <= 8) exceeded");
            // Greedy outputs over every order and truncation prefix.
            std::set<std::vector<Rational>> seen;
            std::vector<int> perm(num_units_);
            std::iota(perm.begin(), perm.end(), 0);
            do {
                std::vector<Rational> rho(num_units_, Rational(0));
                UnitSet prefix = 0;
                Rational prev = 0;
                seen.insert(rho);  // empty truncation
                bool ok = true;
                for (int k = 0; k < num_units_ && ok; ++k) {
                    prefix |= UnitSet(1) << perm[k];
                    Rational cur = constraint_.value(prefix, state);
                    rho[perm[k]] = cur - prev;
                    prev = cur;
                    ok = rho[perm[k]] >= 0;
                    if (ok) seen.insert(rho);
                }
            } while (std::next_permutation(perm.begin(), perm.end()));
            return {seen.begin(), seen.end()};
        }
        case Variant::Explicit: {
            // Brute-force basis enumeration over halfspaces + nonnegativity.
            std::vector<Halfspace> rows = halfspaces(state);
            for (int u = 0; u < num_units_; ++u) {
                Halfspace h;
                h.coeffs.assign(num_units_, Rational(0));
                h.coeffs[u] = -1;
                h.rhs = 0;
                rows.push_back(std::move(h));
            }
            const int d = num_units_;
            const int m = static_cast<int>(rows.size());
            std::set<std::vector<Rational>> seen;
            std::vector<int> pick(d);
            std::size_t work = 0;
            auto rec = [&](auto&& self, int start, int depth) -> void {
                if (depth == d) {
                    if (++work > kVertexWorkCap)
                        throw CapExceeded("vertex enumeration work cap exceeded");
                    std::vector<std::vector<Rational>> a(d);
                    std::vector<Rational> b(d);
                    for (int k = 0; k < d; ++k) {
                        a[k] = rows[pick[k]].coeffs;
                        b[k] = rows[pick[k]].rhs;
                    }
                    auto x = gauss_solve(std::move(a), std::move(b));
                    if (!x) return;
                    for (const Rational& v : *x)
                        if (v < 0) return;
                    for (const Halfspace& h : rows) {
                        Rational s = 0;
                        for (int u = 0; u < d; ++u)
                            if (h.coeffs[u] != 0) s += h.coeffs[u] * (*x)[u];
                        if (s > h.rhs) return;
                    }
                    seen.insert(std::move(*x));
                    return;
                }
                for (int r = start; r < m; ++r) {
                    pick[depth] = r;
                    self(self, r + 1, depth + 1);
                }
            };
            rec(rec, 0, 0);
            return {seen.begin(), seen.end()};
        }
    }
    return {};
}

} // namespace interim
