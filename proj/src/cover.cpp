#include "interim/cover.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

namespace interim {

SupportResult support_maximizer(const WeightVector& lambda, const Instance& inst,
                                const ExPostPolytope& poly) {
    if (lambda.size() != inst.tstar_size())
        throw InputError("weight vector must be defined on all of T*");
    SupportResult out;
    out.value = 0;
    out.argmax = AllocationRule::zeros(inst);
    for (int s = 0; s < inst.num_states(); ++s) {
        if (inst.prob(s) == 0) continue;
        LinearMaxResult best = poly.maximize_linear(s, lambda.state_weights(s, inst));
        out.value += inst.prob(s) * best.value;
        out.argmax.set_state_row(s, best.argmax);
    }
    return out;
}

Rational support_value(const WeightVector& lambda, const Instance& inst,
                       const ExPostPolytope& poly) {
    if (lambda.size() != inst.tstar_size())
        throw InputError("weight vector must be defined on all of T*");
    Rational value = 0;
    for (int s = 0; s < inst.num_states(); ++s) {
        if (inst.prob(s) == 0) continue;
        value += inst.prob(s) * poly.maximize_linear(s, lambda.state_weights(s, inst)).value;
    }
    return value;
}

namespace {

// Support values recur across entries (step weights depend only on the set),
// so cache by the raw weight vector.
class SupportCache {
  public:
    SupportCache(const Instance& inst, const ExPostPolytope& poly) : inst_(inst), poly_(poly) {}
    const Rational& value(const WeightVector& lambda) {
        auto it = cache_.find(lambda.values());
        if (it != cache_.end()) return it->second;
        return cache_.emplace(lambda.values(), support_value(lambda, inst_, poly_)).first->second;
    }

  private:
    const Instance& inst_;
    const ExPostPolytope& poly_;
    std::map<std::vector<Rational>, Rational> cache_;
};

} // namespace

std::optional<CoverViolation> validate_cover(const CoverCandidate& cover, const Instance& inst,
                                             const ExPostPolytope& poly) {
    if (cover.alpha <= 0 || cover.alpha > 1)
        throw InputError("cover scale must lie in (0,1]");
    SupportCache support(inst, poly);
    for (int e = 0; e < static_cast<int>(cover.entries.size()); ++e) {
        const CoverEntry& entry = cover.entries[e];
        if (entry.extreme_lambdas.empty())
            throw InputError("cover entry without extreme weights");
        if (interim_of(entry.witness, inst) != entry.point) {
            CoverViolation v;
            v.entry = e;
            v.reason = "stored witness does not realize the entry's point";
            return v;
        }
        for (int li = 0; li < static_cast<int>(entry.extreme_lambdas.size()); ++li) {
            const WeightVector& lambda = entry.extreme_lambdas[li];
            Rational lhs = lambda.apply(entry.point);
            Rational rhs = cover.alpha * support.value(lambda);
            if (lhs < rhs) {
                CoverViolation v;
                v.entry = e;
                v.lambda_index = li;
                v.lhs = std::move(lhs);
                v.rhs = std::move(rhs);
                v.reason = "entry point falls short of the scaled support value";
                return v;
            }
        }
    }
    return std::nullopt;
}

MembershipCheck approx_membership(const InterimAllocation& q, const CoverCandidate& cover,
                                  const Instance& inst, const ExPostPolytope& poly) {
    SupportCache support(inst, poly);
    MembershipCheck out;
    for (int e = 0; e < static_cast<int>(cover.entries.size()); ++e) {
        const CoverEntry& entry = cover.entries[e];
        for (int li = 0; li < static_cast<int>(entry.extreme_lambdas.size()); ++li) {
            const WeightVector& lambda = entry.extreme_lambdas[li];
            Rational lhs = lambda.apply(q);
            const Rational& rhs = support.value(lambda);
            if (lhs > rhs) {
                out.member = false;
                out.entry = e;
                out.lambda_index = li;
                out.lhs = std::move(lhs);
                out.rhs = rhs;
                return out;
            }
        }
    }
    return out;
}

CoverCandidate lift_expost_cover(const std::vector<ExPostCoverEntry>& entries,
                                 const Rational& alpha, const Instance& inst,
                                 const ExPostPolytope& poly) {
    if (alpha <= 0 || alpha > 1) throw InputError("cover scale must lie in (0,1]");
    CoverCandidate cover;
    cover.alpha = alpha;
    for (const ExPostCoverEntry& src : entries) {
        CoverEntry entry;
        entry.label = src.label;
        entry.witness = AllocationRule::zeros(inst);
        for (int s = 0; s < inst.num_states(); ++s) {
            std::vector<Rational> rho = src.select(s);
            if (!poly.contains(s, rho))
                throw InputError("ex-post cover selection left the polytope");
            entry.witness.set_state_row(s, rho);
        }
        entry.point = interim_of(entry.witness, inst);
        for (const WeightVector& lambda : src.candidate_lambdas) {
            bool certified = true;
            for (int s = 0; s < inst.num_states() && certified; ++s) {
                if (inst.prob(s) == 0) continue;
                GammaVector gamma = lambda.state_weights(s, inst);
                Rational achieved = gamma.dot(entry.witness.state_row(s));
                certified = achieved >= alpha * poly.maximize_linear(s, gamma).value;
            }
            if (certified) entry.extreme_lambdas.push_back(lambda);
        }
        if (!entry.extreme_lambdas.empty()) cover.entries.push_back(std::move(entry));
    }
    return cover;
}

std::vector<PriorityOrder> cover_orders(const Instance& inst, int full_limit, int samples,
                                        std::uint64_t seed) {
    const int k = inst.tstar_size();
    std::vector<PriorityOrder> orders;
    if (k <= full_limit) {
        std::vector<int> perm(k);
        std::iota(perm.begin(), perm.end(), 0);
        do orders.push_back(PriorityOrder::of(perm));
        while (std::next_permutation(perm.begin(), perm.end()));
        return orders;
    }
    std::mt19937_64 rng(seed);
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = 0; i < samples; ++i) {
        std::shuffle(perm.begin(), perm.end(), rng);
        orders.push_back(PriorityOrder::of(perm));
    }
    return orders;
}

PriorityOrder order_from_weights(const WeightVector& lambda, const Instance& inst) {
    std::vector<int> order(inst.tstar_size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return lambda[a] / inst.tstar_marginal(a) > lambda[b] / inst.tstar_marginal(b);
    });
    return PriorityOrder::of(std::move(order));
}

CoverCandidate polymatroid_equivalence_cover(const Instance& inst, const ConstraintFunction& c,
                                             const std::vector<PriorityOrder>& orders) {
    CoverCandidate cover;
    cover.alpha = 1;
    for (const PriorityOrder& r : orders) {
        for (int k = 0; k <= r.size(); ++k) {
            TruncatedGreedySpec spec = TruncatedGreedySpec::from_prefix(r, k);
            GreedyAllocation greedy = greedy_allocation(spec, inst, c);
            CoverEntry entry;
            entry.point = std::move(greedy.interim);
            entry.witness = std::move(greedy.rule);
            for (int j = 0; j <= k; ++j)
                entry.extreme_lambdas.push_back(step_lambda(r.prefix(j), r, inst));
            cover.entries.push_back(std::move(entry));
        }
    }
    return cover;
}

} // namespace interim
