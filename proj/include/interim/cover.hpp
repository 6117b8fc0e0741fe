// Support-function machinery: state-separable evaluation of
// max over realizable Q' of lambda(Q'), validation of equivalence and
// alpha-approximation covers, approximate membership, and lifting of
// per-state certificates to ex-ante covers.
#pragma once

#include "interim/border.hpp"
#include "interim/instance.hpp"
#include "interim/polytopes.hpp"
#include "interim/weights.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace interim {

struct SupportResult {
    Rational value;        // max over realizable Q' of lambda(Q')
    AllocationRule argmax; // a rule realizing a maximizer
};

// State-separable evaluation: sum_t mu(t) * max over P^XP(t) of the induced
// per-state weights. Equals the full ex-ante LP optimum.
SupportResult support_maximizer(const WeightVector& lambda, const Instance& inst,
                                const ExPostPolytope& poly);
Rational support_value(const WeightVector& lambda, const Instance& inst,
                       const ExPostPolytope& poly);

struct CoverEntry {
    InterimAllocation point;
    AllocationRule witness;                    // realizes `point`
    std::vector<WeightVector> extreme_lambdas; // extreme weights of the cone
    std::string label;
};

struct CoverCandidate {
    Rational alpha = 1;  // in (0, 1]
    std::vector<CoverEntry> entries;
};

struct CoverViolation {
    int entry = -1;
    int lambda_index = -1;
    Rational lhs, rhs;  // lambda(Q^j) vs alpha * support
    std::string reason;
};

// Checks every entry: the witness realizes the point exactly, and
// lambda(point) >= alpha * support(lambda) for each listed extreme lambda.
// Coverage of the full weight space is the constructor's structural
// guarantee, not re-checked here.
std::optional<CoverViolation> validate_cover(const CoverCandidate& cover, const Instance& inst,
                                             const ExPostPolytope& poly);

struct MembershipCheck {
    bool member = true;
    int entry = -1, lambda_index = -1;  // first violated extreme weight
    Rational lhs, rhs;                  // lambda(Q) vs support(lambda)
};

// lambda(Q) <= support(lambda) for every extreme lambda of every entry; when
// it holds, alpha * Q is realizable.
MembershipCheck approx_membership(const InterimAllocation& q, const CoverCandidate& cover,
                                  const Instance& inst, const ExPostPolytope& poly);

// Lifts per-state alpha-certificates to an ex-ante cover. Each entry selects
// an extreme assignment per state; a candidate weight vector is attached to
// the entry iff its induced state weights certify the selection exactly:
// gamma_t(rho_t) >= alpha * max over P^XP(t) for every positive-probability
// state. Candidates failing the certificate are dropped.
struct ExPostCoverEntry {
    std::function<std::vector<Rational>(int state)> select;
    std::vector<WeightVector> candidate_lambdas;
    std::string label;
};

CoverCandidate lift_expost_cover(const std::vector<ExPostCoverEntry>& entries,
                                 const Rational& alpha, const Instance& inst,
                                 const ExPostPolytope& poly);

// Order families for cover constructors: all |T*|! orders when |T*| <=
// full_limit, otherwise `samples` seeded draws (callers may append
// adversarial orders).
std::vector<PriorityOrder> cover_orders(const Instance& inst, int full_limit = 8,
                                        int samples = 64, std::uint64_t seed = 1);

// Order T* by decreasing normalized weight lambda/mu (ties by index); the
// separation order of a Farkas certificate.
PriorityOrder order_from_weights(const WeightVector& lambda, const Instance& inst);

// Equivalence cover (alpha = 1) for a polymatroid instance: entries are the
// truncated greedy interim allocations Q^(A,R) over the given orders with
// all R-upper sets, each paired with the step weights of its sub-upper-sets.
CoverCandidate polymatroid_equivalence_cover(const Instance& inst, const ConstraintFunction& c,
                                             const std::vector<PriorityOrder>& orders);

} // namespace interim
