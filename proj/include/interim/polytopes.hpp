// Ex-post assignment polytopes P^XP(t): membership, exact linear
// maximization with an extreme-point argmax, capacities, and vertex
// enumeration. Three variants: polymatroid-style subset constraints, the
// one-to-one matching polytope, and explicit halfspace lists.
#pragma once

#include "interim/instance.hpp"
#include "interim/lp.hpp"
#include "interim/weights.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

namespace interim {

// Upper-constraint function C(A,t) >= 0 with C(empty,t) = 0. Values are
// memoized; the callback must be pure.
class ConstraintFunction {
  public:
    ConstraintFunction() = default;
    ConstraintFunction(int num_units, bool state_invariant,
                       std::function<Rational(UnitSet, int)> fn)
        : num_units_(num_units), state_invariant_(state_invariant),
          fn_(std::move(fn)), memo_(std::make_shared<Memo>()) {}

    int num_units() const { return num_units_; }
    bool state_invariant() const { return state_invariant_; }
    Rational value(UnitSet a, int state) const;

  private:
    struct Memo {
        std::mutex mutex;
        std::map<std::pair<UnitSet, int>, Rational> values;
    };
    int num_units_ = 0;
    bool state_invariant_ = true;
    std::function<Rational(UnitSet, int)> fn_;
    std::shared_ptr<Memo> memo_;
};

// a . rho <= b over unit coordinates (rho >= 0 is implicit in all variants).
struct Halfspace {
    std::vector<Rational> coeffs;
    Rational rhs;
};

struct LinearMaxResult {
    Rational value;
    std::vector<Rational> argmax;  // an extreme point of P^XP(t)
};

// A submodularity violation: C(a) + C(b) < C(a|b) + C(a&b).
struct SubmodularityViolation {
    UnitSet a = 0, b = 0;
    Rational lhs, rhs;  // C(a)+C(b) and C(a|b)+C(a&b)
};

class ExPostPolytope {
  public:
    enum class Variant { Polymatroid, Matching, Explicit };

    static ExPostPolytope polymatroid(ConstraintFunction c);
    static ExPostPolytope matching(int num_agents, int num_items);
    // One shared halfspace list, or one list per state.
    static ExPostPolytope explicit_halfspaces(int num_units, std::vector<Halfspace> shared);
    static ExPostPolytope explicit_per_state(int num_units,
                                             std::vector<std::vector<Halfspace>> per_state);

    Variant variant() const { return variant_; }
    int num_units() const { return num_units_; }
    int num_agents() const { return num_agents_; }
    int num_items() const { return num_items_; }
    const ConstraintFunction& constraint() const;

    // Exact membership; polymatroid checks every nonempty subset (|U| <= 20).
    bool contains(int state, const std::vector<Rational>& rho) const;

    // max gamma . rho over P^XP(state), argmax at an extreme point.
    // Polymatroid: greedy when C(.,state) is submodular, LP otherwise.
    // Matching: successive augmenting paths over the positive-weight
    // subgraph, deterministic scan order.
    LinearMaxResult maximize_linear(int state, const GammaVector& gamma) const;

    // Matching only: max cardinality of a matching using pairs in X.
    Rational capacity(UnitSet pairs) const;

    // Complete vertex list (desk scale).
    std::vector<std::vector<Rational>> extreme_points(int state) const;

    // Halfspace description of P^XP(state) excluding rho >= 0.
    std::vector<Halfspace> halfspaces(int state) const;

    // Per-state submodularity of the polymatroid constraint (memoized).
    bool submodular(int state) const;
    std::optional<SubmodularityViolation> submodularity_violation(int state) const;

  private:
    Variant variant_ = Variant::Matching;
    int num_units_ = 0;
    int num_agents_ = 0;
    int num_items_ = 0;
    ConstraintFunction constraint_;
    std::vector<std::vector<Halfspace>> explicit_;  // size 1 when shared
    struct SubmodCache {
        std::mutex mutex;
        std::map<int, bool> flags;
    };
    std::shared_ptr<SubmodCache> submod_ = std::make_shared<SubmodCache>();
    struct CapacityCache {
        std::mutex mutex;
        std::map<UnitSet, Rational> values;
    };
    std::shared_ptr<CapacityCache> capacity_ = std::make_shared<CapacityCache>();
};

// Exact max-weight bipartite matching on an I x N weight grid, restricted to
// strictly positive weights; returns the 0/1 assignment (row-major) and its
// value. Deterministic for fixed input.
std::pair<Rational, std::vector<Rational>>
max_weight_matching(int num_agents, int num_items, const std::vector<Rational>& weights);

// Max-cardinality bipartite matching restricted to the pair set (row-major
// bitmask), via augmenting-path search.
int max_cardinality_matching(int num_agents, int num_items, UnitSet pairs);

} // namespace interim
