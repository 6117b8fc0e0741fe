#include <doctest.h>

#include "support.hpp"

#include <set>

using namespace interim;
using namespace testsup;

TEST_SUITE_BEGIN("polytopes");

namespace {

// Independent oracle: max-weight matching by brute force over all partial
// assignments.
std::pair<Rational, std::vector<Rational>> brute_max_matching(int agents, int items,
                                                              const std::vector<Rational>& w) {
    Rational best = 0;
    std::vector<Rational> best_rho(static_cast<std::size_t>(agents) * items, Rational(0));
    std::vector<int> assign(agents, -1);
    std::vector<char> used(items, 0);
    auto rec = [&](auto&& self, int agent, Rational value) -> void {
        if (agent == agents) {
            if (value > best) {
                best = value;
                for (auto& v : best_rho) v = 0;
                for (int i = 0; i < agents; ++i)
                    if (assign[i] >= 0) best_rho[i * items + assign[i]] = 1;
            }
            return;
        }
        self(self, agent + 1, value);
        for (int n = 0; n < items; ++n) {
            if (used[n]) continue;
            used[n] = 1;
            assign[agent] = n;
            self(self, agent + 1, value + w[agent * items + n]);
            assign[agent] = -1;
            used[n] = 0;
        }
    };
    rec(rec, 0, Rational(0));
    return {best, best_rho};
}

ExPostPolytope matching_as_explicit(int agents, int items) {
    ExPostPolytope m = ExPostPolytope::matching(agents, items);
    return ExPostPolytope::explicit_halfspaces(agents * items, m.halfspaces(0));
}

} // namespace

TEST_CASE("membership basics") {
    ExPostPolytope match = ExPostPolytope::matching(2, 2);
    ExPostPolytope poly = ExPostPolytope::polymatroid(unit_capacity(2));
    ExPostPolytope expl = matching_as_explicit(2, 2);

    CHECK(match.contains(0, std::vector<Rational>(4, Rational(0))));
    CHECK(poly.contains(0, std::vector<Rational>(2, Rational(0))));
    CHECK(expl.contains(0, std::vector<Rational>(4, Rational(0))));

    std::vector<Rational> identity = {Rational(1), Rational(0), Rational(0), Rational(1)};
    CHECK(match.contains(0, identity));

    std::vector<Rational> heavy_row = {Rational(1), Rational(1, 2), Rational(0), Rational(0)};
    CHECK_FALSE(match.contains(0, heavy_row));
    CHECK_FALSE(expl.contains(0, heavy_row));

    CHECK_THROWS_AS(match.contains(0, std::vector<Rational>(3, Rational(0))), InputError);
}

TEST_CASE("nonpositive weights are maximized by the null assignment") {
    ExPostPolytope match = ExPostPolytope::matching(2, 2);
    GammaVector gamma(4);
    gamma[0] = Rational(-1);
    gamma[2] = Rational(-1, 2);
    LinearMaxResult res = match.maximize_linear(0, gamma);
    CHECK(res.value == 0);
    for (const Rational& v : res.argmax) CHECK(v == 0);
}

TEST_CASE("full-grid unit weights achieve a perfect matching") {
    ExPostPolytope match = ExPostPolytope::matching(2, 2);
    GammaVector gamma(4);
    for (int u = 0; u < 4; ++u) gamma[u] = 1;
    CHECK(match.maximize_linear(0, gamma).value == 2);
}

TEST_CASE("unit-capacity greedy gives the top unit everything") {
    ExPostPolytope poly = ExPostPolytope::polymatroid(unit_capacity(2));
    GammaVector gamma(2);
    gamma[0] = 1;
    gamma[1] = Rational(1, 2);
    LinearMaxResult res = poly.maximize_linear(0, gamma);
    CHECK(res.value == 1);
    CHECK(res.argmax == std::vector<Rational>{Rational(1), Rational(0)});
}

TEST_CASE("two-by-two capacities reproduce the non-submodular counterexample") {
    ExPostPolytope match = ExPostPolytope::matching(2, 2);
    // Units are (i,n) pairs in row-major order; a = first row, b = first col.
    const UnitSet a = 0b0011, b = 0b0101;
    CHECK(match.capacity(a) == 1);
    CHECK(match.capacity(b) == 1);
    CHECK(match.capacity(a | b) == 2);
    CHECK(match.capacity(a & b) == 1);
    CHECK(match.capacity(0) == 0);

    ConstraintFunction cap(4, true, [&match](UnitSet x, int) { return match.capacity(x); });
    auto violation = is_submodular(cap, 0);
    REQUIRE(violation.has_value());
    CHECK(violation->a == a);
    CHECK(violation->b == b);
}

TEST_CASE("capacity is monotone") {
    Rng rng(5);
    ExPostPolytope match = ExPostPolytope::matching(3, 3);
    for (int rep = 0; rep < 200; ++rep) {
        UnitSet x = rng() & 0x1FF, y = x | (rng() & 0x1FF);
        CHECK(match.capacity(x) <= match.capacity(y));
    }
}

TEST_CASE("extreme points of tiny polytopes") {
    ExPostPolytope one = ExPostPolytope::matching(1, 1);
    auto pts = one.extreme_points(0);
    REQUIRE(pts.size() == 2);
    std::set<std::vector<Rational>> got(pts.begin(), pts.end());
    CHECK(got.count({Rational(0)}) == 1);
    CHECK(got.count({Rational(1)}) == 1);

    CHECK(ExPostPolytope::matching(2, 2).extreme_points(0).size() == 7);

    ExPostPolytope poly = ExPostPolytope::polymatroid(unit_capacity(2));
    auto ppts = poly.extreme_points(0);
    std::set<std::vector<Rational>> pset(ppts.begin(), ppts.end());
    CHECK(pset.size() == 3);
    CHECK(pset.count({Rational(0), Rational(0)}) == 1);
    CHECK(pset.count({Rational(1), Rational(0)}) == 1);
    CHECK(pset.count({Rational(0), Rational(1)}) == 1);
}

TEST_CASE("matching vertices agree with halfspace vertex enumeration") {
    ExPostPolytope match = ExPostPolytope::matching(2, 2);
    ExPostPolytope expl = matching_as_explicit(2, 2);
    auto a = match.extreme_points(0);
    auto b = expl.extreme_points(0);
    CHECK(std::set<std::vector<Rational>>(a.begin(), a.end()) ==
          std::set<std::vector<Rational>>(b.begin(), b.end()));
}

TEST_CASE("every vertex is feasible and not a midpoint of two others") {
    for (const ExPostPolytope& poly :
         {ExPostPolytope::matching(2, 2), ExPostPolytope::polymatroid(unit_capacity(3))}) {
        auto pts = poly.extreme_points(0);
        for (const auto& p : pts) CHECK(poly.contains(0, p));
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = 0; j < pts.size(); ++j)
                for (std::size_t k = j + 1; k < pts.size(); ++k) {
                    if (i == j || i == k) continue;
                    bool midpoint = true;
                    for (std::size_t u = 0; u < pts[i].size(); ++u)
                        if (2 * pts[i][u] != pts[j][u] + pts[k][u]) {
                            midpoint = false;
                            break;
                        }
                    CHECK_FALSE(midpoint);
                }
    }
}

TEST_CASE("matching maximization agrees with the explicit encoding and brute force") {
    Rng rng(29);
    ExPostPolytope match = ExPostPolytope::matching(3, 3);
    ExPostPolytope expl = matching_as_explicit(3, 3);
    for (int rep = 0; rep < 40; ++rep) {
        GammaVector gamma(9);
        for (int u = 0; u < 9; ++u) gamma[u] = Rational(pick(rng, -4, 4), 4);
        LinearMaxResult via_match = match.maximize_linear(0, gamma);
        LinearMaxResult via_lp = expl.maximize_linear(0, gamma);
        auto [brute_value, brute_rho] = brute_max_matching(3, 3, gamma.values);
        CHECK(via_match.value == via_lp.value);
        CHECK(via_match.value == brute_value);
        CHECK(match.contains(0, via_match.argmax));
        CHECK(gamma.dot(via_match.argmax) == via_match.value);
        // Integral argmax: an extreme point of the matching polytope.
        for (const Rational& v : via_match.argmax) CHECK((v == 0 || v == 1));
    }
}

TEST_CASE("polymatroid maximization falls back to the LP when not submodular") {
    ExPostPolytope match = ExPostPolytope::matching(2, 2);
    ConstraintFunction cap(4, true, [&match](UnitSet x, int) { return match.capacity(x); });
    ExPostPolytope poly = ExPostPolytope::polymatroid(cap);
    GammaVector gamma(4);
    gamma[0] = 1;
    gamma[1] = Rational(9, 10);
    gamma[2] = Rational(8, 10);
    gamma[3] = Rational(7, 10);
    LinearMaxResult res = poly.maximize_linear(0, gamma);
    CHECK(res.value == Rational(17, 10));
    CHECK(poly.contains(0, res.argmax));
}

TEST_CASE("coverage constraints are submodular") {
    Rng rng(31);
    for (int rep = 0; rep < 10; ++rep) {
        ConstraintFunction c = coverage_constraint(rng, 4, 1, false);
        CHECK_FALSE(is_submodular(c, 0).has_value());
    }
}

TEST_SUITE_END();
