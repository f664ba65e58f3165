#include <doctest.h>

#include <random>

#include "smid/errors.hpp"
#include "smid/mccormick.hpp"

using namespace smid::mccormick;

namespace {

bool all_satisfied(const EnvelopeConstraints& env, double w, double x, double y, double tol) {
    for (const auto& ineq : env) {
        if (!ineq.satisfied(w, x, y, tol)) return false;
    }
    return true;
}

// M = theta * eps with eps in [-d, d], written out by hand in w-isolated form.
EnvelopeConstraints m_term_by_hand(double tl, double tu, double d) {
    return {{
        {1.0, d, -tl, Side::Under, tl * d},
        {1.0, -d, -tu, Side::Under, -tu * d},
        {1.0, d, -tu, Side::Over, tu * d},
        {1.0, -d, -tl, Side::Over, -tl * d},
    }};
}

}  // namespace

TEST_CASE("box validation") {
    CHECK_THROWS_AS(Box(1.0, 0.0), smid::ConfigError);
    CHECK_NOTHROW(Box(2.0, 2.0));
    CHECK_THROWS_AS(m_term_bounds(Box(0.0, 1.0), -0.1), smid::ConfigError);
}

TEST_CASE("upper corner of the unit box pins w = 1") {
    const auto env = envelope(Box(0.0, 1.0), Box(0.0, 1.0));
    // The under-estimator through (xL, yL) only gives w >= 0 here; the other three are tight.
    CHECK(env[0].slack(1.0, 1.0, 1.0) == 1.0);
    CHECK(env[1].slack(1.0, 1.0, 1.0) == 0.0);
    CHECK(env[2].slack(1.0, 1.0, 1.0) == 0.0);
    CHECK(env[3].slack(1.0, 1.0, 1.0) == 0.0);
    const auto r = admitted_w(env, 1.0, 1.0);
    CHECK(r.lo == 1.0);
    CHECK(r.hi == 1.0);
}

TEST_CASE("symmetric box at the origin admits w in [-1, 1]") {
    const auto r = admitted_w(envelope(Box(-1.0, 1.0), Box(-1.0, 1.0)), 0.0, 0.0);
    CHECK(r.lo == -1.0);
    CHECK(r.hi == 1.0);
}

TEST_CASE("a fixed factor collapses the envelope to w = c y") {
    const double c = -0.7;
    const auto env = envelope(Box(c, c), Box(-2.0, 3.0));
    for (double y : {-2.0, -0.3, 0.0, 1.1, 3.0}) {
        const auto r = admitted_w(env, c, y);
        CHECK(r.lo == doctest::Approx(c * y).epsilon(1e-15));
        CHECK(r.hi == doctest::Approx(c * y).epsilon(1e-15));
    }
}

TEST_CASE("zero noise bound forces M = 0") {
    const auto env = m_term_bounds(Box(0.1, 0.5), 0.0);
    for (double th : {0.1, 0.3, 0.5}) {
        const auto r = admitted_w(env, th, 0.0);
        CHECK(r.lo == 0.0);
        CHECK(r.hi == 0.0);
    }
}

TEST_CASE("sample point on a negative box") {
    const auto env = m_term_bounds(Box(-2.5, -1.5), 0.1);
    CHECK(all_satisfied(env, -2.0 * 0.05, -2.0, 0.05, 0.0));
}

TEST_CASE("property: soundness on random boxes and points") {
    std::mt19937_64 rng(2718);
    std::uniform_real_distribution<double> c(-5.0, 5.0), u(0.0, 1.0);
    for (int n = 0; n < 100000; ++n) {
        const double a = c(rng), b = c(rng), e = c(rng), f = c(rng);
        const Box xb(std::min(a, b), std::max(a, b)), yb(std::min(e, f), std::max(e, f));
        const double x = xb.lo() + u(rng) * xb.width(), y = yb.lo() + u(rng) * yb.width();
        const auto env = envelope(xb, yb);
        REQUIRE(all_satisfied(env, x * y, x, y, 1e-12));
    }
}

TEST_CASE("property: the envelope is exact at the four corners") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> c(-5.0, 5.0);
    for (int n = 0; n < 1000; ++n) {
        const double a = c(rng), b = c(rng), e = c(rng), f = c(rng);
        const Box xb(std::min(a, b), std::max(a, b)), yb(std::min(e, f), std::max(e, f));
        const auto env = envelope(xb, yb);
        for (double x : {xb.lo(), xb.hi()}) {
            for (double y : {yb.lo(), yb.hi()}) {
                const auto r = admitted_w(env, x, y);
                CHECK(std::abs(r.lo - x * y) <= 1e-12);
                CHECK(std::abs(r.hi - x * y) <= 1e-12);
            }
        }
    }
}

TEST_CASE("property: shrinking the box tightens the admitted range") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> c(-3.0, 3.0), u(0.0, 1.0);
    for (int n = 0; n < 2000; ++n) {
        const double a = c(rng), b = c(rng);
        const Box outer(std::min(a, b), std::max(a, b));
        const double l = outer.lo() + 0.5 * u(rng) * outer.width();
        const Box inner(l, l + (outer.hi() - l) * u(rng));
        const Box yb(-1.0, 2.0);
        const double x = inner.lo() + u(rng) * inner.width(), y = -1.0 + 3.0 * u(rng);
        const auto wide = admitted_w(envelope(outer, yb), x, y);
        const auto tight = admitted_w(envelope(inner, yb), x, y);
        CHECK(tight.lo >= wide.lo - 1e-12);
        CHECK(tight.hi <= wide.hi + 1e-12);
    }
}

TEST_CASE("m_term_bounds matches the generic envelope and its closed form coefficient-wise") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> c(-3.0, 3.0), d(0.0, 0.5);
    for (int n = 0; n < 500; ++n) {
        const double a = c(rng), b = c(rng), delta = d(rng);
        const Box tb(std::min(a, b), std::max(a, b));
        const auto special = m_term_bounds(tb, delta);
        const auto generic = envelope(tb, Box(-delta, delta));
        const auto hand = m_term_by_hand(tb.lo(), tb.hi(), delta);
        for (std::size_t i = 0; i < 4; ++i) {
            for (const auto* other : {&generic[i], &hand[i]}) {
                CHECK(special[i].coeff_w == other->coeff_w);
                CHECK(special[i].coeff_x == doctest::Approx(other->coeff_x).epsilon(1e-15));
                CHECK(special[i].coeff_y == doctest::Approx(other->coeff_y).epsilon(1e-15));
                CHECK(special[i].side == other->side);
                CHECK(special[i].rhs == doctest::Approx(other->rhs).epsilon(1e-15));
            }
        }
    }
}
