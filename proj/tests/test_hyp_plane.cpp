#include <doctest.h>

#include "hypcircle/hyp_plane.hpp"
#include "hypcircle/rng.hpp"

using namespace hypcircle;

namespace {

SL2 random_element(Rng& rng) {
    return exp_lie(LieVec(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)),
                   rng.uniform(0.0, 2.0)) *
           rotation(rng.uniform(0.0, full_circle));
}

HPoint random_point(Rng& rng) {
    return HPoint(rng.uniform(-3, 3), std::exp(rng.uniform(-2, 2)));
}

}  // namespace

TEST_CASE("mobius basics") {
    Rng rng(11);
    const HPoint z = random_point(rng);
    CHECK(mobius(SL2(), z).x == z.x);
    CHECK(mobius(SL2(), z).y == z.y);

    // diag(e^{t/2}, e^{-t/2}) moves i to e^t i
    const HPoint w = mobius(exp_lie(lie_X, 1.3), point_i());
    CHECK(w.x == doctest::Approx(0.0));
    CHECK(w.y == doctest::Approx(std::exp(1.3)).epsilon(1e-14));

    // SO2 stabilizes i
    for (int k = 0; k < 16; ++k) {
        const HPoint fix = mobius(rotation(rng.uniform(0.0, full_circle)), point_i());
        CHECK(hyp_dist(fix, point_i()) < 1e-13);
    }

    // action property on random elements
    for (int k = 0; k < 2000; ++k) {
        const SL2 g = random_element(rng), h = random_element(rng);
        const HPoint p = random_point(rng);
        const HPoint lhs = mobius(g * h, p);
        const HPoint rhs = mobius(g, mobius(h, p));
        CHECK(std::abs(lhs.x - rhs.x) + std::abs(lhs.y - rhs.y) < 1e-11 * (1.0 + std::abs(lhs.x)));
    }
}

TEST_CASE("hyperbolic distance") {
    CHECK(hyp_dist(point_i(), point_i()) == 0.0);
    CHECK(hyp_dist(point_i(), HPoint(0.0, std::exp(1.0))) == doctest::Approx(1.0).epsilon(1e-14));

    Rng rng(12);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
        const SL2 g = random_element(rng), h = random_element(rng);
        const HPoint z = random_point(rng), w = random_point(rng);
        // isometry invariance
        worst = std::max(worst, std::abs(hyp_dist(mobius(h, z), mobius(h, w)) - hyp_dist(z, w)));
        // symmetric
        CHECK(hyp_dist(z, w) == doctest::Approx(hyp_dist(w, z)).epsilon(1e-13));
        // d(i, g.i) = d(h.i, hg.i)
        const double d1 = hyp_dist(point_i(), mobius(g, point_i()));
        const double d2 = hyp_dist(mobius(h, point_i()), mobius(h * g, point_i()));
        CHECK(std::abs(d1 - d2) < 1e-10);
    }
    CHECK(worst < 1e-10);

    // triangle inequality on random triples
    for (int k = 0; k < 10000; ++k) {
        const HPoint a = random_point(rng), b = random_point(rng), c = random_point(rng);
        CHECK(hyp_dist(a, c) <= hyp_dist(a, b) + hyp_dist(b, c) + 1e-10);
    }
}

TEST_CASE("areas and circle lengths") {
    CHECK(ball_area(0.0) == 0.0);
    CHECK(ball_area(1.0) == doctest::Approx(2.0 * pi * (std::cosh(1.0) - 1.0)).epsilon(1e-15));

    // circle_length against the arc-length quadrature of the parametrized circle
    for (double r : {0.3, 1.0, 2.5}) {
        auto speed = [&](double psi) {
            // numerical derivative of point_at(r, psi) in psi, hyperbolic norm
            const double h = 1e-5;
            const HPoint a = point_at(r, psi - h), b = point_at(r, psi + h);
            const double dx = (b.x - a.x) / (2 * h), dy = (b.y - a.y) / (2 * h);
            return std::sqrt(dx * dx + dy * dy) / point_at(r, psi).y;
        };
        const auto q = integrate(speed, 0.0, 2.0 * pi, 1e-9, 8);
        CHECK(std::abs(q.value - circle_length(r)) < 1e-8 * std::max(1.0, circle_length(r)));
    }
}

TEST_CASE("point_at and polar coordinates invert each other") {
    Rng rng(13);
    for (int k = 0; k < 5000; ++k) {
        const double r = rng.uniform(0.01, 8.0), psi = rng.uniform(0.0, 2.0 * pi);
        const HPoint z = point_at(r, psi);
        const Polar pol = polar_from_i(z);
        CHECK(std::acosh(std::max(1.0, pol.cosh_r)) == doctest::Approx(r).epsilon(1e-9));
        CHECK(std::abs(std::remainder(pol.psi - psi, 2.0 * pi)) < 1e-9);
    }
    // the rotation flow advances the direction by +s
    for (int k = 0; k < 100; ++k) {
        const double t = rng.uniform(0.1, 4.0), s = rng.uniform(0.0, full_circle);
        const HPoint direct = mobius(rotation_flow(SL2(), s) * exp_lie(lie_X, t), point_i());
        const HPoint predicted = point_at(t, 0.5 * pi + s);
        CHECK(hyp_dist(direct, predicted) < 1e-9);
    }
}

TEST_CASE("law of cosines matches distances") {
    Rng rng(14);
    for (int k = 0; k < 2000; ++k) {
        const double r1 = rng.uniform(0.1, 5.0), r2 = rng.uniform(0.1, 5.0);
        const double p1 = rng.uniform(0.0, 2 * pi), p2 = rng.uniform(0.0, 2 * pi);
        const HPoint a = point_at(r1, p1), b = point_at(r2, p2);
        const double lhs = cosh_dist(a, b);
        const double rhs =
            std::cosh(r1) * std::cosh(r2) - std::sinh(r1) * std::sinh(r2) * std::cos(p1 - p2);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("sphere_integrate") {
    // f = 1 gives the ball area
    for (double R : {0.5, 1.0, 2.0, 5.0}) {
        const auto q = sphere_integrate([](const HPoint&) { return 1.0; }, R, 1e-9);
        CHECK(q.converged);
        CHECK(std::abs(q.value - ball_area(R)) < 1e-8);
    }

    // radially symmetric exponential: closed-form 1D integral
    {
        const double R = 2.0;
        const auto q = sphere_integrate(
            [](const HPoint& z) { return std::exp(-hyp_dist(z, point_i())); }, R, 1e-9);
        const auto oracle = integrate(
            [](double r) { return std::exp(-r) * 2.0 * pi * std::sinh(r); }, 0.0, R, 1e-12, 8);
        CHECK(std::abs(q.value - oracle.value) < 1e-8);
    }

    // smooth bump against an independent 2-D quadrature in (x, y) with y^{-2};
    // the support stays inside B_R, so no indicator is needed on either route
    {
        const double R = 1.5;
        auto f = [](const HPoint& z) {
            const double d = hyp_dist(z, HPoint(0.2, 1.1));
            const double u2 = (d / 0.8) * (d / 0.8);
            return d < 0.8 ? std::pow(1.0 - u2, 4.0) : 0.0;
        };
        const auto q = sphere_integrate(f, R, 1e-8);
        const double xm = std::exp(R) - 1.0;
        auto inner = [&](double x) {
            return integrate([&](double y) { return f(HPoint(x, y)) / (y * y); },
                             std::exp(-R), std::exp(R), 1e-10, 16)
                .value;
        };
        const auto oracle = integrate(inner, -xm, xm, 1e-9, 32);
        CHECK(std::abs(q.value - oracle.value) < 2e-8);
    }
}
