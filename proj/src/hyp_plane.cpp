#include "hypcircle/hyp_plane.hpp"

namespace hypcircle {

HPoint mobius(const SL2& g, const HPoint& z) {
    const cplx w = (g.a * z.z() + g.b) / (g.c * z.z() + g.d);
    return HPoint(w.real(), w.imag());
}

HPoint point_at(double r, double psi) {
    // exp((psi - pi/2) Theta) rotates the "up" direction pi/2 to psi.
    const SL2 k = rotation(psi - 0.5 * pi);
    return mobius(geodesic_flow(k, r), point_i());
}

double direction_from_i(const HPoint& q) {
    return polar_from_i(q).psi;
}

Polar polar_from_i(const HPoint& q) {
    Polar p;
    p.cosh_r = cosh_dist(q, point_i());
    // Cayley transform sends i to the disc origin; geodesics from i become
    // radii, and arg tracks the tangent direction up to the fixed offset pi/2.
    const cplx w = (q.z() - cplx(0, 1)) / (q.z() + cplx(0, 1));
    p.psi = 0.5 * pi + std::arg(w);
    return p;
}

QuadResult<double> sphere_integrate_polar(const std::function<double(double, double)>& f,
                                          double R, double tol) {
    QuadResult<double> res;
    if (R <= 0.0) {
        res.converged = true;
        return res;
    }
    long nodes = 0;
    auto ring = [&](double r) {
        auto inner = integrate([&](double psi) { return f(r, psi); }, 0.0, 2.0 * pi,
                               0.25 * tol / std::max(R, 1e-3), 4);
        nodes += inner.nodes;
        return std::sinh(r) * inner.value;
    };
    auto outer = integrate(ring, 0.0, R, 0.5 * tol, std::max(1, static_cast<int>(R)));
    res.value = outer.value;
    res.error = outer.error;
    res.nodes = nodes;
    res.converged = outer.converged;
    return res;
}

QuadResult<double> sphere_integrate(const std::function<double(const HPoint&)>& f,
                                    double R, double tol) {
    return sphere_integrate_polar(
        [&](double r, double psi) { return f(point_at(r, psi)); }, R, tol);
}

}  // namespace hypcircle
