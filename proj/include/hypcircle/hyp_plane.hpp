#pragma once

#include <functional>

#include "hypcircle/quadrature.hpp"
#include "hypcircle/sl2.hpp"

namespace hypcircle {

/// Point of the upper half-plane model.
struct HPoint {
    double x = 0.0, y = 1.0;

    HPoint() = default;
    HPoint(double x_, double y_) : x(x_), y(y_) {
        if (!(y > 0.0)) throw std::invalid_argument("HPoint: y must be positive");
    }

    cplx z() const { return {x, y}; }
};

inline HPoint point_i() { return HPoint(0.0, 1.0); }

/// Moebius action (az+b)/(cz+d).
HPoint mobius(const SL2& g, const HPoint& z);

inline double cosh_dist(const HPoint& z, const HPoint& w) {
    const double dx = z.x - w.x, dy = z.y - w.y;
    return 1.0 + (dx * dx + dy * dy) / (2.0 * z.y * w.y);
}

inline double hyp_dist(const HPoint& z, const HPoint& w) {
    return std::acosh(std::max(1.0, cosh_dist(z, w)));
}

inline double ball_area(double R) { return 2.0 * pi * (std::cosh(R) - 1.0); }
inline double circle_length(double r) { return 2.0 * pi * std::sinh(r); }

/// Point at hyperbolic distance r from i in tangent direction psi, where
/// psi = pi/2 is straight up and exp(s Theta) advances the direction by +s:
/// rotation_flow(g, s) traces point_at(r, pi/2 + s) for g = exp(rX)-translates.
HPoint point_at(double r, double psi);

/// Tangent direction at i of the geodesic from i to q (inverse of point_at).
double direction_from_i(const HPoint& q);

/// Geodesic polar coordinates of q around i: cosh of the radius plus direction.
struct Polar {
    double cosh_r;
    double psi;
};
Polar polar_from_i(const HPoint& q);

/// integral over the ball B_R of f dm_H computed as the iterated integral
/// int_0^R int_{S_r} f dsigma_r dr (sigma_r = sinh r dpsi), by nested
/// panel-doubling Gauss-Legendre aiming at absolute error tol.
QuadResult<double> sphere_integrate(const std::function<double(const HPoint&)>& f,
                                    double R, double tol);

/// Same integral with an explicit polar integrand f(r, psi); used when the
/// integrand carries more than a point of H (e.g. translate averages).
QuadResult<double> sphere_integrate_polar(const std::function<double(double, double)>& f,
                                          double R, double tol);

}  // namespace hypcircle
