#pragma once

#include "hypcircle/observables.hpp"
#include "hypcircle/quadrature.hpp"

namespace hypcircle {

struct CircleAverageResult {
    cplx value{};
    double error_estimate = 0.0;
    long nodes_used = 0;
    bool converged = false;
};

/// (1/theta) int_0^theta f(p exp(s Theta) M) ds. The workhorse behind all
/// circle averages and translate averages; tol is absolute error on the
/// average. Bump observables dispatch to window evaluators that only touch
/// the part of the arc meeting the support; everything else uses
/// panel-doubling Gauss-Legendre with node budget ~ 8 theta e^t / scale.
CircleAverageResult arc_average(const Observable& f, const SL2& p, double theta,
                                const SL2& m, double tol, long node_cap = (1L << 22));

/// k_{f,theta}(p,t): arc average pushed by the time-t geodesic flow.
/// t above t_cap (default 12, ~1e6 nodes) must be requested explicitly.
CircleAverageResult k_theta(const Observable& f, const SL2& p, double theta, double t,
                            double tol, double t_cap = 12.0);

struct KDerivatives {
    CircleAverageResult k;   // average of f
    CircleAverageResult k1;  // average of Xf  = dk/dt
    CircleAverageResult k2;  // average of X^2f = d^2k/dt^2
};

KDerivatives k_theta_derivatives(const Observable& f, const SL2& p, double theta,
                                 double t, double tol);

struct BoundaryTerms {
    cplx A;  // f(p r_theta phi_t) - f(p phi_t)
    cplx B;  // same with Uf
};

BoundaryTerms boundary_terms(const Observable& f, const SL2& p, double theta, double t);

/// The ODE forcing coefficient G_{theta,n}f(p,t), assembled from k, k', A, B
/// with the four rational-in-e^{-t} prefactors. Satisfies
/// k'' + k' + mu k = e^{-t} G for joint eigenfunctions.
cplx g_coefficient(const Observable& f, const SL2& p, const SpectralParams& params,
                   double t, double tol);

/// Split of G used by the spectral truncation logic: the k/k' part carries an
/// explicit e^{-t} factor (and costs an arc evaluation), while the boundary
/// part costs two point evaluations and merely stays bounded.
cplx g_arc_part(const Observable& f, const SL2& p, const SpectralParams& params,
                double t, double tol);
cplx g_boundary_part(const Observable& f, const SL2& p, const SpectralParams& params,
                     double t);

/// kappa_0 = 2e^2(1+4pi)/(e-1)^2, the constant of the uniform G bound.
inline double kappa0() {
    const double e = std::exp(1.0);
    return 2.0 * e * e * (1.0 + 4.0 * pi) / ((e - 1.0) * (e - 1.0));
}

}  // namespace hypcircle
