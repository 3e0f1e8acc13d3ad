#pragma once

#include <functional>

#include "hypcircle/circle_average.hpp"

namespace hypcircle {

/// Closed-form solution of y'' + y' + mu y = e^{-t} G(t), y(1) = y1,
/// y'(1) = y1p, evaluated at t >= 1. Distinct-root branch for mu != 1/4,
/// double-root branch for mu = 1/4; |nu| < 1e-8 with mu != 1/4 is routed to a
/// series evaluation of the uniform kernel e^{-tau/2} sinh(nu tau/2)/nu to
/// avoid the 1/nu blowup. Inner integrals by adaptive panels at tol.
cplx solve_cauchy(double mu, const std::function<cplx(double)>& G, cplx y1, cplx y1p,
                  double t, double tol = 1e-10);

struct InitialData {
    cplx y1;   // arc average of f at t = 1
    cplx y1p;  // arc average of Xf at t = 1
};

InitialData initial_data(const Observable& f, const SL2& p, const SpectralParams& params,
                         double tol);

/// Memoizing wrapper around g_coefficient: the coefficient integrals hit the
/// same abscissas across kernels, and arc evaluations dominate the cost.
std::function<cplx(double)> g_function(const Observable& f, const SL2& p,
                                       const SpectralParams& params, double tol);

/// Which branch of the eigenfunction theorem applies.
enum class MuCase {
    principal,      // mu > 1/4
    quarter,        // mu = 1/4 (or |nu| < 1e-8)
    complementary,  // 0 < mu < 1/4
    zero,           // mu = 0
    discrete,       // mu < 0
};

MuCase classify_mu(const SpectralParams& params);

struct ExpansionCoefficients {
    SpectralParams params;
    MuCase mu_case = MuCase::zero;
    cplx a_plus, a_minus;
    cplx D_plus, D_minus;   // for mu = 0, D_minus holds the t -> infinity limit
    cplx discrete_defect;   // mu < 0 consistency: a^- + (1/nu) int e^{-(nu+1)xi/2} G
    double tail_bound = 0.0;
    double truncation_T = 0.0;
    std::function<cplx(double)> G;  // forcing, kept for remainder evaluation
};

/// Coefficients from an observable (G assembled from circle averages).
ExpansionCoefficients compute_coefficients(const Observable& f, const SL2& p,
                                           const SpectralParams& params, double tol);

/// Manufactured-G pathway: arbitrary forcing with declared uniform bound,
/// exercising every mu-case without quotient eigenfunctions.
ExpansionCoefficients compute_coefficients_g(const std::function<cplx(double)>& G,
                                             cplx y1, cplx y1p,
                                             const SpectralParams& params, double tol,
                                             double g_bound);

/// The two-term main expansion of the case selected by mu; the remainder is
/// k_theta minus this.
cplx expansion_eval(const ExpansionCoefficients& co, double t, double tol = 1e-9);

}  // namespace hypcircle
