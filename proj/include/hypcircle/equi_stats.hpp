#pragma once

#include <cstdint>
#include <optional>

#include "hypcircle/circle_average.hpp"
#include "hypcircle/spectral.hpp"

namespace hypcircle {

/// Sorted samples of a rescaled-deviation law, tagged with the seed that
/// produced them.
struct EmpiricalLaw {
    std::vector<double> samples;  // ascending
    std::uint64_t seed = 0;

    double max_abs() const;
};

struct DecayFit {
    LineFit fit;
    std::vector<double> t_used;
    std::vector<double> log_dev;
    std::vector<std::size_t> dropped;  // grid indices below the quadrature floor
    bool degenerate = false;
};

/// Least-squares slope of log |k_theta - average| against t. Points whose
/// deviation is within 3x of the quadrature error estimate are dropped and
/// flagged. `average` defaults to the unfolded average of f (must be a bump
/// observable then).
DecayFit decay_rate(const Observable& f, const SL2& p, double theta,
                    const std::vector<double>& t_grid, double tol,
                    std::optional<double> average = std::nullopt);

/// Average over the time-varying window [theta1(t), theta2(t)] via the shift
/// identity: the arc of length theta2-theta1 based at r_{theta1}(p).
cplx shrinking_arc_average(const Observable& f, const SL2& p,
                           const std::function<double(double)>& theta1,
                           const std::function<double(double)>& theta2, double t,
                           double tol);

enum class DevScaling { subquarter, quarter, superquarter };

/// n samples of the rescaled deviation e^{w(T)} (k_theta - average) with the
/// base point drawn from sample_quotient; deterministic per seed and
/// independent of the worker count.
EmpiricalLaw deviation_law(const Observable& f, double theta, double T, int n,
                           std::uint64_t seed, DevScaling scaling, double nu_f,
                           double tol, int workers = 1);

/// Exact Levy-Prokhorov distance between two empirical (atomic) laws:
/// bisection over eps with an interval-transport feasibility check.
double levy_prokhorov(const EmpiricalLaw& a, const EmpiricalLaw& b);

/// Coupling upper bound of the lemma d_LP <= max |X - X'| for paired samples.
double lp_coupling_bound(const std::vector<double>& x, const std::vector<double>& y);

struct NoCltPair {
    cplx lhs;  // e^T (k_theta - average)
    cplx rhs;  // (2/theta) int_1^T (1-e^{-2 xi})^{-1} (Uf0 . phi_xi(p) - Uf0 . phi_xi r_theta(p))
};

/// The geodesic-difference representation behind the no-CLT statement; f0 is
/// the K-fiber average of f (256-point periodic trapezoid), which for
/// K-invariant observables is f itself.
NoCltPair nocl_representation(const Observable& f, const SL2& p, double theta, double T,
                              double tol);

double ks_statistic(const std::vector<double>& sorted_samples,
                    const std::function<double(double)>& cdf);
double ks_pvalue(double stat, std::size_t n);

}  // namespace hypcircle
