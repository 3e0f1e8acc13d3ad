#pragma once

#include <cstdint>
#include <memory>

#include "hypcircle/circle_average.hpp"
#include "hypcircle/equi_stats.hpp"

namespace hypcircle {

struct CountReport {
    double R = 0.0;
    long long N = 0;
    double Sigma = 0.0;        // covol_ratio * ball_area(R)
    double E = 0.0;            // |N - Sigma|
    double covol_ratio = 0.0;  // covol_K(Gamma cap K) / covol_G(Gamma) at the base point
    bool valid = false;
};

/// Counts orbit points of Gamma.base in balls around base, reusing one orbit
/// enumeration across radii.
class LatticeCounter {
public:
    LatticeCounter(FuchsianGroup G, HPoint base, std::size_t visited_cap = 20'000'000);

    CountReport count(double R);
    std::vector<CountReport> count_grid(const std::vector<double>& R_grid);

    /// The cached ball, enumerated out to at least R.
    const OrbitBall& ball(double R);

    const FuchsianGroup& group() const { return group_; }
    int base_stabilizer_order() const { return stab_order_; }

private:
    FuchsianGroup group_;
    HPoint base_;
    std::size_t cap_;
    int stab_order_;
    std::shared_ptr<OrbitBall> ball_;
};

CountReport count(const FuchsianGroup& G, double R);

/// Least-squares slope of log E(R) against R; zero errors are dropped.
/// Throws when fewer than 3 usable points remain.
LineFit error_exponent(const std::vector<CountReport>& reports);

/// int f d g_* m_{K.p}: the translate of the K-orbit measure, integrated by
/// direct quadrature of (1/4pi) int f(p exp(s Theta) g) ds.
CircleAverageResult translate_average(const Observable& f, const SL2& p, const SL2& g,
                                      double tol);

/// Same integral through the Cartan route f . R_{k2(g)} . phi_{t(g)} . r_s.
CircleAverageResult translate_average_cartan(const Observable& f, const SL2& p,
                                             const SL2& g, double tol);

struct AveragedCount {
    double R = 0.0;
    double monte_carlo = 0.0;  // int psi F_R dm_{G/Gamma} by orbit counting at samples
    double mc_stderr = 0.0;
    double unfolded = 0.0;     // covol_K / m_H(B_R) int_{B_R} (translate average) dm_H
    double unfolded_err = 0.0;
    int n_samples = 0;
    bool consistent = false;   // |mc - unfolded| within combined error bars
};

AveragedCount averaged_count(LatticeCounter& counter, const Observable& psi, double R,
                             double tol, int n_samples, std::uint64_t seed,
                             int workers = 1);

/// K-invariant unit-mass mollifier psi_delta at the identity coset: a radial
/// profile of support radius r0 delta (r0 fixed per group by the injectivity
/// radius), normalized to int psi_delta dm_{G/Gamma} = 1.
Observable mollifier_family(const FuchsianGroup& G, double delta, int profile_pow = 4);

struct MollifierSweepPoint {
    double eta = 0.0;
    double slope = 0.0;     // fitted slope of log(total error bound) vs R
    double worst_total = 0.0;
};

/// Desk version of the delta = e^{-eta R} optimization: for each eta, combine
/// the smoothed-count deviation with the sandwich term (N(R+delta)-N(R-delta))
/// / m_H(B_R) and fit its decay; reports every eta with the best marked by the
/// smallest slope.
std::vector<MollifierSweepPoint> mollifier_sweep(LatticeCounter& counter,
                                                 const std::vector<double>& etas,
                                                 const std::vector<double>& R_grid,
                                                 int n_samples, std::uint64_t seed,
                                                 int workers = 1);

}  // namespace hypcircle
