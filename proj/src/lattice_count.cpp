#include "hypcircle/lattice_count.hpp"

#include <algorithm>
#include <cmath>

#include "hypcircle/parallel.hpp"

namespace hypcircle {

namespace {

int stabilizer_order_at(const FuchsianGroup& G, const HPoint& z) {
    const auto elems = orbit_elements_near(G, z, 1.5);
    std::vector<SL2> reps;
    for (const auto& g : elems) {
        if (hyp_dist(mobius(g, z), z) > 1e-9) continue;
        const bool known = std::any_of(reps.begin(), reps.end(), [&](const SL2& r) {
            return r.projective_diff(g) < 1e-9;
        });
        if (!known) reps.push_back(g);
    }
    return static_cast<int>(reps.size());
}

}  // namespace

LatticeCounter::LatticeCounter(FuchsianGroup G, HPoint base, std::size_t visited_cap)
    : group_(std::move(G)), base_(base), cap_(visited_cap),
      stab_order_(stabilizer_order_at(group_, base_)) {}

const OrbitBall& LatticeCounter::ball(double R) {
    if (!ball_ || (ball_->radius < R && ball_->valid)) {
        OrbitBallOptions opts;
        opts.visited_cap = cap_;
        ball_ = std::make_shared<OrbitBall>(enumerate_orbit_ball(group_, base_, R, opts));
    }
    return *ball_;
}

CountReport LatticeCounter::count(double R) {
    CountReport rep;
    rep.R = R;
    rep.covol_ratio =
        1.0 / (static_cast<double>(stab_order_) * group_.covol_surface);
    const OrbitBall& b = ball(R);
    rep.valid = b.valid && b.radius >= R;
    rep.N = rep.valid ? b.count_within(R) : 0;
    rep.Sigma = rep.covol_ratio * ball_area(R);
    rep.E = std::abs(static_cast<double>(rep.N) - rep.Sigma);
    return rep;
}

std::vector<CountReport> LatticeCounter::count_grid(const std::vector<double>& R_grid) {
    double rmax = 0.0;
    for (double r : R_grid) rmax = std::max(rmax, r);
    ball(rmax);
    std::vector<CountReport> out;
    out.reserve(R_grid.size());
    for (double r : R_grid) out.push_back(count(r));
    return out;
}

CountReport count(const FuchsianGroup& G, double R) {
    LatticeCounter counter(G, point_i());
    return counter.count(R);
}

LineFit error_exponent(const std::vector<CountReport>& reports) {
    std::vector<double> xs, ys;
    for (const auto& rep : reports) {
        if (!rep.valid || rep.E <= 0.0) continue;
        xs.push_back(rep.R);
        ys.push_back(std::log(rep.E));
    }
    if (xs.size() < 3)
        throw std::runtime_error("error_exponent: fewer than 3 usable points");
    return fit_line(xs, ys);
}

CircleAverageResult translate_average(const Observable& f, const SL2& p, const SL2& g,
                                      double tol) {
    return arc_average(f, p, full_circle, g, tol);
}

CircleAverageResult translate_average_cartan(const Observable& f, const SL2& p,
                                             const SL2& g, double tol) {
    const CartanFactors kak = cartan(g);
    // f . R_{k2} . phi_{t(g)} . r_s averaged over the full circle; the k1
    // factor drops by rotation invariance of the K-orbit measure.
    return arc_average(f, p, full_circle, exp_lie(lie_X, kak.t) * kak.k2, tol);
}

AveragedCount averaged_count(LatticeCounter& counter, const Observable& psi, double R,
                             double tol, int n_samples, std::uint64_t seed, int workers) {
    AveragedCount out;
    out.R = R;
    out.n_samples = n_samples;
    const FuchsianGroup& G = counter.group();
    const double area = ball_area(R);

    // Route (i): Monte Carlo over the quotient with per-sample orbit counting.
    {
        const OrbitBall& b = counter.ball(R + G.covering_radius + 0.1);
        if (!b.valid) throw std::runtime_error("averaged_count: orbit enumeration capped");
        const auto pts = sample_quotient(G, n_samples, seed);
        std::vector<double> vals(static_cast<std::size_t>(n_samples));
        const double cosh_R = std::cosh(R) + std::sinh(R) * 1e-9 + 1e-12;
        parallel_for(n_samples, workers, [&](int i) {
            const SL2& h = pts[static_cast<std::size_t>(i)];
            const double pv = psi.eval_fn(h).real();
            if (pv == 0.0) {
                vals[static_cast<std::size_t>(i)] = 0.0;
                return;
            }
            const HPoint w = mobius(h, point_i());
            long long hits = 0;
            for (const auto& z : b.points)
                if (cosh_dist(z, w) <= cosh_R) ++hits;
            vals[static_cast<std::size_t>(i)] =
                pv * static_cast<double>(hits) / area;
        });
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= n_samples;
        double var = 0.0;
        for (double v : vals) var += (v - mean) * (v - mean);
        var /= std::max(1, n_samples - 1);
        out.monte_carlo = G.covol_group() * mean;
        out.mc_stderr = G.covol_group() * std::sqrt(var / n_samples);
    }

    // Route (ii): fold-unfold. covol_K / m_H(B_R) int_{B_R} T dm_H with T the
    // translate average of psi at the sphere point (Cartan form); K-invariant
    // psi collapses the angular integral to 2 pi.
    {
        long nodes = 0;
        double err_acc = 0.0;
        const SL2 p0;
        QuadResult<double> q;
        if (psi.kind == Observable::Kind::surface_bump) {
            auto radial = [&](double r) -> double {
                if (r < 1e-12) return psi.eval_fn(p0).real() * std::sinh(r);
                const auto t = arc_average(psi, p0, full_circle, exp_lie(lie_X, r),
                                           0.2 * tol / std::max(1.0, area));
                nodes += t.nodes_used;
                err_acc += t.error_estimate;
                return 2.0 * pi * t.value.real() * std::sinh(r);
            };
            q = integrate(radial, 0.0, R, 0.5 * tol * area / G.covol_K(),
                          std::max(2, static_cast<int>(R)));
        } else {
            auto polar = [&](double r, double phi) -> double {
                if (r < 1e-12) return psi.eval_fn(p0).real();
                // sphere point rotation(phi - pi/2) exp(rX); its inverse is the
                // right translate whose K-average the unfolding integrates.
                const SL2 gz = rotation(phi - 0.5 * pi) * exp_lie(lie_X, r);
                const auto t = translate_average_cartan(psi, p0, gz.inverse(),
                                                        0.2 * tol / std::max(1.0, area));
                nodes += t.nodes_used;
                err_acc += t.error_estimate;
                return t.value.real();
            };
            q = sphere_integrate_polar(polar, R, 0.5 * tol * area / G.covol_K());
        }
        out.unfolded = G.covol_K() / area * q.value;
        out.unfolded_err = G.covol_K() / area * (q.error + err_acc);
    }

    out.consistent = std::abs(out.monte_carlo - out.unfolded) <=
                     3.0 * out.mc_stderr + out.unfolded_err + tol;
    return out;
}

Observable mollifier_family(const FuchsianGroup& G, double delta, int profile_pow) {
    if (!(delta > 0.0) || delta > 1.0)
        throw std::invalid_argument("mollifier_family: delta must lie in (0, 1]");
    const double min_disp = G.min_displacement_i;
    const double r0 = std::min(0.9, 0.9 * min_disp / 2.0);
    const double support = r0 * delta;
    if (2.0 * support >= min_disp)
        throw std::invalid_argument("mollifier_family: delta too large for support injectivity");
    Observable psi = surface_bump(G, point_i(), support, profile_pow);
    const double mass = unfolded_average(psi) * G.covol_group();
    psi.surface_bump->amplitude = 1.0 / mass;  // eval and unfolding read this
    return psi;
}

std::vector<MollifierSweepPoint> mollifier_sweep(LatticeCounter& counter,
                                                 const std::vector<double>& etas,
                                                 const std::vector<double>& R_grid,
                                                 int n_samples, std::uint64_t seed,
                                                 int workers) {
    std::vector<MollifierSweepPoint> out;
    const FuchsianGroup& G = counter.group();
    double rmax = 0.0;
    for (double r : R_grid) rmax = std::max(rmax, r);
    counter.ball(rmax + 1.0);
    for (double eta : etas) {
        MollifierSweepPoint pt;
        pt.eta = eta;
        std::vector<double> xs, ys;
        for (double R : R_grid) {
            const double delta = std::min(1.0, std::exp(-eta * R));
            Observable psi = mollifier_family(G, delta);
            const auto avg = averaged_count(counter, psi, R, 1e-4, n_samples,
                                            seed ^ static_cast<uint64_t>(R * 1e3), workers);
            const double smoothed =
                std::abs(avg.monte_carlo - counter.count(R).covol_ratio);
            const double sandwich =
                static_cast<double>(counter.count(R + delta).N -
                                    counter.count(R - delta).N) /
                ball_area(R);
            const double total = smoothed + sandwich;
            pt.worst_total = std::max(pt.worst_total, total);
            xs.push_back(R);
            ys.push_back(std::log(std::max(total, 1e-300)));
        }
        pt.slope = fit_line(xs, ys).slope;
        out.push_back(pt);
    }
    return out;
}

}  // namespace hypcircle
