#include "hypcircle/equi_stats.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "hypcircle/parallel.hpp"

namespace hypcircle {

double EmpiricalLaw::max_abs() const {
    double m = 0.0;
    for (double s : samples) m = std::max(m, std::abs(s));
    return m;
}

DecayFit decay_rate(const Observable& f, const SL2& p, double theta,
                    const std::vector<double>& t_grid, double tol,
                    std::optional<double> average) {
    const double avg = average ? *average : unfolded_average(f);
    DecayFit out;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const auto k = k_theta(f, p, theta, t_grid[i], tol);
        const double dev = std::abs(k.value - avg);
        if (dev <= 3.0 * std::max(k.error_estimate, 1e-15)) {
            out.dropped.push_back(i);
            continue;
        }
        out.t_used.push_back(t_grid[i]);
        out.log_dev.push_back(std::log(dev));
    }
    out.fit = fit_line(out.t_used, out.log_dev);
    out.degenerate = out.fit.degenerate;
    return out;
}

cplx shrinking_arc_average(const Observable& f, const SL2& p,
                           const std::function<double(double)>& theta1,
                           const std::function<double(double)>& theta2, double t,
                           double tol) {
    const double a = theta1(t), b = theta2(t);
    if (!(a >= 0.0) || !(b > a) || b >= full_circle)
        throw std::invalid_argument("shrinking_arc_average: need 0 <= theta1(t) < theta2(t) < 4pi");
    const double window = b - a;
    if (window < 1e-6)
        throw std::invalid_argument("shrinking_arc_average: window below 1e-6");
    return arc_average(f, rotation_flow(p, a), window, exp_lie(lie_X, t), tol).value;
}

EmpiricalLaw deviation_law(const Observable& f, double theta, double T, int n,
                           std::uint64_t seed, DevScaling scaling, double nu_f,
                           double tol, int workers) {
    if (!f.gamma_invariant)
        throw std::invalid_argument("deviation_law: observable must be Gamma-invariant");
    const FuchsianGroup* G = nullptr;
    if (f.group_bump) G = &f.group_bump->group;
    if (f.surface_bump) G = &f.surface_bump->group;
    if (!G) throw std::invalid_argument("deviation_law: observable carries no group");
    const double avg = unfolded_average(f);
    double scale = 1.0;
    switch (scaling) {
        case DevScaling::subquarter:
            scale = std::exp(0.5 * (1.0 - nu_f) * T);
            break;
        case DevScaling::quarter:
            scale = std::exp(0.5 * T) / T;
            break;
        case DevScaling::superquarter:
            scale = std::exp(0.5 * T);
            break;
    }
    const auto pts = sample_quotient(*G, n, seed);
    EmpiricalLaw law;
    law.seed = seed;
    law.samples.resize(static_cast<std::size_t>(n));
    parallel_for(n, workers, [&](int i) {
        const auto k = k_theta(f, pts[static_cast<std::size_t>(i)], theta, T, tol);
        law.samples[static_cast<std::size_t>(i)] = scale * (k.value.real() - avg);
    });
    std::sort(law.samples.begin(), law.samples.end());
    return law;
}

namespace {

// Largest mass transportable between the two atom sets when an x-atom may
// only be served by y-atoms with |x - y| < eps. Earliest-expiring supply
// first; exact for interval windows of equal width.
double transportable(const std::vector<double>& xs, const std::vector<double>& ys,
                     double eps) {
    const double wx = 1.0 / static_cast<double>(xs.size());
    const double wy = 1.0 / static_cast<double>(ys.size());
    std::deque<std::pair<std::size_t, double>> open;  // (y index, remaining mass)
    std::size_t next_y = 0;
    double moved = 0.0;
    for (double x : xs) {
        while (next_y < ys.size() && ys[next_y] < x + eps) {
            open.emplace_back(next_y, wy);
            ++next_y;
        }
        while (!open.empty() && ys[open.front().first] <= x - eps) open.pop_front();
        double demand = wx;
        while (demand > 0.0 && !open.empty()) {
            auto& [yi, cap] = open.front();
            const double take = std::min(demand, cap);
            demand -= take;
            cap -= take;
            moved += take;
            if (cap <= 1e-18) open.pop_front();
        }
    }
    return moved;
}

}  // namespace

double levy_prokhorov(const EmpiricalLaw& a, const EmpiricalLaw& b) {
    if (a.samples.empty() || b.samples.empty())
        throw std::invalid_argument("levy_prokhorov: laws must be nonempty");
    auto deficiency = [&](double eps) {
        return 1.0 - transportable(a.samples, b.samples, eps);
    };
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (deficiency(mid) <= mid ? hi : lo) = mid;
    }
    return hi;
}

double lp_coupling_bound(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.empty())
        throw std::invalid_argument("lp_coupling_bound: need paired samples");
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        worst = std::max(worst, std::abs(x[i] - y[i]));
    return std::min(worst, 1.0);
}

NoCltPair nocl_representation(const Observable& f, const SL2& p, double theta, double T,
                              double tol) {
    if (!f.gamma_invariant)
        throw std::invalid_argument("nocl_representation: observable must be Gamma-invariant");
    const double avg = unfolded_average(f);
    NoCltPair out;
    out.lhs = std::exp(T) * (k_theta(f, p, theta, T, tol).value - avg);

    // Zero-Theta-weight component: K-invariant observables are their own
    // fiber average.
    Observable f0;
    if (f.kind == Observable::Kind::surface_bump) {
        f0 = f;
    } else {
        f0.feature_scale = f.feature_scale;
        f0.eval_fn = [f](const SL2& g) {
            cplx acc = 0.0;
            const int m = 256;
            for (int j = 0; j < m; ++j)
                acc += f.eval_fn(rotation_flow(g, full_circle * (j + 0.5) / m));
            return acc / static_cast<double>(m);
        };
    }

    if (std::abs(theta - full_circle) < 1e-12) {
        out.rhs = 0.0;  // r_{4pi} is the identity
        return out;
    }
    auto diff = [&](double xi) -> cplx {
        const SL2 a = geodesic_flow(p, xi);
        const SL2 b = geodesic_flow(rotation_flow(p, theta), xi);
        return (f0.lie(lie_U, a) - f0.lie(lie_U, b)) / (1.0 - std::exp(-2.0 * xi));
    };
    out.rhs = 2.0 / theta * integrate_c(diff, 1.0, T, tol, 4).value;
    return out;
}

double ks_statistic(const std::vector<double>& sorted_samples,
                    const std::function<double(double)>& cdf) {
    const std::size_t n = sorted_samples.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = cdf(sorted_samples[i]);
        worst = std::max(worst, std::abs(c - static_cast<double>(i) / n));
        worst = std::max(worst, std::abs(static_cast<double>(i + 1) / n - c));
    }
    return worst;
}

double ks_pvalue(double stat, std::size_t n) {
    const double rn = std::sqrt(static_cast<double>(n));
    const double lam = (rn + 0.12 + 0.11 / rn) * stat;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * lam * lam);
        sum += term;
        if (std::abs(term) < 1e-12) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

}  // namespace hypcircle
