#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace hypcircle {

struct GLRule {
    std::vector<double> nodes;    // on (-1, 1)
    std::vector<double> weights;  // sum to 2
};

/// Gauss-Legendre rule of order n (cached; Newton on the Legendre recurrence).
const GLRule& gauss_legendre(int n);

template <typename T>
struct QuadResult {
    T value{};
    double error = 0.0;
    long nodes = 0;
    bool converged = false;
};

/// Composite Gauss-Legendre on [a, b] with panel doubling: starts from
/// `panels` panels of a 24-point rule and doubles the panel count until two
/// successive refinements agree within tol (absolute) or node_cap is hit.
/// Integrands are assumed analytic, so each doubling gains a fixed factor.
template <typename T, typename F>
QuadResult<T> integrate_panels(F&& f, double a, double b, double tol,
                               int panels = 1, long node_cap = (1L << 22),
                               int order = 24) {
    QuadResult<T> res;
    if (!(b > a)) {
        res.converged = true;
        return res;
    }
    if (panels < 1) panels = 1;
    // keep room for at least one doubling under the cap
    if (static_cast<long>(panels) * order * 3 > node_cap)
        panels = static_cast<int>(std::max(1L, node_cap / (3L * order)));
    const GLRule& rule = gauss_legendre(order);
    auto pass = [&](int m) {
        T total{};
        const double h = (b - a) / m;
        for (int p = 0; p < m; ++p) {
            const double mid = a + (p + 0.5) * h;
            T acc{};
            for (size_t j = 0; j < rule.nodes.size(); ++j)
                acc += rule.weights[j] * f(mid + 0.5 * h * rule.nodes[j]);
            total += acc * (0.5 * h);
        }
        return total;
    };
    T prev = pass(panels);
    res.nodes = panels * order;
    for (int m = 2 * panels;; m *= 2) {
        if (res.nodes + static_cast<long>(m) * order > node_cap) {
            res.value = prev;
            res.error = tol > 0 ? tol * 1e3 : 1.0;  // unknown; flagged unconverged
            res.converged = false;
            return res;
        }
        T cur = pass(m);
        res.nodes += static_cast<long>(m) * order;
        const double diff = std::abs(cur - prev);
        if (diff <= tol) {
            res.value = cur;
            res.error = diff;
            res.converged = true;
            return res;
        }
        prev = cur;
    }
}

inline QuadResult<double> integrate(const std::function<double(double)>& f, double a,
                                    double b, double tol, int panels = 1,
                                    long node_cap = (1L << 22)) {
    return integrate_panels<double>(f, a, b, tol, panels, node_cap);
}

inline QuadResult<std::complex<double>> integrate_c(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    double tol, int panels = 1, long node_cap = (1L << 22)) {
    return integrate_panels<std::complex<double>>(f, a, b, tol, panels, node_cap);
}

/// Least-squares line fit y ~ intercept + slope x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<double> residuals;
    bool degenerate = false;
};

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace hypcircle
