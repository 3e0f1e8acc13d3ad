#include "hypcircle/spectral.hpp"

#include <cmath>
#include <map>
#include <memory>

namespace hypcircle {

namespace {

cplx nu_from_mu(double mu) {
    return mu <= 0.25 ? cplx(std::sqrt(1.0 - 4.0 * mu), 0.0)
                      : cplx(0.0, std::sqrt(4.0 * mu - 1.0));
}

// cosh(nu tau / 2) and sinh(nu tau / 2)/nu, stable through nu -> 0.
void kernel_cs(cplx nu, double tau, cplx& c, cplx& s) {
    const cplx z = 0.5 * nu * tau;
    if (std::abs(z) < 1e-4) {
        const cplx z2 = z * z;
        c = 1.0 + z2 * (0.5 + z2 / 24.0);
        s = 0.5 * tau * (1.0 + z2 * (1.0 / 6.0 + z2 / 120.0));
    } else {
        c = std::cosh(z);
        s = std::sinh(z) / nu;
    }
}

struct TailIntegral {
    cplx value = 0.0;
    double tail = 0.0;
    double T = 0.0;
};

// Closed-form tail of |g|(xi) <= (c0 + c1 xi) e^{-a xi} past T.
double kernel_tail(double a, double c0, double c1, double T) {
    if (a <= 0.0) return 1e300;
    return std::exp(-a * T) * (c0 / a + c1 * (T / a + 1.0 / (a * a)));
}

// The scalar kernels g(xi) of the coefficient integrals, together with the
// envelope (c0 + c1 xi) e^{-a xi} used for truncation.
struct Kernel {
    std::function<cplx(double)> g;
    double a, c0, c1;
};

// int_1^infty h(xi) dxi advanced panel by panel until the analytic tail
// (uniform bound times kernel tail) or a geometric projection of the panel
// increments drops below tol. For integrands that are cheap per point.
TailIntegral integrate_decaying(const std::function<cplx(double)>& h, double a_decay,
                                double c0, double c1, double g_bound, double tol,
                                double panel_w, double t_max, double inner_tol) {
    TailIntegral out;
    double T = 1.0;
    double prev_inc = -1.0, prev_inc2 = -1.0;
    while (T < t_max) {
        const double T2 = std::min(T + panel_w, t_max);
        const auto q = integrate_c(h, T, T2, inner_tol, 2);
        out.value += q.value;
        const double inc = std::abs(q.value);
        T = T2;
        const double analytic = g_bound * kernel_tail(a_decay, c0, c1, T);
        double projected = 1e300;
        if (prev_inc > 0.0 && prev_inc2 > 0.0 && inc < prev_inc && prev_inc < prev_inc2) {
            // geometric projection of the panel increments; the factor 10
            // covers oscillatory integrands whose increments alternate in size
            const double r = std::min(0.9, inc / std::max(prev_inc, 1e-300));
            projected = 10.0 * inc * std::max(1.0, r / (1.0 - r));
        }
        const double tail = std::min(analytic, projected);
        if (tail <= 0.5 * tol) {
            out.tail = tail;
            out.T = T;
            return out;
        }
        prev_inc2 = prev_inc;
        prev_inc = inc;
    }
    throw std::runtime_error("compute_coefficients: tail bound not achievable within T <= " +
                             std::to_string(t_max));
}

// Arc part of int_1^infty g(xi) G_arc(xi) dxi by Fubini: the s-average is
// pulled outside, so each s sees a smooth exponentially damped ray integral
// in xi instead of a fully resolved circle at every xi node.
TailIntegral fubini_arc_integral(const Observable& f, const SL2& p,
                                 const SpectralParams& params, const Kernel& ker,
                                 double tol) {
    const double proxy = f.c1_norm_proxy();
    const double d1 = 1.0 - std::exp(-2.0);
    const double n2 = static_cast<double>(params.n) * params.n;
    const double cbound = 10.0 * (n2 + 2.0) * proxy / (d1 * d1);

    double T = 3.0;
    while (T < 64.0 && cbound * kernel_tail(ker.a + 1.0, ker.c0, ker.c1, T) > 0.25 * tol)
        T += 0.5;
    if (T >= 64.0)
        throw std::runtime_error("compute_coefficients: arc tail not under control by T = 64");

    // fixed composite xi-rule; the integrand is analytic and decaying
    const GLRule& rule = gauss_legendre(24);
    std::vector<double> xs, ws;
    const int panels = static_cast<int>(std::ceil(T - 1.0));
    for (int pnl = 0; pnl < panels; ++pnl) {
        const double a = 1.0 + (T - 1.0) * pnl / panels;
        const double b = 1.0 + (T - 1.0) * (pnl + 1) / panels;
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
            xs.push_back(0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[j]);
            ws.push_back(0.5 * (b - a) * rule.weights[j]);
        }
    }
    std::vector<cplx> kernel_vals(xs.size());
    std::vector<double> emx(xs.size()), den(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) {
        kernel_vals[j] = ker.g(xs[j]);
        emx[j] = std::exp(-xs[j]);
        den[j] = 1.0 - std::exp(-2.0 * xs[j]);
    }

    auto along_ray = [&](double s) -> cplx {
        const SL2 ps = rotation_flow(p, s);
        cplx acc = 0.0;
        for (std::size_t j = 0; j < xs.size(); ++j) {
            const SL2 g = geodesic_flow(ps, xs[j]);
            cplx term = -2.0 * emx[j] / den[j] * f.lie(lie_X, g);
            if (n2 != 0.0) term += n2 * emx[j] / (den[j] * den[j]) * f.eval_fn(g);
            acc += ws[j] * kernel_vals[j] * term;
        }
        return acc;
    };
    const auto q = integrate_panels<cplx>(along_ray, 0.0, params.theta,
                                          0.25 * tol * params.theta, 64, 1L << 24);
    TailIntegral out;
    out.value = q.value / params.theta;
    out.tail = cbound * kernel_tail(ker.a + 1.0, ker.c0, ker.c1, T) + q.error / params.theta;
    out.T = T;
    return out;
}

ExpansionCoefficients assemble(
    const SpectralParams& params, const std::function<cplx(double)>& G_full, cplx y1,
    cplx y1p, double tol,
    const std::function<TailIntegral(const Kernel&, double)>& integrate_kernel) {
    ExpansionCoefficients co;
    co.params = params;
    co.mu_case = classify_mu(params);
    co.G = G_full;
    const cplx nu = params.nu;

    if (co.mu_case == MuCase::quarter) {
        co.a_plus = 0.5 * std::sqrt(std::exp(1.0)) * (y1 - 2.0 * y1p);
        co.a_minus = 0.5 * std::sqrt(std::exp(1.0)) * (y1 + 2.0 * y1p);
    } else {
        co.a_plus = -((1.0 - nu) * y1 + 2.0 * y1p) / (2.0 * nu * std::exp(-(1.0 + nu) / 2.0));
        co.a_minus = ((1.0 + nu) * y1 + 2.0 * y1p) / (2.0 * nu * std::exp(-(1.0 - nu) / 2.0));
    }

    switch (co.mu_case) {
        case MuCase::principal: {
            const double beta = nu.imag();
            const Kernel k_sin{[beta](double xi) {
                                   return cplx(std::exp(-0.5 * xi) * std::sin(0.5 * beta * xi));
                               },
                               0.5, 1.0, 0.0};
            const Kernel k_cos{[beta](double xi) {
                                   return cplx(std::exp(-0.5 * xi) * std::cos(0.5 * beta * xi));
                               },
                               0.5, 1.0, 0.0};
            const auto is = integrate_kernel(k_sin, 0.5 * tol * beta);
            const auto ic = integrate_kernel(k_cos, 0.5 * tol * beta);
            // Coefficients of e^{-t/2} cos and e^{-t/2} sin, consistent with
            // the closed-form solution.
            co.D_plus = co.a_plus + co.a_minus - 2.0 / beta * is.value;
            co.D_minus = cplx(0.0, 1.0) * (co.a_minus - co.a_plus) + 2.0 / beta * ic.value;
            co.tail_bound = (is.tail + ic.tail) * 2.0 / beta;
            co.truncation_T = std::max(is.T, ic.T);
            break;
        }
        case MuCase::quarter: {
            const Kernel k_lin{[](double xi) { return cplx(xi * std::exp(-0.5 * xi)); },
                               0.5, 0.0, 1.0};
            const Kernel k_pln{[](double xi) { return cplx(std::exp(-0.5 * xi)); },
                               0.5, 1.0, 0.0};
            const auto il = integrate_kernel(k_lin, tol);
            const auto ip = integrate_kernel(k_pln, tol);
            co.D_plus = co.a_plus - il.value;
            co.D_minus = co.a_minus + ip.value;
            co.tail_bound = il.tail + ip.tail;
            co.truncation_T = std::max(il.T, ip.T);
            break;
        }
        case MuCase::complementary: {
            const double nr = nu.real();
            const Kernel k_slow{[nr](double xi) { return cplx(std::exp(-0.5 * (1.0 - nr) * xi)); },
                                0.5 * (1.0 - nr), 1.0, 0.0};
            const Kernel k_fast{[nr](double xi) { return cplx(std::exp(-0.5 * (1.0 + nr) * xi)); },
                                0.5 * (1.0 + nr), 1.0, 0.0};
            const auto is = integrate_kernel(k_slow, tol * nr);
            const auto ifa = integrate_kernel(k_fast, tol * nr);
            co.D_plus = co.a_plus - is.value / nu;
            co.D_minus = co.a_minus + ifa.value / nu;
            co.tail_bound = (is.tail + ifa.tail) / nr;
            co.truncation_T = std::max(is.T, ifa.T);
            break;
        }
        case MuCase::zero: {
            const Kernel k_exp{[](double xi) { return cplx(std::exp(-xi)); }, 1.0, 1.0, 0.0};
            const auto ie = integrate_kernel(k_exp, tol);
            co.D_plus = co.a_plus;
            co.D_minus = co.a_minus + ie.value;  // the t -> infinity limit
            co.tail_bound = ie.tail;
            co.truncation_T = ie.T;
            break;
        }
        case MuCase::discrete: {
            const double nr = nu.real();
            const Kernel k_disc{[nr](double xi) { return cplx(std::exp(-0.5 * (nr + 1.0) * xi)); },
                                0.5 * (nr + 1.0), 1.0, 0.0};
            const auto id = integrate_kernel(k_disc, tol * nr);
            co.discrete_defect = co.a_minus + id.value / nu;
            co.D_plus = co.a_plus;
            co.D_minus = co.a_minus;
            co.tail_bound = id.tail / nr;
            co.truncation_T = id.T;
            break;
        }
    }
    return co;
}

// Integration over [1, t] on fixed half-unit panels: different upper limits
// share abscissas, so a memoized G is evaluated once per node across a whole
// family of solve_cauchy calls.
cplx integrate_fixed(const std::function<cplx(double)>& h, double a, double b,
                     double tol) {
    if (!(b > a)) return 0.0;
    cplx acc = 0.0;
    const double w = 0.5;
    const int full = static_cast<int>(std::floor((b - a) / w));
    const double per_panel = tol / std::max(1.0, (b - a) / w);
    for (int j = 0; j < full; ++j)
        acc += integrate_c(h, a + j * w, a + (j + 1) * w, per_panel, 1).value;
    if (a + full * w < b - 1e-14)
        acc += integrate_c(h, a + full * w, b, per_panel, 1).value;
    return acc;
}

}  // namespace

MuCase classify_mu(const SpectralParams& params) {
    if (std::abs(params.mu - 0.25) < 1e-12 || std::abs(params.nu) < 1e-8)
        return MuCase::quarter;
    if (params.mu > 0.25) return MuCase::principal;
    if (params.mu > 1e-12) return MuCase::complementary;
    if (params.mu > -1e-12) return MuCase::zero;
    return MuCase::discrete;
}

cplx solve_cauchy(double mu, const std::function<cplx(double)>& G, cplx y1, cplx y1p,
                  double t, double tol) {
    if (!(t >= 1.0)) throw std::invalid_argument("solve_cauchy: t must be >= 1");
    const cplx nu = nu_from_mu(mu);

    if (std::abs(mu - 0.25) < 1e-15) {
        // double root -1/2
        const double sqe = std::sqrt(std::exp(1.0));
        const cplx c1 = 0.5 * sqe * (y1 - 2.0 * y1p);
        const cplx c2 = 0.5 * sqe * (y1 + 2.0 * y1p);
        const cplx i1 = integrate_fixed(
            [&](double xi) { return xi * std::exp(-0.5 * xi) * G(xi); }, 1.0, t, tol);
        const cplx i2 = integrate_fixed(
            [&](double xi) { return std::exp(-0.5 * xi) * G(xi); }, 1.0, t, tol);
        return std::exp(-0.5 * t) * (c1 - i1) + t * std::exp(-0.5 * t) * (c2 + i2);
    }

    if (std::abs(nu) < 1e-8) {
        // series branch through the degenerate root, uniform kernel
        // 2 e^{-tau/2} sinh(nu tau/2)/nu
        cplx c, s;
        kernel_cs(nu, t - 1.0, c, s);
        cplx val = std::exp(-0.5 * (t - 1.0)) * (y1 * c + (0.5 * y1 + y1p) * 2.0 * s);
        val += integrate_fixed(
            [&](double xi) {
                cplx ck, sk;
                kernel_cs(nu, t - xi, ck, sk);
                return 2.0 * std::exp(-0.5 * (t - xi)) * sk * std::exp(-xi) * G(xi);
            },
            1.0, t, tol);
        return val;
    }

    const cplx c1 = ((1.0 + nu) * y1 + 2.0 * y1p) / (2.0 * nu * std::exp(-0.5 * (1.0 - nu)));
    const cplx c2 = ((1.0 - nu) * y1 + 2.0 * y1p) / (2.0 * nu * std::exp(-0.5 * (1.0 + nu)));
    const cplx i_plus = integrate_fixed(
        [&](double xi) { return std::exp(-0.5 * (1.0 + nu) * xi) * G(xi); }, 1.0, t, tol);
    const cplx i_minus = integrate_fixed(
        [&](double xi) { return std::exp(-0.5 * (1.0 - nu) * xi) * G(xi); }, 1.0, t, tol);
    return std::exp(-0.5 * (1.0 - nu) * t) * (c1 + i_plus / nu) -
           std::exp(-0.5 * (1.0 + nu) * t) * (c2 + i_minus / nu);
}

InitialData initial_data(const Observable& f, const SL2& p, const SpectralParams& params,
                         double tol) {
    InitialData d;
    d.y1 = k_theta(f, p, params.theta, 1.0, tol).value;
    Observable xf;
    xf.feature_scale = f.feature_scale;
    xf.eval_fn = [f](const SL2& g) { return f.lie(lie_X, g); };
    d.y1p = arc_average(xf, p, params.theta, exp_lie(lie_X, 1.0), tol).value;
    return d;
}

std::function<cplx(double)> g_function(const Observable& f, const SL2& p,
                                       const SpectralParams& params, double tol) {
    auto cache = std::make_shared<std::map<double, cplx>>();
    return [f, p, params, tol, cache](double xi) -> cplx {
        auto it = cache->find(xi);
        if (it != cache->end()) return it->second;
        const cplx v = g_coefficient(f, p, params, xi, tol);
        (*cache)[xi] = v;
        return v;
    };
}

ExpansionCoefficients compute_coefficients(const Observable& f, const SL2& p,
                                           const SpectralParams& params, double tol) {
    const double proxy = f.c1_norm_proxy();
    const double n2p1 = static_cast<double>(params.n) * params.n + 1.0;
    const double boundary_bound = 10.0 * kappa0() / params.theta * n2p1 * proxy;

    auto integrate_kernel = [&](const Kernel& ker, double ktol) {
        TailIntegral arc = fubini_arc_integral(f, p, params, ker, 0.5 * ktol);
        auto hb = [&](double xi) { return ker.g(xi) * g_boundary_part(f, p, params, xi); };
        TailIntegral bdry = integrate_decaying(hb, ker.a, ker.c0, ker.c1, boundary_bound,
                                               0.5 * ktol, 2.0, 60.0, 0.02 * ktol);
        TailIntegral total;
        total.value = arc.value + bdry.value;
        total.tail = arc.tail + bdry.tail;
        total.T = std::max(arc.T, bdry.T);
        return total;
    };

    const auto init = initial_data(f, p, params, 0.05 * tol);
    auto G_full = g_function(f, p, params, 0.1 * tol);
    return assemble(params, G_full, init.y1, init.y1p, tol, integrate_kernel);
}

ExpansionCoefficients compute_coefficients_g(const std::function<cplx(double)>& G,
                                             cplx y1, cplx y1p,
                                             const SpectralParams& params, double tol,
                                             double g_bound) {
    auto integrate_kernel = [&](const Kernel& ker, double ktol) {
        auto h = [&](double xi) { return ker.g(xi) * G(xi); };
        return integrate_decaying(h, ker.a, ker.c0, ker.c1, g_bound, ktol, 2.0, 60.0,
                                  0.02 * ktol);
    };
    return assemble(params, G, y1, y1p, tol, integrate_kernel);
}

cplx expansion_eval(const ExpansionCoefficients& co, double t, double tol) {
    if (!(t >= 1.0)) throw std::invalid_argument("expansion_eval: t must be >= 1");
    switch (co.mu_case) {
        case MuCase::principal: {
            const double beta = co.params.nu.imag();
            return std::exp(-0.5 * t) * (std::cos(0.5 * beta * t) * co.D_plus +
                                         std::sin(0.5 * beta * t) * co.D_minus);
        }
        case MuCase::quarter:
            return std::exp(-0.5 * t) * co.D_plus + t * std::exp(-0.5 * t) * co.D_minus;
        case MuCase::complementary: {
            const cplx nu = co.params.nu;
            return std::exp(-0.5 * (1.0 + nu.real()) * t) * co.D_plus +
                   std::exp(-0.5 * (1.0 - nu.real()) * t) * co.D_minus;
        }
        case MuCase::zero: {
            const cplx drift =
                integrate_fixed([&](double xi) { return -co.G(xi); }, 1.0, t, tol);
            return co.D_minus + std::exp(-t) * drift;
        }
        case MuCase::discrete:
            return 0.0;
    }
    return 0.0;
}

}  // namespace hypcircle
