#include "hypcircle/circle_average.hpp"

#include <algorithm>
#include <cmath>

namespace hypcircle {

namespace {

// Arc geometry: p exp(s Theta) M . i traces the circle of radius
// t_m = d(i, M.i) around p.i; in polar coordinates around i (before applying
// p) the point at parameter s sits at direction psi0 + s.
struct ArcFrame {
    double t_m = 0.0;
    double psi0 = 0.0;
    double cosh_t = 1.0, sinh_t = 0.0;
};

ArcFrame arc_frame(const SL2& m) {
    ArcFrame fr;
    const HPoint w = mobius(m, point_i());
    const Polar pol = polar_from_i(w);
    fr.cosh_t = pol.cosh_r;
    fr.sinh_t = std::sqrt(std::max(0.0, pol.cosh_r * pol.cosh_r - 1.0));
    fr.t_m = std::acosh(std::max(1.0, pol.cosh_r));
    fr.psi0 = pol.psi;
    return fr;
}

CircleAverageResult dense_arc_average(const Observable& f, const SL2& p, double theta,
                                      const SL2& m, double tol, long node_cap) {
    const ArcFrame fr = arc_frame(m);
    const double scale = std::max(f.feature_scale, 1e-6);
    const double budget = std::max(64.0, std::ceil(8.0 * theta * std::exp(fr.t_m) / scale));
    const int panels = static_cast<int>(std::min(budget / 24.0 + 1.0, 2.0e5));
    auto integrand = [&](double s) { return f.eval_fn(rotation_flow(p, s) * m); };
    auto q = integrate_panels<cplx>(integrand, 0.0, theta, tol * theta, panels, node_cap);
    CircleAverageResult res;
    res.value = q.value / theta;
    res.error_estimate = q.error / theta;
    res.nodes_used = q.nodes;
    res.converged = q.converged;
    return res;
}

// Integrate a smooth window integrand with a paired rule; the difference
// doubles as the error estimate.
template <typename F>
void window_integral(F&& f, double a, double b, cplx& total, double& err, long& nodes,
                     int order = 24) {
    const GLRule& coarse = gauss_legendre(order);
    const GLRule& fine = gauss_legendre(2 * order);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    cplx vc = 0.0, vf = 0.0;
    for (std::size_t j = 0; j < coarse.nodes.size(); ++j)
        vc += coarse.weights[j] * f(mid + half * coarse.nodes[j]);
    for (std::size_t j = 0; j < fine.nodes.size(); ++j)
        vf += fine.weights[j] * f(mid + half * fine.nodes[j]);
    total += vf * half;
    err += std::abs(vf - vc) * half;
    nodes += 3 * order;
}

// acosh(1+x)^2 without the acosh: series for the small arguments the bump
// supports live on, exact fallback otherwise.
inline double acosh1p_sq(double x) {
    if (x <= 0.0) return 0.0;
    if (x < 0.05)
        return 2.0 * x - x * x / 3.0 + 4.0 * x * x * x / 45.0 -
               x * x * x * x / 35.0;
    const double d = std::acosh(1.0 + x);
    return d * d;
}

// Windows [lo, hi] + period Z intersected with [0, theta].
void periodic_windows(double lo, double hi, double period, double theta,
                      std::vector<std::pair<double, double>>& out) {
    const double k0 = std::floor(-hi / period);
    for (double k = k0;; k += 1.0) {
        const double wl = lo + period * k, wh = hi + period * k;
        if (wl > theta) break;
        const double cl = std::max(wl, 0.0), ch = std::min(wh, theta);
        if (ch > cl + 1e-16) out.emplace_back(cl, ch);
    }
}

// ---------------------------------------------------------------------------
// Surface-bump path: each orbit point of the bump center meets the arc circle
// in one angular window per 2pi; integrate the radial profile there only.

CircleAverageResult surface_bump_arc_average(const Observable& f, const SL2& p,
                                             double theta, const SL2& m, double tol) {
    const auto& bump = *f.surface_bump;
    const ArcFrame fr = arc_frame(m);
    const double w = bump.width;
    const HPoint zp = mobius(p, point_i());
    const auto ball = bump.arc_points(fr.t_m + w + hyp_dist(zp, bump.center) + 0.05);

    const SL2 pinv = p.inverse();
    const double cosh_w = std::cosh(w);
    const double lo_c = std::cosh(std::max(0.0, fr.t_m - w));
    const double hi_c = std::cosh(fr.t_m + w);
    const double w2 = w * w;
    const int pw = bump.profile_pow;

    CircleAverageResult res;
    cplx total = 0.0;
    double err = 0.0;
    long nodes = 0;

    for (const auto& pt : ball->points) {
        // inline p^{-1}.pt and its cosh distance to i; this scan dominates
        const double nx = pinv.a * pt.x + pinv.b, ny = pinv.a * pt.y;
        const double dx = pinv.c * pt.x + pinv.d, dy = pinv.c * pt.y;
        const double den = dx * dx + dy * dy;
        const double qy = pt.y / den;  // det = 1
        const double qx = (nx * dx + ny * dy) / den;
        const double cr = 1.0 + (qx * qx + (qy - 1.0) * (qy - 1.0)) / (2.0 * qy);
        if (cr < lo_c - 1e-14 || cr > hi_c + 1e-14) continue;
        const HPoint q(qx, qy);
        const double sr = std::sqrt(std::max(0.0, cr * cr - 1.0));
        if (fr.sinh_t * sr < 1e-280) {
            // concentric: constant distance along the whole arc
            const double cd = fr.cosh_t * cr;
            if (cd < cosh_w)
                total += bump_profile(acosh1p_sq(cd - 1.0) / w2, pw) * theta;
            continue;
        }
        const double cstar = (fr.cosh_t * cr - cosh_w) / (fr.sinh_t * sr);
        if (cstar >= 1.0) continue;
        const Polar pol = polar_from_i(q);
        auto integrand = [&](double s) {
            const double cd =
                fr.cosh_t * cr - fr.sinh_t * sr * std::cos(fr.psi0 + s - pol.psi);
            return cplx(bump_profile(acosh1p_sq(cd - 1.0) / w2, pw), 0.0);
        };
        std::vector<std::pair<double, double>> wins;
        if (cstar <= -1.0) {
            wins.emplace_back(0.0, theta);
        } else {
            const double delta = std::acos(cstar);
            periodic_windows(pol.psi - fr.psi0 - delta, pol.psi - fr.psi0 + delta,
                             2.0 * pi, theta, wins);
        }
        const int order = tol >= 1e-8 ? 12 : (tol >= 1e-10 ? 16 : 24);
        for (const auto& [a, b] : wins)
            window_integral(integrand, a, b, total, err, nodes, order);
    }
    res.value = bump.amplitude * total / theta;
    res.error_estimate = bump.amplitude * err / theta;
    res.nodes_used = nodes;
    res.converged = res.error_estimate <= std::max(tol, 1e-13);
    return res;
}

// ---------------------------------------------------------------------------
// Group-bump path. Along the arc A(s) = p exp(s Theta) M the squared gauge
// distance to a fixed translate gamma c is the trig polynomial
//   u^2(s) = K0 + K1 cos(s/2) + K2 sin(s/2) + K3 cos s + K4 sin s  (4pi-periodic),
// evaluated only on the angular window where the underlying points come
// within the verified hyperbolic reach of the gauge ball.

struct TrigDist {
    double k0, k1, k2, k3, k4;
    double operator()(double s) const {
        return k0 + k1 * std::cos(0.5 * s) + k2 * std::sin(0.5 * s) + k3 * std::cos(s) +
               k4 * std::sin(s);
    }
};

TrigDist trig_dist(const SL2& minv, const SL2& pgc) {
    const SL2 u = minv * pgc;
    SL2 jp;  // J P with J = [[0,1],[-1,0]]
    jp.a = pgc.c; jp.b = pgc.d; jp.c = -pgc.a; jp.d = -pgc.b;
    const SL2 v = minv * jp;
    const double tru = u.a + u.d, trv = v.a + v.d;
    const double nu2 = u.a * u.a + u.b * u.b + u.c * u.c + u.d * u.d;
    const double nv2 = v.a * v.a + v.b * v.b + v.c * v.c + v.d * v.d;
    const double uv = u.a * v.a + u.b * v.b + u.c * v.c + u.d * v.d;
    return {2.0 + 0.5 * (nu2 + nv2), -2.0 * tru, 2.0 * trv, 0.5 * (nu2 - nv2), -uv};
}

CircleAverageResult group_bump_arc_average(const Observable& f, const SL2& p,
                                           double theta, const SL2& m, double tol) {
    const auto& bump = *f.group_bump;
    const ArcFrame fr = arc_frame(m);
    const double w = bump.width;
    const double reach = bump.hyp_reach;
    const HPoint zp = mobius(p, point_i());
    const HPoint zc = mobius(bump.center, point_i());
    const auto ball = bump.arc_points(fr.t_m + reach + hyp_dist(zp, zc) + 0.05);

    const SL2 pinv = p.inverse();
    const SL2 minv = m.inverse();
    const double cosh_reach = std::cosh(reach);
    const double lo_c = std::cosh(std::max(0.0, fr.t_m - reach));
    const double hi_c = std::cosh(fr.t_m + reach);
    const double w2 = w * w;
    const int pw = bump.profile_pow;

    CircleAverageResult res;
    cplx total = 0.0;
    double err = 0.0;
    long nodes = 0;

    for (std::size_t j = 0; j < ball->points.size(); ++j) {
        const HPoint& pt = ball->points[j];
        const double nx = pinv.a * pt.x + pinv.b, ny = pinv.a * pt.y;
        const double ddx = pinv.c * pt.x + pinv.d, ddy = pinv.c * pt.y;
        const double den = ddx * ddx + ddy * ddy;
        const double qy = pt.y / den;
        const double qx = (nx * ddx + ny * ddy) / den;
        const double cr = 1.0 + (qx * qx + (qy - 1.0) * (qy - 1.0)) / (2.0 * qy);
        if (cr < lo_c - 1e-14 || cr > hi_c + 1e-14) continue;
        const HPoint q(qx, qy);
        const double sr = std::sqrt(std::max(0.0, cr * cr - 1.0));

        std::vector<std::pair<double, double>> wins;
        if (fr.sinh_t * sr < 1e-280) {
            wins.emplace_back(0.0, theta);
        } else {
            const double cstar = (fr.cosh_t * cr - cosh_reach) / (fr.sinh_t * sr);
            if (cstar >= 1.0) continue;
            if (cstar <= -1.0) {
                wins.emplace_back(0.0, theta);
            } else {
                const double delta = std::acos(cstar);
                const Polar pol = polar_from_i(q);
                // The gauge support is 4pi-periodic but confined to the
                // 2pi-periodic hyperbolic window; take both copies and let
                // the per-element integrand vanish where the sign is wrong.
                periodic_windows(pol.psi - fr.psi0 - delta, pol.psi - fr.psi0 + delta,
                                 2.0 * pi, theta, wins);
            }
        }
        for (const auto& sigma : bump.stab) {
            const SL2 base = ball->elements[j] * sigma * bump.center;
            for (int sign = 0; sign < 2; ++sign) {
                const SL2 gc = sign == 0 ? base : -base;
                const TrigDist td = trig_dist(minv, pinv * gc);
                auto integrand = [&](double s) {
                    return cplx(bump_profile(td(s) / w2, pw), 0.0);
                };
                for (const auto& [a, b] : wins) {
                    // Locate the sub-dips where the gauge distance actually
                    // drops below the support level; most windows have none.
                    const int ns = 17;
                    const double h = (b - a) / (ns - 1);
                    double vals[ns];
                    for (int k = 0; k < ns; ++k) vals[k] = td(a + k * h);
                    int k = 0;
                    while (k < ns) {
                        if (vals[k] >= 1.5 * w2) {
                            ++k;
                            continue;
                        }
                        int k2 = k;
                        while (k2 + 1 < ns && vals[k2 + 1] < 1.5 * w2) ++k2;
                        double lo = a + std::max(0, k - 1) * h;
                        double hi = a + std::min(ns - 1, k2 + 1) * h;
                        // golden-section the run to the true minimum
                        double x1 = lo + 0.381966 * (hi - lo), x2 = hi - 0.381966 * (hi - lo);
                        double f1 = td(x1), f2 = td(x2);
                        double glo = lo, ghi = hi;
                        for (int it = 0; it < 40; ++it) {
                            if (f1 < f2) {
                                ghi = x2;
                                x2 = x1;
                                f2 = f1;
                                x1 = glo + 0.381966 * (ghi - glo);
                                f1 = td(x1);
                            } else {
                                glo = x1;
                                x1 = x2;
                                f1 = f2;
                                x2 = ghi - 0.381966 * (ghi - glo);
                                f2 = td(x2);
                            }
                        }
                        const double smin = 0.5 * (glo + ghi);
                        if (td(smin) < w2) {
                            double left = lo, right = hi;
                            if (td(lo) > w2) {
                                double ll = lo, rr = smin;
                                for (int it = 0; it < 60; ++it) {
                                    const double mid = 0.5 * (ll + rr);
                                    (td(mid) > w2 ? ll : rr) = mid;
                                }
                                left = ll;
                            }
                            if (td(hi) > w2) {
                                double ll = smin, rr = hi;
                                for (int it = 0; it < 60; ++it) {
                                    const double mid = 0.5 * (ll + rr);
                                    (td(mid) > w2 ? rr : ll) = mid;
                                }
                                right = rr;
                            }
                            window_integral(integrand, left, right, total, err, nodes);
                        }
                        k = k2 + 1;
                    }
                }
            }
        }
    }
    res.value = total / theta;
    res.error_estimate = err / theta;
    res.nodes_used = nodes;
    res.converged = res.error_estimate <= std::max(tol, 1e-13);
    return res;
}

}  // namespace

CircleAverageResult arc_average(const Observable& f, const SL2& p, double theta,
                                const SL2& m, double tol, long node_cap) {
    if (!(theta > 0.0) || theta > full_circle + 1e-12)
        throw std::invalid_argument("arc_average: theta must lie in (0, 4pi]");
    if (f.kind == Observable::Kind::surface_bump)
        return surface_bump_arc_average(f, p, theta, m, tol);
    if (f.kind == Observable::Kind::group_bump && arc_frame(m).t_m >= 3.5)
        return group_bump_arc_average(f, p, theta, m, tol);
    return dense_arc_average(f, p, theta, m, tol, node_cap);
}

CircleAverageResult k_theta(const Observable& f, const SL2& p, double theta, double t,
                            double tol, double t_cap) {
    if (t > t_cap)
        throw std::invalid_argument("k_theta: t exceeds the node-budget cap " +
                                    std::to_string(t_cap) + "; pass a larger t_cap");
    return arc_average(f, p, theta, exp_lie(lie_X, t), tol);
}

KDerivatives k_theta_derivatives(const Observable& f, const SL2& p, double theta,
                                 double t, double tol) {
    KDerivatives kd;
    kd.k = k_theta(f, p, theta, t, tol, 1e9);
    Observable xf;
    xf.feature_scale = f.feature_scale;
    xf.eval_fn = [f](const SL2& g) { return f.lie(lie_X, g); };
    kd.k1 = arc_average(xf, p, theta, exp_lie(lie_X, t), tol);
    Observable xxf;
    xxf.feature_scale = f.feature_scale;
    xxf.eval_fn = [f](const SL2& g) { return f.lie2(lie_X, lie_X, g); };
    kd.k2 = arc_average(xxf, p, theta, exp_lie(lie_X, t), tol);
    return kd;
}

BoundaryTerms boundary_terms(const Observable& f, const SL2& p, double theta, double t) {
    BoundaryTerms bt;
    const SL2 at_theta = geodesic_flow(rotation_flow(p, theta), t);
    const SL2 at_zero = geodesic_flow(p, t);
    bt.A = f.eval_fn(at_theta) - f.eval_fn(at_zero);
    bt.B = f.lie(lie_U, at_theta) - f.lie(lie_U, at_zero);
    return bt;
}

cplx g_coefficient(const Observable& f, const SL2& p, const SpectralParams& params,
                   double t, double tol) {
    return g_arc_part(f, p, params, t, tol) + g_boundary_part(f, p, params, t);
}

cplx g_arc_part(const Observable& f, const SL2& p, const SpectralParams& params,
                double t, double tol) {
    if (!(t > 0.0)) throw std::invalid_argument("G coefficient needs t > 0");
    const double emt = std::exp(-t), em2t = std::exp(-2.0 * t);
    const double den = 1.0 - em2t;
    const double n2 = static_cast<double>(params.n) * params.n;
    cplx acc = 0.0;
    if (n2 != 0.0)
        acc += n2 * emt / (den * den) *
               arc_average(f, p, params.theta, exp_lie(lie_X, t), tol).value;
    Observable xf;
    xf.feature_scale = f.feature_scale;
    xf.eval_fn = [f](const SL2& g) { return f.lie(lie_X, g); };
    acc += -2.0 * emt / den *
           arc_average(xf, p, params.theta, exp_lie(lie_X, t), tol).value;
    return acc;
}

cplx g_boundary_part(const Observable& f, const SL2& p, const SpectralParams& params,
                     double t) {
    if (!(t > 0.0)) throw std::invalid_argument("G coefficient needs t > 0");
    const double em2t = std::exp(-2.0 * t);
    const double den = 1.0 - em2t;
    const BoundaryTerms bt = boundary_terms(f, p, params.theta, t);
    const cplx i_unit(0.0, 1.0);
    return 2.0 * i_unit * static_cast<double>(params.n) * em2t /
               (params.theta * den * den) * bt.A +
           2.0 / (params.theta * den) * bt.B;
}

}  // namespace hypcircle
