#include "hypcircle/observables.hpp"

#include <algorithm>
#include <cmath>

#include "hypcircle/quadrature.hpp"
#include "hypcircle/rng.hpp"

namespace hypcircle {

namespace {

constexpr double fd_step = 1e-4;

struct Row {
    double c, d;
    Row times(const LieVec& w) const { return {c * w.h + d * w.l, c * w.u - d * w.h}; }
    double dot(const Row& o) const { return c * o.c + d * o.d; }
};

inline Row bottom_row(const SL2& g) { return {g.c, g.d}; }

double gdist2(const SL2& a, const SL2& b) {
    // ||I - a^{-1} b||_F^2, the left-invariant gauge used by group bumps.
    const SL2 m = a.inverse() * b;
    const double e0 = m.a - 1.0, e3 = m.d - 1.0;
    return e0 * e0 + m.b * m.b + m.c * m.c + e3 * e3;
}

}  // namespace

double bump_profile(double u2, int pw) {
    if (u2 >= 1.0) return 0.0;
    double base = 1.0 - u2, r = 1.0;
    for (int k = 0; k < pw; ++k) r *= base;
    return r;
}

SpectralParams SpectralParams::from_mu(double mu, int n, double theta) {
    SpectralParams p;
    p.mu = mu;
    p.n = n;
    p.theta = theta;
    p.nu = mu <= 0.25 ? cplx(std::sqrt(1.0 - 4.0 * mu), 0.0)
                      : cplx(0.0, std::sqrt(4.0 * mu - 1.0));
    if (!(theta > 0.0) || theta > full_circle + 1e-12)
        throw std::invalid_argument("SpectralParams: theta must lie in (0, 4pi]");
    return p;
}

SpectralParams SpectralParams::from_nu(cplx nu, int n, double theta) {
    const bool on_halflines =
        (std::abs(nu.imag()) < 1e-14 && nu.real() >= 0.0) ||
        (std::abs(nu.real()) < 1e-14 && nu.imag() > 0.0);
    if (!on_halflines)
        throw std::invalid_argument("SpectralParams: nu must lie in R_{>=0} or iR_{>0}");
    const cplx mu_c = (1.0 - nu * nu) / 4.0;
    SpectralParams p;
    p.mu = mu_c.real();
    p.nu = nu;
    p.n = n;
    p.theta = theta;
    if (!(theta > 0.0) || theta > full_circle + 1e-12)
        throw std::invalid_argument("SpectralParams: theta must lie in (0, 4pi]");
    return p;
}

cplx Observable::lie(const LieVec& w, const SL2& g) const {
    if (lie_fn) return lie_fn(w, g);
    auto diff4 = [&](double h) {
        const cplx f1 = eval_fn(g * exp_lie(w, h));
        const cplx fm1 = eval_fn(g * exp_lie(w, -h));
        const cplx f2 = eval_fn(g * exp_lie(w, 2.0 * h));
        const cplx fm2 = eval_fn(g * exp_lie(w, -2.0 * h));
        return (fm2 - 8.0 * fm1 + 8.0 * f1 - f2) / (12.0 * h);
    };
    const cplx d1 = diff4(fd_step), d2 = diff4(0.5 * fd_step);
    return (16.0 * d2 - d1) / 15.0;
}

cplx Observable::lie2(const LieVec& w_out, const LieVec& w_in, const SL2& g) const {
    if (lie2_fn) return lie2_fn(w_out, w_in, g);
    const bool same = std::abs(w_out.h - w_in.h) + std::abs(w_out.u - w_in.u) +
                          std::abs(w_out.l - w_in.l) <
                      1e-15;
    if (same && !lie_fn) {
        const double h = 1e-3;
        const cplx f0 = eval_fn(g);
        const cplx f1 = eval_fn(g * exp_lie(w_in, h));
        const cplx fm1 = eval_fn(g * exp_lie(w_in, -h));
        const cplx f2 = eval_fn(g * exp_lie(w_in, 2.0 * h));
        const cplx fm2 = eval_fn(g * exp_lie(w_in, -2.0 * h));
        return (-f2 + 16.0 * f1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h);
    }
    const double h = 1e-3;
    return (lie(w_in, g * exp_lie(w_out, h)) - lie(w_in, g * exp_lie(w_out, -h))) /
           (2.0 * h);
}

cplx Observable::casimir(const SL2& g) const {
    return -lie2(lie_X, lie_X, g) + lie(lie_X, g) - lie2(lie_U, lie_V, g);
}

double Observable::c1_norm_proxy() const {
    std::lock_guard<std::mutex> lock(proxy_cache_->mu);
    if (proxy_cache_->value) return *proxy_cache_->value;
    std::vector<SL2> pts;
    const FuchsianGroup* G = nullptr;
    if (group_bump) G = &group_bump->group;
    if (surface_bump) G = &surface_bump->group;
    if (gamma_invariant && G) {
        pts = sample_quotient(*G, 1000, 777);
    } else {
        Rng rng(777);
        pts.reserve(1000);
        for (int k = 0; k < 1000; ++k)
            pts.push_back(iwasawa(rng.uniform(-1.0, 1.0), std::exp(rng.uniform(-0.7, 0.7)),
                                  rng.uniform(0.0, full_circle)));
    }
    double best = 0.0;
    for (const auto& g : pts) {
        const double v = std::abs(eval_fn(g)) + std::abs(lie(lie_X, g)) +
                         std::abs(lie(lie_U, g)) + std::abs(lie(lie_Theta, g));
        best = std::max(best, v);
    }
    proxy_cache_->value = best;
    return best;
}

Observable model_eigenfunction(cplx nu) {
    const bool on_halflines =
        (std::abs(nu.imag()) < 1e-14 && nu.real() >= 0.0) ||
        (std::abs(nu.real()) < 1e-14 && nu.imag() > 0.0);
    if (!on_halflines)
        throw std::invalid_argument("model_eigenfunction: nu must lie in R_{>=0} or iR_{>0}");
    auto data = std::make_shared<EigenData>();
    data->nu = nu;
    data->lambda = (1.0 + nu) / 2.0;
    const cplx lam = data->lambda;

    Observable f;
    f.kind = Observable::Kind::eigenfunction;
    f.gamma_invariant = false;
    f.feature_scale = 1.0;
    f.eigen = data;
    f.eval_fn = [lam](const SL2& g) -> cplx {
        const double q = g.c * g.c + g.d * g.d;
        return std::exp(-lam * std::log(q));
    };
    f.lie_fn = [lam](const LieVec& w, const SL2& g) -> cplx {
        const Row r = bottom_row(g);
        const Row rw = r.times(w);
        const double q = r.dot(r);
        const double qp = 2.0 * r.dot(rw);
        return -lam * std::exp(-(lam + 1.0) * std::log(q)) * qp;
    };
    f.lie2_fn = [lam](const LieVec& wo, const LieVec& wi, const SL2& g) -> cplx {
        const Row r = bottom_row(g);
        const Row ro = r.times(wo), ri = r.times(wi), roi = ro.times(wi);
        const double q = r.dot(r);
        const double s = r.dot(ri);                 // S(0)
        const double qp = 2.0 * r.dot(ro);          // q'(0) along w_out
        const double sp = ro.dot(ri) + r.dot(roi);  // S'(0)
        const cplx qml = std::exp(-(lam + 1.0) * std::log(q));
        return -2.0 * lam * (-(lam + 1.0) * qml / q * qp * s + qml * sp);
    };
    return f;
}

Observable gamma_bump(const FuchsianGroup& G, const SL2& center, double width,
                      int profile_pow) {
    if (!(width > 0.0) || width > 0.6)
        throw std::invalid_argument("gamma_bump: width must lie in (0, 0.6]");
    auto data = std::make_shared<GroupBumpData>();
    data->group = G;
    data->center = center;
    data->width = width;
    data->profile_pow = profile_pow;

    // Verified hyperbolic reach of the gauge ball: max d(E.i, i) over sampled
    // E in SL2 with ||E - I||_F = width, padded by 10 percent.
    {
        Rng rng(4242);
        double worst = 0.0;
        for (int k = 0; k < 2000; ++k) {
            const LieVec w(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                           rng.uniform(-1.0, 1.0));
            // bisect the flow time until the gauge norm matches width
            double lo = 0.0, hi = 4.0;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                const SL2 e = exp_lie(w, mid);
                const double e0 = e.a - 1.0, e3 = e.d - 1.0;
                const double nrm = std::sqrt(e0 * e0 + e.b * e.b + e.c * e.c + e3 * e3);
                (nrm < width ? lo : hi) = mid;
            }
            const SL2 e = exp_lie(w, 0.5 * (lo + hi));
            worst = std::max(worst, hyp_dist(mobius(e, point_i()), point_i()));
        }
        data->hyp_reach = worst * 1.1 + 0.01;
    }

    const HPoint zc = mobius(center, point_i());
    const double reach = G.covering_radius + data->hyp_reach + 0.1;
    const auto elems = orbit_elements_near(G, zc, reach);
    data->local.reserve(elems.size());
    data->stab.push_back(SL2());
    for (const auto& g : elems) {
        data->local.push_back(g * center);
        // projective stabilizer of the center's point (cone-point centers)
        if (hyp_dist(mobius(g, zc), zc) <= 1e-9) {
            const bool known = std::any_of(
                data->stab.begin(), data->stab.end(),
                [&](const SL2& s) { return s.projective_diff(g) < 1e-9; });
            if (!known) data->stab.push_back(g);
        }
    }

    // Support injectivity: distinct Gamma-translates of the bump must not
    // overlap, i.e. the center's translates stay 2w apart in the group gauge.
    double min_sep = 1e9;
    for (const auto& gc : data->local) {
        const double d2 = gdist2(center, gc);
        if (d2 > 1e-18) min_sep = std::min(min_sep, std::sqrt(d2));
    }
    data->min_center_separation = min_sep;
    if (min_sep <= 2.0 * width)
        throw std::invalid_argument(
            "gamma_bump: support does not inject (min translate separation " +
            std::to_string(min_sep) + " <= 2 width)");

    Observable f;
    f.kind = Observable::Kind::group_bump;
    f.gamma_invariant = true;
    f.feature_scale = width;
    f.group_bump = data;
    const double w2 = width * width;
    const int pw = profile_pow;
    f.eval_fn = [data, w2, pw](const SL2& g) -> cplx {
        const auto [zr, gam] = data->group.reduce(mobius(g, point_i()));
        (void)zr;
        const SL2 gr = gam * g;
        const SL2 gi = gr.inverse();
        double acc = 0.0;
        for (const auto& gc : data->local) {
            const SL2 m = gi * gc;
            const double e0 = m.a - 1.0, e3 = m.d - 1.0;
            const double u2 = (e0 * e0 + m.b * m.b + m.c * m.c + e3 * e3) / w2;
            if (u2 < 1.0) acc += bump_profile(u2, pw);
        }
        return acc;
    };
    return f;
}

Observable surface_bump(const FuchsianGroup& G, const HPoint& center, double width,
                        int profile_pow) {
    if (!(width > 0.0) || width > 1.0)
        throw std::invalid_argument("surface_bump: width must lie in (0, 1]");
    const double sep = G.min_displacement(center);
    if (sep <= 2.0 * width)
        throw std::invalid_argument("surface_bump: support does not inject (orbit separation " +
                                    std::to_string(sep) + " <= 2 width)");
    auto data = std::make_shared<SurfaceBumpData>();
    data->group = G;
    data->center = center;
    data->width = width;
    data->profile_pow = profile_pow;

    const double reach = G.covering_radius + width + 0.1;
    const auto elems = orbit_elements_near(G, center, reach);
    // one point per projective translate; count the center's stabilizer
    {
        std::vector<HPoint> pts;
        std::vector<SL2> stab_reps;
        for (const auto& g : elems) {
            const HPoint w = mobius(g, center);
            if (hyp_dist(w, center) <= 1e-9) {
                const bool known =
                    std::any_of(stab_reps.begin(), stab_reps.end(), [&](const SL2& s) {
                        return s.projective_diff(g) < 1e-9;
                    });
                if (!known) stab_reps.push_back(g);
            }
            bool dup = false;
            for (const auto& o : pts)
                if (hyp_dist(o, w) < 1e-9) {
                    dup = true;
                    break;
                }
            if (!dup) pts.push_back(w);
        }
        data->local_pts = std::move(pts);
        data->center_stab_order = static_cast<int>(stab_reps.size());
    }

    Observable f;
    f.kind = Observable::Kind::surface_bump;
    f.gamma_invariant = true;
    f.feature_scale = width;
    f.surface_bump = data;
    const double w2 = width * width;
    const int pw = profile_pow;
    f.eval_fn = [data, w2, pw](const SL2& g) -> cplx {
        const auto [zr, gam] = data->group.reduce(mobius(g, point_i()));
        (void)gam;
        double acc = 0.0;
        const double cw = std::cosh(data->width);
        for (const auto& pt : data->local_pts) {
            const double cd = cosh_dist(zr, pt);
            if (cd >= cw) continue;
            const double d = std::acosh(std::max(1.0, cd));
            acc += bump_profile(d * d / w2, pw);
        }
        return data->amplitude * acc;
    };
    return f;
}

std::shared_ptr<const OrbitBall> SurfaceBumpData::arc_points(double radius) const {
    std::lock_guard<std::mutex> lock(cache_mu);
    if (arc_ball && arc_ball->radius >= radius) return arc_ball;
    OrbitBallOptions opts;
    auto ball = std::make_shared<OrbitBall>(
        enumerate_orbit_ball(group, center, radius + 1.0, opts));
    if (!ball->valid)
        throw std::runtime_error("surface_bump: arc orbit enumeration hit its cap");
    arc_ball = ball;
    return arc_ball;
}

std::shared_ptr<const OrbitBall> GroupBumpData::arc_points(double radius) const {
    std::lock_guard<std::mutex> lock(cache_mu);
    if (arc_ball && arc_ball->radius >= radius) return arc_ball;
    OrbitBallOptions opts;
    auto ball = std::make_shared<OrbitBall>(
        enumerate_orbit_ball(group, mobius(center, point_i()), radius + 1.0, opts));
    if (!ball->valid)
        throw std::runtime_error("gamma_bump: arc orbit enumeration hit its cap");
    arc_ball = ball;
    return arc_ball;
}

double unfolded_average(const Observable& f) {
    if (f.kind == Observable::Kind::surface_bump) {
        // Point-sum over the orbit: one projective-stabilizer factor relative
        // to the plain Gamma-sum unfolding.
        const auto& d = *f.surface_bump;
        const double w2 = d.width * d.width;
        auto ring = [&](double r) {
            return bump_profile(r * r / w2, d.profile_pow) * 2.0 * pi * std::sinh(r);
        };
        const auto q = integrate(ring, 0.0, d.width, 1e-13, 4);
        return d.amplitude * q.value /
               (d.group.covol_surface * static_cast<double>(d.center_stab_order));
    }
    if (f.kind == Observable::Kind::group_bump) {
        const auto& d = *f.group_bump;
        {
            std::lock_guard<std::mutex> lock(d.cache_mu);
            if (d.mass) return *d.mass / d.group.covol_group();
        }
        // Single-bump integral over G in Iwasawa coordinates with the Haar
        // density dx dy / y^2 x ds/(4 pi).
        const IwasawaCoords cc = iwasawa_inverse(d.center);
        const double w = d.width;
        const double rr = 2.5 * w + w * w + 0.05;
        const double sw = 3.0 * w + 0.05;
        const double xm = cc.y * (std::exp(rr) - 1.0);
        const int pw = d.profile_pow;
        const double w2 = w * w;
        auto phi = [&](double x, double y, double s) {
            const double u2 = gdist2(iwasawa(x, y, s), d.center) / w2;
            return bump_profile(u2, pw);
        };
        auto over_s = [&](double x, double y) {
            return integrate([&](double s) { return phi(x, y, s); }, cc.s - sw, cc.s + sw,
                             1e-13, 2)
                .value;
        };
        auto over_y = [&](double x) {
            return integrate(
                       [&](double y) { return over_s(x, y) / (y * y); },
                       cc.y * std::exp(-rr), cc.y * std::exp(rr), 1e-12, 2)
                .value;
        };
        const double mass =
            integrate(over_y, cc.x - xm, cc.x + xm, 1e-11, 2).value / full_circle;
        // The box must contain the support; spot-check its faces.
        for (double sgn : {-1.0, 1.0}) {
            if (std::abs(phi(cc.x + sgn * xm, cc.y, cc.s)) > 0.0 ||
                std::abs(phi(cc.x, cc.y * std::exp(sgn * rr), cc.s)) > 0.0 ||
                std::abs(phi(cc.x, cc.y, cc.s + sgn * sw)) > 0.0)
                throw std::runtime_error("gamma_bump: support box too small");
        }
        std::lock_guard<std::mutex> lock(d.cache_mu);
        d.mass = mass;
        return mass / d.group.covol_group();
    }
    throw std::invalid_argument("unfolded_average: observable has no unfolding data");
}

namespace {

// Ad_{k^{-1}}(w) = k^{-1} w k, again traceless.
LieVec conj_lie(const SL2& k, const LieVec& w) {
    const SL2 ki = k.inverse();
    // k^{-1} [[h,u],[l,-h]] k, written out.
    const double m00 = ki.a * (w.h * k.a + w.u * k.c) + ki.b * (w.l * k.a - w.h * k.c);
    const double m01 = ki.a * (w.h * k.b + w.u * k.d) + ki.b * (w.l * k.b - w.h * k.d);
    const double m10 = ki.c * (w.h * k.a + w.u * k.c) + ki.d * (w.l * k.a - w.h * k.c);
    return LieVec(m00, m01, m10);
}

}  // namespace

Observable right_translate(const Observable& f, const SL2& k) {
    Observable g = f;
    // Right translation invalidates the fast-path arc caches.
    if (f.kind == Observable::Kind::surface_bump || f.kind == Observable::Kind::group_bump)
        g.kind = Observable::Kind::generic;
    auto base_eval = f.eval_fn;
    g.eval_fn = [base_eval, k](const SL2& h) { return base_eval(h * k); };
    if (f.lie_fn) {
        auto base_lie = f.lie_fn;
        // (W (f o R_k))(g) = ((k^{-1} W k) f)(g k)
        g.lie_fn = [base_lie, k](const LieVec& w, const SL2& h) {
            return base_lie(conj_lie(k, w), h * k);
        };
    }
    if (f.lie2_fn) {
        auto base_lie2 = f.lie2_fn;
        g.lie2_fn = [base_lie2, k](const LieVec& wo, const LieVec& wi, const SL2& h) {
            return base_lie2(conj_lie(k, wo), conj_lie(k, wi), h * k);
        };
    }
    return g;
}

}  // namespace hypcircle
