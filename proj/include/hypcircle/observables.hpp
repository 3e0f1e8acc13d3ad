#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>

#include "hypcircle/fuchsian.hpp"
#include "hypcircle/sl2.hpp"

namespace hypcircle {

/// Spectral data attached to a circle-average experiment: Casimir eigenvalue
/// mu, the parameter nu in R_{>=0} union iR_{>0} with 1 - nu^2 = 4 mu, the
/// Theta-weight n, and the arc length theta in (0, 4pi].
struct SpectralParams {
    double mu = 0.0;
    cplx nu = 1.0;
    int n = 0;
    double theta = full_circle;

    static SpectralParams from_mu(double mu, int n, double theta);
    static SpectralParams from_nu(cplx nu, int n, double theta);
};

struct EigenData {
    cplx nu;
    cplx lambda;  // (1 + nu)/2; f(g) = (c^2 + d^2)^(-lambda)
};

struct GroupBumpData;
struct SurfaceBumpData;

/// A test function on SL2(R) or on the quotient, bundled with Lie-derivative
/// oracles. Derivatives default to 4th-order central differences (step 1e-4)
/// with one Richardson level; model eigenfunctions override them analytically.
struct Observable {
    enum class Kind { generic, eigenfunction, group_bump, surface_bump };

    Kind kind = Kind::generic;
    bool gamma_invariant = false;
    double feature_scale = 1.0;  // smallest s-scale the arc quadrature must resolve

    std::function<cplx(const SL2&)> eval_fn;
    std::function<cplx(const LieVec&, const SL2&)> lie_fn;                 // optional
    std::function<cplx(const LieVec&, const LieVec&, const SL2&)> lie2_fn; // optional

    std::shared_ptr<const EigenData> eigen;
    std::shared_ptr<GroupBumpData> group_bump;
    std::shared_ptr<SurfaceBumpData> surface_bump;

    cplx operator()(const SL2& g) const { return eval_fn(g); }

    /// First Lie derivative (Wf)(g) = d/dt f(g exp(tW)).
    cplx lie(const LieVec& w, const SL2& g) const;

    /// Second derivative (W_out W_in f)(g), outer derivative applied last.
    cplx lie2(const LieVec& w_out, const LieVec& w_in, const SL2& g) const;

    /// Casimir application -X^2 f + X f - UV f at g.
    cplx casimir(const SL2& g) const;

    /// max over 1000 seeded sample points of |f| + |Xf| + |Uf| + |Theta f|;
    /// the desk stand-in for the C^1 norm in the paper's bounds. Cached.
    double c1_norm_proxy() const;

private:
    struct ProxyCache {
        std::mutex mu;
        std::optional<double> value;
    };
    std::shared_ptr<ProxyCache> proxy_cache_ = std::make_shared<ProxyCache>();
};

struct GroupBumpData {
    FuchsianGroup group;
    SL2 center;
    double width = 0.1;
    int profile_pow = 4;
    double hyp_reach = 0.0;  // verified bound: gauge dist <= width implies hyp dist <= reach
    std::vector<SL2> local;  // all gamma with gamma.center possibly in range of the domain
    std::vector<SL2> stab;   // projective stabilizer of center.i in Gamma, identity included
    double min_center_separation = 0.0;
    mutable std::mutex cache_mu;
    mutable std::optional<double> mass;  // integral of the single bump over G
    mutable std::shared_ptr<const OrbitBall> arc_ball;

    /// Orbit ball around center.i backing the arc window evaluator.
    std::shared_ptr<const OrbitBall> arc_points(double radius) const;
};

struct SurfaceBumpData {
    FuchsianGroup group;
    HPoint center;
    double width = 0.1;
    int profile_pow = 4;
    double amplitude = 1.0;
    int center_stab_order = 1;      // projective stabilizer order of the center
    std::vector<HPoint> local_pts;  // orbit points of center near the domain
    // Orbit ball around the center used by the annulus arc evaluator; grown on
    // demand and shared across evaluations.
    mutable std::mutex cache_mu;
    mutable std::shared_ptr<const OrbitBall> arc_ball;

    std::shared_ptr<const OrbitBall> arc_points(double radius) const;
};

/// Joint eigenfunction model f(g) = Im(g.i)^((1+nu)/2) = (c^2+d^2)^(-lambda)
/// on SL2(R), with Casimir eigenvalue mu = (1-nu^2)/4 and Theta f = 0.
/// All Lie derivatives are analytic.
Observable model_eigenfunction(cplx nu);

/// Gamma-averaged bump on the quotient: F(g) = sum_gamma phi(d_G(g, gamma c))
/// where d_G(a, b) = ||I - a^{-1} b||_F and phi(u) = (1 - (u/w)^2)^pw.
/// Throws when the support fails to inject (2 width >= min separation of the
/// center's Gamma-translates in G).
Observable gamma_bump(const FuchsianGroup& G, const SL2& center, double width,
                      int profile_pow = 4);

/// K-invariant variant: a radial bump of hyperbolic width w at a point of the
/// surface, summed over the projective orbit. Supports the fast annulus arc
/// evaluator. Throws when 2 width exceeds the orbit separation at the center.
Observable surface_bump(const FuchsianGroup& G, const HPoint& center, double width,
                        int profile_pow = 4);

/// Exact space average of a bump observable via unfolding: the single-bump
/// integral over G (or H) divided by the covolume, with the probability
/// normalization of vol.
double unfolded_average(const Observable& f);

/// Observable composed with right translation: g -> f(g k).
Observable right_translate(const Observable& f, const SL2& k);

double bump_profile(double u2, int pw);

}  // namespace hypcircle
