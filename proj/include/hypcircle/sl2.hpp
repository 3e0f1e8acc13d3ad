#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace hypcircle {

using cplx = std::complex<double>;

/// 2x2 real matrix with determinant 1. Entries are renormalized by 1/sqrt(det)
/// whenever the determinant drifts by more than 1e-13, so long products stay
/// on the group to ~1e-12.
struct SL2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    SL2() = default;
    SL2(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {
        renormalize();
    }

    /// ad - bc with FMA compensation (Kahan), exact through the cancellation
    /// that dominates at large operator norm.
    double det() const {
        const double w = b * c;
        const double e = std::fma(-b, c, w);
        const double f = std::fma(a, d, -w);
        return f + e;
    }

    void renormalize() {
        const double dt = det();
        if (dt <= 0.0)
            throw std::invalid_argument("SL2: determinant must be positive, got " + std::to_string(dt));
        // The determinant of a correctly rounded product is itself only exact
        // to ~eps x |ad| + |bc|; below that level "correcting" it would move
        // every entry off the true product. Rescale only above the noise.
        const double scale = std::max(1.0, std::abs(a * d) + std::abs(b * c));
        if (std::abs(dt - 1.0) > 1e-13 * scale) {
            const double s = 1.0 / std::sqrt(dt);
            a *= s; b *= s; c *= s; d *= s;
        }
    }

    SL2 inverse() const { return SL2(d, -b, -c, a); }
    SL2 transpose() const { return SL2(a, c, b, d); }

    friend SL2 operator*(const SL2& x, const SL2& y) {
        return SL2(x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
                   x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d);
    }

    friend SL2 operator-(const SL2& x) {
        SL2 r;
        r.a = -x.a; r.b = -x.b; r.c = -x.c; r.d = -x.d;
        return r;
    }

    /// Operator norm w.r.t. the Euclidean norm on R^2 (largest singular value).
    double op_norm() const {
        const double s = a * a + b * b + c * c + d * d;
        const double diff = std::sqrt(std::max(0.0, s * s - 4.0));
        return std::sqrt(0.5 * (s + diff));
    }

    double max_abs_diff(const SL2& o) const {
        return std::max(std::max(std::abs(a - o.a), std::abs(b - o.b)),
                        std::max(std::abs(c - o.c), std::abs(d - o.d)));
    }

    /// Entrywise distance up to global sign, for comparisons in PSL(2,R).
    double projective_diff(const SL2& o) const {
        return std::min(max_abs_diff(o), max_abs_diff(-o));
    }
};

inline SL2 identity_sl2() { return SL2(); }

/// Traceless 2x2 real matrix [[h, u],[l, -h]], stored by its three free entries.
struct LieVec {
    double h = 0.0, u = 0.0, l = 0.0;

    LieVec() = default;
    LieVec(double h_, double u_, double l_) : h(h_), u(u_), l(l_) {}

    std::array<double, 4> entries() const { return {h, u, l, -h}; }

    friend LieVec operator*(double s, const LieVec& w) { return LieVec(s * w.h, s * w.u, s * w.l); }
    friend LieVec operator+(const LieVec& x, const LieVec& y) {
        return LieVec(x.h + y.h, x.u + y.u, x.l + y.l);
    }
    friend LieVec operator-(const LieVec& x, const LieVec& y) {
        return LieVec(x.h - y.h, x.u - y.u, x.l - y.l);
    }
};

// Basis of sl_2(R) used throughout: X generates the geodesic flow, Theta the
// rotation flow (a full circle is s = 4pi), U and V the horocycle directions,
// Y completes {X, Theta, Y} to a basis.
inline const LieVec lie_X{0.5, 0.0, 0.0};
inline const LieVec lie_Theta{0.0, 0.5, -0.5};
inline const LieVec lie_U{0.0, 1.0, 0.0};
inline const LieVec lie_V{0.0, 0.0, 1.0};
inline const LieVec lie_Y{0.0, -0.5, -0.5};

/// exp(sW) for traceless W, via the closed form:
/// W^2 = disc * I with disc = h^2 + u*l, so
/// exp(sW) = C(s^2 disc) I + s S(s^2 disc) W with C = cosh, S = sinh(x)/x on
/// disc > 0 and the circular analogues on disc < 0. Exact to roundoff.
SL2 exp_lie(const LieVec& w, double s);

/// Right translation by exp(tX): g diag(e^{t/2}, e^{-t/2}).
inline SL2 geodesic_flow(const SL2& g, double t) {
    const double e = std::exp(0.5 * t);
    return SL2(g.a * e, g.b / e, g.c * e, g.d / e);
}

/// Right translation by exp(s Theta) = [[cos s/2, sin s/2], [-sin s/2, cos s/2]].
inline SL2 rotation_flow(const SL2& g, double s) {
    const double co = std::cos(0.5 * s), si = std::sin(0.5 * s);
    return SL2(g.a * co - g.b * si, g.a * si + g.b * co,
               g.c * co - g.d * si, g.c * si + g.d * co);
}

inline SL2 rotation(double s) { return rotation_flow(SL2(), s); }

struct CartanFactors {
    SL2 k1;
    double t = 0.0;  // Cartan time, t = 2 log ||g||_op >= 0
    SL2 k2;

    SL2 reconstruct() const { return geodesic_flow(k1, t) * k2; }
};

/// Cartan (KAK) decomposition g = k1 diag(e^{t/2}, e^{-t/2}) k2 from the
/// eigen-decomposition of g^T g. Rotations (t below 1e-12) return the
/// convention k1 = g, k2 = I.
CartanFactors cartan(const SL2& g);

/// Iwasawa parametrization [[1,x],[0,1]] diag(sqrt y, 1/sqrt y) exp(s Theta);
/// the resulting g satisfies g.i = x + iy. Pushing forward
/// dx dy / y^2 x (ds uniform on [0,4pi)) gives a Haar measure.
SL2 iwasawa(double x, double y, double s);

struct IwasawaCoords {
    double x, y, s;  // s in [0, 4pi)
};

IwasawaCoords iwasawa_inverse(const SL2& g);

inline constexpr double full_circle = 4.0 * 3.14159265358979323846;
inline constexpr double pi = 3.14159265358979323846;

}  // namespace hypcircle
