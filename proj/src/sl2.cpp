#include "hypcircle/sl2.hpp"

namespace hypcircle {

namespace {

// cosh(sqrt(x)) and sinh(sqrt(x))/sqrt(x), continued analytically through
// x <= 0 where they become cos / sinc. Series near zero keeps full precision.
void cosh_sinch(double x, double& c, double& s) {
    if (std::abs(x) < 1e-8) {
        c = 1.0 + x / 2.0 + x * x / 24.0;
        s = 1.0 + x / 6.0 + x * x / 120.0;
        return;
    }
    if (x > 0.0) {
        const double r = std::sqrt(x);
        c = std::cosh(r);
        s = std::sinh(r) / r;
    } else {
        const double r = std::sqrt(-x);
        c = std::cos(r);
        s = std::sin(r) / r;
    }
}

}  // namespace

SL2 exp_lie(const LieVec& w, double s) {
    const double disc = w.h * w.h + w.u * w.l;
    double c, sh;
    cosh_sinch(s * s * disc, c, sh);
    const double m = s * sh;
    return SL2(c + m * w.h, m * w.u, m * w.l, c - m * w.h);
}

CartanFactors cartan(const SL2& g) {
    CartanFactors f;
    // g^T g = [[A, B], [B, C]], eigenvalues lam_+ >= lam_-, lam_+ lam_- = 1.
    const double A = g.a * g.a + g.c * g.c;
    const double B = g.a * g.b + g.c * g.d;
    const double C = g.b * g.b + g.d * g.d;
    const double half_gap = std::sqrt(std::max(0.0, 0.25 * (A - C) * (A - C) + B * B));
    const double lam = 0.5 * (A + C) + half_gap;
    const double t = std::log(std::max(lam, 1.0));
    if (t <= 1e-12) {
        f.k1 = g;
        f.t = 0.0;
        f.k2 = SL2();
        return f;
    }
    // Unit eigenvector (vx, vy) of the top eigenvalue; pick the
    // better-conditioned residual column.
    double vx, vy;
    if (std::abs(lam - C) >= std::abs(lam - A)) {
        vx = lam - C;
        vy = B;
    } else {
        vx = B;
        vy = lam - A;
    }
    const double n = std::hypot(vx, vy);
    vx /= n;
    vy /= n;
    // k2 has rows (v, v_perp).
    SL2 k2;
    k2.a = vx; k2.b = vy; k2.c = -vy; k2.d = vx;
    // k1's first column is the image of the top singular direction; building
    // it this way avoids the cancellation that a^{-1} k2^{-1} would hit in the
    // contracted direction of g.
    const double ux = g.a * vx + g.b * vy;
    const double uy = g.c * vx + g.d * vy;
    const double sigma = std::hypot(ux, uy);
    SL2 k1;
    k1.a = ux / sigma; k1.b = -uy / sigma; k1.c = uy / sigma; k1.d = ux / sigma;
    f.k1 = k1;
    f.t = 2.0 * std::log(sigma);
    f.k2 = k2;
    return f;
}

SL2 iwasawa(double x, double y, double s) {
    if (!(y > 0.0))
        throw std::invalid_argument("iwasawa: y must be positive");
    const double r = std::sqrt(y);
    // [[1,x],[0,1]] diag(r, 1/r) = [[r, x/r],[0, 1/r]]
    SL2 na;
    na.a = r; na.b = x / r; na.c = 0.0; na.d = 1.0 / r;
    return rotation_flow(na, s);
}

IwasawaCoords iwasawa_inverse(const SL2& g) {
    IwasawaCoords co;
    const double q = g.c * g.c + g.d * g.d;
    co.y = 1.0 / q;
    co.x = (g.a * g.c + g.b * g.d) / q;
    // k = (n a)^{-1} g is the rotation exp(s Theta); read s/2 off its first row.
    const double r = std::sqrt(co.y);
    const double k00 = (g.a - co.x * g.c) / r;  // cos(s/2)
    const double k01 = (g.b - co.x * g.d) / r;  // sin(s/2)
    double s = 2.0 * std::atan2(k01, k00);
    if (s < 0.0) s += full_circle;
    co.s = s;
    return co;
}

}  // namespace hypcircle
