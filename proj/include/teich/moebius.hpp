#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "teich/errors.hpp"

namespace teich {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Reduce an angle to [0, 2pi).
inline double wrap_angle(double t) {
    t = std::fmod(t, two_pi);
    if (t < 0) t += two_pi;
    if (t == two_pi) t = 0.0;  // fmod can land exactly on 2pi after the add
    return t;
}

// Signed angular difference in (-pi, pi].
inline double wrap_signed(double t) {
    t = std::fmod(t, two_pi);
    if (t > std::numbers::pi) t -= two_pi;
    if (t <= -std::numbers::pi) t += two_pi;
    return t;
}

// A point of the circle at infinity, stored as the disk-model angle.
// Half-plane coordinates (extended reals) are converted through the
// Cayley transform z -> (z - i)/(z + i); infinity sits at angle 0.
class BoundaryPoint {
public:
    BoundaryPoint() : theta_(0.0) {}

    static BoundaryPoint from_angle(double theta) { return BoundaryPoint(wrap_angle(theta)); }

    static BoundaryPoint from_real(double x) {
        // atan2(-2x, x^2 - 1) rewritten to avoid overflow for large |x|.
        double t = (std::abs(x) <= 1.0) ? std::atan2(-2.0 * x, x * x - 1.0)
                                        : std::atan2(-2.0 / x, 1.0 - 1.0 / (x * x));
        return BoundaryPoint(wrap_angle(t));
    }

    static BoundaryPoint infinity() { return BoundaryPoint(0.0); }

    double angle() const { return theta_; }

    bool is_infinity(double tol = 0.0) const {
        return theta_ <= tol || two_pi - theta_ <= tol;
    }

    // Half-plane coordinate; the caller must handle the point at infinity.
    double real() const {
        double s = std::sin(theta_ / 2.0);
        if (s == 0.0) return std::numeric_limits<double>::infinity();
        return -std::cos(theta_ / 2.0) / s;
    }

    // Homogeneous coordinates on RP^1: (p : q) with x = p/q, free of the
    // infinity special case. p^2 + q^2 = 1.
    std::array<double, 2> projective() const {
        return {-std::cos(theta_ / 2.0), std::sin(theta_ / 2.0)};
    }

    static BoundaryPoint from_projective(double p, double q) {
        return BoundaryPoint(wrap_angle(2.0 * std::atan2(q, -p)));
    }

private:
    explicit BoundaryPoint(double t) : theta_(t) {}
    double theta_;
};

// Arc-length distance on the circle, in [0, pi].
inline double visual_distance(const BoundaryPoint& a, const BoundaryPoint& b) {
    return std::abs(wrap_signed(a.angle() - b.angle()));
}

enum class Orientation { Positive, Negative, Degenerate };

inline Orientation circular_order(const BoundaryPoint& a, const BoundaryPoint& b,
                                  const BoundaryPoint& c, double tol = 1e-12) {
    if (visual_distance(a, b) < tol || visual_distance(b, c) < tol || visual_distance(a, c) < tol)
        return Orientation::Degenerate;
    double ab = wrap_angle(b.angle() - a.angle());
    double ac = wrap_angle(c.angle() - a.angle());
    return ab < ac ? Orientation::Positive : Orientation::Negative;
}

enum class ElementClass { Identity, Hyperbolic, Parabolic, Elliptic };

inline const char* element_class_name(ElementClass c) {
    switch (c) {
        case ElementClass::Identity:   return "Identity";
        case ElementClass::Hyperbolic: return "Hyperbolic";
        case ElementClass::Parabolic:  return "Parabolic";
        case ElementClass::Elliptic:   return "Elliptic";
    }
    return "?";
}

// An orientation-preserving isometry of H^2: the matrix [[a,b],[c,d]]
// acting on the upper half-plane by z -> (az + b)/(cz + d).
// Stored representative is normalized to det 1 with tr >= 0 (for trace
// near 0, a >= 0, then b >= 0), so equality of PSL elements is equality
// of entries.
class Moebius {
public:
    Moebius() : a_(1), b_(0), c_(0), d_(1) {}

    Moebius(double a, double b, double c, double d) : a_(a), b_(b), c_(c), d_(d) {
        normalize();
    }

    static Moebius identity() { return Moebius(); }

    // For entries coming from products of det-1 representatives: the true
    // determinant is 1, and the computed one is rescaled only when it is
    // numerically trustworthy.
    static Moebius from_product(double a, double b, double c, double d) {
        Moebius m;
        m.a_ = a; m.b_ = b; m.c_ = c; m.d_ = d;
        m.lenient_normalize();
        return m;
    }

    double a() const { return a_; }
    double b() const { return b_; }
    double c() const { return c_; }
    double d() const { return d_; }

    double trace() const { return a_ + d_; }
    double det() const { return a_ * d_ - b_ * c_; }

    Moebius inverse() const {
        Moebius m;
        m.a_ = d_; m.b_ = -b_; m.c_ = -c_; m.d_ = a_;
        m.lenient_normalize();
        return m;
    }

    friend Moebius operator*(const Moebius& m, const Moebius& n) {
        Moebius p;
        p.a_ = m.a_ * n.a_ + m.b_ * n.c_;
        p.b_ = m.a_ * n.b_ + m.b_ * n.d_;
        p.c_ = m.c_ * n.a_ + m.d_ * n.c_;
        p.d_ = m.c_ * n.b_ + m.d_ * n.d_;
        p.lenient_normalize();
        return p;
    }

    // Entrywise max distance to the nearer of +I, -I (PSL identity test).
    double identity_distance() const {
        double dp = std::max(std::max(std::abs(a_ - 1), std::abs(d_ - 1)),
                             std::max(std::abs(b_), std::abs(c_)));
        double dm = std::max(std::max(std::abs(a_ + 1), std::abs(d_ + 1)),
                             std::max(std::abs(b_), std::abs(c_)));
        return std::min(dp, dm);
    }

    // Entrywise max distance between PSL representatives (min over sign).
    double distance(const Moebius& o) const {
        auto ent = [&](double s) {
            return std::max(std::max(std::abs(a_ - s * o.a_), std::abs(b_ - s * o.b_)),
                            std::max(std::abs(c_ - s * o.c_), std::abs(d_ - s * o.d_)));
        };
        return std::min(ent(1.0), ent(-1.0));
    }

    ElementClass classify(double tol = 1e-9) const {
        if (identity_distance() < tol) return ElementClass::Identity;
        double t = std::abs(trace());
        if (t > 2.0 + tol) return ElementClass::Hyperbolic;
        if (std::abs(t - 2.0) <= tol) return ElementClass::Parabolic;
        return ElementClass::Elliptic;
    }

    // Extended action on the circle at infinity, computed projectively.
    BoundaryPoint apply(const BoundaryPoint& x) const {
        auto [p, q] = x.projective();
        return BoundaryPoint::from_projective(a_ * p + b_ * q, c_ * p + d_ * q);
    }

    // Action on the upper half-plane.
    std::complex<double> apply_uhp(std::complex<double> z) const {
        return (a_ * z + b_) / (c_ * z + d_);
    }

    // Attracting fixed point of a hyperbolic element.
    BoundaryPoint sink(double tol = 1e-9) const {
        if (classify(tol) != ElementClass::Hyperbolic)
            fail(errc::not_hyperbolic, "sink requires a hyperbolic element, trace " +
                                           std::to_string(trace()));
        double t = trace();
        double s = std::sqrt(t * t - 4.0);
        if (c_ == 0.0) {
            // Fixed points are infinity and b/(d-a); the derivative at
            // infinity is a^2 (det 1), so infinity attracts iff |a| > |d|.
            return std::abs(a_) > std::abs(d_) ? BoundaryPoint::infinity()
                                               : BoundaryPoint::from_real(b_ / (d_ - a_));
        }
        // Roots of c z^2 + (d-a) z - b, via the cancellation-free split.
        double B = d_ - a_;
        double qq = -0.5 * (B + (B >= 0 ? s : -s));
        double z1 = qq / c_;
        double z2 = (qq != 0.0) ? -b_ / qq : -B / c_;
        // Attracting root has multiplier |c z + d| > 1.
        return std::abs(c_ * z1 + d_) > std::abs(c_ * z2 + d_) ? BoundaryPoint::from_real(z1)
                                                               : BoundaryPoint::from_real(z2);
    }

    BoundaryPoint source(double tol = 1e-9) const { return inverse().sink(tol); }

    // Unique boundary fixed point of a parabolic element.
    BoundaryPoint parabolic_fixed_point(double tol = 1e-9) const {
        if (classify(tol) != ElementClass::Parabolic)
            fail(errc::not_hyperbolic, "parabolic fixed point of a non-parabolic element");
        if (std::abs(c_) < 1e-14) return BoundaryPoint::infinity();
        return BoundaryPoint::from_real((a_ - d_) / (2.0 * c_));
    }

    double translation_length(double tol = 1e-9) const {
        if (classify(tol) != ElementClass::Hyperbolic)
            fail(errc::not_hyperbolic, "translation length requires a hyperbolic element");
        return 2.0 * std::acosh(std::abs(trace()) / 2.0);
    }

private:
    void normalize() {
        double dt = a_ * d_ - b_ * c_;
        if (!(dt > 0.0))
            fail(errc::parse_error, "matrix with determinant " + std::to_string(dt) +
                                        " is not in PSL(2,R)");
        double r = std::sqrt(dt);
        a_ /= r; b_ /= r; c_ /= r; d_ /= r;
        canonical_sign();
    }

    // Products of det-1 representatives have det 1 exactly; the naive
    // determinant of the computed entries only reflects their rounding, and
    // dividing by its square root would inject that noise into otherwise
    // accurate entries. Scale drift over bounded-length words is below
    // rounding, so products are not rescaled.
    void lenient_normalize() { canonical_sign(); }

    void canonical_sign() {
        constexpr double sign_tol = 1e-12;
        double t = a_ + d_;
        bool flip = false;
        if (t < -sign_tol) flip = true;
        else if (std::abs(t) <= sign_tol) {
            if (a_ < -sign_tol) flip = true;
            else if (std::abs(a_) <= sign_tol && b_ < 0.0) flip = true;
        }
        if (flip) { a_ = -a_; b_ = -b_; c_ = -c_; d_ = -d_; }
    }

    double a_, b_, c_, d_;
};

// The element of PSL(2,R) taking (0, 1, infinity) to the positively
// oriented triple (a, b, c). Solved in homogeneous coordinates, so no
// endpoint needs special treatment.
inline Moebius moebius_from_triple(const BoundaryPoint& a, const BoundaryPoint& b,
                                   const BoundaryPoint& c, double tol = 1e-12) {
    switch (circular_order(a, b, c, tol)) {
        case Orientation::Degenerate:
            fail(errc::degenerate_triple, "triple has coinciding points");
        case Orientation::Negative:
            fail(errc::negatively_oriented,
                 "triple is negatively oriented; the real Moebius map through it "
                 "would reverse orientation");
        case Orientation::Positive:
            break;
    }
    auto pa = a.projective();
    auto pb = b.projective();
    auto pc = c.projective();
    // Columns (mu1 * pc | mu2 * pa) with mu solving [pc | pa] mu = pb.
    double den = pc[0] * pa[1] - pc[1] * pa[0];
    double mu1 = (pb[0] * pa[1] - pb[1] * pa[0]) / den;
    double mu2 = (pc[0] * pb[1] - pc[1] * pb[0]) / den;
    return Moebius(mu1 * pc[0], mu2 * pa[0], mu1 * pc[1], mu2 * pa[1]);
}

// Map sending the oriented axis (src -> dst) to the upward imaginary axis
// (src to 0, dst to infinity). The residual translation freedom is pinned
// by the deterministic projective normalization, which is all the gluing
// code needs.
inline Moebius axis_to_standard(const BoundaryPoint& src, const BoundaryPoint& dst) {
    auto ps = src.projective();
    auto pd = dst.projective();
    // Inverse has columns (pd | ps); orient the sign so det > 0.
    double det = pd[0] * ps[1] - pd[1] * ps[0];
    if (std::abs(det) < 1e-15) fail(errc::degenerate_triple, "axis endpoints coincide");
    double s = det > 0 ? 1.0 : -1.0;
    return Moebius(s * pd[0], ps[0], s * pd[1], ps[1]).inverse();
}

// Translation by hyperbolic length t along the oriented axis (src -> dst).
inline Moebius axis_translation(const BoundaryPoint& src, const BoundaryPoint& dst, double t) {
    Moebius n = axis_to_standard(src, dst);
    Moebius diag(std::exp(t / 2.0), 0.0, 0.0, std::exp(-t / 2.0));
    return n.inverse() * diag * n;
}

} // namespace teich
