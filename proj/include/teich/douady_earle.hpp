#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "teich/circle_map.hpp"
#include "teich/errors.hpp"
#include "teich/moebius.hpp"

namespace teich {

// A point of the open unit disk.
struct DiskPoint {
    std::complex<double> z;

    static DiskPoint make(std::complex<double> z) {
        if (!(std::abs(z) < 1.0 - 1e-12))
            fail(errc::parse_error, "disk point must satisfy |z| < 1 - 1e-12");
        return {z};
    }
};

inline std::complex<double> disk_from_uhp(std::complex<double> z) {
    return (z - std::complex<double>(0, 1)) / (z + std::complex<double>(0, 1));
}

inline std::complex<double> uhp_from_disk(std::complex<double> w) {
    return std::complex<double>(0, 1) * (1.0 + w) / (1.0 - w);
}

// Isometry action transported to the disk model.
inline DiskPoint apply_disk(const Moebius& m, const DiskPoint& p) {
    return {disk_from_uhp(m.apply_uhp(uhp_from_disk(p.z)))};
}

// Poincare distance in the disk (curvature -1).
inline double disk_distance(const DiskPoint& a, const DiskPoint& b) {
    double rho = std::abs(a.z - b.z) / std::abs(1.0 - std::conj(a.z) * b.z);
    return 2.0 * std::atanh(std::min(rho, 1.0 - 1e-16));
}

struct BarycenterOptions {
    double step = 0.5;
    double vanish_tol = 1e-10;
    int max_iterations = 500;
    // Starting point; when unset, the Euclidean mean of the mass points is
    // used, which lands well inside the right region even for concentrated
    // measures.
    std::optional<std::complex<double>> seed;
};

// Conformal barycenter of a finite boundary measure: the unique w in the
// disk where the average of the w-centred unit vectors to the mass points
// vanishes. Damped fixed-point iteration; the step halves on overshoot and
// recovers on accepted steps.
inline DiskPoint conformal_barycenter(std::span<const BoundaryPoint> points,
                                      const BarycenterOptions& opt = {}) {
    if (points.size() < 3)
        fail(errc::degenerate_measure, "need at least 3 boundary points");
    std::vector<std::complex<double>> zeta;
    zeta.reserve(points.size());
    std::vector<double> angles;
    angles.reserve(points.size());
    for (const BoundaryPoint& p : points) {
        zeta.push_back(std::polar(1.0, p.angle()));
        angles.push_back(p.angle());
    }
    std::sort(angles.begin(), angles.end());
    double gap = two_pi - angles.back() + angles.front();
    for (size_t i = 0; i + 1 < angles.size(); ++i) gap = std::max(gap, angles[i + 1] - angles[i]);
    if (two_pi - gap < 1e-3)
        fail(errc::degenerate_measure, "all mass within an arc of length " +
                                           std::to_string(two_pi - gap));

    auto field = [&](std::complex<double> w) {
        std::complex<double> v = 0.0;
        for (const auto& z : zeta) v += (z - w) / (1.0 - std::conj(w) * z);
        return v / static_cast<double>(zeta.size());
    };

    std::complex<double> w;
    if (opt.seed) {
        w = *opt.seed;
    } else {
        for (const auto& z : zeta) w += z;
        w /= static_cast<double>(zeta.size());
        if (std::abs(w) > 0.99) w *= 0.99 / std::abs(w);
    }
    std::complex<double> v = field(w);
    for (int it = 0; it < opt.max_iterations; ++it) {
        if (std::abs(v) < opt.vanish_tol && std::abs(w) < 1.0 - 1e-12) return {w};
        double s = opt.step;
        std::complex<double> w_next, v_next;
        int halvings = 0;
        while (true) {
            w_next = w + s * v;
            bool inside = std::abs(w_next) < 1.0 - 1e-12;
            if (inside) {
                v_next = field(w_next);
                if (std::abs(v_next) < std::abs(v)) break;
            }
            s *= 0.5;
            if (++halvings > 60)
                fail(errc::no_convergence, "barycenter step underflow, |V| = " +
                                               std::to_string(std::abs(v)));
        }
        w = w_next;
        v = v_next;
    }
    if (std::abs(v) < opt.vanish_tol && std::abs(w) < 1.0 - 1e-12) return {w};
    fail(errc::no_convergence, "barycenter iteration exhausted its budget, |V| = " +
                                   std::to_string(std::abs(v)));
}

// Douady-Earle extension of a sampled circle map, evaluated at one interior
// point: the barycenter of the f-image of harmonic measure at z, the latter
// approximated by N equally spaced points pushed forward by the disk
// automorphism taking 0 to z.
inline DiskPoint de_extend(const SampledCircleMap& f, const DiskPoint& z, int n,
                           const BarycenterOptions& opt = {}) {
    if (n < 16) fail(errc::parse_error, "quadrature needs N >= 16");
    std::vector<BoundaryPoint> image;
    image.reserve(n);
    for (int k = 0; k < n; ++k) {
        std::complex<double> u = std::polar(1.0, two_pi * k / n);
        std::complex<double> pushed = (u + z.z) / (1.0 + std::conj(z.z) * u);
        double ang = wrap_angle(std::arg(pushed));
        image.push_back(BoundaryPoint::from_angle(f.evaluate_angle(ang)));
    }
    BarycenterOptions o = opt;
    o.seed = z.z;  // decent starting point for maps near a disk automorphism
    return conformal_barycenter(image, o);
}

// Extension of the composed homeomorphism s1 o f o s2, with the boundary
// values evaluated exactly through the sampled map instead of re-sampled.
// This is the left-hand side of the conformal naturality identity.
inline DiskPoint de_extend_composed(const Moebius& s1, const SampledCircleMap& f,
                                    const Moebius& s2, const DiskPoint& z, int n,
                                    const BarycenterOptions& opt = {}) {
    if (n < 16) fail(errc::parse_error, "quadrature needs N >= 16");
    std::vector<BoundaryPoint> image;
    image.reserve(n);
    for (int k = 0; k < n; ++k) {
        std::complex<double> u = std::polar(1.0, two_pi * k / n);
        std::complex<double> pushed = (u + z.z) / (1.0 + std::conj(z.z) * u);
        BoundaryPoint p = BoundaryPoint::from_angle(wrap_angle(std::arg(pushed)));
        image.push_back(s1.apply(f.evaluate(s2.apply(p))));
    }
    return conformal_barycenter(image, opt);  // mean seed suits the moved measure
}

// Numerical witness that DE(f) intertwines the two actions, hence descends
// to a marking map: max over words g and test points z of the hyperbolic
// distance between DE(f)(base(g) z) and target(g) DE(f)(z).
inline double de_equivariance_check(const SampledCircleMap& f, const GroupRepresentation& base,
                                    const GroupRepresentation& target,
                                    std::span<const DiskPoint> test_points,
                                    std::span<const Word> words, int n,
                                    const BarycenterOptions& opt = {}) {
    double worst = 0.0;
    for (const Word& w : words) {
        Moebius mb = evaluate_word(base, w);
        Moebius mt = evaluate_word(target, w);
        for (const DiskPoint& z : test_points) {
            DiskPoint lhs = de_extend(f, apply_disk(mb, z), n, opt);
            DiskPoint rhs = apply_disk(mt, de_extend(f, z, n, opt));
            worst = std::max(worst, disk_distance(lhs, rhs));
        }
    }
    return worst;
}

} // namespace teich
