#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "teich/errors.hpp"
#include "teich/fuchsian.hpp"
#include "teich/moebius.hpp"
#include "teich/words.hpp"

namespace teich {

// An orientation-preserving circle homeomorphism known on finitely many
// points, extended between samples by circular piecewise-linear
// interpolation in the angle coordinate. Monotonicity is structural: a
// violation throws, it is never a silent state.
class SampledCircleMap {
public:
    static constexpr double snap_tol = 1e-11;    // queries this close to a node are exact
    static constexpr double repair_tol = 1e-10;  // y-inversions below this are floating-point noise
    static constexpr double same_point_tol = 1e-12;  // x's closer than this are one point

    struct Pair {
        double x, y;
        std::optional<Word> label;
    };

    SampledCircleMap() = default;

    static SampledCircleMap from_pairs(std::vector<Pair> pairs, double tolerance = 1e-8) {
        if (pairs.size() < 3)
            fail(errc::empty_sample, "a sampled circle map needs at least 3 pairs, got " +
                                         std::to_string(pairs.size()));
        std::sort(pairs.begin(), pairs.end(),
                  [](const Pair& a, const Pair& b) { return a.x < b.x; });

        // Work in a rotation starting after the largest circular gap, so no
        // same-point cluster straddles the wrap.
        size_t n = pairs.size(), cut = 0;
        double widest = two_pi - pairs.back().x + pairs.front().x;
        for (size_t i = 0; i + 1 < n; ++i)
            if (pairs[i + 1].x - pairs[i].x > widest) {
                widest = pairs[i + 1].x - pairs[i].x;
                cut = i + 1;
            }
        std::rotate(pairs.begin(), pairs.begin() + cut, pairs.end());

        // Same-point clusters: x's within rounding of one another. Inside a
        // cluster the x-order carries no information, so members are ordered
        // by image position; members whose images also coincide within
        // tolerance are merged (keeping the shortlex-least label).
        SampledCircleMap m;
        m.tolerance_ = tolerance;
        double prev_y = pairs.back().y;
        size_t i = 0;
        while (i < n) {
            size_t j = i;
            while (j + 1 < n && wrap_angle(pairs[j + 1].x - pairs[j].x) < same_point_tol) ++j;
            if (j == i) {
                m.xs_.push_back(pairs[i].x);
                m.ys_.push_back(pairs[i].y);
                m.labels_.push_back(pairs[i].label);
            } else {
                std::vector<Pair> cluster(pairs.begin() + i, pairs.begin() + j + 1);
                std::vector<double> xs;
                for (const Pair& p : cluster) xs.push_back(p.x);
                // Anchor backed off below the noise band, so images equal to
                // the previous image up to rounding still sort first.
                double anchor = prev_y - 2.0 * repair_tol;
                std::sort(cluster.begin(), cluster.end(), [&](const Pair& a, const Pair& b) {
                    return wrap_angle(a.y - anchor) < wrap_angle(b.y - anchor);
                });
                size_t emitted = 0;
                for (size_t k = 0; k <= j - i;) {
                    size_t e = k;
                    while (e + 1 <= j - i &&
                           std::abs(wrap_signed(cluster[e + 1].y - cluster[k].y)) <= tolerance)
                        ++e;
                    std::optional<Word> label = cluster[k].label;
                    for (size_t q = k + 1; q <= e; ++q)
                        if (cluster[q].label && (!label || cluster[q].label->shortlex_less(*label)))
                            label = cluster[q].label;
                    m.xs_.push_back(xs[emitted++]);  // x's are interchangeable at this scale
                    m.ys_.push_back(cluster[k].y);
                    m.labels_.push_back(label);
                    k = e + 1;
                }
            }
            prev_y = m.ys_.back();
            i = j + 1;
        }
        if (m.xs_.size() < 3)
            fail(errc::empty_sample, "fewer than 3 distinct sample points");
        m.repair();
        // Restore ascending storage order.
        std::vector<size_t> order(m.xs_.size());
        for (size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::stable_sort(order.begin(), order.end(),
                         [&](size_t a, size_t b) { return m.xs_[a] < m.xs_[b]; });
        SampledCircleMap out;
        out.tolerance_ = tolerance;
        for (size_t k : order) {
            out.xs_.push_back(m.xs_[k]);
            out.ys_.push_back(m.ys_[k]);
            out.labels_.push_back(m.labels_[k]);
        }
        out.check_winding();
        return out;
    }

    size_t size() const { return xs_.size(); }
    std::span<const double> xs() const { return xs_; }
    std::span<const double> ys() const { return ys_; }
    const std::optional<Word>& label(size_t i) const { return labels_[i]; }
    double tolerance() const { return tolerance_; }

    double evaluate_angle(double t) const {
        t = wrap_angle(t);
        size_t i = bracket(t);
        size_t j = (i + 1) % xs_.size();
        if (std::abs(wrap_signed(t - xs_[i])) < snap_tol) return ys_[i];
        if (std::abs(wrap_signed(t - xs_[j])) < snap_tol) return ys_[j];
        double gx = wrap_angle(xs_[j] - xs_[i]);
        if (gx == 0.0) return ys_[i];
        double u = wrap_angle(t - xs_[i]) / gx;
        return wrap_angle(ys_[i] + u * wrap_angle(ys_[j] - ys_[i]));
    }

    BoundaryPoint evaluate(const BoundaryPoint& x) const {
        return BoundaryPoint::from_angle(evaluate_angle(x.angle()));
    }

    // Index of a node within match_tol of angle t, if any.
    std::optional<size_t> find_node(double t, double match_tol) const {
        t = wrap_angle(t);
        size_t i = bracket(t);
        size_t j = (i + 1) % xs_.size();
        if (std::abs(wrap_signed(t - xs_[i])) < match_tol) return i;
        if (std::abs(wrap_signed(t - xs_[j])) < match_tol) return j;
        return std::nullopt;
    }

    SampledCircleMap inverse() const {
        std::vector<Pair> pairs(size());
        for (size_t i = 0; i < size(); ++i) pairs[i] = {ys_[i], xs_[i], labels_[i]};
        return from_pairs(std::move(pairs), tolerance_);
    }

    double max_sample_gap() const {
        double g = wrap_angle(xs_.front() - xs_.back());
        for (size_t i = 0; i + 1 < xs_.size(); ++i) g = std::max(g, xs_[i + 1] - xs_[i]);
        return g;
    }

private:
    size_t bracket(double t) const {
        auto it = std::upper_bound(xs_.begin(), xs_.end(), t);
        if (it == xs_.begin() || it == xs_.end()) return xs_.size() - 1;
        return static_cast<size_t>(it - xs_.begin()) - 1;
    }

    // Silent re-sorting of image values that are equal up to floating-point
    // noise: within a maximal run of sub-noise steps the recorded order
    // carries no information, so the run is sorted by circular position.
    // Genuine inversions are left for the winding check.
    void repair() {
        const size_t n = xs_.size();
        size_t s = 0;
        while (s + 1 < n) {
            if (std::abs(wrap_signed(ys_[s + 1] - ys_[s])) >= repair_tol) {
                ++s;
                continue;
            }
            size_t e = s + 1;
            while (e + 1 < n && std::abs(wrap_signed(ys_[e + 1] - ys_[e])) < repair_tol) ++e;
            double anchor = ys_[(s + n - 1) % n] - 2.0 * repair_tol;
            std::vector<std::pair<double, std::optional<Word>>> run;
            for (size_t k = s; k <= e; ++k) run.push_back({ys_[k], labels_[k]});
            std::sort(run.begin(), run.end(), [&](const auto& a, const auto& b) {
                return wrap_angle(a.first - anchor) < wrap_angle(b.first - anchor);
            });
            for (size_t k = s; k <= e; ++k) {
                ys_[k] = run[k - s].first;
                labels_[k] = run[k - s].second;
            }
            s = e + 1;
        }
    }

    // A monotone cyclic sequence winds exactly once. Backwards steps below
    // the noise floor count as zero; a genuine inversion adds a full turn,
    // so half a turn of slack discriminates exactly at any sample count.
    void check_winding() const {
        const size_t n = xs_.size();
        double total = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double step = wrap_angle(ys_[(i + 1) % n] - ys_[i]);
            if (step <= two_pi - repair_tol) total += step;
        }
        if (std::abs(total - two_pi) > std::numbers::pi) {
            for (size_t i = 0; i < n; ++i) {
                BoundaryPoint a = BoundaryPoint::from_angle(ys_[i]);
                BoundaryPoint b = BoundaryPoint::from_angle(ys_[(i + 1) % n]);
                BoundaryPoint c = BoundaryPoint::from_angle(ys_[(i + 2) % n]);
                if (circular_order(a, b, c, repair_tol) == Orientation::Negative)
                    fail(errc::monotonicity_violation,
                         "image order inverted at x-triple (" + std::to_string(xs_[i]) + ", " +
                             std::to_string(xs_[(i + 1) % n]) + ", " +
                             std::to_string(xs_[(i + 2) % n]) + ")");
            }
            fail(errc::monotonicity_violation, "image winding number is not 1");
        }
    }

    std::vector<double> xs_, ys_;
    std::vector<std::optional<Word>> labels_;
    double tolerance_ = 1e-8;
};

// Boundary map of a marking between two representations on the same
// generators, known at fixed points: a hyperbolic word w contributes the
// pair (sink base(w), sink target(w)); a word parabolic in both
// contributes its fixed-point pair (type preservation makes these genuine
// boundary values of the map, and they fill the regions where sinks are
// sparse). A hyperbolic/parabolic disagreement means the two structures
// are not markings of one surface and is an error.
inline SampledCircleMap from_representations(const GroupRepresentation& base,
                                             const GroupRepresentation& target,
                                             std::span<const Word> words,
                                             double classify_tol = 1e-6,
                                             double tolerance = 1e-8) {
    if (base.generator_names != target.generator_names)
        fail(errc::type_mismatch, "representations have different generator sets");
    std::vector<SampledCircleMap::Pair> pairs;
    pairs.reserve(words.size());
    for (const Word& w : words) {
        Moebius mb = evaluate_word(base, w);
        Moebius mt = evaluate_word(target, w);
        ElementClass cb = mb.classify(classify_tol);
        ElementClass ct = mt.classify(classify_tol);
        if (cb == ElementClass::Elliptic || ct == ElementClass::Elliptic)
            fail(errc::elliptic_found, "elliptic element at word '" + base.format(w) + "'");
        if (cb != ct)
            fail(errc::type_mismatch, "word '" + base.format(w) + "' is " +
                                          element_class_name(cb) + " in the base but " +
                                          element_class_name(ct) + " in the target");
        if (cb == ElementClass::Hyperbolic)
            pairs.push_back({mb.sink(classify_tol).angle(), mt.sink(classify_tol).angle(), w});
        else if (cb == ElementClass::Parabolic)
            pairs.push_back({mb.parabolic_fixed_point(classify_tol).angle(),
                             mt.parabolic_fixed_point(classify_tol).angle(), w});
    }
    return SampledCircleMap::from_pairs(std::move(pairs), tolerance);
}

// Ball-streaming variant: one depth-first walk per representation carries
// the matrix products along, which matters at depth 8 on rank-4 groups.
// Labels can be dropped to keep large maps lean.
inline SampledCircleMap from_representations(const GroupRepresentation& base,
                                             const GroupRepresentation& target, int L,
                                             const BallOptions& opt = {},
                                             bool with_labels = true) {
    if (base.generator_names != target.generator_names)
        fail(errc::type_mismatch, "representations have different generator sets");
    struct Probe {
        ElementClass cls;
        double point;
    };
    std::vector<Probe> base_side;
    base_side.reserve(static_cast<size_t>(std::min(projected_ball_size(base.rank(), L), 2e7)));
    visit_ball(base, L, opt, [&](const Word&, const Moebius& m) {
        ElementClass c = m.classify(opt.classify_tol);
        double point = 0.0;
        if (c == ElementClass::Hyperbolic) point = m.sink(opt.classify_tol).angle();
        else if (c == ElementClass::Parabolic)
            point = m.parabolic_fixed_point(opt.classify_tol).angle();
        base_side.push_back({c, point});
    });
    std::vector<SampledCircleMap::Pair> pairs;
    pairs.reserve(base_side.size());
    size_t idx = 0;
    visit_ball(target, L, opt, [&](const Word& w, const Moebius& m) {
        const Probe& b = base_side[idx++];
        ElementClass c = m.classify(opt.classify_tol);
        if (b.cls == ElementClass::Elliptic || c == ElementClass::Elliptic)
            fail(errc::elliptic_found, "elliptic element at word '" + base.format(w) + "'");
        if (b.cls != c)
            fail(errc::type_mismatch, "word '" + base.format(w) + "' is " +
                                          element_class_name(b.cls) + " in the base but " +
                                          element_class_name(c) + " in the target");
        if (c == ElementClass::Hyperbolic)
            pairs.push_back({b.point, m.sink(opt.classify_tol).angle(),
                             with_labels ? std::optional<Word>(w) : std::nullopt});
        else if (c == ElementClass::Parabolic)
            pairs.push_back({b.point, m.parabolic_fixed_point(opt.classify_tol).angle(),
                             with_labels ? std::optional<Word>(w) : std::nullopt});
    });
    base_side.clear();
    base_side.shrink_to_fit();
    return SampledCircleMap::from_pairs(std::move(pairs));
}

// Graph of a Moebius transformation over a given grid of angles.
inline SampledCircleMap moebius_graph(const Moebius& m, std::span<const double> grid,
                                      double tolerance = 1e-8) {
    std::vector<SampledCircleMap::Pair> pairs;
    pairs.reserve(grid.size());
    for (double t : grid)
        pairs.push_back({wrap_angle(t), m.apply(BoundaryPoint::from_angle(t)).angle(), {}});
    return SampledCircleMap::from_pairs(std::move(pairs), tolerance);
}

inline SampledCircleMap identity_map(std::span<const double> grid, double tolerance = 1e-8) {
    return moebius_graph(Moebius::identity(), grid, tolerance);
}

// g after f, sampled over f's nodes.
inline SampledCircleMap compose(const SampledCircleMap& g, const SampledCircleMap& f) {
    std::vector<SampledCircleMap::Pair> pairs;
    pairs.reserve(f.size());
    for (size_t i = 0; i < f.size(); ++i)
        pairs.push_back({f.xs()[i], g.evaluate_angle(f.ys()[i]), f.label(i)});
    return SampledCircleMap::from_pairs(std::move(pairs),
                                        std::max(f.tolerance(), g.tolerance()));
}

inline SampledCircleMap invert(const SampledCircleMap& f) { return f.inverse(); }

// Uniform distance evaluated over the union of both sample grids. For
// piecewise-linear maps the supremum over the circle is attained at a
// grid point of one of the maps, so this is exact.
inline double sup_distance(const SampledCircleMap& f, const SampledCircleMap& g) {
    double worst = 0.0;
    for (double x : f.xs())
        worst = std::max(worst, std::abs(wrap_signed(f.evaluate_angle(x) - g.evaluate_angle(x))));
    for (double x : g.xs())
        worst = std::max(worst, std::abs(wrap_signed(f.evaluate_angle(x) - g.evaluate_angle(x))));
    return worst;
}

enum class EquivarianceMode {
    // Only rows where the translated sample is itself a sample node, i.e.
    // the certificate that the sink correspondence is equivariant.
    ExactRows,
    // Every sample, interpolating between nodes; resolution-limited but
    // sensitive to sampling depth.
    Interpolated,
};

// Largest defect of f(base(g) x) = target(g) f(x) over sample points x and
// tester words g.
inline double check_equivariance(const SampledCircleMap& f, const GroupRepresentation& base,
                                 const GroupRepresentation& target, std::span<const Word> testers,
                                 EquivarianceMode mode = EquivarianceMode::Interpolated) {
    constexpr double row_tol = 1e-9;
    double worst = 0.0;
    for (const Word& t : testers) {
        Moebius mb = evaluate_word(base, t);
        Moebius mt = evaluate_word(target, t);
        for (size_t i = 0; i < f.size(); ++i) {
            double moved = mb.apply(BoundaryPoint::from_angle(f.xs()[i])).angle();
            double lhs;
            if (auto node = f.find_node(moved, row_tol)) {
                lhs = f.ys()[*node];
            } else if (mode == EquivarianceMode::ExactRows) {
                continue;
            } else {
                lhs = f.evaluate_angle(moved);
            }
            double rhs = mt.apply(BoundaryPoint::from_angle(f.ys()[i])).angle();
            worst = std::max(worst, std::abs(wrap_signed(lhs - rhs)));
        }
    }
    return worst;
}

// Post-compose by the inverse of the Moebius map through the images of
// (0, 1, infinity): the unique coset representative fixing those three
// points. The three anchor angles are adjoined to the grid, so the result
// fixes them exactly and the operation is idempotent.
inline SampledCircleMap sigma1_normalize(const SampledCircleMap& f) {
    const double t0 = BoundaryPoint::from_real(0.0).angle();
    const double t1 = BoundaryPoint::from_real(1.0).angle();
    const double ti = BoundaryPoint::infinity().angle();
    BoundaryPoint a = f.evaluate(BoundaryPoint::from_angle(t0));
    BoundaryPoint b = f.evaluate(BoundaryPoint::from_angle(t1));
    BoundaryPoint c = f.evaluate(BoundaryPoint::from_angle(ti));
    if (circular_order(a, b, c) == Orientation::Degenerate)
        fail(errc::degenerate_triple, "images of 0, 1, infinity are not distinct");
    Moebius minv = moebius_from_triple(a, b, c).inverse();

    std::vector<SampledCircleMap::Pair> pairs;
    pairs.reserve(f.size() + 3);
    for (size_t i = 0; i < f.size(); ++i)
        pairs.push_back({f.xs()[i],
                         minv.apply(BoundaryPoint::from_angle(f.ys()[i])).angle(), f.label(i)});
    for (double t : {t0, t1, ti})
        if (!f.find_node(t, SampledCircleMap::snap_tol))
            pairs.push_back({t, minv.apply(f.evaluate(BoundaryPoint::from_angle(t))).angle(), {}});
    return SampledCircleMap::from_pairs(std::move(pairs), f.tolerance());
}

} // namespace teich
