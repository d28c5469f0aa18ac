#pragma once

#include <array>
#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "teich/circle_map.hpp"
#include "teich/errors.hpp"
#include "teich/fuchsian.hpp"
#include "teich/moebius.hpp"
#include "teich/words.hpp"

namespace teich {

// A marked hyperbolic structure: the session-fixed reference holonomy and a
// target holonomy on the same generators. The reference plays the role of
// the fixed universal cover; everything downstream is relative to it.
struct MarkedStructure {
    GroupRepresentation reference;
    GroupRepresentation target;
};

// Word-by-word type agreement between the two representations on a small
// ball; the runtime form of the type-preservation requirement for markings.
inline void check_type_agreement(const GroupRepresentation& a, const GroupRepresentation& b,
                                 int depth = 4, double classify_tol = 1e-6) {
    if (a.generator_names != b.generator_names)
        fail(errc::type_mismatch, "generator sets differ");
    for (const Word& w : ball_words(a.rank(), depth)) {
        ElementClass ca = evaluate_word(a, w).classify(classify_tol);
        ElementClass cb = evaluate_word(b, w).classify(classify_tol);
        if (ca == ElementClass::Elliptic || cb == ElementClass::Elliptic)
            fail(errc::elliptic_found, "elliptic element at word '" + a.format(w) + "'");
        if (ca != cb)
            fail(errc::type_mismatch, "word '" + a.format(w) + "' is " + element_class_name(ca) +
                                          " in the reference but " + element_class_name(cb) +
                                          " in the target");
    }
}

inline MarkedStructure make_marked(GroupRepresentation reference, GroupRepresentation target,
                                   int check_depth = 4, double classify_tol = 1e-6) {
    check_type_agreement(reference, target, check_depth, classify_tol);
    return {std::move(reference), std::move(target)};
}

// First three hyperbolic shortlex words whose sinks are pairwise separated,
// ordered so the sink triple is positively oriented.
inline std::array<Word, 3> default_anchors(const GroupRepresentation& rep,
                                           double min_separation = 0.1, int search_depth = 4,
                                           double classify_tol = 1e-6) {
    std::vector<Word> words = ball_words(rep.rank(), search_depth);
    std::sort(words.begin(), words.end(), [](const Word& a, const Word& b) {
        return a.shortlex_less(b);
    });
    std::vector<Word> chosen;
    std::vector<BoundaryPoint> sinks;
    for (const Word& w : words) {
        if (w.empty()) continue;
        Moebius m = evaluate_word(rep, w);
        if (m.classify(classify_tol) != ElementClass::Hyperbolic) continue;
        BoundaryPoint s = m.sink(classify_tol);
        bool separated = true;
        for (const BoundaryPoint& t : sinks)
            if (visual_distance(s, t) <= min_separation) { separated = false; break; }
        if (!separated) continue;
        chosen.push_back(w);
        sinks.push_back(s);
        if (chosen.size() == 3) break;
    }
    if (chosen.size() < 3)
        fail(errc::anchor_sinks_degenerate,
             "could not find three separated hyperbolic sinks at depth " +
                 std::to_string(search_depth));
    if (circular_order(sinks[0], sinks[1], sinks[2]) == Orientation::Negative)
        std::swap(chosen[1], chosen[2]);
    return {chosen[0], chosen[1], chosen[2]};
}

// Conjugate so that the anchor sinks land on 0, 1, infinity.
inline GroupRepresentation sigma2_normalize(const GroupRepresentation& rep,
                                            const std::array<Word, 3>& anchors,
                                            double classify_tol = 1e-6) {
    std::array<BoundaryPoint, 3> sinks;
    for (int k = 0; k < 3; ++k) {
        Moebius m = evaluate_word(rep, anchors[k]);
        if (m.classify(classify_tol) != ElementClass::Hyperbolic)
            fail(errc::anchor_not_hyperbolic,
                 "anchor word '" + rep.format(anchors[k]) + "' is not hyperbolic");
        sinks[k] = m.sink(classify_tol);
    }
    switch (circular_order(sinks[0], sinks[1], sinks[2])) {
        case Orientation::Degenerate:
            fail(errc::anchor_sinks_degenerate, "anchor sinks are not distinct");
        case Orientation::Negative:
            fail(errc::anchor_orientation_negative,
                 "anchor sink triple is negatively oriented; reorder the anchors");
        case Orientation::Positive:
            break;
    }
    Moebius m = moebius_from_triple(sinks[0], sinks[1], sinks[2]);
    Moebius minv = m.inverse();
    GroupRepresentation out = rep;
    for (Moebius& img : out.images) img = minv * img * m;
    return out;
}

// Session-fixed reference: canonical position makes the three standard
// points sinks of short words, so the sigma-1 section evaluates exactly on
// sample nodes.
inline GroupRepresentation canonical_reference(const GroupRepresentation& rep,
                                               std::optional<std::array<Word, 3>> anchors = {},
                                               double classify_tol = 1e-6) {
    std::array<Word, 3> a = anchors ? *anchors : default_anchors(rep, 0.1, 4, classify_tol);
    return sigma2_normalize(rep, a, classify_tol);
}

// A representation in canonical position together with the anchors that
// pinned it: the concrete form of a conjugacy class.
struct Character {
    GroupRepresentation rep;
    std::array<Word, 3> anchors;
};

inline Character phi_at(const MarkedStructure& ms, const std::array<Word, 3>& anchors,
                        double classify_tol = 1e-6) {
    return {sigma2_normalize(ms.target, anchors, classify_tol), anchors};
}

// Max over generators of the entrywise distance between canonical matrices
// (minimized over the sign ambiguity). Zero exactly when the canonical
// forms agree.
inline double char_distance(const Character& c1, const Character& c2) {
    if (c1.anchors != c2.anchors || c1.rep.generator_names != c2.rep.generator_names)
        fail(errc::anchor_mismatch, "characters use different anchors or generators");
    double worst = 0.0;
    for (int g = 0; g < c1.rep.rank(); ++g)
        worst = std::max(worst, c1.rep.images[g].distance(c2.rep.images[g]));
    return worst;
}

// The un-normalized sink correspondence; the defining boundary-map data of
// the marking.
inline SampledCircleMap rep_to_homeo(const MarkedStructure& ms, int L,
                                     const BallOptions& opt = {}) {
    std::vector<Word> words = ball_words(ms.reference.rank(), L, opt);
    return from_representations(ms.reference, ms.target, words, opt.classify_tol);
}

// Sigma-1-normalized boundary map: the canonical representative of the
// coset of the boundary homeomorphism.
inline SampledCircleMap phi_p(const MarkedStructure& ms, int L, const BallOptions& opt = {}) {
    return sigma1_normalize(rep_to_homeo(ms, L, opt));
}

// Certifies, word by word, that conjugating the reference action through F
// reproduces the target action: R[g] = F o ref[g] o F^inverse evaluated on
// F's grid against the target's boundary action.
struct ConsistencyReport {
    struct Row {
        Word word;
        double deviation = 0.0;
        size_t rows_checked = 0;
    };
    std::vector<Row> rows;
    double max_deviation = 0.0;
};

inline ConsistencyReport homeo_to_rep(const SampledCircleMap& F, const MarkedStructure& ms,
                                      std::span<const Word> words,
                                      EquivarianceMode mode = EquivarianceMode::ExactRows) {
    constexpr double row_tol = 1e-9;
    ConsistencyReport report;
    for (const Word& w : words) {
        Moebius mref = evaluate_word(ms.reference, w);
        Moebius mtar = evaluate_word(ms.target, w);
        ConsistencyReport::Row row;
        row.word = w;
        for (size_t i = 0; i < F.size(); ++i) {
            double moved = mref.apply(BoundaryPoint::from_angle(F.xs()[i])).angle();
            double lhs;
            if (auto node = F.find_node(moved, row_tol)) {
                lhs = F.ys()[*node];
            } else if (mode == EquivarianceMode::ExactRows) {
                continue;
            } else {
                lhs = F.evaluate_angle(moved);
            }
            double rhs = mtar.apply(BoundaryPoint::from_angle(F.ys()[i])).angle();
            row.deviation = std::max(row.deviation, std::abs(wrap_signed(lhs - rhs)));
            ++row.rows_checked;
        }
        report.max_deviation = std::max(report.max_deviation, row.deviation);
        report.rows.push_back(row);
    }
    return report;
}

struct ConvergenceRow {
    int index;
    double char_dist;
    double bmap_dist;
};

// Both coordinates of each structure against the limit: the character
// distance and the uniform distance of normalized boundary maps. The two
// columns tend to zero together exactly when the topologies agree.
inline std::vector<ConvergenceRow> converge_report(std::span<const MarkedStructure> sequence,
                                                   const MarkedStructure& limit, int L,
                                                   const std::array<Word, 3>& anchors,
                                                   const BallOptions& opt = {}) {
    for (const MarkedStructure& ms : sequence) {
        if (ms.reference.generator_names != limit.reference.generator_names)
            fail(errc::anchor_mismatch, "sequence members use different generators");
        for (int g = 0; g < ms.reference.rank(); ++g)
            if (ms.reference.images[g].distance(limit.reference.images[g]) > 1e-9)
                fail(errc::anchor_mismatch, "sequence members do not share the reference");
    }
    Character limit_char = phi_at(limit, anchors, opt.classify_tol);
    SampledCircleMap limit_map = phi_p(limit, L, opt);
    std::vector<ConvergenceRow> rows;
    rows.reserve(sequence.size());
    for (size_t i = 0; i < sequence.size(); ++i) {
        Character ci = phi_at(sequence[i], anchors, opt.classify_tol);
        SampledCircleMap fi = phi_p(sequence[i], L, opt);
        rows.push_back({static_cast<int>(i), char_distance(ci, limit_char),
                        sup_distance(fi, limit_map)});
    }
    return rows;
}

} // namespace teich
