#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "teich/errors.hpp"
#include "teich/moebius.hpp"
#include "teich/words.hpp"

namespace teich {

// A finitely generated group of Moebius transformations: one matrix per
// generator, optional relators (closed surfaces) and peripheral words
// (cusps). Twist marks, when present, record the Fenchel-Nielsen data a
// builder attached to its cuffs.
struct GroupRepresentation {
    std::vector<std::string> generator_names;
    std::vector<Moebius> images;
    std::vector<Word> relators;
    std::vector<Word> peripheral_words;

    // Per-cuff deformation bookkeeping: conjugate `movers`, left-multiply
    // `left_mult`, right-multiply `right_mult` by the inverse translation.
    struct TwistMark {
        Word cuff;
        std::vector<int> movers;
        std::vector<int> left_mult;
        std::vector<int> right_mult;
    };
    std::vector<TwistMark> twist_marks;

    int rank() const { return static_cast<int>(images.size()); }

    int generator_index(const std::string& name) const {
        for (size_t i = 0; i < generator_names.size(); ++i)
            if (generator_names[i] == name) return static_cast<int>(i);
        fail(errc::unknown_generator, "no generator named '" + name + "'");
    }

    Word parse(const std::string& text) const { return parse_word(text, generator_names); }
    std::string format(const Word& w) const { return format_word(w, generator_names); }
};

namespace detail {

// Compensated (double-double) 2x2 products. Deep cusp excursions make
// intermediate entries large while the final entries stay small, so plain
// double products lose enough trace accuracy to misclassify parabolic
// words; carrying an error term keeps word evaluation accurate to the
// precision of the stored generators.
struct Dd {
    double hi = 0.0, lo = 0.0;
};

inline Dd two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

inline Dd dd_add(Dd a, Dd b) {
    Dd s = two_sum(a.hi, b.hi);
    double lo = a.lo + b.lo + s.lo;
    double hi = s.hi + lo;
    return {hi, lo - (hi - s.hi)};
}

inline Dd dd_mul(Dd a, double b) {
    double p = a.hi * b;
    double e = std::fma(a.hi, b, -p);
    double lo = std::fma(a.lo, b, e);
    double hi = p + lo;
    return {hi, lo - (hi - p)};
}

struct DdMatrix {
    Dd a, b, c, d;

    static DdMatrix identity() { return {{1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}}; }

    // this * g, with g given by double entries.
    DdMatrix times(double ga, double gb, double gc, double gd) const {
        return {dd_add(dd_mul(a, ga), dd_mul(b, gc)), dd_add(dd_mul(a, gb), dd_mul(b, gd)),
                dd_add(dd_mul(c, ga), dd_mul(d, gc)), dd_add(dd_mul(c, gb), dd_mul(d, gd))};
    }

    DdMatrix times(const Moebius& g, bool inverted) const {
        return inverted ? times(g.d(), -g.b(), -g.c(), g.a())
                        : times(g.a(), g.b(), g.c(), g.d());
    }

    Moebius to_moebius() const {
        return Moebius::from_product(a.hi + a.lo, b.hi + b.lo, c.hi + c.lo, d.hi + d.lo);
    }
};

} // namespace detail

inline Moebius evaluate_word(const GroupRepresentation& rep, const Word& w) {
    detail::DdMatrix m = detail::DdMatrix::identity();
    for (int k = 0; k < w.size(); ++k) {
        int i = w.index(k);
        if (i >= rep.rank()) fail(errc::unknown_generator, "word references generator index " +
                                                               std::to_string(i));
        m = m.times(rep.images[i], w.inverted(k));
    }
    return m.to_moebius();
}

// Product of the stored SL(2,R) lifts without the PSL sign normalization,
// rescaled to det 1 by a positive factor. The trace sign of a balanced word
// (relator, commutator, peripheral word of a commutator type) does not
// depend on the choice of lifts, so this is how Fricke-type identities are
// checked.
inline std::array<double, 4> sl2_evaluate(const GroupRepresentation& rep, const Word& w) {
    detail::DdMatrix m = detail::DdMatrix::identity();
    for (int k = 0; k < w.size(); ++k)
        m = m.times(rep.images[w.index(k)], w.inverted(k));
    std::array<double, 4> out = {m.a.hi + m.a.lo, m.b.hi + m.b.lo, m.c.hi + m.c.lo,
                                 m.d.hi + m.d.lo};
    // Rescale only when the computed determinant is accurate enough for the
    // correction to help rather than inject cancellation noise.
    double scale = std::max(std::max(std::abs(out[0]), std::abs(out[1])),
                            std::max(std::abs(out[2]), std::abs(out[3])));
    double det = out[0] * out[3] - out[1] * out[2];
    if (scale < 1e3 && det > 0.5 && det < 2.0) {
        double r = std::sqrt(det);
        for (double& e : out) e /= r;
    }
    return out;
}

inline double sl2_trace(const GroupRepresentation& rep, const Word& w) {
    auto m = sl2_evaluate(rep, w);
    return m[0] + m[3];
}

// Largest entrywise defect of the relators from the identity.
// Largest entrywise defect of the relators from the identity.
inline double relator_defect(const GroupRepresentation& rep) {
    double worst = 0.0;
    for (const Word& r : rep.relators)
        worst = std::max(worst, evaluate_word(rep, r).identity_distance());
    return worst;
}

inline void validate_representation(const GroupRepresentation& rep, double tol = 1e-6) {
    if (rep.generator_names.size() != rep.images.size())
        fail(errc::parse_error, "generator name/matrix count mismatch");
    double rd = relator_defect(rep);
    if (rd > tol)
        fail(errc::parse_error, "relator defect " + std::to_string(rd) + " exceeds tolerance");
    for (const Word& p : rep.peripheral_words)
        if (evaluate_word(rep, p).classify(tol) != ElementClass::Parabolic)
            fail(errc::parse_error, "peripheral word '" + rep.format(p) + "' is not parabolic");
}

struct BallOptions {
    int max_depth = 12;
    double budget = 5e6;       // projected free-word count guard
    double classify_tol = 1e-6;
    double dedup_tol = 1e-8;   // matrix dedup for groups with relators
};

// Number of freely reduced words of length <= L over k generators.
inline double projected_ball_size(int k, int L) {
    if (k <= 0) return 1.0;
    if (k == 1) return 1.0 + 2.0 * L;
    double total = 1.0, level = 1.0;
    for (int l = 1; l <= L; ++l) {
        level *= (l == 1) ? 2.0 * k : 2.0 * k - 1.0;
        total += level;
        if (total > 1e18) break;
    }
    return total;
}

inline void check_ball_budget(int k, int L, const BallOptions& opt) {
    if (L < 0 || L > opt.max_depth)
        fail(errc::ball_too_large, "depth " + std::to_string(L) + " exceeds cap " +
                                       std::to_string(opt.max_depth));
    double n = projected_ball_size(k, L);
    if (n > opt.budget)
        fail(errc::ball_too_large, "projected ball size " + std::to_string(n) +
                                       " exceeds budget " + std::to_string(opt.budget));
}

// Depth-first walk over all freely reduced words of length <= L, carrying
// the matrix product in compensated arithmetic. The visitor sees the
// identity (empty word) first.
template <typename Visitor>
inline void visit_ball(const GroupRepresentation& rep, int L, const BallOptions& opt,
                       Visitor&& visit) {
    check_ball_budget(rep.rank(), L, opt);
    Word w;
    visit(static_cast<const Word&>(w), Moebius::identity());
    std::vector<detail::DdMatrix> stack;
    stack.reserve(L + 1);
    stack.push_back(detail::DdMatrix::identity());

    auto descend = [&](auto&& self) -> void {
        if (w.size() >= L) return;
        int last = w.empty() ? 0 : (w.inverted(w.size() - 1) ? (w.index(w.size() - 1) + 1)
                                                             : -(w.index(w.size() - 1) + 1));
        for (int i = 0; i < rep.rank(); ++i) {
            for (int sgn = 0; sgn < 2; ++sgn) {
                int8_t letter = sgn ? static_cast<int8_t>(-(i + 1)) : static_cast<int8_t>(i + 1);
                if (letter == last) continue;  // would cancel
                detail::DdMatrix m = stack.back().times(rep.images[i], sgn != 0);
                w.push(letter);
                stack.push_back(m);
                visit(static_cast<const Word&>(w), m.to_moebius());
                self(self);
                stack.pop_back();
                w.pop();
            }
        }
    };
    descend(descend);
}

// Words only, no representation needed.
inline std::vector<Word> ball_words(int num_generators, int L, const BallOptions& opt = {}) {
    check_ball_budget(num_generators, L, opt);
    std::vector<Word> out;
    out.reserve(static_cast<size_t>(projected_ball_size(num_generators, L)));
    out.emplace_back();
    Word w;
    auto descend = [&](auto&& self) -> void {
        if (w.size() >= L) return;
        int last = w.empty() ? 0 : (w.inverted(w.size() - 1) ? (w.index(w.size() - 1) + 1)
                                                             : -(w.index(w.size() - 1) + 1));
        for (int i = 0; i < num_generators; ++i) {
            for (int sgn = 0; sgn < 2; ++sgn) {
                int8_t letter = sgn ? static_cast<int8_t>(-(i + 1)) : static_cast<int8_t>(i + 1);
                if (letter == last) continue;
                w.push(letter);
                out.push_back(w);
                self(self);
                w.pop();
            }
        }
    };
    descend(descend);
    return out;
}

// All distinct elements of the L-ball as (word, matrix) pairs. For groups
// with relators, matrices agreeing within dedup_tol are merged and the
// shortlex-least word is kept.
inline std::vector<std::pair<Word, Moebius>> enumerate_ball(const GroupRepresentation& rep, int L,
                                                            const BallOptions& opt = {}) {
    std::vector<std::pair<Word, Moebius>> items;
    items.reserve(static_cast<size_t>(std::min(projected_ball_size(rep.rank(), L), 2e7)));
    visit_ball(rep, L, opt, [&](const Word& w, const Moebius& m) { items.emplace_back(w, m); });
    if (rep.relators.empty()) return items;

    // Sort by an irrational linear key; near-equal matrices land in a
    // narrow key window, inside which full comparisons decide.
    const double kb = 3.14159265358979, kc = 2.71828182845905, kd = 1.41421356237310;
    auto key = [&](const Moebius& m) { return m.a() + kb * m.b() + kc * m.c() + kd * m.d(); };
    std::vector<size_t> order(items.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t i, size_t j) { return key(items[i].second) < key(items[j].second); });

    double window = opt.dedup_tol * (1.0 + kb + kc + kd) * 1.5;
    std::vector<std::pair<Word, Moebius>> out;
    out.reserve(items.size());
    std::vector<double> out_keys;
    out_keys.reserve(items.size());
    for (size_t oi : order) {
        const auto& cand = items[oi];
        double ck = key(cand.second);
        bool merged = false;
        for (size_t j = out.size(); j-- > 0;) {
            if (ck - out_keys[j] > window) break;
            if (out[j].second.distance(cand.second) <= opt.dedup_tol) {
                if (cand.first.shortlex_less(out[j].first)) out[j].first = cand.first;
                merged = true;
                break;
            }
        }
        if (!merged) {
            out.push_back(cand);
            out_keys.push_back(ck);
        }
    }
    return out;
}

// Circularly sorted sinks of the hyperbolic elements of an L-ball.
struct SinkSample {
    struct Entry {
        double angle;
        Word word;
    };
    std::vector<Entry> entries;
    int depth = 0;

    size_t size() const { return entries.size(); }
};

inline SinkSample sink_sample(const GroupRepresentation& rep, int L, const BallOptions& opt = {}) {
    SinkSample s;
    s.depth = L;
    visit_ball(rep, L, opt, [&](const Word& w, const Moebius& m) {
        switch (m.classify(opt.classify_tol)) {
            case ElementClass::Identity:
            case ElementClass::Parabolic:
                return;
            case ElementClass::Elliptic:
                fail(errc::elliptic_found,
                     "elliptic element at word '" + rep.format(w) +
                         "' (trace " + std::to_string(m.trace()) +
                         "); the representation cannot be a torsion-free discrete group");
            case ElementClass::Hyperbolic:
                s.entries.push_back({m.sink(opt.classify_tol).angle(), w});
        }
    });
    std::sort(s.entries.begin(), s.entries.end(), [](const auto& x, const auto& y) {
        return x.angle < y.angle;
    });
    // Merge duplicates within 1e-10, keeping the shorter (then shortlex) word.
    constexpr double merge_tol = 1e-10;
    std::vector<SinkSample::Entry> merged;
    merged.reserve(s.entries.size());
    for (const auto& e : s.entries) {
        if (!merged.empty() && e.angle - merged.back().angle < merge_tol) {
            if (e.word.shortlex_less(merged.back().word)) merged.back().word = e.word;
        } else {
            merged.push_back(e);
        }
    }
    // Wrap-around pair.
    if (merged.size() > 1 && (two_pi - merged.back().angle) + merged.front().angle < merge_tol) {
        if (merged.back().word.shortlex_less(merged.front().word))
            merged.front().word = merged.back().word;
        merged.pop_back();
    }
    s.entries = std::move(merged);
    return s;
}

// Largest angular gap between circularly consecutive sinks; the density
// diagnostic behind the full-limit-set check.
inline double max_gap(const SinkSample& s) {
    if (s.entries.empty()) fail(errc::empty_sample, "sink sample is empty");
    if (s.entries.size() == 1) return two_pi;
    double worst = two_pi - s.entries.back().angle + s.entries.front().angle;
    for (size_t i = 0; i + 1 < s.entries.size(); ++i)
        worst = std::max(worst, s.entries[i + 1].angle - s.entries[i].angle);
    return worst;
}

} // namespace teich
