#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "teich/circle_map.hpp"
#include "teich/errors.hpp"
#include "teich/fuchsian.hpp"
#include "teich/marked.hpp"
#include "teich/moebius.hpp"
#include "teich/words.hpp"

namespace teich {

// Replace each letter of w by the image of its generator.
inline Word substitute(const Word& w, std::span<const Word> images) {
    Word out;
    for (int k = 0; k < w.size(); ++k) {
        if (w.index(k) >= static_cast<int>(images.size()))
            fail(errc::unknown_generator, "substitution misses a generator");
        Word r = w.inverted(k) ? images[w.index(k)].inverse() : images[w.index(k)];
        for (int j = 0; j < r.size(); ++j)
            out.push_generator(r.index(j), r.inverted(j));
    }
    return out;
}

// A mapping class given algebraically: the induced automorphism of the
// surface group and its inverse, as generator images.
struct MappingClass {
    std::vector<Word> images;
    std::vector<Word> inverse_images;

    Word apply(const Word& w) const { return substitute(w, images); }
    Word apply_inverse(const Word& w) const { return substitute(w, inverse_images); }
};

inline MappingClass identity_class(int rank) {
    MappingClass mc;
    for (int g = 0; g < rank; ++g) {
        mc.images.push_back(Word::generator(g));
        mc.inverse_images.push_back(Word::generator(g));
    }
    return mc;
}

// (mc1 * mc2) acts as mc1 after mc2.
inline MappingClass compose(const MappingClass& mc1, const MappingClass& mc2) {
    MappingClass out;
    for (const Word& w : mc2.images) out.images.push_back(substitute(w, mc1.images));
    for (const Word& w : mc1.inverse_images)
        out.inverse_images.push_back(substitute(w, mc2.inverse_images));
    return out;
}

inline MappingClass inverse(const MappingClass& mc) { return {mc.inverse_images, mc.images}; }

// Dehn twist presets for the once-punctured torus with cuff generator A
// and transversal B.
inline MappingClass torus_twist_a() {
    Word A = Word::generator(0), B = Word::generator(1);
    return {{A, B * A}, {A, B * A.inverse()}};
}

inline MappingClass torus_twist_b() {
    Word A = Word::generator(0), B = Word::generator(1);
    return {{A * B.inverse(), B}, {A * B, B}};
}

// Invariant checks against a concrete representation: the two image maps
// are mutually inverse (exactly for free groups, numerically in the
// presence of relators), relators map to the identity, and peripheral
// classes are preserved up to conjugacy and inversion.
inline void validate_mapping_class(const MappingClass& mc, const GroupRepresentation& rep,
                                   double tol = 1e-7) {
    int rank = rep.rank();
    if (static_cast<int>(mc.images.size()) != rank ||
        static_cast<int>(mc.inverse_images.size()) != rank)
        fail(errc::invalid_automorphism, "image count does not match the generator count");
    for (int g = 0; g < rank; ++g) {
        Word round1 = substitute(mc.images[g], mc.inverse_images);
        Word round2 = substitute(mc.inverse_images[g], mc.images);
        Word gen = Word::generator(g);
        if (rep.relators.empty()) {
            if (!(round1 == gen) || !(round2 == gen))
                fail(errc::invalid_automorphism,
                     "images and inverse images do not compose to the identity on '" +
                         rep.generator_names[g] + "'");
        } else {
            double d1 = evaluate_word(rep, round1).distance(rep.images[g]);
            double d2 = evaluate_word(rep, round2).distance(rep.images[g]);
            if (d1 > tol || d2 > tol)
                fail(errc::invalid_automorphism,
                     "composition defect " + std::to_string(std::max(d1, d2)) + " on '" +
                         rep.generator_names[g] + "'");
        }
    }
    for (const Word& r : rep.relators) {
        double d = evaluate_word(rep, mc.apply(r)).identity_distance();
        if (d > tol)
            fail(errc::invalid_automorphism,
                 "image of a relator misses the identity by " + std::to_string(d));
    }
    for (const Word& p : rep.peripheral_words) {
        Moebius image = evaluate_word(rep, mc.apply(p));
        if (image.classify(1e-6) != ElementClass::Parabolic)
            fail(errc::invalid_automorphism,
                 "image of peripheral word '" + rep.format(p) + "' is not parabolic");
        bool matched = false;
        for (const Word& q : rep.peripheral_words)
            if (std::abs(std::abs(image.trace()) -
                         std::abs(evaluate_word(rep, q).trace())) < tol) {
                matched = true;
                break;
            }
        if (!matched)
            fail(errc::invalid_automorphism, "image of peripheral word '" + rep.format(p) +
                                                 "' matches no peripheral class");
    }
}

// The action on marked structures: change the marking by precomposition
// with the inverse automorphism; the reference stays fixed.
inline MarkedStructure act(const MarkedStructure& ms, const MappingClass& mc) {
    validate_mapping_class(mc, ms.reference);
    GroupRepresentation out;
    out.generator_names = ms.target.generator_names;
    out.relators = ms.target.relators;
    out.peripheral_words = ms.target.peripheral_words;
    for (int g = 0; g < ms.target.rank(); ++g)
        out.images.push_back(evaluate_word(ms.target, mc.inverse_images[g]));
    return {ms.reference, std::move(out)};
}

// The boundary circle map of the mapping class itself: fixed points of
// reference words paired with fixed points of their automorphism images.
inline SampledCircleMap psi_p(const MappingClass& mc, const GroupRepresentation& reference,
                              std::span<const Word> words, const BallOptions& opt = {}) {
    std::vector<SampledCircleMap::Pair> pairs;
    for (const Word& w : words) {
        Moebius m = evaluate_word(reference, w);
        ElementClass cw = m.classify(opt.classify_tol);
        if (cw != ElementClass::Hyperbolic && cw != ElementClass::Parabolic) continue;
        Word moved = mc.apply(w);
        Moebius mm = evaluate_word(reference, moved);
        if (mm.classify(opt.classify_tol) != cw)
            fail(errc::invalid_automorphism,
                 "type not preserved at word '" + reference.format(w) + "'");
        if (cw == ElementClass::Hyperbolic)
            pairs.push_back({m.sink(opt.classify_tol).angle(),
                             mm.sink(opt.classify_tol).angle(), w});
        else
            pairs.push_back({m.parabolic_fixed_point(opt.classify_tol).angle(),
                             mm.parabolic_fixed_point(opt.classify_tol).angle(), w});
    }
    return SampledCircleMap::from_pairs(std::move(pairs));
}

inline SampledCircleMap psi_p(const MappingClass& mc, const GroupRepresentation& reference,
                              int L, const BallOptions& opt = {}) {
    std::vector<Word> words = ball_words(reference.rank(), L, opt);
    return psi_p(mc, reference, words, opt);
}

enum class GridPolicy {
    // Word lists closed under the automorphism in the directions the chain
    // needs: both sides are compared at exact sample nodes, so the defect
    // certifies the formula itself at sample resolution.
    Aligned,
    // All maps over the plain L-ball: the two sides sample the same map on
    // different grids, so the defect also carries the interpolation
    // resolution, which tightens as L grows.
    Literal,
};

// Uniform defect of the action formula: the normalized boundary map of the
// acted structure against F composed with the inverse of the class map.
inline double verify_action_formula(const MarkedStructure& ms, const MappingClass& mc, int L,
                                    const BallOptions& opt = {},
                                    GridPolicy policy = GridPolicy::Aligned) {
    MarkedStructure acted = act(ms, mc);
    std::vector<Word> ball = ball_words(ms.reference.rank(), L, opt);
    std::vector<Word> forward = ball, backward = ball;
    if (policy == GridPolicy::Aligned)
        for (const Word& w : ball) {
            forward.push_back(mc.apply(w));
            backward.push_back(mc.apply_inverse(w));
        }
    SampledCircleMap lhs = sigma1_normalize(
        from_representations(ms.reference, acted.target, forward, opt.classify_tol));
    SampledCircleMap F =
        from_representations(ms.reference, ms.target, backward, opt.classify_tol);
    SampledCircleMap G = psi_p(mc, ms.reference, backward, opt);
    SampledCircleMap rhs = sigma1_normalize(compose(F, invert(G)));
    return sup_distance(lhs, rhs);
}

} // namespace teich
