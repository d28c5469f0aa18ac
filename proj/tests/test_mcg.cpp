#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "teich/marked.hpp"
#include "teich/mcg.hpp"
#include "teich/pants.hpp"
#include "test_util.hpp"

using namespace teich;
using Catch::Approx;

namespace {

GroupRepresentation torus_reference() {
    static GroupRepresentation ref =
        canonical_reference(build_representation(testutil::punctured_torus(1.0, 0.0)));
    return ref;
}

} // namespace

TEST_CASE("preset twists are valid automorphisms") {
    GroupRepresentation ref = torus_reference();
    CHECK_NOTHROW(validate_mapping_class(torus_twist_a(), ref));
    CHECK_NOTHROW(validate_mapping_class(torus_twist_b(), ref));
    CHECK_NOTHROW(validate_mapping_class(inverse(torus_twist_a()), ref));
    CHECK_NOTHROW(validate_mapping_class(identity_class(2), ref));
}

TEST_CASE("non-automorphisms are rejected") {
    GroupRepresentation ref = torus_reference();
    MappingClass bogus;
    bogus.images = {Word::generator(0), Word::generator(0)};  // A -> A, B -> A
    bogus.inverse_images = {Word::generator(0), Word::generator(1)};
    try {
        validate_mapping_class(bogus, ref);
        FAIL("expected InvalidAutomorphism");
    } catch (const error& e) {
        CHECK(e.code() == errc::invalid_automorphism);
    }

    MappingClass wrong_count;
    wrong_count.images = {Word::generator(0)};
    wrong_count.inverse_images = {Word::generator(0)};
    CHECK_THROWS_AS(validate_mapping_class(wrong_count, ref), error);
}

TEST_CASE("identity class acts trivially") {
    GroupRepresentation ref = torus_reference();
    auto anchors = default_anchors(ref);
    MarkedStructure ms = make_marked(ref, build_representation(testutil::punctured_torus(1.0, 0.3)));
    MarkedStructure acted = act(ms, identity_class(2));
    CHECK(char_distance(phi_at(acted, anchors), phi_at(ms, anchors)) < 1e-12);
    CHECK(verify_action_formula(ms, identity_class(2), 5) < 1e-9);
}

TEST_CASE("acting by a class and its inverse returns to start") {
    GroupRepresentation ref = torus_reference();
    auto anchors = default_anchors(ref);
    MarkedStructure ms = make_marked(ref, build_representation(testutil::punctured_torus(1.0, 0.3)));
    for (const MappingClass& mc : {torus_twist_a(), torus_twist_b()}) {
        MarkedStructure round = act(act(ms, mc), inverse(mc));
        CHECK(char_distance(phi_at(round, anchors), phi_at(ms, anchors)) < 1e-7);
    }
}

TEST_CASE("full twist equals the Dehn twist action") {
    GroupRepresentation ref = torus_reference();
    auto anchors = default_anchors(ref);
    // Twist the cuff by its full length and compare characters with T_A.
    Word cuff = ref.twist_marks.at(0).cuff;
    double l = evaluate_word(ref, cuff).translation_length();
    GroupRepresentation twisted = twist_deform(ref, cuff, l);
    MarkedStructure ms = make_marked(ref, ref);
    MarkedStructure acted = act(ms, torus_twist_a());
    CHECK(char_distance(phi_at(make_marked(ref, twisted), anchors), phi_at(acted, anchors)) < 1e-6);
}

TEST_CASE("psi_p of basic classes") {
    GroupRepresentation ref = torus_reference();

    SECTION("identity class gives identity samples") {
        SampledCircleMap g = psi_p(identity_class(2), ref, 5);
        for (size_t i = 0; i < g.size(); ++i)
            CHECK(std::abs(wrap_signed(g.ys()[i] - g.xs()[i])) < 1e-12);
    }

    SECTION("inner automorphism gives the moebius graph of the conjugator") {
        MappingClass inner;
        Word A = Word::generator(0), B = Word::generator(1);
        inner.images = {A, A * B * A.inverse()};       // g -> A g A'
        inner.inverse_images = {A, A.inverse() * B * A};
        SampledCircleMap g = psi_p(inner, ref, 5);
        SampledCircleMap want = moebius_graph(evaluate_word(ref, A), g.xs());
        CHECK(sup_distance(g, want) < 1e-9);
    }

    SECTION("twist composed with its inverse is the identity at sample resolution") {
        SampledCircleMap g = psi_p(torus_twist_a(), ref, 6);
        SampledCircleMap gi = psi_p(inverse(torus_twist_a()), ref, 6);
        SampledCircleMap round = compose(g, gi);
        SampledCircleMap id = identity_map(round.xs());
        CHECK(sup_distance(round, id) <= 2.0 * std::max(g.max_sample_gap(), gi.max_sample_gap()));
        CHECK(sup_distance(g, identity_map(g.xs())) > 1e-3);  // not the identity itself
    }
}

TEST_CASE("orientation-reversing automorphism is caught at the circle") {
    GroupRepresentation ref = torus_reference();
    // Swapping the generators inverts the peripheral class: an
    // orientation-reversing mapping class. The sink correspondence then
    // reverses the circular order, which the map constructor rejects.
    MappingClass swap;
    swap.images = {Word::generator(1), Word::generator(0)};
    swap.inverse_images = {Word::generator(1), Word::generator(0)};
    CHECK_THROWS_AS(psi_p(swap, ref, 5), error);
}

TEST_CASE("action formula for torus twists") {
    GroupRepresentation ref = torus_reference();
    MarkedStructure ms = make_marked(ref, ref);

    SECTION("certificate defect at sample resolution") {
        for (const MappingClass& mc : {torus_twist_a(), torus_twist_b(),
                                       inverse(torus_twist_a()), inverse(torus_twist_b())}) {
            double d = verify_action_formula(ms, mc, 6);
            CHECK(d < 1e-3);
            CHECK(d < 1e-9);  // aligned grids verify the formula to rounding
        }
    }

    SECTION("literal-grid defect shrinks with depth") {
        for (const MappingClass& mc : {torus_twist_a(), torus_twist_b()}) {
            double d4 = verify_action_formula(ms, mc, 4, {}, GridPolicy::Literal);
            double d6 = verify_action_formula(ms, mc, 6, {}, GridPolicy::Literal);
            CHECK(d6 < d4);
        }
    }
}

TEST_CASE("psi_p is a homomorphism at sample resolution") {
    GroupRepresentation ref = torus_reference();
    MappingClass ab = compose(torus_twist_a(), torus_twist_b());
    SampledCircleMap lhs = psi_p(ab, ref, 6);
    SampledCircleMap ga = psi_p(torus_twist_a(), ref, 6);
    SampledCircleMap gb = psi_p(torus_twist_b(), ref, 6);
    SampledCircleMap rhs = compose(ga, gb);
    double gap = std::max({lhs.max_sample_gap(), ga.max_sample_gap(), gb.max_sample_gap()});
    CHECK(sup_distance(lhs, rhs) <= 2.0 * gap);
}

TEST_CASE("action is compatible with composition") {
    GroupRepresentation ref = torus_reference();
    auto anchors = default_anchors(ref);
    MarkedStructure ms = make_marked(ref, build_representation(testutil::punctured_torus(1.0, 0.3)));
    MappingClass mc1 = torus_twist_a(), mc2 = torus_twist_b();
    MarkedStructure stepwise = act(act(ms, mc1), mc2);
    MarkedStructure combined = act(ms, compose(mc2, mc1));  // mc1 first
    CHECK(char_distance(phi_at(stepwise, anchors), phi_at(combined, anchors)) < 1e-6);
}

TEST_CASE("action preserves types on the small ball") {
    GroupRepresentation ref = torus_reference();
    MarkedStructure ms = make_marked(ref, build_representation(testutil::punctured_torus(1.0, 0.3)));
    MarkedStructure acted = act(ms, torus_twist_a());
    for (const Word& w : ball_words(2, 4)) {
        ElementClass c1 = evaluate_word(ms.target, w).classify(1e-6);
        ElementClass c2 = evaluate_word(acted.target, w).classify(1e-6);
        CHECK(c1 == c2);
    }
}
