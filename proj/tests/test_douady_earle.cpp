#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "teich/douady_earle.hpp"
#include "teich/marked.hpp"
#include "teich/pants.hpp"
#include "test_util.hpp"

using namespace teich;
using Catch::Approx;

namespace {

std::vector<double> uniform_grid(int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(two_pi * i / n);
    return g;
}

std::vector<BoundaryPoint> uniform_points(int n, double offset = 0.0) {
    std::vector<BoundaryPoint> p;
    for (int i = 0; i < n; ++i) p.push_back(BoundaryPoint::from_angle(offset + two_pi * i / n));
    return p;
}

DiskPoint random_disk(std::mt19937& rng, double rmax = 0.85) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double r = rmax * std::sqrt(u(rng));
    double t = two_pi * u(rng);
    return DiskPoint::make(std::polar(r, t));
}

// Isometries that do not push the origin too close to the boundary, where
// the barycenter field becomes badly conditioned.
Moebius bounded_psl(std::mt19937& rng, double rmax = 0.8) {
    while (true) {
        Moebius s = testutil::random_psl(rng);
        if (std::abs(apply_disk(s, DiskPoint::make(0.0)).z) <= rmax) return s;
    }
}

} // namespace

TEST_CASE("barycenter of symmetric measures is the origin") {
    for (int n : {4, 7, 64}) {
        DiskPoint w = conformal_barycenter(uniform_points(n, 0.37));
        CHECK(std::abs(w.z) < 1e-9);
    }
}

TEST_CASE("barycenter is natural under moebius maps") {
    std::mt19937 rng(51);
    BarycenterOptions opt;
    opt.vanish_tol = 1e-12;
    for (int i = 0; i < 20; ++i) {
        Moebius s = bounded_psl(rng);
        std::vector<BoundaryPoint> pts;
        for (const BoundaryPoint& p : uniform_points(32)) pts.push_back(s.apply(p));
        DiskPoint w = conformal_barycenter(pts, opt);
        DiskPoint want = apply_disk(s, DiskPoint::make(0.0));
        CHECK(std::abs(w.z - want.z) < 1e-8);
    }
}

TEST_CASE("barycenter is rotation equivariant") {
    std::mt19937 rng(52);
    std::uniform_real_distribution<double> u(0.0, two_pi);
    std::vector<BoundaryPoint> pts = {
        BoundaryPoint::from_angle(0.1), BoundaryPoint::from_angle(1.4),
        BoundaryPoint::from_angle(2.0), BoundaryPoint::from_angle(4.4),
        BoundaryPoint::from_angle(5.0)};
    DiskPoint w0 = conformal_barycenter(pts);
    for (int i = 0; i < 20; ++i) {
        double t = u(rng);
        std::vector<BoundaryPoint> rotated;
        for (const BoundaryPoint& p : pts) rotated.push_back(BoundaryPoint::from_angle(p.angle() + t));
        DiskPoint w = conformal_barycenter(rotated);
        CHECK(std::abs(w.z - w0.z * std::polar(1.0, t)) < 1e-9);
    }
}

TEST_CASE("barycenter is seed independent") {
    std::mt19937 rng(53);
    std::uniform_real_distribution<double> u(0.0, two_pi);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<BoundaryPoint> pts;
        for (int k = 0; k < 9; ++k) pts.push_back(BoundaryPoint::from_angle(u(rng)));
        // Skip nearly degenerate draws.
        try {
            BarycenterOptions tight;
            tight.vanish_tol = 1e-12;
            DiskPoint w0 = conformal_barycenter(pts, tight);
            for (int s = 0; s < 20; ++s) {
                BarycenterOptions opt;
                opt.vanish_tol = 1e-12;
                opt.seed = random_disk(rng, 0.7).z;
                DiskPoint w = conformal_barycenter(pts, opt);
                CHECK(std::abs(w.z - w0.z) < 1e-8);
            }
        } catch (const error& e) {
            CHECK(e.code() == errc::degenerate_measure);
        }
    }
}

TEST_CASE("degenerate measures are rejected") {
    std::vector<BoundaryPoint> tight;
    for (int k = 0; k < 5; ++k) tight.push_back(BoundaryPoint::from_angle(1.0 + 1e-4 * k));
    CHECK_THROWS_AS(conformal_barycenter(tight), error);
    std::vector<BoundaryPoint> two = {BoundaryPoint::from_angle(0), BoundaryPoint::from_angle(3)};
    CHECK_THROWS_AS(conformal_barycenter(two), error);
}

TEST_CASE("extension of the identity is the identity") {
    SampledCircleMap id = identity_map(uniform_grid(32));
    std::mt19937 rng(54);
    for (int i = 0; i < 20; ++i) {
        DiskPoint z = random_disk(rng);
        DiskPoint w = de_extend(id, z, 64);
        CHECK(std::abs(w.z - z.z) < 1e-6);
    }
}

TEST_CASE("extension reproduces moebius maps") {
    std::mt19937 rng(55);
    BarycenterOptions opt;
    opt.vanish_tol = 1e-12;
    for (int i = 0; i < 10; ++i) {
        Moebius s = bounded_psl(rng);
        SampledCircleMap f = moebius_graph(s, uniform_grid(2048));
        DiskPoint z = random_disk(rng, 0.6);
        DiskPoint want = apply_disk(s, z);
        DiskPoint got = de_extend(f, z, 256, opt);
        CHECK(disk_distance(got, want) < 1e-5);
    }
}

TEST_CASE("conformal naturality on twist-suite maps") {
    GroupRepresentation base = build_representation(testutil::punctured_torus(1.0, 0.0));
    GroupRepresentation target = build_representation(testutil::punctured_torus(1.0, 0.5));
    SampledCircleMap f = from_representations(base, target, ball_words(2, 8));
    std::mt19937 rng(56);
    BarycenterOptions opt;
    opt.max_iterations = 5000;
    // The equal-weight pushforward quadrature of a piecewise-linear map has
    // a phase-sensitivity floor of a few 1e-4 at N=128, falling like 1/N^2.
    for (int i = 0; i < 8; ++i) {
        Moebius s1 = bounded_psl(rng);
        Moebius s2 = bounded_psl(rng);
        DiskPoint z = random_disk(rng, 0.6);
        DiskPoint lhs128 = de_extend_composed(s1, f, s2, z, 128, opt);
        DiskPoint rhs128 = apply_disk(s1, de_extend(f, apply_disk(s2, z), 128, opt));
        CHECK(disk_distance(lhs128, rhs128) < 1e-3);
        DiskPoint lhs512 = de_extend_composed(s1, f, s2, z, 512, opt);
        DiskPoint rhs512 = apply_disk(s1, de_extend(f, apply_disk(s2, z), 512, opt));
        CHECK(disk_distance(lhs512, rhs512) < 1e-4);
    }
}

TEST_CASE("equivariance witness for markings") {
    GroupRepresentation base = build_representation(testutil::punctured_torus(1.0, 0.0));
    std::vector<Word> words = {Word::generator(0), Word::generator(1)};
    std::mt19937 rng(57);
    std::vector<DiskPoint> pts;
    for (int i = 0; i < 3; ++i) pts.push_back(random_disk(rng, 0.5));

    SECTION("identity marking") {
        SampledCircleMap f = from_representations(base, base, ball_words(2, 6));
        CHECK(de_equivariance_check(f, base, base, pts, words, 64) < 1e-6);
    }

    SECTION("conjugate marking") {
        GroupRepresentation target = testutil::conjugated(base, bounded_psl(rng));
        SampledCircleMap f = from_representations(base, target, ball_words(2, 8));
        CHECK(de_equivariance_check(f, base, target, pts, words, 128) < 1e-4);
    }

    SECTION("twist marking defect shrinks with sampling depth") {
        GroupRepresentation target = build_representation(testutil::punctured_torus(1.0, 0.5));
        SampledCircleMap f6 = from_representations(base, target, ball_words(2, 6));
        SampledCircleMap f8 = from_representations(base, target, ball_words(2, 8));
        double d6 = de_equivariance_check(f6, base, target, pts, words, 96);
        double d8 = de_equivariance_check(f8, base, target, pts, words, 96);
        CHECK(d8 <= d6 + 1e-6);
        CHECK(std::isfinite(d6));
    }
}
