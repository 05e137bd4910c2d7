#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "flatholo/mwbuild.hpp"
#include "flatholo/sl2.hpp"
#include "flatholo/ucover.hpp"

using namespace flatholo;

namespace {

ProjMatrix random_elt(std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return exp_sl2(LieVec{u(rng), u(rng), u(rng)});
}

}  // namespace

TEST_CASE("canonical lift basics") {
    const LiftedElement id = canonical_lift(ProjMatrix::identity());
    CHECK(std::abs(id.eval(0.3) - 0.3) <= 1e-14);
    CHECK(std::abs(id.eval(-2.7) + 2.7) <= 1e-13);

    const LiftedElement r = canonical_lift(ProjMatrix::rotation(M_PI / 4));
    CHECK(std::abs(r.eval(0.0) - 0.25) <= 1e-13);

    // Hyperbolic element fixes the coordinate of its attracting line (t=0).
    const LiftedElement h =
        canonical_lift(ProjMatrix(SL2Matrix(2.0, 0.0, 0.0, 0.5)));
    CHECK(std::abs(h.eval(0.0) - 0.0) <= 1e-13);
}

TEST_CASE("lift evaluation is monotone and equivariant") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const LiftedElement x = canonical_lift(random_elt(rng, 1.2));
        const double s = u(rng), t = u(rng);
        if (s < t) REQUIRE(x.eval(s) < x.eval(t));
        REQUIRE(std::abs(x.eval(s + 1.0) - x.eval(s) - 1.0) <= 1e-12);
    }
}

TEST_CASE("deck transformations add") {
    const LiftedElement a(ProjMatrix::identity(), 1);
    const LiftedElement b(ProjMatrix::identity(), 2);
    const LiftedElement c = lift_compose(a, b);
    CHECK(c.g.dist_to_identity() <= 1e-14);
    CHECK(c.w == 3);
}

TEST_CASE("a third-of-a-turn composed three times winds twice") {
    // Matrix rotation angle 2*pi/3 shifts the circle coordinate by 2/3.
    const LiftedElement r = canonical_lift(ProjMatrix::rotation(2.0 * M_PI / 3.0));
    const LiftedElement r3 = lift_compose(lift_compose(r, r), r);
    CHECK(r3.g.dist_to_identity() <= 1e-12);
    CHECK(r3.w == 2);
}

TEST_CASE("composition cocycle lies in {0,1}") {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 20000; ++i) {
        const int s = lift_cocycle(random_elt(rng, 1.2), random_elt(rng, 1.2));
        REQUIRE((s == 0 || s == 1));
    }
}

TEST_CASE("lift composition projects to the group product") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 500; ++i) {
        const LiftedElement x = canonical_lift(random_elt(rng, 1.0));
        const LiftedElement y = canonical_lift(random_elt(rng, 1.0));
        const LiftedElement xy = lift_compose(x, y);
        const double t = u(rng);
        REQUIRE(std::abs(xy.eval(t) - x.eval(y.eval(t))) <= 1e-11);
        const LiftedElement xi = lift_inverse(x);
        REQUIRE(std::abs(xi.eval(x.eval(t)) - t) <= 1e-10);
    }
}

TEST_CASE("translation numbers") {
    CHECK(translation_number(LiftedElement(ProjMatrix::identity(), 5)) ==
          doctest::Approx(5.0).epsilon(1e-12));
    CHECK(translation_number(canonical_lift(ProjMatrix::rotation(M_PI / 4))) ==
          doctest::Approx(0.25).epsilon(1e-12));

    std::mt19937_64 rng(14);
    for (int i = 0; i < 20; ++i) {
        const LiftedElement x = canonical_lift(random_elt(rng, 1.0));
        REQUIRE(std::abs(translation_number(x) -
                         translation_number_orbit(x, 400000)) <= 1e-5);
    }
}

TEST_CASE("translation number of elliptic powers is additive") {
    const LiftedElement x = canonical_lift(ProjMatrix::rotation(0.37));
    const double tau = translation_number(x);
    LiftedElement p = x;
    for (int n = 2; n <= 20; ++n) {
        p = lift_compose(p, x);
        REQUIRE(std::abs(translation_number(p) - n * tau) <= 1e-6);
    }
}

TEST_CASE("translation number is a quasimorphism with defect one") {
    // The defect bound is sharp: |d| = 1 is attained by elements with fixed
    // points (integer translation numbers), so the check is <= 1.
    std::mt19937_64 rng(15);
    for (int i = 0; i < 10000; ++i) {
        const LiftedElement x = canonical_lift(random_elt(rng, 1.2));
        const LiftedElement y = canonical_lift(random_elt(rng, 1.2));
        const double d = translation_number(lift_compose(x, y)) -
                         translation_number(x) - translation_number(y);
        REQUIRE(std::abs(d) <= 1.0 + 1e-9);
    }
}

TEST_CASE("relator defect") {
    const SurfaceRep trivial(2, std::vector<ProjMatrix>(4));
    CHECK(relator_defect(trivial) == 0.0);

    std::mt19937_64 rng(16);
    std::vector<ProjMatrix> gens;
    for (int i = 0; i < 4; ++i) gens.push_back(random_elt(rng, 1.0));
    CHECK(relator_defect(SurfaceRep(2, gens)) > 1e-6);

    CHECK(relator_defect(fuchsian_octagon()) <= 1e-8);
}

TEST_CASE("euler class of flat and rotation representations is zero") {
    CHECK(euler_class(SurfaceRep(3, std::vector<ProjMatrix>(6))) == 0);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, M_PI);
    std::vector<ProjMatrix> gens;
    for (int i = 0; i < 4; ++i) gens.push_back(ProjMatrix::rotation(u(rng)));
    CHECK(euler_class(SurfaceRep(2, gens)) == 0);
}

TEST_CASE("euler class of the octagon representation is +-2") {
    const SurfaceRep rep = fuchsian_octagon();
    CHECK(std::abs(euler_class(rep)) == 2);
    for (const auto& g : rep.gens)
        CHECK(classify(g).type == ConjClass::Hyperbolic);
}

TEST_CASE("euler class is independent of the lift offsets") {
    const SurfaceRep rep = fuchsian_octagon();
    const std::int64_t e = euler_class(rep);
    std::mt19937_64 rng(18);
    std::uniform_int_distribution<int> k(-3, 3);
    for (int t = 0; t < 100; ++t) {
        std::vector<std::int64_t> offs(rep.gens.size());
        for (auto& o : offs) o = k(rng);
        REQUIRE(euler_class(rep, offs) == e);
    }
}

TEST_CASE("euler class rejects broken representations") {
    std::mt19937_64 rng(19);
    std::vector<ProjMatrix> gens;
    for (int i = 0; i < 4; ++i) gens.push_back(random_elt(rng, 1.0));
    CHECK_THROWS_AS(euler_class(SurfaceRep(2, gens)), DefectTooLarge);
}
