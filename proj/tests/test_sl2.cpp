#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "flatholo/sl2.hpp"

using namespace flatholo;

namespace {

LieVec random_vec(std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return LieVec{u(rng), u(rng), u(rng)};
}

// Series oracle for the matrix exponential: scaling and squaring with a
// 20-term Taylor expansion.
SL2Matrix exp_series(const SL2Matrix& X) {
    int k = 0;
    double n = std::max(std::max(std::abs(X.a), std::abs(X.b)),
                        std::max(std::abs(X.c), std::abs(X.d)));
    while (n > 0.25) {
        n /= 2.0;
        ++k;
    }
    const double s = std::ldexp(1.0, -k);
    SL2Matrix Xs;
    Xs.a = X.a * s; Xs.b = X.b * s; Xs.c = X.c * s; Xs.d = X.d * s;
    SL2Matrix sum = SL2Matrix::identity(), term = SL2Matrix::identity();
    for (int i = 1; i <= 20; ++i) {
        SL2Matrix t2;
        t2.a = (term.a * Xs.a + term.b * Xs.c) / i;
        t2.b = (term.a * Xs.b + term.b * Xs.d) / i;
        t2.c = (term.c * Xs.a + term.d * Xs.c) / i;
        t2.d = (term.c * Xs.b + term.d * Xs.d) / i;
        term = t2;
        sum.a += term.a; sum.b += term.b; sum.c += term.c; sum.d += term.d;
    }
    for (int i = 0; i < k; ++i) {
        SL2Matrix sq;
        sq.a = sum.a * sum.a + sum.b * sum.c;
        sq.b = sum.a * sum.b + sum.b * sum.d;
        sq.c = sum.c * sum.a + sum.d * sum.c;
        sq.d = sum.c * sum.b + sum.d * sum.d;
        sum = sq;
    }
    return sum;
}

}  // namespace

TEST_CASE("composition identities") {
    std::mt19937_64 rng(1);
    const ProjMatrix x = exp_sl2(random_vec(rng, 1.0));
    CHECK(compose(ProjMatrix::identity(), x).dist(x) <= 1e-12);
    CHECK(compose(x, x.inverse()).dist_to_identity() <= 1e-12);
    const ProjMatrix r2 = compose(ProjMatrix::rotation(M_PI / 4),
                                  ProjMatrix::rotation(M_PI / 4));
    CHECK(r2.dist(ProjMatrix::rotation(M_PI / 2)) <= 1e-14);
}

TEST_CASE("group axioms on random triples") {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 10000; ++t) {
        const ProjMatrix x = exp_sl2(random_vec(rng, 1.0));
        const ProjMatrix y = exp_sl2(random_vec(rng, 1.0));
        const ProjMatrix z = exp_sl2(random_vec(rng, 1.0));
        REQUIRE(compose(compose(x, y), z).dist(compose(x, compose(y, z))) <=
                1e-12);
        REQUIRE(compose(x, x.inverse()).dist_to_identity() <= 1e-12);
        REQUIRE(compose(x, ProjMatrix::identity()).dist(x) <= 1e-12);
    }
}

TEST_CASE("sign canonicalization is idempotent and kills the sign") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 100; ++t) {
        const ProjMatrix x = exp_sl2(random_vec(rng, 1.5));
        const SL2Matrix once = ProjMatrix::canonicalize_sl2(x.m);
        const SL2Matrix twice = ProjMatrix::canonicalize_sl2(once);
        CHECK(once.dist(twice) == 0.0);
        CHECK(ProjMatrix(x.m).m.dist(ProjMatrix(-x.m).m) == 0.0);
    }
}

TEST_CASE("closed-form exponential") {
    CHECK(exp_sl2(LieVec{}).dist_to_identity() <= 1e-15);
    const double t = 0.7;
    const ProjMatrix e = exp_sl2(LieVec{0.0, t, 0.0});
    CHECK(std::abs(e.m.a - std::exp(t)) <= 1e-14);
    CHECK(std::abs(e.m.d - std::exp(-t)) <= 1e-14);
    CHECK(std::abs(e.m.b) + std::abs(e.m.c) <= 1e-14);

    std::mt19937_64 rng(4);
    for (int i = 0; i < 200; ++i) {
        const LieVec v = random_vec(rng, 1.0);
        const ProjMatrix x = exp_sl2(v);
        const ProjMatrix oracle{exp_series(v.to_matrix())};
        REQUIRE(x.dist(oracle) <= 1e-12);
        REQUIRE(compose(x, exp_sl2(-v)).dist_to_identity() <= 1e-12);
    }
}

TEST_CASE("logarithm inverts the exponential on small elements") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        const LieVec v = random_vec(rng, 0.4);
        const LieVec w = log_sl2(exp_sl2(v));
        CHECK((w - v).norm() <= 1e-10);
    }
}

TEST_CASE("basis bracket of the two boosts generates the rotation") {
    const LieVec h = bracket(LieVec{0, 1, 0}, LieVec{0, 0, 1});
    CHECK(std::abs(h.h - 1.0) <= 1e-15);
    CHECK(std::abs(h.e) + std::abs(h.f) <= 1e-15);
    // exp(s*H) = R(-2s)
    const double s = 0.3;
    CHECK(exp_sl2(LieVec{s, 0, 0}).dist(ProjMatrix::rotation(-2.0 * s)) <=
          1e-13);
}

TEST_CASE("classification by trace") {
    const Classification e = classify(ProjMatrix::rotation(M_PI / 4));
    CHECK(e.type == ConjClass::Elliptic);
    CHECK(std::abs(e.angle - M_PI / 4) <= 1e-12);

    const Classification hcl =
        classify(ProjMatrix(SL2Matrix(2.0, 0.0, 0.0, 0.5)));
    CHECK(hcl.type == ConjClass::Hyperbolic);
    CHECK(std::abs(hcl.length - 2.0 * std::log(2.0)) <= 1e-12);

    CHECK(classify(ProjMatrix(SL2Matrix(1.0, 1.0, 0.0, 1.0))).type ==
          ConjClass::Parabolic);
    CHECK(classify(ProjMatrix::identity()).type == ConjClass::Identity);
}

TEST_CASE("classification is conjugation-invariant") {
    std::mt19937_64 rng(6);
    for (int i = 0; i < 200; ++i) {
        const ProjMatrix x = exp_sl2(random_vec(rng, 1.0));
        const ProjMatrix g = exp_sl2(random_vec(rng, 1.0));
        const ProjMatrix y = compose(compose(g, x), g.inverse());
        const Classification cx = classify(x), cy = classify(y);
        REQUIRE(cx.type == cy.type);
        REQUIRE(std::abs(cx.angle - cy.angle) <= 1e-10);
        REQUIRE(std::abs(cx.length - cy.length) <= 1e-9);
    }
}

TEST_CASE("circle action") {
    CHECK(act(ProjMatrix::identity(), CirclePoint(0.37)).t ==
          doctest::Approx(0.37).epsilon(1e-14));
    const double alpha = 0.9;
    CHECK(circle_dist(act(ProjMatrix::rotation(alpha), CirclePoint(0.2)).t,
                      mod1(0.2 + alpha / M_PI)) <= 1e-13);
    CHECK(act(ProjMatrix(SL2Matrix(2.0, 0.0, 0.0, 0.5)), CirclePoint(0.0)).t ==
          doctest::Approx(0.0));
}

TEST_CASE("action is a homomorphism") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const ProjMatrix x = exp_sl2(random_vec(rng, 1.0));
        const ProjMatrix y = exp_sl2(random_vec(rng, 1.0));
        const double t = u(rng);
        REQUIRE(circle_dist(act(compose(x, y), CirclePoint(t)).t,
                            act(x, act(y, CirclePoint(t))).t) <= 1e-12);
    }
}

TEST_CASE("commutators") {
    std::mt19937_64 rng(8);
    const ProjMatrix x = exp_sl2(random_vec(rng, 1.0));
    CHECK(commutator(x, ProjMatrix::identity()).dist_to_identity() <= 1e-12);
    CHECK(commutator(ProjMatrix::rotation(0.3), ProjMatrix::rotation(1.1))
              .dist_to_identity() <= 1e-12);

    // Commutator of the two eps-boosts: SL trace 2*cosh(eps)^2 -
    // 2*sinh(eps)^2*cosh(2*eps) = 2 - 4*eps^4 + O(eps^6), elliptic.
    const double eps = 0.1;
    const ProjMatrix c =
        commutator(exp_sl2(LieVec{0, eps, 0}), exp_sl2(LieVec{0, 0, eps}));
    const double want = 2.0 * std::cosh(eps) * std::cosh(eps) -
                        2.0 * std::sinh(eps) * std::sinh(eps) *
                            std::cosh(2.0 * eps);
    CHECK(std::abs(std::abs(c.m.trace()) - std::abs(want)) <= 1e-12);
    CHECK(std::abs(want - (2.0 - 4.0 * std::pow(eps, 4))) <= 1e-5);
    CHECK(classify(c).type == ConjClass::Elliptic);
}

TEST_CASE("distance to the rotation subgroup") {
    CHECK(dist_to_rotations(ProjMatrix::rotation(1.234)) <= 1e-12);
    CHECK(dist_to_rotations(ProjMatrix::identity()) <= 1e-12);

    const ProjMatrix boost = exp_sl2(LieVec{0, 0.1, 0});
    const double d = dist_to_rotations(boost);
    CHECK(d > 0.0);
    CHECK(d <= 0.1);
    // Dense-grid brute-force oracle over (beta, t).
    double oracle = 1e300;
    const int nb = 400, nt = 100000;
    for (int ib = 0; ib < nb; ++ib) {
        const double beta = double(ib) / nb;
        double sup = 0.0;
        for (int it = 0; it < nt; ++it) {
            const double t = double(it) / nt;
            sup = std::max(sup, circle_dist(act(boost, CirclePoint(t)).t,
                                            mod1(t + beta)));
            if (sup > oracle) break;
        }
        oracle = std::min(oracle, sup);
    }
    CHECK(std::abs(d - oracle) <= 1e-4);
    // Grid convergence: doubling the grid barely moves the value.
    CHECK(std::abs(dist_to_rotations(boost, 4096) - d) < 1e-4);
}

TEST_CASE("elliptic conjugator rotates the element exactly") {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 100; ++i) {
        LieVec v = random_vec(rng, 0.8);
        const ProjMatrix x = exp_sl2(v);
        if (classify(x).type != ConjClass::Elliptic) continue;
        const ProjMatrix gamma = elliptic_conjugator(x);
        const ProjMatrix r = compose(compose(gamma.inverse(), x), gamma);
        REQUIRE(r.dist(ProjMatrix::rotation(classify(x).angle)) <= 1e-10);
    }
    CHECK_THROWS_AS(elliptic_conjugator(exp_sl2(LieVec{0, 1.0, 0})),
                    FlatholoError);
}
