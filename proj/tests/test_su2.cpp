#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <set>

#include "flatholo/su2.hpp"

using namespace flatholo;

namespace {

UnitQuaternion random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    return UnitQuaternion(nd(rng), nd(rng), nd(rng), nd(rng));
}

UnitQuaternion comm(const UnitQuaternion& a, const UnitQuaternion& b) {
    return a * b * a.inverse() * b.inverse();
}

}  // namespace

TEST_CASE("quaternion arithmetic") {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 200; ++t) {
        const UnitQuaternion a = random_unit(rng), b = random_unit(rng);
        REQUIRE((a * a.inverse()).dist(UnitQuaternion::identity()) <= 1e-14);
        REQUIRE((a * b).dist((b.inverse() * a.inverse()).inverse()) <= 1e-14);
        const double n = a.w * a.w + a.x * a.x + a.y * a.y + a.z * a.z;
        REQUIRE(std::abs(n - 1.0) <= 1e-12);
    }
    const UnitQuaternion r = UnitQuaternion::from_axis_angle({0, 0, 1}, 0.8);
    CHECK(r.angle() == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(r.axis()[2] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(UnitQuaternion(-1, 0, 0, 0).is_central());
    CHECK(!r.is_central());
}

TEST_CASE("the 120-element group and its structure") {
    const FiniteSubgroup g = bi_generate();
    CHECK(g.size() == 120);
    CHECK(g.contains(UnitQuaternion(-1, 0, 0, 0)));
    CHECK(g.contains(UnitQuaternion(0, 1, 0, 0)));

    const auto z = g.center();
    REQUIRE(z.size() == 2);
    for (const auto& q : z) CHECK(q.is_central(1e-9));

    const std::set<int> allowed = {1, 2, 3, 4, 5, 6, 10};
    for (const auto& q : g.elements())
        REQUIRE(allowed.count(g.element_order(q)) == 1);

    // Quantized-hash soundness: elements are far apart compared to 1e-9.
    CHECK(g.min_pairwise_distance() > 0.6);
}

TEST_CASE("closure overflow guards bad generators") {
    // An irrational rotation generates an infinite group.
    CHECK_THROWS_AS(
        FiniteSubgroup::closure({UnitQuaternion::from_axis_angle({0, 0, 1}, 1.0)},
                                200),
        ClosureOverflow);
}

TEST_CASE("perfectness") {
    CHECK(is_perfect(bi_generate()));
    // Rotation by 4*pi/5: its quaternion has order exactly 5.
    const FiniteSubgroup cyclic = FiniteSubgroup::closure(
        {UnitQuaternion::from_axis_angle({0, 0, 1}, 4.0 * M_PI / 5.0)}, 20);
    CHECK(cyclic.size() == 5);
    CHECK(!is_perfect(cyclic));
    CHECK(is_perfect(FiniteSubgroup::closure({}, 5)));
}

TEST_CASE("normal generation") {
    const FiniteSubgroup g = bi_generate();
    CHECK(normally_generates(UnitQuaternion(0, 1, 0, 0), g));
    CHECK(!normally_generates(UnitQuaternion(-1, 0, 0, 0), g));
    int count = 0;
    for (const auto& q : g.elements())
        if (!q.is_central(1e-9) && normally_generates(q, g)) ++count;
    CHECK(count == 118);
    CHECK_THROWS_AS(
        normally_generates(UnitQuaternion::from_axis_angle({0, 0, 1}, 0.5), g),
        NotAMember);
}

TEST_CASE("conjugate-product solver") {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> nd;
    const std::array<double, 3> ax = {nd(rng), nd(rng), nd(rng)};
    const UnitQuaternion g = UnitQuaternion::from_axis_angle(ax, 2.0 * M_PI / 5.0);

    const ConjProductSolution sg = conj_product_solve(g, g);
    REQUIRE(sg.conjugators.size() == 1);
    CHECK(sg.residual <= 1e-12);
    const ConjProductSolution sg2 = conj_product_solve(g * g, g);
    REQUIRE(sg2.conjugators.size() == 2);
    CHECK(sg2.exponents == std::vector<int>({1, 1}));
    CHECK(sg2.residual <= 1e-12);

    for (int t = 0; t < 20; ++t) {
        const UnitQuaternion target = random_unit(rng);
        const ConjProductSolution s = conj_product_solve(target, g);
        REQUIRE(int(s.conjugators.size()) <= 64);
        REQUIRE(s.evaluate(g).dist(target) <= 1e-6);
    }

    CHECK_THROWS_AS(
        conj_product_solve(random_unit(rng), UnitQuaternion(-1, 0, 0, 0)),
        FlatholoError);
}

TEST_CASE("commutator decomposition") {
    const auto id_pairs = commutator_decomp_su2(UnitQuaternion::identity(), 3);
    REQUIRE(id_pairs.size() == 3);
    for (const auto& p : id_pairs) {
        CHECK(p.a.dist(UnitQuaternion::identity()) <= 1e-12);
        CHECK(p.b.dist(UnitQuaternion::identity()) <= 1e-12);
    }

    const auto m1 = commutator_decomp_su2(UnitQuaternion(-1, 0, 0, 0), 1);
    REQUIRE(m1.size() == 1);
    CHECK(comm(m1[0].a, m1[0].b).dist(UnitQuaternion(-1, 0, 0, 0)) <= 1e-8);

    std::mt19937_64 rng(43);
    for (int m : {1, 2, 3}) {
        for (int t = 0; t < 20; ++t) {
            const UnitQuaternion f = random_unit(rng);
            const auto pairs = commutator_decomp_su2(f, m);
            REQUIRE(int(pairs.size()) == m);
            UnitQuaternion prod = UnitQuaternion::identity();
            for (const auto& p : pairs) prod = prod * comm(p.a, p.b);
            REQUIRE(prod.dist(f) <= 1e-8);
        }
    }

    CHECK_THROWS_AS(commutator_decomp_su2(UnitQuaternion::identity(), 0),
                    FlatholoError);
}

TEST_CASE("diagonal-conjugate probe") {
    const UnitQuaternion g = UnitQuaternion::from_axis_angle({0, 0, 1},
                                                             2.0 * M_PI / 5.0);
    std::mt19937_64 rng(44);
    const std::vector<std::pair<UnitQuaternion, UnitQuaternion>> targets = {
        {g, g},
        {UnitQuaternion::identity(), UnitQuaternion::identity()},
        {UnitQuaternion::from_axis_angle({0, 0, 1}, M_PI / 3.0),
         UnitQuaternion::identity()},
        {random_unit(rng), random_unit(rng)},
    };
    const auto res = diagonal_closure_probe(targets, g);
    REQUIRE(res.size() == targets.size());
    CHECK(res[0].factors.size() == 1);
    CHECK(res[1].factors.empty());
    for (const auto& r : res) {
        REQUIRE(r.ok);
        REQUIRE(r.residual1 <= 1e-4);
        REQUIRE(r.residual2 <= 1e-4);
        REQUIRE(int(r.factors.size()) <= 200);
    }
}
