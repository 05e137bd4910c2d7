#pragma once

// Unit quaternions (SU(2)), finite subgroups via quantized closure, the
// binary icosahedral group, perfectness and normal-generation checks, and
// constructive solvers writing targets as products of conjugates of a fixed
// element, as a single commutator, and through the diagonal of SU(2)xSU(2).

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "json.hpp"

#include "flatholo/sl2.hpp"  // FlatholoError

namespace flatholo {

struct NotAMember : FlatholoError {
    using FlatholoError::FlatholoError;
};
struct ClosureOverflow : FlatholoError {
    using FlatholoError::FlatholoError;
};
struct SolveFailed : FlatholoError {
    double best_residual = 0.0;
    SolveFailed(const std::string& msg, double r)
        : FlatholoError(msg), best_residual(r) {}
};

struct UnitQuaternion {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    UnitQuaternion() = default;
    UnitQuaternion(double w_, double x_, double y_, double z_);

    UnitQuaternion operator*(const UnitQuaternion& o) const;
    UnitQuaternion inverse() const { return {w, -x, -y, -z}; }
    UnitQuaternion operator-() const { return {-w, -x, -y, -z}; }

    double dot(const UnitQuaternion& o) const {
        return w * o.w + x * o.x + y * o.y + z * o.z;
    }
    // Euclidean distance in R^4 (SU(2) elements, not projective classes).
    double dist(const UnitQuaternion& o) const;

    // Rotation angle in [0, 2*pi]: q = cos(angle/2) + sin(angle/2) * axis.
    double angle() const;
    std::array<double, 3> axis() const;  // unit vector; z for +-1
    bool is_central(double tol = 1e-9) const;

    static UnitQuaternion identity() { return {}; }
    static UnitQuaternion from_axis_angle(const std::array<double, 3>& axis,
                                          double angle);

    void renormalize();
};

// Finite subgroup of SU(2) with 1e-9-quantized element lookup.
class FiniteSubgroup {
  public:
    static FiniteSubgroup closure(const std::vector<UnitQuaternion>& gens,
                                  std::size_t cap);

    std::size_t size() const { return elements_.size(); }
    const std::vector<UnitQuaternion>& elements() const { return elements_; }
    bool contains(const UnitQuaternion& q) const;

    std::vector<UnitQuaternion> center() const;
    int element_order(const UnitQuaternion& q) const;
    double min_pairwise_distance() const;

    nlohmann::json to_json() const;

  private:
    bool insert(const UnitQuaternion& q);
    std::vector<UnitQuaternion> elements_;
    std::vector<std::pair<std::array<std::int64_t, 4>, int>> index_;
};

// The binary icosahedral group (120 elements) from two icosian generators.
FiniteSubgroup bi_generate();

// Commutator subgroup closure equals the whole group.
bool is_perfect(const FiniteSubgroup& g);

// Closure of the conjugacy class of q and its inverse equals the group.
bool normally_generates(const UnitQuaternion& q, const FiniteSubgroup& g);

struct ConjProductSolution {
    std::vector<UnitQuaternion> conjugators;
    std::vector<int> exponents;  // +1 or -1 per factor
    double residual = 0.0;

    UnitQuaternion evaluate(const UnitQuaternion& g) const;
};

// target = prod_i c_i g^{e_i} c_i^-1 with at most maxlen factors. Seeded by
// an exact chunk decomposition (every angle <= 2*angle(g) is a product of
// two conjugates), then Gauss-Newton polish on the conjugator axes.
ConjProductSolution conj_product_solve(const UnitQuaternion& target,
                                       const UnitQuaternion& g,
                                       int maxlen = 64, double tol = 1e-6);

struct CommutatorPairSU2 {
    UnitQuaternion a, b;
};

// f = [a_m, b_m] * ... * [a_1, b_1] to 1e-8; each chunk solved as a single
// commutator by Gauss-Newton in log coordinates.
std::vector<CommutatorPairSU2> commutator_decomp_su2(const UnitQuaternion& f,
                                                     int m);

struct DiagonalFactor {
    UnitQuaternion c1, c2;  // independent conjugators for the two slots
    int exponent = 1;
};

struct DiagonalTargetResult {
    bool ok = false;
    double residual1 = 0.0, residual2 = 0.0;
    std::vector<DiagonalFactor> factors;
};

// Approximate targets (x, y) in SU(2)xSU(2) by products of conjugates of
// the diagonal element (g, g) with independent conjugator pairs; used with
// y = identity to witness that the normal closure of the diagonal is the
// whole product group.
std::vector<DiagonalTargetResult> diagonal_closure_probe(
    const std::vector<std::pair<UnitQuaternion, UnitQuaternion>>& targets,
    const UnitQuaternion& g, int budget = 200);

}  // namespace flatholo
