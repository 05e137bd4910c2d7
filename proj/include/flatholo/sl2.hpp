#pragma once

// Arithmetic in SL(2,R) / PSL(2,R), the Lie algebra sl(2,R) in the
// boost/boost/rotation basis, and the projective action on the circle RP^1
// parameterized by t in [0,1) (the line through angle pi*t).

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace flatholo {

struct FlatholoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Determinant-one 2x2 real matrix. Renormalized when det drifts.
struct SL2Matrix {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    SL2Matrix() = default;
    SL2Matrix(double a_, double b_, double c_, double d_);

    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }

    SL2Matrix operator*(const SL2Matrix& o) const;
    SL2Matrix inverse() const { return SL2Matrix(d, -b, -c, a); }
    SL2Matrix operator-() const;

    // Max entrywise distance.
    double dist(const SL2Matrix& o) const;

    static SL2Matrix identity() { return SL2Matrix(); }
    // Rotation matrix R(alpha) = [[cos,-sin],[sin,cos]]; acts on RP^1 by
    // t -> t + alpha/pi.
    static SL2Matrix rotation(double alpha);

    void renormalize();
};

// Element of PSL(2,R): sign-canonicalized so the first entry of (a,b,c,d)
// exceeding 1e-12 in absolute value is positive.
struct ProjMatrix {
    SL2Matrix m;

    ProjMatrix() = default;
    explicit ProjMatrix(const SL2Matrix& x) : m(canonicalize_sl2(x)) {}

    static SL2Matrix canonicalize_sl2(SL2Matrix x);

    ProjMatrix inverse() const { return ProjMatrix(m.inverse()); }

    // Max entrywise distance in PSL: min over the two SL lifts.
    double dist(const ProjMatrix& o) const;
    double dist_to_identity() const;

    static ProjMatrix identity() { return ProjMatrix(SL2Matrix::identity()); }
    static ProjMatrix rotation(double alpha) {
        return ProjMatrix(SL2Matrix::rotation(alpha));
    }
};

ProjMatrix compose(const ProjMatrix& x, const ProjMatrix& y);
ProjMatrix commutator(const ProjMatrix& x, const ProjMatrix& y);

// Point of RP^1 as t in [0,1).
struct CirclePoint {
    double t = 0.0;
    CirclePoint() = default;
    explicit CirclePoint(double t_);
};

double mod1(double x);
// Distance on the unit-circumference circle, in [0, 1/2].
double circle_dist(double s, double t);

// Coefficients in the fixed basis: E = diag(1,-1) and F = [[0,1],[1,0]]
// are boosts, H = [E,F] = [[0,2],[-2,0]] generates rotation
// (exp(sH) = R(-2s)).
struct LieVec {
    double h = 0.0, e = 0.0, f = 0.0;

    LieVec() = default;
    LieVec(double h_, double e_, double f_) : h(h_), e(e_), f(f_) {}

    LieVec operator+(const LieVec& o) const { return {h + o.h, e + o.e, f + o.f}; }
    LieVec operator-(const LieVec& o) const { return {h - o.h, e - o.e, f - o.f}; }
    LieVec operator*(double s) const { return {h * s, e * s, f * s}; }
    LieVec operator-() const { return {-h, -e, -f}; }
    double norm() const { return std::sqrt(h * h + e * e + f * f); }

    // The traceless matrix h*H + e*E + f*F.
    SL2Matrix to_matrix() const;
};

// Matrix bracket [X,Y] = XY - YX pulled back to basis coefficients.
LieVec bracket(const LieVec& x, const LieVec& y);

// Closed-form exponential of the traceless matrix of v.
ProjMatrix exp_sl2(const LieVec& v);

// Small-element logarithm: the unique traceless X with exp(X) giving the
// PSL class of x, chosen with minimal norm. Defined for every non-identity
// class except elliptic of angle exactly pi/2 branch issues are avoided by
// taking the SL lift with nonnegative trace.
LieVec log_sl2(const ProjMatrix& x);

enum class ConjClass { Identity, Elliptic, Parabolic, Hyperbolic };

struct Classification {
    ConjClass type = ConjClass::Identity;
    // Elliptic: rotation angle alpha in (0, pi); the element is conjugate in
    // PSL(2,R) to R(alpha) by an orientation-preserving conjugacy.
    double angle = 0.0;
    // Hyperbolic: translation length 2*ln(lambda) along the axis.
    double length = 0.0;
};

Classification classify(const ProjMatrix& x, double tol = 1e-10);

CirclePoint act(const ProjMatrix& x, const CirclePoint& p);

// min over rotations beta of sup_t circle_dist(act(x,t), t+beta), estimated
// on a grid of `grid` points with golden-section refinement of the
// displacement extrema. Upper bound within ~1e-4 of the true sup-min.
double dist_to_rotations(const ProjMatrix& x, int grid = 2048);

// Conjugator gamma with gamma^-1 * x * gamma an exact rotation matrix
// R(classify(x).angle). Requires x elliptic.
ProjMatrix elliptic_conjugator(const ProjMatrix& x);

}  // namespace flatholo
