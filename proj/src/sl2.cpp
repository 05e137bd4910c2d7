#include "flatholo/sl2.hpp"

#include <algorithm>
#include <cmath>

namespace flatholo {

namespace {
constexpr double kDetDrift = 1e-14;
constexpr double kSignTol = 1e-12;
}  // namespace

SL2Matrix::SL2Matrix(double a_, double b_, double c_, double d_)
    : a(a_), b(b_), c(c_), d(d_) {
    renormalize();
}

void SL2Matrix::renormalize() {
    const double dt = det();
    if (dt <= 0.0)
        throw FlatholoError("SL2Matrix: nonpositive determinant " + std::to_string(dt));
    if (std::abs(dt - 1.0) > kDetDrift) {
        const double s = std::sqrt(dt);
        a /= s; b /= s; c /= s; d /= s;
    }
}

SL2Matrix SL2Matrix::operator*(const SL2Matrix& o) const {
    return SL2Matrix(a * o.a + b * o.c, a * o.b + b * o.d,
                     c * o.a + d * o.c, c * o.b + d * o.d);
}

SL2Matrix SL2Matrix::operator-() const {
    SL2Matrix r;
    r.a = -a; r.b = -b; r.c = -c; r.d = -d;
    return r;
}

double SL2Matrix::dist(const SL2Matrix& o) const {
    return std::max(std::max(std::abs(a - o.a), std::abs(b - o.b)),
                    std::max(std::abs(c - o.c), std::abs(d - o.d)));
}

SL2Matrix SL2Matrix::rotation(double alpha) {
    const double c = std::cos(alpha), s = std::sin(alpha);
    SL2Matrix r;
    r.a = c; r.b = -s; r.c = s; r.d = c;
    return r;
}

SL2Matrix ProjMatrix::canonicalize_sl2(SL2Matrix x) {
    x.renormalize();
    const double entries[4] = {x.a, x.b, x.c, x.d};
    for (double v : entries) {
        if (std::abs(v) > kSignTol)
            return v > 0.0 ? x : -x;
    }
    return x;
}

double ProjMatrix::dist(const ProjMatrix& o) const {
    return std::min(m.dist(o.m), m.dist(-o.m));
}

double ProjMatrix::dist_to_identity() const {
    return dist(ProjMatrix::identity());
}

ProjMatrix compose(const ProjMatrix& x, const ProjMatrix& y) {
    return ProjMatrix(x.m * y.m);
}

ProjMatrix commutator(const ProjMatrix& x, const ProjMatrix& y) {
    return ProjMatrix(x.m * y.m * x.m.inverse() * y.m.inverse());
}

CirclePoint::CirclePoint(double t_) : t(mod1(t_)) {}

double mod1(double x) {
    double r = x - std::floor(x);
    if (r >= 1.0) r -= 1.0;  // floor rounding at the boundary
    return r;
}

double circle_dist(double s, double t) {
    const double d = mod1(s - t);
    return std::min(d, 1.0 - d);
}

SL2Matrix LieVec::to_matrix() const {
    SL2Matrix r;
    r.a = e;          r.b = 2.0 * h + f;
    r.c = -2.0 * h + f; r.d = -e;
    return r;
}

LieVec bracket(const LieVec& x, const LieVec& y) {
    const SL2Matrix X = x.to_matrix(), Y = y.to_matrix();
    // XY - YX, traceless; read coefficients back off the basis.
    const double a = X.a * Y.a + X.b * Y.c - (Y.a * X.a + Y.b * X.c);
    const double b = X.a * Y.b + X.b * Y.d - (Y.a * X.b + Y.b * X.d);
    const double c = X.c * Y.a + X.d * Y.c - (Y.c * X.a + Y.d * X.c);
    return LieVec{(b - c) / 4.0, a, (b + c) / 2.0};
}

ProjMatrix exp_sl2(const LieVec& v) {
    const SL2Matrix X = v.to_matrix();
    const double dt = X.a * X.d - X.b * X.c;  // det of the traceless matrix
    double ch, sh_over_rho;                   // cosh(rho), sinh(rho)/rho with rho^2 = -det
    if (dt > 1e-300) {
        // -det < 0: circular branch
        const double r = std::sqrt(dt);
        ch = std::cos(r);
        sh_over_rho = std::sin(r) / r;
    } else if (dt < -1e-300) {
        const double r = std::sqrt(-dt);
        ch = std::cosh(r);
        sh_over_rho = std::sinh(r) / r;
    } else {
        ch = 1.0;
        sh_over_rho = 1.0;
    }
    SL2Matrix r;
    r.a = ch + sh_over_rho * X.a;
    r.b = sh_over_rho * X.b;
    r.c = sh_over_rho * X.c;
    r.d = ch + sh_over_rho * X.d;
    return ProjMatrix(r);
}

LieVec log_sl2(const ProjMatrix& x) {
    SL2Matrix m = x.m;
    if (m.trace() < 0.0) m = -m;
    const double half_tr = m.trace() / 2.0;
    // X = s * (m - half_tr*I) with s chosen so exp(X) = m.
    double s;
    if (half_tr < 1.0 - 1e-14) {
        const double alpha = std::acos(std::clamp(half_tr, -1.0, 1.0));
        s = alpha / std::sin(alpha);
    } else if (half_tr > 1.0 + 1e-14) {
        const double rho = std::acosh(half_tr);
        s = rho / std::sinh(rho);
    } else {
        s = 1.0;  // parabolic / identity: exp(X) = I + X
    }
    SL2Matrix X;
    X.a = s * (m.a - half_tr); X.b = s * m.b;
    X.c = s * m.c;             X.d = s * (m.d - half_tr);
    return LieVec{(X.b - X.c) / 4.0, X.a, (X.b + X.c) / 2.0};
}

Classification classify(const ProjMatrix& x, double tol) {
    Classification r;
    if (x.dist_to_identity() <= tol) {
        r.type = ConjClass::Identity;
        return r;
    }
    SL2Matrix m = x.m;
    const double tr = std::abs(m.trace());
    if (tr < 2.0 - tol) {
        r.type = ConjClass::Elliptic;
        // Pick the SL lift with (c-b) > 0; then the element is conjugate to
        // R(alpha) with alpha = acos(tr/2) by a det-one conjugacy.
        if (m.c - m.b < 0.0) m = -m;
        r.angle = std::acos(std::clamp(m.trace() / 2.0, -1.0, 1.0));
    } else if (tr > 2.0 + tol) {
        r.type = ConjClass::Hyperbolic;
        const double lambda = tr / 2.0 + std::sqrt(tr * tr / 4.0 - 1.0);
        r.length = 2.0 * std::log(lambda);
    } else {
        r.type = ConjClass::Parabolic;
    }
    return r;
}

CirclePoint act(const ProjMatrix& x, const CirclePoint& p) {
    const double vx = std::cos(M_PI * p.t), vy = std::sin(M_PI * p.t);
    const double wx = x.m.a * vx + x.m.b * vy;
    const double wy = x.m.c * vx + x.m.d * vy;
    return CirclePoint(std::atan2(wy, wx) / M_PI);
}

namespace {

// Golden-section refinement of a local extremum of g bracketed in [lo, hi].
template <typename Fn>
double golden_refine(Fn&& g, double lo, double hi, bool maximize) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = g(x1), f2 = g(x2);
    for (int it = 0; it < 60; ++it) {
        const bool pick_left = maximize ? (f1 > f2) : (f1 < f2);
        if (pick_left) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - gr * (hi - lo); f1 = g(x1);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + gr * (hi - lo); f2 = g(x2);
        }
    }
    return maximize ? std::max(f1, f2) : std::min(f1, f2);
}

}  // namespace

double dist_to_rotations(const ProjMatrix& x, int grid) {
    // Continuous displacement of the canonical lift: delta(t) = F(t) - t,
    // 1-periodic. The best rotation is the Chebyshev center of its range,
    // so the sup-min equals (max delta - min delta)/2, capped at 1/2.
    const double f0 = act(x, CirclePoint(0.0)).t;
    auto delta = [&](double t) {
        const double tt = t - std::floor(t);  // delta is 1-periodic
        const double ft = f0 + mod1(act(x, CirclePoint(tt)).t - f0);
        return ft - tt;
    };
    double dmax = -1e300, dmin = 1e300;
    int imax = 0, imin = 0;
    for (int i = 0; i < grid; ++i) {
        const double v = delta(double(i) / grid);
        if (v > dmax) { dmax = v; imax = i; }
        if (v < dmin) { dmin = v; imin = i; }
    }
    const double h = 1.0 / grid;
    dmax = std::max(dmax, golden_refine(delta, (imax - 1) * h, (imax + 1) * h, true));
    dmin = std::min(dmin, golden_refine(delta, (imin - 1) * h, (imin + 1) * h, false));
    return std::min(0.5 * (dmax - dmin), 0.5);
}

ProjMatrix elliptic_conjugator(const ProjMatrix& x) {
    const Classification cl = classify(x);
    if (cl.type != ConjClass::Elliptic)
        throw FlatholoError("elliptic_conjugator: element is not elliptic");
    SL2Matrix m = x.m;
    if (m.c - m.b < 0.0) m = -m;
    const double alpha = cl.angle, sn = std::sin(alpha);
    // m = cos(alpha) I + sin(alpha) J with J^2 = -I; gamma = [v | Jv]
    // normalized to det one conjugates J0 = [[0,-1],[1,0]] to J, hence
    // gamma^-1 m gamma = R(alpha) exactly.
    const double Jp = (m.a - std::cos(alpha)) / sn;
    const double Jr = m.c / sn;
    SL2Matrix gamma;
    gamma.a = 1.0; gamma.b = Jp;
    gamma.c = 0.0; gamma.d = Jr;
    const double s = std::sqrt(Jr);
    gamma.a /= s; gamma.b /= s; gamma.c /= s; gamma.d /= s;
    return ProjMatrix(gamma);
}

}  // namespace flatholo
