#include "flatholo/su2.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace flatholo {

namespace {
constexpr double kNormDrift = 1e-12;
constexpr double kQuantum = 1e-9;

using Vec3 = std::array<double, 3>;

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0]};
}
double dot3(const Vec3& a, const Vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
double norm3(const Vec3& a) { return std::sqrt(dot3(a, a)); }
Vec3 scale(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }
Vec3 add(const Vec3& a, const Vec3& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

// Some unit vector orthogonal to n.
Vec3 any_perp(const Vec3& n) {
    Vec3 e = std::abs(n[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    Vec3 p = cross(n, e);
    return scale(p, 1.0 / norm3(p));
}

// Rotation (as a quaternion) carrying unit vector u to unit vector v.
UnitQuaternion rotation_between(const Vec3& u, const Vec3& v) {
    const double d = dot3(u, v);
    if (d < -1.0 + 1e-14) {
        const Vec3 p = any_perp(u);
        return UnitQuaternion(0.0, p[0], p[1], p[2]);  // angle pi
    }
    const Vec3 c = cross(u, v);
    return UnitQuaternion(1.0 + d, c[0], c[1], c[2]);  // normalized by ctor
}

UnitQuaternion qexp(const Vec3& v) {
    const double t = norm3(v);
    const double s = t > 1e-300 ? std::sin(t) / t : 1.0;
    return UnitQuaternion(std::cos(t), s * v[0], s * v[1], s * v[2]);
}

}  // namespace

UnitQuaternion::UnitQuaternion(double w_, double x_, double y_, double z_)
    : w(w_), x(x_), y(y_), z(z_) {
    renormalize();
}

void UnitQuaternion::renormalize() {
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    if (!(n > 0.0)) throw FlatholoError("UnitQuaternion: zero norm");
    if (std::abs(n - 1.0) > kNormDrift) {
        w /= n; x /= n; y /= n; z /= n;
    }
}

UnitQuaternion UnitQuaternion::operator*(const UnitQuaternion& o) const {
    return UnitQuaternion(
        w * o.w - x * o.x - y * o.y - z * o.z,
        w * o.x + x * o.w + y * o.z - z * o.y,
        w * o.y - x * o.z + y * o.w + z * o.x,
        w * o.z + x * o.y - y * o.x + z * o.w);
}

double UnitQuaternion::dist(const UnitQuaternion& o) const {
    const double dw = w - o.w, dx = x - o.x, dy = y - o.y, dz = z - o.z;
    return std::sqrt(dw * dw + dx * dx + dy * dy + dz * dz);
}

double UnitQuaternion::angle() const {
    const double v = std::sqrt(x * x + y * y + z * z);
    return 2.0 * std::atan2(v, w);
}

std::array<double, 3> UnitQuaternion::axis() const {
    const double v = std::sqrt(x * x + y * y + z * z);
    if (v < 1e-14) return {0.0, 0.0, 1.0};
    return {x / v, y / v, z / v};
}

bool UnitQuaternion::is_central(double tol) const {
    return std::sqrt(x * x + y * y + z * z) <= tol;
}

UnitQuaternion UnitQuaternion::from_axis_angle(const std::array<double, 3>& a,
                                               double angle) {
    const double n = norm3(a);
    if (!(n > 0.0)) throw FlatholoError("from_axis_angle: zero axis");
    const double s = std::sin(angle / 2.0) / n;
    return UnitQuaternion(std::cos(angle / 2.0), s * a[0], s * a[1], s * a[2]);
}

// ---------------------------------------------------------- finite subgroup ---

namespace {
std::array<std::int64_t, 4> quantize(const UnitQuaternion& q) {
    return {std::llround(q.w / kQuantum), std::llround(q.x / kQuantum),
            std::llround(q.y / kQuantum), std::llround(q.z / kQuantum)};
}
}  // namespace

bool FiniteSubgroup::insert(const UnitQuaternion& q) {
    const auto key = quantize(q);
    auto it = std::lower_bound(
        index_.begin(), index_.end(), key,
        [](const auto& p, const auto& k) { return p.first < k; });
    if (it != index_.end() && it->first == key) return false;
    index_.insert(it, {key, int(elements_.size())});
    elements_.push_back(q);
    return true;
}

bool FiniteSubgroup::contains(const UnitQuaternion& q) const {
    const auto key = quantize(q);
    auto it = std::lower_bound(
        index_.begin(), index_.end(), key,
        [](const auto& p, const auto& k) { return p.first < k; });
    return it != index_.end() && it->first == key;
}

FiniteSubgroup FiniteSubgroup::closure(const std::vector<UnitQuaternion>& gens,
                                       std::size_t cap) {
    FiniteSubgroup g;
    g.insert(UnitQuaternion::identity());
    std::vector<UnitQuaternion> mult = gens;
    for (const auto& q : gens) mult.push_back(q.inverse());
    for (std::size_t head = 0; head < g.elements_.size(); ++head) {
        const UnitQuaternion e = g.elements_[head];
        for (const auto& m : mult) {
            g.insert(e * m);
            if (g.elements_.size() > cap)
                throw ClosureOverflow("closure: exceeded cap of " +
                                      std::to_string(cap) + " elements");
        }
    }
    return g;
}

std::vector<UnitQuaternion> FiniteSubgroup::center() const {
    std::vector<UnitQuaternion> out;
    for (const auto& q : elements_) {
        bool central = true;
        for (const auto& h : elements_) {
            if ((q * h).dist(h * q) > 1e-9) {
                central = false;
                break;
            }
        }
        if (central) out.push_back(q);
    }
    return out;
}

int FiniteSubgroup::element_order(const UnitQuaternion& q) const {
    UnitQuaternion p = q;
    for (int n = 1; n <= int(elements_.size()) + 1; ++n) {
        if (p.dist(UnitQuaternion::identity()) < 1e-9) return n;
        p = p * q;
    }
    throw FlatholoError("element_order: no power reached the identity");
}

double FiniteSubgroup::min_pairwise_distance() const {
    double best = 1e300;
    for (std::size_t i = 0; i < elements_.size(); ++i)
        for (std::size_t j = i + 1; j < elements_.size(); ++j)
            best = std::min(best, elements_[i].dist(elements_[j]));
    return best;
}

nlohmann::json FiniteSubgroup::to_json() const {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& q : elements_) j.push_back({q.w, q.x, q.y, q.z});
    return j;
}

FiniteSubgroup bi_generate() {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    const UnitQuaternion s(0.5, 0.5, 0.5, 0.5);
    const UnitQuaternion t(phi / 2.0, 1.0 / (2.0 * phi), 0.5, 0.0);
    return FiniteSubgroup::closure({s, t}, 200);
}

bool is_perfect(const FiniteSubgroup& g) {
    std::vector<UnitQuaternion> comms;
    std::set<std::array<std::int64_t, 4>> seen;
    for (const auto& a : g.elements())
        for (const auto& b : g.elements()) {
            const UnitQuaternion c = a * b * a.inverse() * b.inverse();
            if (seen.insert(quantize(c)).second) comms.push_back(c);
        }
    const FiniteSubgroup derived = FiniteSubgroup::closure(comms, g.size());
    return derived.size() == g.size();
}

bool normally_generates(const UnitQuaternion& q, const FiniteSubgroup& g) {
    if (!g.contains(q)) throw NotAMember("normally_generates: element not in group");
    std::vector<UnitQuaternion> gens;
    std::set<std::array<std::int64_t, 4>> seen;
    for (const auto& h : g.elements())
        for (const auto& base : {q, q.inverse()}) {
            const UnitQuaternion c = h * base * h.inverse();
            if (seen.insert(quantize(c)).second) gens.push_back(c);
        }
    try {
        return FiniteSubgroup::closure(gens, g.size()).size() == g.size();
    } catch (const ClosureOverflow&) {
        return false;  // cannot happen for a genuine subgroup; be safe
    }
}

// ----------------------------------------------------- conjugate products ---

namespace {

// Axes (u, v) such that rot(u, alpha) * rot(v, alpha) is the rotation by
// gamma about n; requires gamma <= 2 * min(alpha, 2*pi - alpha).
std::pair<Vec3, Vec3> two_factor_axes(double alpha, double gamma, const Vec3& n) {
    const double a = alpha / 2.0;
    const double ca = std::cos(a), sa = std::sin(a);
    double cpsi = (ca * ca - std::cos(gamma / 2.0)) / (sa * sa);
    cpsi = std::clamp(cpsi, -1.0, 1.0);
    const double psi = std::acos(cpsi);
    const double A = std::sin(alpha) * std::cos(psi / 2.0);
    const double B = sa * sa * std::sin(psi);
    const double lam = std::atan2(B, A);
    const Vec3 w0 = any_perp(n);
    const Vec3 m = add(scale(n, std::cos(lam)), scale(cross(n, w0), std::sin(lam)));
    const Vec3 u = add(scale(m, std::cos(psi / 2.0)), scale(w0, std::sin(psi / 2.0)));
    const Vec3 v = add(scale(m, std::cos(psi / 2.0)), scale(w0, -std::sin(psi / 2.0)));
    return {u, v};
}

// Small dense least-squares step: (J^T J + lam I) d = -J^T r.
std::vector<double> lsq_step(const std::vector<std::vector<double>>& J,
                             const std::vector<double>& r, double lam) {
    const std::size_t n = J.empty() ? 0 : J[0].size(), m = J.size();
    std::vector<std::vector<double>> A(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < m; ++k) s += J[k][i] * J[k][j];
            A[i][j] = s + (i == j ? lam : 0.0);
        }
        double s = 0.0;
        for (std::size_t k = 0; k < m; ++k) s += J[k][i] * r[k];
        A[i][n] = -s;
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t i = col + 1; i < n; ++i)
            if (std::abs(A[i][col]) > std::abs(A[piv][col])) piv = i;
        std::swap(A[col], A[piv]);
        for (std::size_t i = col + 1; i < n; ++i) {
            const double f = A[i][col] / A[col][col];
            for (std::size_t j = col; j <= n; ++j) A[i][j] -= f * A[col][j];
        }
    }
    std::vector<double> d(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = A[i][n];
        for (std::size_t j = i + 1; j < n; ++j) s -= A[i][j] * d[j];
        d[i] = s / A[i][i];
    }
    return d;
}

}  // namespace

UnitQuaternion ConjProductSolution::evaluate(const UnitQuaternion& g) const {
    UnitQuaternion p = UnitQuaternion::identity();
    for (std::size_t i = 0; i < conjugators.size(); ++i) {
        const UnitQuaternion base = exponents[i] > 0 ? g : g.inverse();
        p = p * (conjugators[i] * base * conjugators[i].inverse());
    }
    return p;
}

ConjProductSolution conj_product_solve(const UnitQuaternion& target,
                                       const UnitQuaternion& g, int maxlen,
                                       double tol) {
    if (g.is_central(1e-9))
        throw FlatholoError("conj_product_solve: g is central");
    ConjProductSolution sol;
    auto finish = [&]() -> ConjProductSolution& {
        sol.residual = sol.evaluate(g).dist(target);
        return sol;
    };
    if (target.dist(UnitQuaternion::identity()) < 1e-12) return finish();
    if (target.dist(g) < 1e-12) {
        sol.conjugators = {UnitQuaternion::identity()};
        sol.exponents = {1};
        return finish();
    }
    if (target.dist(g * g) < 1e-12) {
        sol.conjugators = {UnitQuaternion::identity(), UnitQuaternion::identity()};
        sol.exponents = {1, 1};
        return finish();
    }
    const double alpha = g.angle();
    const double alpha_eff = std::min(alpha, 2.0 * M_PI - alpha);
    const double beta = target.angle();
    const Vec3 n = target.axis();
    const Vec3 gax = g.axis();
    const int M = std::max(1, int(std::ceil(beta / (2.0 * alpha_eff) - 1e-12)));
    if (2 * M > maxlen)
        throw SolveFailed("conj_product_solve: needs more factors than maxlen",
                          1e300);
    for (int i = 0; i < M; ++i) {
        const auto [u, v] = two_factor_axes(alpha, beta / M, n);
        sol.conjugators.push_back(rotation_between(gax, u));
        sol.conjugators.push_back(rotation_between(gax, v));
        sol.exponents.push_back(1);
        sol.exponents.push_back(1);
    }
    finish();
    if (sol.residual <= tol) return sol;
    // Gauss-Newton polish on the conjugator axes (3 parameters each:
    // left-multiplied rotation update).
    const std::size_t N = sol.conjugators.size();
    std::vector<double> p(3 * N, 0.0);
    auto apply = [&](const std::vector<double>& q) {
        ConjProductSolution s = sol;
        for (std::size_t i = 0; i < N; ++i)
            s.conjugators[i] =
                qexp({q[3 * i], q[3 * i + 1], q[3 * i + 2]}) * sol.conjugators[i];
        return s;
    };
    auto residual4 = [&](const std::vector<double>& q) {
        const UnitQuaternion e = apply(q).evaluate(g);
        return std::vector<double>{e.w - target.w, e.x - target.x,
                                   e.y - target.y, e.z - target.z};
    };
    double best = sol.residual;
    for (int it = 0; it < 50 && best > tol; ++it) {
        const std::vector<double> r = residual4(p);
        std::vector<std::vector<double>> J(4, std::vector<double>(3 * N));
        const double h = 1e-7;
        for (std::size_t j = 0; j < 3 * N; ++j) {
            auto pp = p, pm = p;
            pp[j] += h; pm[j] -= h;
            const auto rp = residual4(pp), rm = residual4(pm);
            for (int k = 0; k < 4; ++k) J[k][j] = (rp[k] - rm[k]) / (2 * h);
        }
        const std::vector<double> d = lsq_step(J, r, 1e-10);
        double t = 1.0;
        for (int half = 0; half < 20; ++half, t *= 0.5) {
            auto pt = p;
            for (std::size_t j = 0; j < 3 * N; ++j) pt[j] += t * d[j];
            const auto rt = residual4(pt);
            double rn = 0.0;
            for (double v2 : rt) rn += v2 * v2;
            rn = std::sqrt(rn);
            if (rn < best) {
                p = pt;
                best = rn;
                break;
            }
        }
    }
    if (best > tol)
        throw SolveFailed("conj_product_solve: residual " + std::to_string(best),
                          best);
    sol = apply(p);
    return finish();
}

// ----------------------------------------------------- commutator solver ---

namespace {

UnitQuaternion qcomm(const UnitQuaternion& a, const UnitQuaternion& b) {
    return a * b * a.inverse() * b.inverse();
}

CommutatorPairSU2 single_commutator(const UnitQuaternion& f, double tol) {
    if (f.dist(UnitQuaternion::identity()) < 1e-14)
        return {UnitQuaternion::identity(), UnitQuaternion::identity()};
    const double beta = f.angle();
    // Seed: commutator of equal-angle rotations about x and y sweeps every
    // angle from 0 (t=0) to 2*pi (t=pi, where [i,j] = -1).
    double best_t = 0.0, best_err = 1e300;
    for (int i = 1; i <= 400; ++i) {
        const double t = M_PI * double(i) / 400.0;
        const UnitQuaternion a = UnitQuaternion::from_axis_angle({1, 0, 0}, t);
        const UnitQuaternion b = UnitQuaternion::from_axis_angle({0, 1, 0}, t);
        const double err = std::abs(qcomm(a, b).angle() - beta);
        if (err < best_err) { best_err = err; best_t = t; }
    }
    UnitQuaternion a0 = UnitQuaternion::from_axis_angle({1, 0, 0}, best_t);
    UnitQuaternion b0 = UnitQuaternion::from_axis_angle({0, 1, 0}, best_t);
    const UnitQuaternion c0 = qcomm(a0, b0);
    if (!c0.is_central(1e-12) && !f.is_central(1e-12)) {
        const UnitQuaternion R = rotation_between(c0.axis(), f.axis());
        a0 = R * a0 * R.inverse();
        b0 = R * b0 * R.inverse();
    }
    // Gauss-Newton in log coordinates of both factors.
    std::vector<double> p(6, 0.0);
    auto make = [&](const std::vector<double>& q) {
        const UnitQuaternion a = qexp({q[0], q[1], q[2]}) * a0;
        const UnitQuaternion b = qexp({q[3], q[4], q[5]}) * b0;
        return CommutatorPairSU2{a, b};
    };
    auto residual4 = [&](const std::vector<double>& q) {
        const auto [a, b] = make(q);
        const UnitQuaternion e = qcomm(a, b);
        return std::vector<double>{e.w - f.w, e.x - f.x, e.y - f.y, e.z - f.z};
    };
    auto rnorm = [](const std::vector<double>& r) {
        double s = 0.0;
        for (double v : r) s += v * v;
        return std::sqrt(s);
    };
    double best = rnorm(residual4(p));
    for (int it = 0; it < 100 && best > tol; ++it) {
        const auto r = residual4(p);
        std::vector<std::vector<double>> J(4, std::vector<double>(6));
        const double h = 1e-7;
        for (int j = 0; j < 6; ++j) {
            auto pp = p, pm = p;
            pp[j] += h; pm[j] -= h;
            const auto rp = residual4(pp), rm = residual4(pm);
            for (int k = 0; k < 4; ++k) J[k][j] = (rp[k] - rm[k]) / (2 * h);
        }
        const auto d = lsq_step(J, r, 1e-10);
        double t = 1.0;
        bool moved = false;
        for (int half = 0; half < 25; ++half, t *= 0.5) {
            auto pt = p;
            for (int j = 0; j < 6; ++j) pt[j] += t * d[j];
            const double rn = rnorm(residual4(pt));
            if (rn < best) { p = pt; best = rn; moved = true; break; }
        }
        if (!moved) break;
    }
    if (best > tol)
        throw SolveFailed("single_commutator: residual " + std::to_string(best),
                          best);
    return make(p);
}

}  // namespace

std::vector<CommutatorPairSU2> commutator_decomp_su2(const UnitQuaternion& f,
                                                     int m) {
    if (m < 1) throw FlatholoError("commutator_decomp_su2: m must be >= 1");
    std::vector<CommutatorPairSU2> out;
    if (f.dist(UnitQuaternion::identity()) < 1e-14) {
        out.assign(m, {UnitQuaternion::identity(), UnitQuaternion::identity()});
        return out;
    }
    const double beta = f.angle();
    const Vec3 n = f.axis();
    for (int i = 0; i < m; ++i) {
        const UnitQuaternion chunk = UnitQuaternion::from_axis_angle(n, beta / m);
        out.push_back(single_commutator(chunk, 1e-10));
    }
    return out;
}

// ------------------------------------------------------- diagonal probe ---

namespace {

// Factors sending one slot to x while the other slot cancels pairwise:
// each chunk is (c_u g c_u^-1)(c_v g^-1 c_v^-1) in the active slot and
// (g)(g^-1) = 1 in the passive slot.
std::vector<DiagonalFactor> diag_slot_factors(const UnitQuaternion& x,
                                              const UnitQuaternion& g,
                                              bool first_slot) {
    std::vector<DiagonalFactor> out;
    if (x.dist(UnitQuaternion::identity()) < 1e-12) return out;
    const double alpha = g.angle();
    const double alpha_eff = std::min(alpha, 2.0 * M_PI - alpha);
    const double beta = x.angle();
    const Vec3 n = x.axis();
    const Vec3 gax = g.axis();
    const int M = std::max(1, int(std::ceil(beta / (2.0 * alpha_eff) - 1e-12)));
    for (int i = 0; i < M; ++i) {
        const auto [u, v] = two_factor_axes(alpha, beta / M, n);
        // exponent +1 factor about u, exponent -1 factor about v: the -1
        // factor contributes rot(alpha) about -(c * gax), so aim at -v.
        const UnitQuaternion cu = rotation_between(gax, u);
        const UnitQuaternion cv = rotation_between(gax, {-v[0], -v[1], -v[2]});
        DiagonalFactor f1, f2;
        f1.exponent = 1;
        f2.exponent = -1;
        if (first_slot) {
            f1.c1 = cu; f1.c2 = UnitQuaternion::identity();
            f2.c1 = cv; f2.c2 = UnitQuaternion::identity();
        } else {
            f1.c2 = cu; f1.c1 = UnitQuaternion::identity();
            f2.c2 = cv; f2.c1 = UnitQuaternion::identity();
        }
        out.push_back(f1);
        out.push_back(f2);
    }
    return out;
}

}  // namespace

std::vector<DiagonalTargetResult> diagonal_closure_probe(
    const std::vector<std::pair<UnitQuaternion, UnitQuaternion>>& targets,
    const UnitQuaternion& g, int budget) {
    if (g.is_central(1e-9))
        throw FlatholoError("diagonal_closure_probe: g is central");
    std::vector<DiagonalTargetResult> results;
    for (const auto& [tx, ty] : targets) {
        DiagonalTargetResult res;
        if (tx.dist(g) < 1e-12 && ty.dist(g) < 1e-12) {
            DiagonalFactor f;  // single diagonal conjugate by the identity
            res.factors = {f};
        } else {
            res.factors = diag_slot_factors(tx, g, true);
            const auto more = diag_slot_factors(ty, g, false);
            res.factors.insert(res.factors.end(), more.begin(), more.end());
        }
        if (int(res.factors.size()) > budget) {
            res.ok = false;
            res.residual1 = res.residual2 = 1e300;
            results.push_back(res);
            continue;
        }
        UnitQuaternion p1 = UnitQuaternion::identity();
        UnitQuaternion p2 = UnitQuaternion::identity();
        for (const auto& f : res.factors) {
            const UnitQuaternion base = f.exponent > 0 ? g : g.inverse();
            p1 = p1 * (f.c1 * base * f.c1.inverse());
            p2 = p2 * (f.c2 * base * f.c2.inverse());
        }
        res.residual1 = p1.dist(tx);
        res.residual2 = p2.dist(ty);
        res.ok = res.residual1 <= 1e-4 && res.residual2 <= 1e-4;
        results.push_back(res);
    }
    return results;
}

}  // namespace flatholo
