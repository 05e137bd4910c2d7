#include "flatholo/mwbuild.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

namespace flatholo {

namespace {

const LieVec kE{0.0, 1.0, 0.0};  // diag(1,-1)
const LieVec kF{0.0, 0.0, 1.0};  // [[0,1],[1,0]]

// Signed rotation fraction nearest zero of an elliptic (or identity) class.
double signed_rotation(const ProjMatrix& x) {
    const Classification cl = classify(x);
    if (cl.type == ConjClass::Identity) return 0.0;
    if (cl.type != ConjClass::Elliptic)
        throw NotElliptic("signed_rotation: element is not elliptic");
    const double rho = cl.angle / M_PI;  // rotation number in (0,1)
    return rho <= 0.5 ? rho : rho - 1.0;
}

ProjMatrix boost_commutator(double eps, bool swap) {
    const ProjMatrix a = exp_sl2((swap ? kF : kE) * eps);
    const ProjMatrix b = exp_sl2((swap ? kE : kF) * eps);
    return commutator(a, b);
}

}  // namespace

double commutator_angle(double eps) {
    if (!(eps > 0.0 && eps <= 0.5))
        throw FlatholoError("commutator_angle: eps must be in (0, 0.5]");
    const Classification cl = classify(boost_commutator(eps, false));
    if (cl.type != ConjClass::Elliptic)
        throw NotElliptic("commutator_angle: commutator is not elliptic");
    const double rho = cl.angle / M_PI;
    return std::min(rho, 1.0 - rho);
}

Calibration calibrate(double eps_min, double eps_max, int points) {
    if (!(eps_min > 0.0 && eps_max > eps_min && points >= 3))
        throw CalibrationFailure("calibrate: bad sample range");
    std::vector<double> es(points), th(points);
    const double lr = std::log(eps_max / eps_min);
    for (int i = 0; i < points; ++i) {
        es[i] = eps_min * std::exp(lr * double(i) / (points - 1));
        th[i] = commutator_angle(es[i]);
    }
    // Log-log slope (quadratic-law diagnostic).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < points; ++i) {
        const double X = std::log(es[i]), Y = std::log(th[i]);
        sx += X; sy += Y; sxx += X * X; sxy += X * Y;
    }
    const double n = points;
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    // Fit theta/eps^2 = c0 * (1 - K_fit * eps) by linear regression in eps.
    sx = sy = sxx = sxy = 0;
    for (int i = 0; i < points; ++i) {
        const double X = es[i], Y = th[i] / (es[i] * es[i]);
        sx += X; sy += Y; sxx += X * X; sxy += X * Y;
    }
    const double B = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double A = (sy - B * sx) / n;
    if (!(A > 0.0) || slope < 1.9 || slope > 2.1)
        throw CalibrationFailure("calibrate: quadratic law not confirmed (slope " +
                                 std::to_string(slope) + ")");
    Calibration cal;
    cal.c0 = A;
    // The safety floor keeps the modelled angle below the measured one, so
    // genus_bound stays an upper bound with headroom for the correction pairs.
    cal.K = std::max(-B / A, 0.2);
    cal.slope = slope;
    return cal;
}

std::int64_t genus_bound(std::int64_t chi, double eps, const Calibration& cal) {
    if (chi == 0) return 0;
    if (!(eps > 0.0)) throw FlatholoError("genus_bound: eps must be positive");
    const double denom = cal.c0 * eps * eps * (1.0 - cal.K * eps);
    if (!(denom > 0.0))
        throw FlatholoError("genus_bound: eps outside the calibrated model range");
    return std::int64_t(std::ceil(double(std::abs(chi)) / denom));
}

namespace {

// Solve the 6x6 normal equations (J^T J + lambda I) d = -J^T r by Gaussian
// elimination with partial pivoting.
void solve_normal(const double J[3][6], const double r[3], double lambda,
                  double d[6]) {
    double A[6][7];
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += J[k][i] * J[k][j];
            A[i][j] = s + (i == j ? lambda : 0.0);
        }
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += J[k][i] * r[k];
        A[i][6] = -s;
    }
    for (int col = 0; col < 6; ++col) {
        int piv = col;
        for (int i = col + 1; i < 6; ++i)
            if (std::abs(A[i][col]) > std::abs(A[piv][col])) piv = i;
        for (int j = 0; j < 7; ++j) std::swap(A[col][j], A[piv][j]);
        const double p = A[col][col];
        for (int i = col + 1; i < 6; ++i) {
            const double f = A[i][col] / p;
            for (int j = col; j < 7; ++j) A[i][j] -= f * A[col][j];
        }
    }
    for (int i = 5; i >= 0; --i) {
        double s = A[i][6];
        for (int j = i + 1; j < 6; ++j) s -= A[i][j] * d[j];
        d[i] = s / A[i][i];
    }
}

}  // namespace

CommutatorSolution solve_commutator(const ProjMatrix& target, double bound,
                                    double tol, int max_iter) {
    if (!(bound > 0.0))
        throw FlatholoError("solve_commutator: bound must be positive");
    CommutatorSolution sol;
    const Classification cl = classify(target);
    if (cl.type == ConjClass::Identity) {
        sol.a = ProjMatrix::identity();
        sol.b = ProjMatrix::identity();
        sol.residual = target.dist_to_identity();
        return sol;
    }
    if (cl.type != ConjClass::Elliptic)
        throw NotElliptic("solve_commutator: target is not elliptic");
    const double s = signed_rotation(target);
    const double band_eps = std::min(bound, 0.5);
    const double band = commutator_angle(band_eps);
    if (std::abs(s) > band * (1.0 + 1e-9))
        throw TargetOutOfRange("solve_commutator: target angle " +
                               std::to_string(std::abs(s)) +
                               " exceeds solvable band " + std::to_string(band));

    // Seed at the boost pair whose commutator matches the target angle: find
    // eps0 with commutator_angle(eps0) = |s| by bisection, order by sign.
    double lo = 0.0, hi = band_eps;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= 0.0) break;
        (commutator_angle(mid) < std::abs(s) ? lo : hi) = mid;
    }
    const double eps0 = 0.5 * (lo + hi);
    const bool swap = s > 0.0;  // (F, E) order rotates positively
    double u[6];  // (xi, eta) coefficients: h,e,f then h,e,f
    u[0] = 0.0; u[1] = swap ? 0.0 : eps0; u[2] = swap ? eps0 : 0.0;
    u[3] = 0.0; u[4] = swap ? eps0 : 0.0; u[5] = swap ? 0.0 : eps0;

    const ProjMatrix tinv = target.inverse();
    auto resid = [&](const double v[6], double r[3]) {
        const LieVec xi{v[0], v[1], v[2]}, eta{v[3], v[4], v[5]};
        const ProjMatrix err =
            compose(commutator(exp_sl2(xi), exp_sl2(eta)), tinv);
        const LieVec l = log_sl2(err);
        r[0] = l.h; r[1] = l.e; r[2] = l.f;
    };

    double r[3];
    resid(u, r);
    double rn = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
    sol.residual_history.push_back(rn);
    const double hstep = 1e-7;
    for (int iter = 0; iter < max_iter && rn > tol; ++iter) {
        double J[3][6];
        for (int j = 0; j < 6; ++j) {
            double up[6], um[6], rp[3], rm[3];
            std::copy(u, u + 6, up);
            std::copy(u, u + 6, um);
            up[j] += hstep; um[j] -= hstep;
            resid(up, rp); resid(um, rm);
            for (int k = 0; k < 3; ++k) J[k][j] = (rp[k] - rm[k]) / (2 * hstep);
        }
        double d[6];
        solve_normal(J, r, 1e-8, d);
        // Damped step: halve until the residual actually decreases.
        double t = 1.0;
        bool moved = false;
        for (int half = 0; half < 30; ++half, t *= 0.5) {
            double ut[6], rt[3];
            for (int j = 0; j < 6; ++j) ut[j] = u[j] + t * d[j];
            resid(ut, rt);
            const double rtn =
                std::sqrt(rt[0] * rt[0] + rt[1] * rt[1] + rt[2] * rt[2]);
            if (rtn < rn) {
                std::copy(ut, ut + 6, u);
                std::copy(rt, rt + 3, r);
                rn = rtn;
                moved = true;
                break;
            }
        }
        sol.residual_history.push_back(rn);
        if (!moved) break;
    }
    if (rn > tol)
        throw NoConvergence("solve_commutator: stalled at residual " +
                            std::to_string(rn), sol.residual_history);
    sol.xi = LieVec{u[0], u[1], u[2]};
    sol.eta = LieVec{u[3], u[4], u[5]};
    if (sol.xi.norm() > bound * (1.0 + 1e-6) ||
        sol.eta.norm() > bound * (1.0 + 1e-6))
        throw TargetOutOfRange("solve_commutator: solution escaped the norm ball");
    sol.a = exp_sl2(sol.xi);
    sol.b = exp_sl2(sol.eta);
    sol.residual = rn;
    return sol;
}

namespace {

BuildReport trivial_report(double eps, int method) {
    BuildReport rep;
    rep.rep = SurfaceRep();
    rep.epsilon_requested = eps;
    rep.epsilon_used = eps;
    rep.method = method;
    return rep;
}

void check_eps(double eps) {
    if (!(eps > 0.0 && eps <= 0.2))
        throw EpsTooLarge("builder requires eps in (0, 0.2]");
}

void finalize(BuildReport& rep, std::int64_t chi) {
    rep.defect = relator_defect(rep.rep);
    rep.euler = euler_class(rep.rep);
    if (rep.euler != chi)
        throw FlatholoError("builder: achieved class " + std::to_string(rep.euler) +
                            " != requested " + std::to_string(chi));
    rep.genus = rep.rep.genus;
    double md = 0.0;
    for (const ProjMatrix& g : rep.rep.gens)
        md = std::max(md, dist_to_rotations(g));
    rep.max_dist_to_rotations = md;
}

}  // namespace

BuildReport build_method1(std::int64_t chi, double eps) {
    check_eps(eps);
    if (chi == 0) return trivial_report(eps, 1);
    const bool swap = chi > 0;
    const double theta_max = commutator_angle(eps);
    std::int64_t g =
        std::int64_t(std::ceil(double(std::abs(chi)) / theta_max));
    for (int attempt = 0; attempt < 20; ++attempt, ++g) {
        const double tstar = double(std::abs(chi)) / double(g);
        // theta is increasing, so the target angle is bracketed in (0, eps].
        double lo = 0.0, hi = eps;
        for (int it = 0; it < 120; ++it) {
            const double mid = 0.5 * (lo + hi);
            (commutator_angle(mid) < tstar ? lo : hi) = mid;
        }
        const double epsp = 0.5 * (lo + hi);
        const ProjMatrix a0 = exp_sl2((swap ? kF : kE) * epsp);
        const ProjMatrix b0 = exp_sl2((swap ? kE : kF) * epsp);
        const ProjMatrix c = commutator(a0, b0);
        // Conjugate so the commutator is an exact rotation matrix; the g-fold
        // product then telescopes to R(pi * chi) = identity in PSL.
        const ProjMatrix gamma = elliptic_conjugator(c);
        const ProjMatrix gi = gamma.inverse();
        const ProjMatrix a = compose(compose(gi, a0), gamma);
        const ProjMatrix b = compose(compose(gi, b0), gamma);
        if (dist_to_rotations(a) > eps || dist_to_rotations(b) > eps)
            continue;  // conjugation grew the distance; retry with larger genus
        std::vector<ProjMatrix> gens;
        gens.reserve(2 * g);
        for (std::int64_t i = 0; i < g; ++i) {
            gens.push_back(a);
            gens.push_back(b);
        }
        BuildReport rep;
        rep.rep = SurfaceRep(int(g), std::move(gens));
        rep.epsilon_requested = eps;
        rep.epsilon_used = epsp;
        rep.method = 1;
        rep.theta_per_commutator = tstar;
        finalize(rep, chi);
        return rep;
    }
    throw NoConvergence("build_method1: conjugated generators left the eps-ball",
                        {});
}

BuildReport build_method2(std::int64_t chi, double eps) {
    check_eps(eps);
    if (chi == 0) return trivial_report(eps, 2);
    const bool swap = chi > 0;
    const double theta = commutator_angle(eps);
    const ProjMatrix a0 = exp_sl2((swap ? kF : kE) * eps);
    const ProjMatrix b0 = exp_sl2((swap ? kE : kF) * eps);
    const double tau_c =
        translation_number(lift_commutator(canonical_lift(a0), canonical_lift(b0)));
    const std::int64_t p = std::max<std::int64_t>(
        1, std::llround(double(std::abs(chi)) / theta));
    ProjMatrix cp = ProjMatrix::identity();
    const ProjMatrix c = commutator(a0, b0);
    for (std::int64_t i = 0; i < p; ++i) cp = compose(cp, c);
    // The accumulated class is p*tau_c; the central discrepancy absorbs the
    // gap to chi. tau_c is exact on powers of one elliptic element.
    const double delta = double(p) * tau_c - double(chi);

    std::vector<ProjMatrix> gens;
    for (std::int64_t i = 0; i < p; ++i) {
        gens.push_back(a0);
        gens.push_back(b0);
    }
    std::int64_t k = 0;
    if (std::abs(delta) > 1e-12) {
        const ProjMatrix D = cp.inverse();
        k = std::int64_t(std::ceil(std::abs(delta) / theta - 1e-12));
        const ProjMatrix gD = elliptic_conjugator(D);
        const ProjMatrix root = compose(
            compose(gD, ProjMatrix::rotation(-M_PI * delta / double(k))),
            gD.inverse());
        const CommutatorSolution sol = solve_commutator(root, eps);
        for (std::int64_t i = 0; i < k; ++i) {
            gens.push_back(sol.a);
            gens.push_back(sol.b);
        }
    }
    BuildReport rep;
    rep.rep = SurfaceRep(int(p + k), std::move(gens));
    rep.epsilon_requested = eps;
    rep.epsilon_used = eps;
    rep.method = 2;
    rep.theta_per_commutator = theta;
    finalize(rep, chi);
    return rep;
}

BuildReport build_method3(std::int64_t chi, double eps) {
    check_eps(eps);
    if (chi == 0) return trivial_report(eps, 3);
    const bool swap = chi > 0;
    const double theta = commutator_angle(eps);
    const ProjMatrix a0 = exp_sl2((swap ? kF : kE) * eps);
    const ProjMatrix b0 = exp_sl2((swap ? kE : kF) * eps);
    const ProjMatrix c = commutator(a0, b0);
    const double tau_c =
        translation_number(lift_commutator(canonical_lift(a0), canonical_lift(b0)));
    // Hold g-1 provisional pairs; the leftover class chi - (g-1)*tau_c must
    // lie in the solvable band of the last pair.
    const std::int64_t g =
        std::int64_t(std::ceil(double(std::abs(chi)) / theta));
    ProjMatrix partial = ProjMatrix::identity();
    for (std::int64_t i = 0; i < g - 1; ++i) partial = compose(partial, c);
    const ProjMatrix target = partial.inverse();
    const CommutatorSolution sol = solve_commutator(target, eps);
    std::vector<ProjMatrix> gens;
    for (std::int64_t i = 0; i < g - 1; ++i) {
        gens.push_back(a0);
        gens.push_back(b0);
    }
    gens.push_back(sol.a);
    gens.push_back(sol.b);
    BuildReport rep;
    rep.rep = SurfaceRep(int(g), std::move(gens));
    rep.epsilon_requested = eps;
    rep.epsilon_used = eps;
    rep.method = 3;
    rep.theta_per_commutator = theta;
    finalize(rep, chi);
    return rep;
}

BuildReport build(std::int64_t chi, double eps, int method) {
    switch (method) {
        case 1: return build_method1(chi, eps);
        case 2: return build_method2(chi, eps);
        case 3: return build_method3(chi, eps);
    }
    throw FlatholoError("build: method must be 1, 2, or 3");
}

namespace {

using cplx = std::complex<double>;

cplx mobius(const SL2Matrix& m, cplx z) {
    return (m.a * z + m.b) / (m.c * z + m.d);
}

// Isometry of the upper half-plane carrying p to i and q to the imaginary
// axis above i: horizontal translation, dilation, then rotation about i.
SL2Matrix uhp_standardize(cplx p, cplx q) {
    SL2Matrix m;
    const double s = std::sqrt(p.imag());
    // [[1/s, 0],[0, s]] * [[1, -Re p],[0, 1]]
    m.a = 1.0 / s; m.b = -p.real() / s;
    m.c = 0.0;     m.d = s;
    const cplx q2 = mobius(m, q);
    double t = 0.5 * std::atan2(-2.0 * q2.real(), std::norm(q2) - 1.0);
    const cplx z = mobius(SL2Matrix::rotation(t), q2);
    if (std::abs(z.real()) > 1e-9 || z.imag() < 1.0) t += M_PI / 2.0;
    return SL2Matrix::rotation(t) * m;
}

SL2Matrix iso_two_points(cplx p, cplx q, cplx pp, cplx qp) {
    return uhp_standardize(pp, qp).inverse() * uhp_standardize(p, q);
}

}  // namespace

SurfaceRep fuchsian_octagon() {
    // Regular octagon with vertex angle sum 2*pi: hyperbolic circumradius r
    // with cosh r = cot^2(pi/8); vertices in the disk model, moved to the
    // upper half-plane by w -> i(1+w)/(1-w).
    const double cr = 1.0 / std::pow(std::tan(M_PI / 8.0), 2.0);
    const double rho = std::tanh(std::acosh(cr) / 2.0);
    cplx v[8];
    for (int k = 0; k < 8; ++k) {
        const cplx w = rho * std::polar(1.0, M_PI * double(k) / 4.0);
        v[k] = cplx(0.0, 1.0) * (1.0 + w) / (1.0 - w);
    }
    auto V = [&](int i) { return v[((i % 8) + 8) % 8]; };
    // Side k runs from v_{k-1} to v_k; the pairing word around the boundary
    // is x y x^-1 y^-1 z w z^-1 w^-1 at positions 1..8. Each generator maps
    // its inverse-letter side onto its letter side with reversed orientation.
    const int posL[4] = {1, 2, 5, 6};  // x, y, z, w
    const int posU[4] = {3, 4, 7, 8};
    ProjMatrix gam[4];
    for (int k = 0; k < 4; ++k) {
        const int i = posL[k], j = posU[k];
        gam[k] = ProjMatrix(iso_two_points(V(j - 1), V(j), V(i), V(i - 1)));
    }
    // The pairings satisfy [x, y] * [y w^-1 y^-1, y z y^-1] = 1, which gives
    // the standard genus-2 generators directly.
    const ProjMatrix& gx = gam[0];
    const ProjMatrix& gy = gam[1];
    const ProjMatrix& gz = gam[2];
    const ProjMatrix& gw = gam[3];
    const ProjMatrix a2 = compose(compose(gy, gw.inverse()), gy.inverse());
    const ProjMatrix b2 = compose(compose(gy, gz), gy.inverse());
    return SurfaceRep(2, {gx, gy, a2, b2});
}

std::vector<SweepRow> sweep(const std::vector<std::int64_t>& chi_list,
                            const std::vector<double>& eps_list,
                            const std::vector<int>& methods,
                            const Calibration& cal) {
    std::vector<SweepRow> rows;
    for (std::int64_t chi : chi_list) {
        for (double eps : eps_list) {
            for (int m : methods) {
                SweepRow row;
                row.chi = chi;
                row.eps = eps;
                row.method = m;
                try {
                    const BuildReport rep = build(chi, eps, m);
                    row.genus = rep.genus;
                    row.bound = genus_bound(chi, eps, cal);
                    row.defect = rep.defect;
                    row.euler = rep.euler;
                    row.max_dist = rep.max_dist_to_rotations;
                    row.theta = rep.theta_per_commutator;
                    row.status = "ok";
                } catch (const FlatholoError& e) {
                    row.status = e.what();
                }
                rows.push_back(row);
            }
        }
    }
    std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.chi != b.chi) return a.chi < b.chi;
        if (a.eps != b.eps) return a.eps < b.eps;
        return a.method < b.method;
    });
    return rows;
}

}  // namespace flatholo
