#pragma once

// Constructors for flat-bundle representations whose generators are
// epsilon-close to rotations while realizing a prescribed Euler class,
// via three correction schemes, plus the genus-bound bookkeeping, the
// commutator Newton solver, and the hyperbolic-octagon oracle.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flatholo/sl2.hpp"
#include "flatholo/ucover.hpp"

namespace flatholo {

struct EpsTooLarge : FlatholoError {
    using FlatholoError::FlatholoError;
};
struct NotElliptic : FlatholoError {
    using FlatholoError::FlatholoError;
};
struct TargetOutOfRange : FlatholoError {
    using FlatholoError::FlatholoError;
};
struct NoConvergence : FlatholoError {
    std::vector<double> residual_history;
    NoConvergence(const std::string& msg, std::vector<double> hist)
        : FlatholoError(msg), residual_history(std::move(hist)) {}
};

// Rotation fraction (distance of the rotation number from the nearest
// integer) of [exp(eps*E), exp(eps*F)]. Positive and increasing for
// 0 < eps <= 0.5; asymptotically 2*eps^2/pi.
double commutator_angle(double eps);

// Calibrated constants of the quadratic commutator law in this basis:
// commutator_angle(eps) >= c0 * eps^2 * (1 - K * eps) on the calibration
// range. K carries a safety floor so genus bounds stay valid bounds.
struct Calibration {
    double c0 = 0.0;
    double K = 0.0;
    double slope = 0.0;  // fitted log-log slope, diagnostics
};

struct CalibrationFailure : FlatholoError {
    using FlatholoError::FlatholoError;
};

Calibration calibrate(double eps_min = 0.0125, double eps_max = 0.2,
                      int points = 9);

std::int64_t genus_bound(std::int64_t chi, double eps, const Calibration& cal);

struct CommutatorSolution {
    ProjMatrix a, b;
    LieVec xi, eta;  // a = exp(xi), b = exp(eta)
    double residual = 0.0;
    std::vector<double> residual_history;
};

// Solve commutator(exp(xi), exp(eta)) = target with |xi|,|eta| <= bound.
// Damped Newton with Tikhonov least-norm updates, seeded at the scaled
// boost pair. Target must be elliptic (either rotation sense) or identity
// with rotation fraction inside the solvable band.
CommutatorSolution solve_commutator(const ProjMatrix& target, double bound,
                                    double tol = 1e-10, int max_iter = 100);

struct BuildReport {
    SurfaceRep rep;
    double epsilon_requested = 0.0;
    double epsilon_used = 0.0;
    std::int64_t genus = 0;
    double defect = 0.0;
    std::int64_t euler = 0;
    double max_dist_to_rotations = 0.0;
    int method = 0;
    double theta_per_commutator = 0.0;
};

BuildReport build_method1(std::int64_t chi, double eps);
BuildReport build_method2(std::int64_t chi, double eps);
BuildReport build_method3(std::int64_t chi, double eps);
BuildReport build(std::int64_t chi, double eps, int method);

// Genus-2 representation from the side pairings of the regular hyperbolic
// octagon (vertex angle sum 2*pi); the module's independent Euler oracle.
SurfaceRep fuchsian_octagon();

struct SweepRow {
    std::int64_t chi = 0;
    double eps = 0.0;
    int method = 0;
    std::int64_t genus = 0;
    std::int64_t bound = 0;
    double defect = 0.0;
    std::int64_t euler = 0;
    double max_dist = 0.0;
    double theta = 0.0;
    std::string status;  // "ok" or the error message
};

std::vector<SweepRow> sweep(const std::vector<std::int64_t>& chi_list,
                            const std::vector<double>& eps_list,
                            const std::vector<int>& methods,
                            const Calibration& cal);

}  // namespace flatholo
