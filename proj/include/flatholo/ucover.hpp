#pragma once

// The universal cover of PSL(2,R): canonical lifts of the circle action,
// the integer composition cocycle, translation numbers, and the Euler
// class of a surface-group representation from the lifted relator.

#include <cstdint>
#include <vector>

#include "flatholo/sl2.hpp"

namespace flatholo {

struct DefectTooLarge : FlatholoError {
    using FlatholoError::FlatholoError;
};
struct NonIntegral : FlatholoError {
    using FlatholoError::FlatholoError;
};

// Value of the canonical lift of act(g,.) at real x: the unique monotone
// lift F with F(0) in [0,1).
double lift_eval(const ProjMatrix& g, double x);

// Composition cocycle: F_g o F_h = F_{gh} + sigma(g,h), sigma in {0,1}.
int lift_cocycle(const ProjMatrix& g, const ProjMatrix& h);

// Lift F = canonical_lift(g) + w of the universal cover of PSL(2,R).
struct LiftedElement {
    ProjMatrix g;
    std::int64_t w = 0;

    LiftedElement() = default;
    LiftedElement(ProjMatrix g_, std::int64_t w_) : g(g_), w(w_) {}

    double eval(double x) const { return lift_eval(g, x) + double(w); }
};

LiftedElement canonical_lift(const ProjMatrix& g);
LiftedElement lift_compose(const LiftedElement& x, const LiftedElement& y);
LiftedElement lift_inverse(const LiftedElement& x);
LiftedElement lift_commutator(const LiftedElement& x, const LiftedElement& y);

// Translation number of the lift, computed in closed form from classify
// (elliptic angle, or fixed-point winding for parabolic/hyperbolic), with
// the integer branch fixed by a short orbit estimate.
double translation_number(const LiftedElement& x);

// Birkhoff orbit-average cross-check: F^n(0)/n, error at most 2/n.
double translation_number_orbit(const LiftedElement& x, long n = 1000000);

// Genus-g representation: ordered generators (a_1, b_1, ..., a_g, b_g).
struct SurfaceRep {
    int genus = 0;
    std::vector<ProjMatrix> gens;

    SurfaceRep() = default;
    SurfaceRep(int g, std::vector<ProjMatrix> gs);
};

// Max-norm PSL distance of the relator [a_1,b_1]...[a_g,b_g] from I.
double relator_defect(const SurfaceRep& rep);

// Translation number of the lifted relator, snapped to the nearest integer.
// Optional per-generator lift offsets (size 2g) to exercise independence of
// the lift choice. Throws DefectTooLarge / NonIntegral.
std::int64_t euler_class(const SurfaceRep& rep,
                         const std::vector<std::int64_t>& offsets = {},
                         double defect_tol = 1e-8,
                         double snap_tol = 1e-6);

}  // namespace flatholo
