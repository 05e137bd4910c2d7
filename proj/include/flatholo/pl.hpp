#pragma once

// Piecewise-linear homeomorphisms of the circle and the interval: exact
// group operations on breakpoints, supports, the four-conjugate commutator
// identity with controlled conjugators, fragmentation over a cover,
// net-localized displacing maps, and the compactified line action of a
// lifted circle map.

#include <utility>
#include <vector>

#include "json.hpp"

#include "flatholo/sl2.hpp"
#include "flatholo/ucover.hpp"

namespace flatholo {

struct PreconditionViolation : FlatholoError {
    using FlatholoError::FlatholoError;
};
struct DisplacementTooLarge : FlatholoError {
    using FlatholoError::FlatholoError;
};
struct NetTooDense : FlatholoError {
    using FlatholoError::FlatholoError;
};

// Arc (lo, hi) on the unit-circumference circle, hi in (lo, lo+1].
struct Arc {
    double lo = 0.0, hi = 0.0;
    double length() const { return hi - lo; }
};

// Degree-one PL circle homeomorphism, stored as one period of its canonical
// lift: xs[0] = 0, xs strictly increasing in [0,1), ys strictly increasing
// with ys[0] in [0,1) and ys.back() < ys[0] + 1; F(x+1) = F(x) + 1.
class PLCircleHomeo {
  public:
    PLCircleHomeo();  // identity

    // Breakpoints (x, y) of the circle map with x in [0,1); y values are
    // unwrapped into a monotone lift. Throws FlatholoError if the points do
    // not define a degree-one homeomorphism.
    static PLCircleHomeo from_breaks(std::vector<std::pair<double, double>> pts);
    static PLCircleHomeo identity() { return PLCircleHomeo(); }

    double eval(double x) const;          // canonical lift value
    double circle_eval(double x) const;   // mod-1 value

    const std::vector<double>& xs() const { return xs_; }
    const std::vector<double>& ys() const { return ys_; }

    // (min slope, max slope) over one period.
    std::pair<double, double> slope_range() const;
    // Bilipschitz constant max(max slope, 1/min slope).
    double bilipschitz() const;

    nlohmann::json to_json() const;
    static PLCircleHomeo from_json(const nlohmann::json& j);

  private:
    friend PLCircleHomeo pl_compose(const PLCircleHomeo&, const PLCircleHomeo&);
    friend PLCircleHomeo pl_inverse(const PLCircleHomeo&);
    std::vector<double> xs_, ys_;
};

// PL homeomorphism of [0,1] fixing both endpoints; xs[0] = 0, xs.back() = 1.
class PLIntervalHomeo {
  public:
    PLIntervalHomeo();  // identity

    static PLIntervalHomeo from_breaks(
        std::vector<std::pair<double, double>> pts);
    static PLIntervalHomeo identity() { return PLIntervalHomeo(); }

    double eval(double x) const;

    const std::vector<double>& xs() const { return xs_; }
    const std::vector<double>& ys() const { return ys_; }

    std::pair<double, double> slope_range() const;
    double bilipschitz() const;

    nlohmann::json to_json() const;
    static PLIntervalHomeo from_json(const nlohmann::json& j);

  private:
    friend PLIntervalHomeo pl_compose(const PLIntervalHomeo&,
                                      const PLIntervalHomeo&);
    friend PLIntervalHomeo pl_inverse(const PLIntervalHomeo&);
    std::vector<double> xs_, ys_;
};

PLCircleHomeo pl_compose(const PLCircleHomeo& f, const PLCircleHomeo& g);
PLCircleHomeo pl_inverse(const PLCircleHomeo& f);
PLCircleHomeo pl_commutator(const PLCircleHomeo& f, const PLCircleHomeo& g);

PLIntervalHomeo pl_compose(const PLIntervalHomeo& f, const PLIntervalHomeo& g);
PLIntervalHomeo pl_inverse(const PLIntervalHomeo& f);
PLIntervalHomeo pl_commutator(const PLIntervalHomeo& f,
                              const PLIntervalHomeo& g);

// sup |f(x) - x| (exact for PL: attained at a breakpoint).
double sup_displacement(const PLCircleHomeo& f);
double sup_displacement(const PLIntervalHomeo& f);
// sup |f(x) - g(x)| over the merged breakpoint set.
double sup_dist(const PLCircleHomeo& f, const PLCircleHomeo& g);
double sup_dist(const PLIntervalHomeo& f, const PLIntervalHomeo& g);

// Closure of {x : |f(x) - x| > tol} as a minimal union of arcs.
std::vector<Arc> support(const PLCircleHomeo& f, double tol = 1e-12);
std::vector<std::pair<double, double>> support(const PLIntervalHomeo& f,
                                               double tol = 1e-12);

// The four-factor identity [a, b] = h * (h^-1)^c * h^{cb} * (h^-1)^b with
// c = h^-1 a h and x^y = y x y^-1, valid when supp(a) and supp(b) fit in a
// common arc V with h(V) disjoint from V. Returns the ordered factors.
std::vector<PLCircleHomeo> eq5_word(const PLCircleHomeo& a,
                                    const PLCircleHomeo& b,
                                    const PLCircleHomeo& h);

// Sup-displacements of the four conjugating words after compressing the
// supports of a and b by g (so the identity is applied to gag^-1, gbg^-1):
// g^-1, g^-1 h^-1 g a g^-1 h g, the same word followed by b, and g b g^-1.
std::vector<double> conjugator_norms(const PLCircleHomeo& a,
                                     const PLCircleHomeo& b,
                                     const PLCircleHomeo& h,
                                     const PLCircleHomeo& g);

// Factor f = f_r o ... o f_1 with supp(f_i) inside cover[i], by cutting the
// straight-line isotopy from the identity to f with a PL partition of unity
// subordinate to the cover shrunk by the displacement of f.
std::vector<PLCircleHomeo> fragment(const PLCircleHomeo& f,
                                    const std::vector<Arc>& cover);

// Homeomorphism supported in the 2*delta-balls around the net points that
// moves each delta-ball V_i entirely off itself: h(V_i) disjoint from V_i.
PLCircleHomeo net_displacer(const std::vector<double>& net, double delta);

// Action of a lifted circle map on [0,1] through the end compactification
// kappa(x) = (1 + x/(1+|x|))/2 of the line; endpoints are fixed.
class TildeIntervalAction {
  public:
    explicit TildeIntervalAction(LiftedElement x) : lift_(x) {}

    double eval(double t) const;
    // PL sample on a uniform grid of n+1 nodes.
    PLIntervalHomeo sample(int n = 4096) const;
    const LiftedElement& lift() const { return lift_; }

  private:
    LiftedElement lift_;
};

TildeIntervalAction tilde_interval_action(const LiftedElement& x);

// f rescaled onto the arc, identity elsewhere.
PLCircleHomeo implant(const PLIntervalHomeo& f, const Arc& arc);

}  // namespace flatholo
