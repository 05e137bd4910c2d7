#include "flatholo/ucover.hpp"

#include <cmath>
#include <string>

namespace flatholo {

double lift_eval(const ProjMatrix& g, double x) {
    const double n = std::floor(x);
    const double t = x - n;
    double f0 = act(g, CirclePoint(0.0)).t;
    // Tolerant normalization: an image of 0 a hair below 1 (numerical dirt
    // on a map that actually fixes 0) must not shift the lift up a period.
    if (f0 >= 1.0 - 1e-12) f0 -= 1.0;
    // F(t) is the unique representative of act(g,t) mod 1 in [f0, f0+1).
    return n + f0 + mod1(act(g, CirclePoint(t)).t - f0);
}

int lift_cocycle(const ProjMatrix& g, const ProjMatrix& h) {
    const double fh0 = lift_eval(h, 0.0);
    const double composed = lift_eval(g, fh0);
    const double product0 = lift_eval(compose(g, h), 0.0);
    return int(std::lround(composed - product0));
}

LiftedElement canonical_lift(const ProjMatrix& g) { return LiftedElement(g, 0); }

LiftedElement lift_compose(const LiftedElement& x, const LiftedElement& y) {
    return LiftedElement(compose(x.g, y.g),
                         x.w + y.w + lift_cocycle(x.g, y.g));
}

LiftedElement lift_inverse(const LiftedElement& x) {
    const ProjMatrix gi = x.g.inverse();
    // The true inverse of the canonical lift of g takes 0 to the solution of
    // F_g(s) = 0, which is F_{g^-1}(0) - F_g(F_{g^-1}(0)); the latter term is
    // an exact integer.
    const std::int64_t k = std::llround(lift_eval(x.g, lift_eval(gi, 0.0)));
    return LiftedElement(gi, -k - x.w);
}

LiftedElement lift_commutator(const LiftedElement& x, const LiftedElement& y) {
    return lift_compose(lift_compose(x, y),
                        lift_compose(lift_inverse(x), lift_inverse(y)));
}

namespace {

// Rough orbit estimate of the canonical lift's translation number, accurate
// to 2/n; used only to fix the integer branch of the closed form.
double orbit_estimate(const ProjMatrix& g, int n) {
    double x = 0.0;
    for (int i = 0; i < n; ++i) x = lift_eval(g, x);
    return x / n;
}

double tau0_closed_form(const ProjMatrix& g) {
    const Classification cl = classify(g);
    switch (cl.type) {
        case ConjClass::Identity: {
            // Canonical branch is within the classification tolerance of a
            // deck translation.
            return double(std::lround(lift_eval(g, 0.0)));
        }
        case ConjClass::Elliptic: {
            const double frac = cl.angle / M_PI;  // rotation number mod 1
            const double est = orbit_estimate(g, 64);
            return frac + std::lround(est - frac);
        }
        case ConjClass::Parabolic:
        case ConjClass::Hyperbolic: {
            // Fixed point on RP^1: eigenvector of the SL lift.
            const SL2Matrix& m = g.m;
            const double half = (m.a - m.d) / 2.0;
            const double disc = std::max(half * half + m.b * m.c, 0.0);
            // (m - lambda I) v = 0 with lambda = (tr/2) +- sqrt(disc); take
            // the better-conditioned eigenvector row.
            const double lam = (m.a + m.d) / 2.0 +
                               (m.a + m.d >= 0 ? std::sqrt(disc) : -std::sqrt(disc));
            double vx, vy;
            if (std::abs(m.b) > std::abs(m.c)) {
                vx = m.b; vy = lam - m.a;
            } else {
                vx = lam - m.d; vy = m.c;
            }
            if (vx == 0.0 && vy == 0.0) { vx = 1.0; vy = 0.0; }
            const double tstar = mod1(std::atan2(vy, vx) / M_PI);
            return double(std::lround(lift_eval(g, tstar) - tstar));
        }
    }
    return 0.0;
}

}  // namespace

double translation_number(const LiftedElement& x) {
    return double(x.w) + tau0_closed_form(x.g);
}

double translation_number_orbit(const LiftedElement& x, long n) {
    double t = 0.0;
    for (long i = 0; i < n; ++i) t = lift_eval(x.g, t);
    return double(x.w) + t / double(n);
}

SurfaceRep::SurfaceRep(int g, std::vector<ProjMatrix> gs)
    : genus(g), gens(std::move(gs)) {
    if (genus < 0 || gens.size() != std::size_t(2 * genus))
        throw FlatholoError("SurfaceRep: need 2*genus generators");
}

double relator_defect(const SurfaceRep& rep) {
    ProjMatrix p = ProjMatrix::identity();
    for (int i = 0; i < rep.genus; ++i)
        p = compose(p, commutator(rep.gens[2 * i], rep.gens[2 * i + 1]));
    return p.dist_to_identity();
}

std::int64_t euler_class(const SurfaceRep& rep,
                         const std::vector<std::int64_t>& offsets,
                         double defect_tol, double snap_tol) {
    const double defect = relator_defect(rep);
    if (defect > defect_tol)
        throw DefectTooLarge("euler_class: relator defect " +
                             std::to_string(defect));
    if (!offsets.empty() && offsets.size() != rep.gens.size())
        throw FlatholoError("euler_class: offsets size mismatch");

    LiftedElement p(ProjMatrix::identity(), 0);
    for (int i = 0; i < rep.genus; ++i) {
        const std::int64_t wa = offsets.empty() ? 0 : offsets[2 * i];
        const std::int64_t wb = offsets.empty() ? 0 : offsets[2 * i + 1];
        LiftedElement A(rep.gens[2 * i], wa), B(rep.gens[2 * i + 1], wb);
        p = lift_compose(p, lift_commutator(A, B));
    }
    const double tau = translation_number(p);
    const std::int64_t n = std::llround(tau);
    if (std::abs(tau - double(n)) > snap_tol)
        throw NonIntegral("euler_class: translation number " +
                          std::to_string(tau) + " is not near an integer");
    return n;
}

}  // namespace flatholo
