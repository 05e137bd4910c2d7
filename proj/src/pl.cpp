#include "flatholo/pl.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace flatholo {

namespace {

constexpr double kDedupe = 1e-13;

// Piecewise-linear evaluation of the lift given one period of breakpoints
// (xs[0] = 0, sentinel segment to (1, ys[0]+1)).
double eval_period(const std::vector<double>& xs, const std::vector<double>& ys,
                   double t) {
    const std::size_t m = xs.size();
    std::size_t i = std::upper_bound(xs.begin(), xs.end(), t) - xs.begin();
    i = (i == 0) ? 0 : i - 1;
    const double x1 = xs[i], y1 = ys[i];
    const double x2 = (i + 1 < m) ? xs[i + 1] : 1.0;
    const double y2 = (i + 1 < m) ? ys[i + 1] : ys[0] + 1.0;
    return y1 + (t - x1) * (y2 - y1) / (x2 - x1);
}

void check_strict(const std::vector<double>& v, const char* what) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1]))
            throw FlatholoError(std::string(what) + ": values not strictly increasing");
}

}  // namespace

// ---------------------------------------------------------------- circle ---

PLCircleHomeo::PLCircleHomeo() : xs_{0.0}, ys_{0.0} {}

PLCircleHomeo PLCircleHomeo::from_breaks(
    std::vector<std::pair<double, double>> pts) {
    if (pts.empty()) return identity();
    for (auto& p : pts) p.first = mod1(p.first);
    std::sort(pts.begin(), pts.end());
    // Drop near-duplicate abscissae.
    std::vector<std::pair<double, double>> q;
    for (const auto& p : pts)
        if (q.empty() || p.first - q.back().first > kDedupe) q.push_back(p);
    if (!q.empty() && q.size() > 1 && 1.0 - q.back().first + q.front().first <= kDedupe)
        q.pop_back();
    // Unwrap the y values into a monotone lift.
    std::vector<double> xs(q.size()), ys(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        xs[i] = q[i].first;
        double y = q[i].second;
        if (i > 0)
            y += std::ceil(ys[i - 1] - y + 1e-15);  // smallest shift above prev
        ys[i] = y;
    }
    if (ys.size() > 1 && !(ys.back() - ys.front() < 1.0))
        throw FlatholoError("PLCircleHomeo: breakpoints wind more than once");
    // Ensure a breakpoint at x = 0.
    if (xs.front() > 0.0) {
        const double xp = xs.back() - 1.0, yp = ys.back() - 1.0;
        const double y0 = yp + (0.0 - xp) * (ys.front() - yp) / (xs.front() - xp);
        xs.insert(xs.begin(), 0.0);
        ys.insert(ys.begin(), y0);
    }
    // Tolerant floor: an interpolated y0 a hair below an integer must not
    // push the whole lift up by one period.
    const double shift = std::floor(ys.front() + 1e-12);
    for (double& y : ys) y -= shift;
    check_strict(xs, "PLCircleHomeo xs");
    check_strict(ys, "PLCircleHomeo ys");
    PLCircleHomeo f;
    f.xs_ = std::move(xs);
    f.ys_ = std::move(ys);
    return f;
}

double PLCircleHomeo::eval(double x) const {
    const double n = std::floor(x);
    return n + eval_period(xs_, ys_, x - n);
}

double PLCircleHomeo::circle_eval(double x) const { return mod1(eval(x)); }

std::pair<double, double> PLCircleHomeo::slope_range() const {
    double mn = 1e300, mx = -1e300;
    const std::size_t m = xs_.size();
    for (std::size_t i = 0; i < m; ++i) {
        const double x2 = (i + 1 < m) ? xs_[i + 1] : 1.0;
        const double y2 = (i + 1 < m) ? ys_[i + 1] : ys_[0] + 1.0;
        const double s = (y2 - ys_[i]) / (x2 - xs_[i]);
        mn = std::min(mn, s);
        mx = std::max(mx, s);
    }
    return {mn, mx};
}

double PLCircleHomeo::bilipschitz() const {
    const auto [mn, mx] = slope_range();
    return std::max(mx, 1.0 / mn);
}

nlohmann::json PLCircleHomeo::to_json() const {
    nlohmann::json j = nlohmann::json::array();
    for (std::size_t i = 0; i < xs_.size(); ++i)
        j.push_back({xs_[i], mod1(ys_[i])});
    return j;
}

PLCircleHomeo PLCircleHomeo::from_json(const nlohmann::json& j) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& e : j) pts.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
    return from_breaks(std::move(pts));
}

PLCircleHomeo pl_inverse(const PLCircleHomeo& f) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < f.xs_.size(); ++i) {
        const double k = std::floor(f.ys_[i]);
        pts.emplace_back(f.ys_[i] - k, f.xs_[i] - k);
    }
    // The y values here may be negative; from_breaks unwraps, so pass mod 1.
    for (auto& p : pts) p.second = mod1(p.second);
    return PLCircleHomeo::from_breaks(std::move(pts));
}

PLCircleHomeo pl_compose(const PLCircleHomeo& f, const PLCircleHomeo& g) {
    const PLCircleHomeo gi = pl_inverse(g);
    std::vector<double> xs = g.xs_;
    for (double xf : f.xs_) xs.push_back(mod1(gi.eval(xf)));
    std::sort(xs.begin(), xs.end());
    std::vector<double> u;
    for (double x : xs)
        if (u.empty() || x - u.back() > kDedupe) u.push_back(x);
    if (u.size() > 1 && 1.0 - u.back() + u.front() <= kDedupe) u.pop_back();
    std::vector<std::pair<double, double>> pts;
    for (double x : u) pts.emplace_back(x, mod1(f.eval(g.eval(x))));
    return PLCircleHomeo::from_breaks(std::move(pts));
}

PLCircleHomeo pl_commutator(const PLCircleHomeo& f, const PLCircleHomeo& g) {
    return pl_compose(pl_compose(f, g),
                      pl_compose(pl_inverse(f), pl_inverse(g)));
}

namespace {

// Deck shift bringing the canonical lift closest to the identity: the
// canonical normalization F(0) in [0,1) can sit one period above the
// small-displacement lift when f(0) is slightly below 0.
std::int64_t best_deck_shift(const std::vector<double>& diffs) {
    double lo = 1e300, hi = -1e300;
    for (double d : diffs) {
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    return std::llround(0.5 * (lo + hi));
}

}  // namespace

double sup_displacement(const PLCircleHomeo& f) {
    std::vector<double> diffs;
    for (std::size_t i = 0; i < f.xs().size(); ++i)
        diffs.push_back(f.ys()[i] - f.xs()[i]);
    const double k = double(best_deck_shift(diffs));
    double d = 0.0;
    for (double v : diffs) d = std::max(d, std::abs(v - k));
    return d;
}

double sup_dist(const PLCircleHomeo& f, const PLCircleHomeo& g) {
    std::vector<double> diffs;
    for (double x : f.xs()) diffs.push_back(f.eval(x) - g.eval(x));
    for (double x : g.xs()) diffs.push_back(f.eval(x) - g.eval(x));
    const double k = double(best_deck_shift(diffs));
    double d = 0.0;
    for (double v : diffs) d = std::max(d, std::abs(v - k));
    return d;
}

// --------------------------------------------------------------- interval ---

PLIntervalHomeo::PLIntervalHomeo() : xs_{0.0, 1.0}, ys_{0.0, 1.0} {}

PLIntervalHomeo PLIntervalHomeo::from_breaks(
    std::vector<std::pair<double, double>> pts) {
    pts.emplace_back(0.0, 0.0);
    pts.emplace_back(1.0, 1.0);
    std::sort(pts.begin(), pts.end());
    std::vector<double> xs, ys;
    for (const auto& p : pts) {
        if (!xs.empty() && p.first - xs.back() <= kDedupe) {
            if (std::abs(p.second - ys.back()) > 1e-12)
                throw FlatholoError("PLIntervalHomeo: conflicting breakpoints");
            continue;
        }
        if (p.first < -1e-15 || p.first > 1.0 + 1e-15)
            throw FlatholoError("PLIntervalHomeo: breakpoint outside [0,1]");
        xs.push_back(p.first);
        ys.push_back(p.second);
    }
    if (std::abs(ys.front()) > 1e-12 || std::abs(ys.back() - 1.0) > 1e-12)
        throw FlatholoError("PLIntervalHomeo: endpoints must be fixed");
    xs.front() = 0.0; ys.front() = 0.0;
    xs.back() = 1.0; ys.back() = 1.0;
    check_strict(xs, "PLIntervalHomeo xs");
    check_strict(ys, "PLIntervalHomeo ys");
    PLIntervalHomeo f;
    f.xs_ = std::move(xs);
    f.ys_ = std::move(ys);
    return f;
}

double PLIntervalHomeo::eval(double x) const {
    if (x <= 0.0) return x;  // extend by identity outside [0,1]
    if (x >= 1.0) return x;
    std::size_t i = std::upper_bound(xs_.begin(), xs_.end(), x) - xs_.begin() - 1;
    return ys_[i] + (x - xs_[i]) * (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
}

std::pair<double, double> PLIntervalHomeo::slope_range() const {
    double mn = 1e300, mx = -1e300;
    for (std::size_t i = 0; i + 1 < xs_.size(); ++i) {
        const double s = (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
        mn = std::min(mn, s);
        mx = std::max(mx, s);
    }
    return {mn, mx};
}

double PLIntervalHomeo::bilipschitz() const {
    const auto [mn, mx] = slope_range();
    return std::max(mx, 1.0 / mn);
}

nlohmann::json PLIntervalHomeo::to_json() const {
    nlohmann::json j = nlohmann::json::array();
    for (std::size_t i = 0; i < xs_.size(); ++i) j.push_back({xs_[i], ys_[i]});
    return j;
}

PLIntervalHomeo PLIntervalHomeo::from_json(const nlohmann::json& j) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& e : j) pts.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
    return from_breaks(std::move(pts));
}

PLIntervalHomeo pl_inverse(const PLIntervalHomeo& f) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < f.xs_.size(); ++i)
        pts.emplace_back(f.ys_[i], f.xs_[i]);
    return PLIntervalHomeo::from_breaks(std::move(pts));
}

PLIntervalHomeo pl_compose(const PLIntervalHomeo& f, const PLIntervalHomeo& g) {
    const PLIntervalHomeo gi = pl_inverse(g);
    std::vector<double> xs = g.xs_;
    for (double xf : f.xs_) xs.push_back(gi.eval(xf));
    std::sort(xs.begin(), xs.end());
    std::vector<std::pair<double, double>> pts;
    for (double x : xs) {
        if (!pts.empty() && x - pts.back().first <= kDedupe) continue;
        pts.emplace_back(x, f.eval(g.eval(x)));
    }
    return PLIntervalHomeo::from_breaks(std::move(pts));
}

PLIntervalHomeo pl_commutator(const PLIntervalHomeo& f,
                              const PLIntervalHomeo& g) {
    return pl_compose(pl_compose(f, g),
                      pl_compose(pl_inverse(f), pl_inverse(g)));
}

double sup_displacement(const PLIntervalHomeo& f) {
    double d = 0.0;
    for (std::size_t i = 0; i < f.xs().size(); ++i)
        d = std::max(d, std::abs(f.ys()[i] - f.xs()[i]));
    return d;
}

double sup_dist(const PLIntervalHomeo& f, const PLIntervalHomeo& g) {
    double d = 0.0;
    for (double x : f.xs()) d = std::max(d, std::abs(f.eval(x) - g.eval(x)));
    for (double x : g.xs()) d = std::max(d, std::abs(f.eval(x) - g.eval(x)));
    return d;
}

// ---------------------------------------------------------------- support ---

namespace {

// Subintervals of [x1, x2] where the linear function through (x1, d1),
// (x2, d2) exceeds tol in absolute value; appended to out.
void segment_excess(double x1, double d1, double x2, double d2, double tol,
                    std::vector<std::pair<double, double>>& out) {
    for (double s : {1.0, -1.0}) {
        const double g1 = s * d1 - tol, g2 = s * d2 - tol;
        if (g1 <= 0.0 && g2 <= 0.0) continue;
        double lo = x1, hi = x2;
        if (g1 < 0.0) lo = x1 + (x2 - x1) * (-g1) / (g2 - g1);
        if (g2 < 0.0) hi = x1 + (x2 - x1) * g1 / (g1 - g2);
        if (hi > lo) out.emplace_back(lo, hi);
    }
}

std::vector<std::pair<double, double>> merge_intervals(
    std::vector<std::pair<double, double>> iv) {
    std::sort(iv.begin(), iv.end());
    std::vector<std::pair<double, double>> out;
    for (const auto& p : iv) {
        if (!out.empty() && p.first <= out.back().second + 1e-14)
            out.back().second = std::max(out.back().second, p.second);
        else
            out.push_back(p);
    }
    return out;
}

}  // namespace

std::vector<Arc> support(const PLCircleHomeo& f, double tol) {
    const auto& xs = f.xs();
    const auto& ys = f.ys();
    const std::size_t m = xs.size();
    std::vector<double> diffs;
    for (std::size_t i = 0; i < m; ++i) diffs.push_back(ys[i] - xs[i]);
    const double k = double(best_deck_shift(diffs));
    std::vector<std::pair<double, double>> iv;
    for (std::size_t i = 0; i < m; ++i) {
        const double x2 = (i + 1 < m) ? xs[i + 1] : 1.0;
        const double y2 = (i + 1 < m) ? ys[i + 1] : ys[0] + 1.0;
        segment_excess(xs[i], ys[i] - xs[i] - k, x2, y2 - x2 - k, tol, iv);
    }
    iv = merge_intervals(iv);
    // Join across the wrap point.
    if (iv.size() > 1 && iv.front().first <= 1e-14 &&
        iv.back().second >= 1.0 - 1e-14) {
        iv.back().second = iv.front().second + 1.0;
        iv.erase(iv.begin());
    }
    std::vector<Arc> out;
    for (const auto& p : iv) out.push_back(Arc{p.first, p.second});
    return out;
}

std::vector<std::pair<double, double>> support(const PLIntervalHomeo& f,
                                               double tol) {
    const auto& xs = f.xs();
    const auto& ys = f.ys();
    std::vector<std::pair<double, double>> iv;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        segment_excess(xs[i], ys[i] - xs[i], xs[i + 1], ys[i + 1] - xs[i + 1],
                       tol, iv);
    return merge_intervals(iv);
}

// --------------------------------------------------- conjugate identities ---

namespace {

bool point_in_arc(double t, const Arc& a) {
    const double d = mod1(t - a.lo);
    return d <= a.length() + 1e-14;
}

bool arcs_intersect(const Arc& a, const Arc& b) {
    return point_in_arc(b.lo, a) || point_in_arc(a.lo, b);
}

// Smallest arc containing every arc of the list (complement of the largest
// gap). Throws if the arcs leave no gap.
Arc arc_hull(const std::vector<Arc>& arcs) {
    std::vector<std::pair<double, double>> iv;
    for (const Arc& a : arcs) {
        const double lo = mod1(a.lo);
        iv.emplace_back(lo, lo + a.length());
        if (lo + a.length() > 1.0) {
            iv.back().second = 1.0;
            iv.emplace_back(0.0, mod1(a.hi));
        }
    }
    iv = merge_intervals(iv);
    // Join a piece ending at 1 with a piece starting at 0 before gap search.
    if (iv.size() > 1 && iv.front().first <= 1e-14 &&
        iv.back().second >= 1.0 - 1e-14) {
        iv.back().second = iv.front().second + 1.0;
        iv.erase(iv.begin());
    }
    double best_gap = -1.0, hull_lo = 0.0;
    for (std::size_t i = 0; i < iv.size(); ++i) {
        const auto& cur = iv[i];
        const auto& nxt = iv[(i + 1) % iv.size()];
        const double gap = (i + 1 < iv.size()) ? nxt.first - cur.second
                                               : nxt.first + 1.0 - cur.second;
        if (gap > best_gap) {
            best_gap = gap;
            hull_lo = nxt.first;  // hull starts where the largest gap ends
        }
    }
    if (best_gap <= 1e-12)
        throw PreconditionViolation("arc_hull: supports cover the whole circle");
    // Hull runs from the end of the gap around to its start.
    Arc h{mod1(hull_lo), 0.0};
    h.hi = h.lo + (1.0 - best_gap);
    return h;
}

Arc image_arc(const PLCircleHomeo& h, const Arc& a) {
    const double lo = h.eval(a.lo);
    Arc r{mod1(lo), 0.0};
    r.hi = r.lo + (h.eval(a.lo + a.length()) - lo);
    return r;
}

}  // namespace

std::vector<PLCircleHomeo> eq5_word(const PLCircleHomeo& a,
                                    const PLCircleHomeo& b,
                                    const PLCircleHomeo& h) {
    std::vector<Arc> supps = support(a);
    const std::vector<Arc> sb = support(b);
    supps.insert(supps.end(), sb.begin(), sb.end());
    const PLCircleHomeo hinv = pl_inverse(h);
    if (!supps.empty()) {
        const Arc V = arc_hull(supps);
        if (arcs_intersect(V, image_arc(h, V)))
            throw PreconditionViolation("eq5_word: h(V) meets V");
    }
    const PLCircleHomeo c = pl_compose(pl_compose(hinv, a), h);
    for (const Arc& sc : support(c))
        for (const Arc& s : sb)
            if (arcs_intersect(sc, s))
                throw PreconditionViolation(
                    "eq5_word: supports of h^-1 a h and b are not disjoint");
    const PLCircleHomeo cinv = pl_inverse(c);
    const PLCircleHomeo cb = pl_compose(c, b);
    const PLCircleHomeo binv = pl_inverse(b);
    std::vector<PLCircleHomeo> out;
    out.push_back(h);
    out.push_back(pl_compose(pl_compose(c, hinv), cinv));
    out.push_back(pl_compose(pl_compose(cb, h), pl_inverse(cb)));
    out.push_back(pl_compose(pl_compose(b, hinv), binv));
    return out;
}

std::vector<double> conjugator_norms(const PLCircleHomeo& a,
                                     const PLCircleHomeo& b,
                                     const PLCircleHomeo& h,
                                     const PLCircleHomeo& g) {
    const PLCircleHomeo ginv = pl_inverse(g);
    const PLCircleHomeo ab = pl_compose(pl_compose(g, a), ginv);
    const PLCircleHomeo bb = pl_compose(pl_compose(g, b), ginv);
    (void)eq5_word(ab, bb, h);  // validates the support hypotheses
    const PLCircleHomeo hinv = pl_inverse(h);
    // g^-1 h^-1 g a g^-1 h g, left to right.
    PLCircleHomeo w2 = ginv;
    w2 = pl_compose(w2, hinv);
    w2 = pl_compose(w2, g);
    w2 = pl_compose(w2, a);
    w2 = pl_compose(w2, ginv);
    w2 = pl_compose(w2, h);
    w2 = pl_compose(w2, g);
    const PLCircleHomeo w3 = pl_compose(w2, b);
    const PLCircleHomeo w4 = pl_compose(pl_compose(g, b), ginv);
    return {sup_displacement(ginv), sup_displacement(w2), sup_displacement(w3),
            sup_displacement(w4)};
}

// ----------------------------------------------------------- fragmentation ---

std::vector<PLCircleHomeo> fragment(const PLCircleHomeo& f,
                                    const std::vector<Arc>& cover) {
    const std::size_t r = cover.size();
    if (r == 0) throw PreconditionViolation("fragment: empty cover");
    std::vector<PLCircleHomeo> out(r);

    // A single arc of full length holds all of f.
    for (std::size_t i = 0; i < r; ++i) {
        if (cover[i].length() >= 1.0) {
            out[i] = f;
            return out;
        }
    }

    const double d = sup_displacement(f);
    const double margin = d + 1e-9;
    // Displacement field of the small-displacement lift of f.
    std::vector<double> fdiffs;
    for (std::size_t i = 0; i < f.xs().size(); ++i)
        fdiffs.push_back(f.ys()[i] - f.xs()[i]);
    const double dk = double(best_deck_shift(fdiffs));

    // Shrink each arc by the displacement so supports stay inside after the
    // isotopy; keep the arcs that survive, in circle order.
    struct Shrunk {
        double lo, hi;  // lifted, hi > lo
        std::size_t idx;
    };
    std::vector<Shrunk> arcs;
    for (std::size_t i = 0; i < r; ++i) {
        const double lo = mod1(cover[i].lo) + margin;
        const double hi = mod1(cover[i].lo) + cover[i].length() - margin;
        if (hi - lo > 1e-9) arcs.push_back({lo, hi, i});
    }
    std::sort(arcs.begin(), arcs.end(),
              [](const Shrunk& a, const Shrunk& b) { return a.lo < b.lo; });
    // Remove arcs contained in a neighbor (they get the identity factor).
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t j = 0; j + 1 < arcs.size() && !changed; ++j) {
            if (arcs[j + 1].hi <= arcs[j].hi) {
                arcs.erase(arcs.begin() + j + 1);
                changed = true;
            } else if (arcs[j].lo == arcs[j + 1].lo) {
                arcs.erase(arcs.begin() + j);
                changed = true;
            }
        }
        if (!changed && arcs.size() > 1) {
            // wrap containment: first inside last - 1 period
            if (arcs.back().hi - 1.0 >= arcs.front().hi) {
                arcs.erase(arcs.begin());
                changed = true;
            }
        }
    }
    const std::size_t k = arcs.size();
    if (k == 0)
        throw DisplacementTooLarge("fragment: displacement swallows the cover");
    if (k == 1) {
        // A single proper arc cannot cover the circle.
        throw DisplacementTooLarge("fragment: shrunk cover misses part of the circle");
    }

    // Crossover windows between consecutive arcs (window j hands ownership
    // from sorted arc j to arc j+1); window k-1 wraps past 1.
    std::vector<double> wlo(k), whi(k);
    std::vector<double> tmid(k);
    for (std::size_t j = 0; j < k; ++j) {
        const double next_lo = (j + 1 < k) ? arcs[j + 1].lo : arcs[0].lo + 1.0;
        const double ov_lo = next_lo, ov_hi = arcs[j].hi;
        if (!(ov_hi - ov_lo > 1e-9))
            throw DisplacementTooLarge("fragment: shrunk arcs no longer overlap");
        tmid[j] = 0.5 * (ov_lo + ov_hi);
    }
    for (std::size_t j = 0; j < k; ++j) {
        const double next_lo = (j + 1 < k) ? arcs[j + 1].lo : arcs[0].lo + 1.0;
        double half = 0.5 * (arcs[j].hi - next_lo);
        const double tprev = (j > 0) ? tmid[j - 1] : tmid[k - 1] - 1.0;
        const double tnext = (j + 1 < k) ? tmid[j + 1] : tmid[0] + 1.0;
        half = std::min(half, 0.49 * (tmid[j] - tprev));
        half = std::min(half, 0.49 * (tnext - tmid[j]));
        wlo[j] = tmid[j] - half;
        whi[j] = tmid[j] + half;
    }

    // Ramp of window j, evaluated in the fundamental domain ending at the
    // wrap window's end: [whi[k-1]-1, whi[k-1]).
    auto ramp = [&](std::size_t j, double x) {
        const double dom_hi = whi[k - 1];
        double t = x - std::floor(x - (dom_hi - 1.0));
        const double v = (t - wlo[j]) / (whi[j] - wlo[j]);
        return std::clamp(v, 0.0, 1.0);
    };
    // Fraction of the displacement applied after stage i (original order):
    // the sum of the ownership bumps of all sorted arcs with index <= i.
    auto cumulative = [&](std::size_t i, double x) {
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (arcs[j].idx > i) continue;
            if (j == 0)
                s += 1.0 - ramp(0, x) + ramp(k - 1, x);
            else
                s += ramp(j - 1, x) - ramp(j, x);
        }
        return s;
    };

    // Common grid: f's breakpoints plus all window endpoints.
    std::vector<double> grid = f.xs();
    for (std::size_t j = 0; j < k; ++j) {
        grid.push_back(mod1(wlo[j]));
        grid.push_back(mod1(whi[j]));
    }
    std::sort(grid.begin(), grid.end());
    std::vector<double> u;
    for (double x : grid)
        if (u.empty() || x - u.back() > kDedupe) u.push_back(x);
    if (u.size() > 1 && 1.0 - u.back() + u.front() <= kDedupe) u.pop_back();

    // Stage maps G_i = PL interpolation of x + s_i(x) * (f(x) - x) on the
    // grid; the factors G_i o G_{i-1}^{-1} telescope to G_last = f exactly.
    PLCircleHomeo prev = PLCircleHomeo::identity();
    for (std::size_t i = 0; i < r; ++i) {
        std::vector<std::pair<double, double>> pts;
        pts.reserve(u.size());
        for (double x : u)
            pts.emplace_back(x,
                             mod1(x + cumulative(i, x) * (f.eval(x) - x - dk)));
        PLCircleHomeo Gi;
        try {
            Gi = PLCircleHomeo::from_breaks(std::move(pts));
        } catch (const FlatholoError&) {
            throw DisplacementTooLarge(
                "fragment: isotopy stage is not monotone; displacement too large");
        }
        out[i] = pl_compose(Gi, pl_inverse(prev));
        prev = Gi;
    }
    return out;
}

// ------------------------------------------------------------ net displacer ---

PLCircleHomeo net_displacer(const std::vector<double>& net, double delta) {
    if (net.empty()) return PLCircleHomeo::identity();
    if (!(delta > 0.0)) throw FlatholoError("net_displacer: delta must be positive");
    std::vector<double> pts;
    for (double p : net) pts.push_back(mod1(p));
    std::sort(pts.begin(), pts.end());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double nx = (i + 1 < pts.size()) ? pts[i + 1] : pts[0] + 1.0;
        if (nx - pts[i] < 4.0 * delta - 1e-15)
            throw NetTooDense("net_displacer: net spacing below 4*delta");
    }
    std::vector<std::pair<double, double>> brk;
    for (double p : pts) {
        brk.emplace_back(mod1(p - 2.0 * delta), mod1(p - 2.0 * delta));
        brk.emplace_back(mod1(p - delta), mod1(p + 1.5 * delta));
        brk.emplace_back(mod1(p + 2.0 * delta), mod1(p + 2.0 * delta));
    }
    return PLCircleHomeo::from_breaks(std::move(brk));
}

// --------------------------------------------------------- compactified line ---

namespace {

double kappa(double x) { return 0.5 * (1.0 + x / (1.0 + std::abs(x))); }

double kappa_inv(double t) {
    const double u = 2.0 * t - 1.0;
    return u / (1.0 - std::abs(u));
}

}  // namespace

double TildeIntervalAction::eval(double t) const {
    if (t <= 0.0) return t == 0.0 ? 0.0 : t;
    if (t >= 1.0) return t == 1.0 ? 1.0 : t;
    return kappa(lift_.eval(kappa_inv(t)));
}

PLIntervalHomeo TildeIntervalAction::sample(int n) const {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double t = double(i) / n;
        pts.emplace_back(t, eval(t));
    }
    return PLIntervalHomeo::from_breaks(std::move(pts));
}

TildeIntervalAction tilde_interval_action(const LiftedElement& x) {
    return TildeIntervalAction(x);
}

// ------------------------------------------------------------------ implant ---

PLCircleHomeo implant(const PLIntervalHomeo& f, const Arc& arc) {
    const double len = arc.length();
    if (!(len > 0.0) || len > 1.0 + 1e-15)
        throw FlatholoError("implant: arc length must be in (0, 1]");
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < f.xs().size(); ++i)
        pts.emplace_back(mod1(arc.lo + len * f.xs()[i]),
                         mod1(arc.lo + len * f.ys()[i]));
    return PLCircleHomeo::from_breaks(std::move(pts));
}

}  // namespace flatholo
