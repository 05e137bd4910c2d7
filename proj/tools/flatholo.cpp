// Batch driver: construct flat-bundle representations, sweep parameter
// grids to CSV, run verification suites, and calibrate the commutator-angle
// constants. Exit codes: 0 ok, 1 usage error, 2 solver failure, 3 failed
// verification.

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "flatholo/mwbuild.hpp"
#include "flatholo/pl.hpp"
#include "flatholo/sl2.hpp"
#include "flatholo/su2.hpp"
#include "flatholo/ucover.hpp"

using nlohmann::json;
using namespace flatholo;

namespace {

constexpr const char* kCsvHeader =
    "chi,eps,method,genus,bound,defect,euler,max_dist,theta,status";

struct RunConfig {
    std::int64_t seed = 12345;
    int grid = 512;
    double tol = 1e-10;
    double c0 = 0.0;  // 0 = calibrate on demand
    double K = 0.0;
    std::string format = "json";
};

json config_to_json(const RunConfig& c) {
    return json{{"seed", c.seed}, {"grid", c.grid},     {"tol", c.tol},
                {"c0", c.c0},     {"K", c.K},           {"format", c.format}};
}

RunConfig load_config(const std::string& path) {
    RunConfig c;
    if (path.empty()) return c;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j = json::parse(in);
    if (j.contains("seed")) c.seed = j["seed"].get<std::int64_t>();
    if (j.contains("grid")) c.grid = j["grid"].get<int>();
    if (j.contains("tol")) c.tol = j["tol"].get<double>();
    if (j.contains("c0")) c.c0 = j["c0"].get<double>();
    if (j.contains("K")) c.K = j["K"].get<double>();
    if (j.contains("format")) c.format = j["format"].get<std::string>();
    if (c.tol <= 0.0) throw std::runtime_error("config: tol must be positive");
    if (c.grid <= 0) throw std::runtime_error("config: grid must be positive");
    return c;
}

void apply_env_seed(RunConfig& c) {
    if (const char* s = std::getenv("FLATHOLO_SEED"))
        c.seed = std::strtoll(s, nullptr, 10);
}

std::string config_hash(const RunConfig& c) {
    const std::string s = config_to_json(c).dump();
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

Calibration resolve_calibration(const RunConfig& c) {
    if (c.c0 > 0.0) {
        Calibration cal;
        cal.c0 = c.c0;
        cal.K = c.K;
        return cal;
    }
    return calibrate();
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// ------------------------------------------------------------ construct ---

int cmd_construct(const RunConfig& cfg, std::int64_t chi, double eps,
                  int method) {
    BuildReport rep;
    try {
        rep = build(chi, eps, method);
    } catch (const NoConvergence& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return 2;
    } catch (const EpsTooLarge& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 1;
    }
    json out{{"schema", 1},
             {"config", config_to_json(cfg)},
             {"config_hash", config_hash(cfg)},
             {"chi", chi},
             {"method", rep.method},
             {"epsilon_requested", rep.epsilon_requested},
             {"epsilon_used", rep.epsilon_used},
             {"genus", rep.genus},
             {"defect", rep.defect},
             {"euler", rep.euler},
             {"max_dist_to_rotations", rep.max_dist_to_rotations},
             {"theta_per_commutator", rep.theta_per_commutator}};
    std::printf("%s\n", out.dump(2).c_str());
    return 0;
}

// ---------------------------------------------------------------- sweep ---

int cmd_sweep(const RunConfig& cfg, const std::vector<std::int64_t>& chis,
              const std::vector<double>& epss, const std::vector<int>& methods,
              const std::string& out_path) {
    Calibration cal;
    try {
        cal = resolve_calibration(cfg);
    } catch (const CalibrationFailure& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return 2;
    }
    const std::vector<SweepRow> rows = sweep(chis, epss, methods, cal);
    std::ostringstream csv;
    csv << kCsvHeader << "\n";
    int ok = 0;
    for (const auto& r : rows) {
        std::string status = r.status;
        for (char& ch : status)
            if (ch == ',' || ch == '\n') ch = ';';
        if (status == "ok") ++ok;
        csv << r.chi << "," << fmt_double(r.eps) << "," << r.method << ","
            << r.genus << "," << r.bound << "," << fmt_double(r.defect) << ","
            << r.euler << "," << fmt_double(r.max_dist) << ","
            << fmt_double(r.theta) << "," << status << "\n";
    }
    csv << "# config_hash=" << config_hash(cfg) << "\n";
    if (out_path.empty() || out_path == "-") {
        std::fputs(csv.str().c_str(), stdout);
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) {
            std::fprintf(stderr, "usage error: cannot write %s\n",
                         out_path.c_str());
            return 1;
        }
        out << csv.str();
    }
    if (ok == 0) {
        std::fprintf(stderr, "solver failure: no sweep cell succeeded\n");
        return 2;
    }
    return 0;
}

// --------------------------------------------------------------- verify ---

struct SuiteResult {
    int passed = 0, failed = 0;
    void check(bool ok, const char* what) {
        if (ok) {
            ++passed;
        } else {
            ++failed;
            std::fprintf(stderr, "FAILED: %s\n", what);
        }
    }
};

ProjMatrix random_elt(std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return exp_sl2(LieVec{u(rng), u(rng), u(rng)});
}

PLIntervalHomeo random_interval_homeo(std::mt19937_64& rng, int k) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<double> xs(k + 2), ys(k + 2);
    xs[0] = ys[0] = 0.0;
    for (int i = 1; i <= k + 1; ++i) {
        xs[i] = xs[i - 1] + u(rng);
        ys[i] = ys[i - 1] + u(rng);
    }
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i <= k + 1; ++i)
        pts.push_back({xs[i] / xs[k + 1], ys[i] / ys[k + 1]});
    return PLIntervalHomeo::from_breaks(pts);
}

void suite_eq5(SuiteResult& res, std::mt19937_64& rng, int trials) {
    const Arc V{0.1, 0.35};
    const PLCircleHomeo h = net_displacer({0.225}, 0.125);
    const double eps = std::max(V.length(), sup_displacement(h));
    for (int t = 0; t < trials; ++t) {
        const PLCircleHomeo a =
            implant(random_interval_homeo(rng, 3), Arc{0.12, 0.22});
        const PLCircleHomeo b =
            implant(random_interval_homeo(rng, 3), Arc{0.24, 0.34});
        const auto word = eq5_word(a, b, h);
        PLCircleHomeo prod = PLCircleHomeo::identity();
        for (const auto& f : word) prod = pl_compose(prod, f);
        res.check(sup_dist(prod, pl_commutator(a, b)) <= 1e-12,
                  "four-factor product equals the commutator");
        const auto norms = conjugator_norms(a, b, h, PLCircleHomeo::identity());
        bool small = true;
        for (double n : norms) small = small && n <= 8.0 * eps;
        res.check(small, "conjugator displacements within 8*eps");
    }
}

void suite_fragment(SuiteResult& res, std::mt19937_64& rng, int trials) {
    const std::vector<Arc> cover = {
        {0.0, 0.35}, {0.25, 0.6}, {0.5, 0.85}, {0.75, 1.1}};
    std::uniform_real_distribution<double> u(-0.02, 0.02);
    for (int t = 0; t < trials; ++t) {
        std::vector<std::pair<double, double>> pts;
        for (int i = 0; i < 8; ++i) {
            const double x = double(i) / 8.0;
            pts.push_back({x, x + u(rng)});
        }
        const PLCircleHomeo f = PLCircleHomeo::from_breaks(pts);
        const auto factors = fragment(f, cover);
        PLCircleHomeo prod = PLCircleHomeo::identity();
        for (auto it = factors.rbegin(); it != factors.rend(); ++it)
            prod = pl_compose(prod, *it);
        res.check(sup_dist(prod, f) <= 1e-12, "fragment factors recompose");
        bool inside = true;
        for (std::size_t i = 0; i < factors.size(); ++i)
            for (const Arc& s : support(factors[i]))
                inside = inside &&
                         mod1(s.lo - cover[i].lo) + s.length() <=
                             cover[i].length() + 1e-9;
        res.check(inside, "each factor supported in its arc");
    }
}

void suite_ucover(SuiteResult& res, std::mt19937_64& rng, int pairs) {
    bool cocycle_ok = true, quasi_ok = true;
    for (int t = 0; t < pairs; ++t) {
        const ProjMatrix g = random_elt(rng, 1.2), h = random_elt(rng, 1.2);
        const int s = lift_cocycle(g, h);
        cocycle_ok = cocycle_ok && (s == 0 || s == 1);
        if (t < pairs / 10 + 1) {
            const LiftedElement x = canonical_lift(g), y = canonical_lift(h);
            const double d = translation_number(lift_compose(x, y)) -
                             translation_number(x) - translation_number(y);
            quasi_ok = quasi_ok && std::abs(d) <= 1.0 + 1e-9;
        }
    }
    res.check(cocycle_ok, "composition cocycle lies in {0,1}");
    res.check(quasi_ok, "translation number is a quasimorphism (bound 1)");
    bool orbit_ok = true;
    for (int t = 0; t < 100; ++t) {
        const LiftedElement x = canonical_lift(random_elt(rng, 1.0));
        orbit_ok = orbit_ok &&
                   std::abs(translation_number(x) -
                            translation_number_orbit(x, 400000)) <= 1e-5;
    }
    res.check(orbit_ok, "closed-form vs orbit-average translation number");
}

void suite_bi(SuiteResult& res) {
    const FiniteSubgroup g = bi_generate();
    res.check(g.size() == 120, "group has 120 elements");
    res.check(is_perfect(g), "group is perfect");
    const auto z = g.center();
    bool center_ok = z.size() == 2;
    for (const auto& q : z) center_ok = center_ok && q.is_central(1e-9);
    res.check(center_ok, "center is {+1, -1}");
    int gens = 0;
    for (const auto& q : g.elements())
        if (!q.is_central(1e-9) && normally_generates(q, g)) ++gens;
    res.check(gens == 118, "all 118 non-central elements normally generate");
}

void suite_octagon(SuiteResult& res) {
    const SurfaceRep rep = fuchsian_octagon();
    res.check(relator_defect(rep) <= 1e-8, "octagon relator defect <= 1e-8");
    res.check(std::abs(euler_class(rep)) == 2, "octagon euler class is +-2");
}

int cmd_verify(const RunConfig& cfg, const std::string& suite) {
    SuiteResult res;
    std::mt19937_64 rng(std::uint64_t(cfg.seed));
    const bool all = suite == "all";
    if (all || suite == "eq5") suite_eq5(res, rng, 20);
    if (all || suite == "fragment") suite_fragment(res, rng, 20);
    if (all || suite == "ucover") suite_ucover(res, rng, 10000);
    if (all || suite == "bi") suite_bi(res);
    if (all || suite == "octagon") suite_octagon(res);
    std::printf("suite %s: %d passed, %d failed\n", suite.c_str(), res.passed,
                res.failed);
    return res.failed == 0 ? 0 : 3;
}

// ------------------------------------------------------------ calibrate ---

int cmd_calibrate(RunConfig cfg, const std::string& config_path) {
    Calibration cal;
    try {
        cal = calibrate();
    } catch (const CalibrationFailure& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return 2;
    }
    cfg.c0 = cal.c0;
    cfg.K = cal.K;
    json out{{"schema", 1},
             {"c0", cal.c0},
             {"K", cal.K},
             {"slope", cal.slope},
             {"config", config_to_json(cfg)},
             {"config_hash", config_hash(cfg)}};
    std::printf("%s\n", out.dump(2).c_str());
    if (!config_path.empty()) {
        std::ofstream f(config_path);
        if (!f) {
            std::fprintf(stderr, "usage error: cannot write %s\n",
                         config_path.c_str());
            return 1;
        }
        f << config_to_json(cfg).dump(2) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Flat-bundle representation toolkit.\n"
        "Exit codes: 0 ok, 1 usage error, 2 solver failure, 3 failed "
        "verification."};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file");

    auto* construct = app.add_subcommand(
        "construct", "Build one representation and print a JSON report");
    std::int64_t chi = 1;
    double eps = 0.1;
    int method = 1;
    construct->add_option("--chi", chi, "target Euler class")->required();
    construct->add_option("--eps", eps, "rotation-distance budget")->required();
    construct->add_option("--method", method, "construction method 1|2|3")
        ->check(CLI::Range(1, 3));

    auto* sweep_cmd =
        app.add_subcommand("sweep", "Evaluate a (chi, eps, method) grid to CSV");
    std::vector<std::int64_t> chis;
    std::vector<double> epss;
    std::vector<int> methods = {1, 2, 3};
    std::string out_path;
    sweep_cmd->add_option("--chi", chis, "chi values")
        ->required()
        ->delimiter(',');
    sweep_cmd->add_option("--eps", epss, "eps values")->required()->delimiter(',');
    sweep_cmd->add_option("--methods", methods, "methods subset of 1,2,3")
        ->delimiter(',');
    sweep_cmd->add_option("--out", out_path, "output CSV path (default stdout)");

    auto* verify = app.add_subcommand("verify", "Run an invariant suite");
    std::string suite;
    verify->add_option("suite", suite, "eq5|fragment|ucover|bi|octagon|all")
        ->required();

    auto* calib = app.add_subcommand(
        "calibrate", "Fit the commutator-angle constants c0, K");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        RunConfig cfg = load_config(config_path);
        apply_env_seed(cfg);
        if (construct->parsed()) {
            if (!(eps > 0.0) || eps > 0.5) {
                std::fprintf(stderr, "usage error: eps must be in (0, 0.5]\n");
                return 1;
            }
            return cmd_construct(cfg, chi, eps, method);
        }
        if (sweep_cmd->parsed()) {
            for (double e : epss)
                if (!(e > 0.0) || e > 0.5) {
                    std::fprintf(stderr,
                                 "usage error: eps must be in (0, 0.5]\n");
                    return 1;
                }
            for (int m : methods)
                if (m < 1 || m > 3) {
                    std::fprintf(stderr, "usage error: methods are 1, 2, 3\n");
                    return 1;
                }
            return cmd_sweep(cfg, chis, epss, methods, out_path);
        }
        if (verify->parsed()) {
            const bool known = suite == "eq5" || suite == "fragment" ||
                               suite == "ucover" || suite == "bi" ||
                               suite == "octagon" || suite == "all";
            if (!known) {
                std::fprintf(stderr, "usage error: unknown suite '%s'\n",
                             suite.c_str());
                return 1;
            }
            return cmd_verify(cfg, suite);
        }
        if (calib->parsed()) return cmd_calibrate(cfg, config_path);
    } catch (const FlatholoError& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return 2;
    } catch (const std::runtime_error& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 1;
    }
    return 1;
}
