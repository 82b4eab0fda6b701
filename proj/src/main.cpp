#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gwh/analysis.hpp"
#include "gwh/battery.hpp"
#include "gwh/ctgw.hpp"
#include "gwh/discrete.hpp"
#include "gwh/offspring.hpp"
#include "gwh/pool.hpp"
#include "gwh/rde.hpp"
#include "gwh/report.hpp"
#include "gwh/rng.hpp"
#include "gwh/stats.hpp"

namespace {

using gwh::Json;

std::string self_path(const char* argv0) {
    char buf[4096];
    ssize_t n = ::readlink("/proc/self/exe", buf, sizeof buf - 1);
    if (n > 0) {
        buf[n] = '\0';
        return buf;
    }
    return argv0 ? argv0 : "";
}

void print_report_line(const gwh::EstimatorReport& r) {
    std::printf("%-24s alpha=%.2f  point=%.6f  ci=[%.6f, %.6f]\n", r.name.c_str(),
                r.alpha, r.point, r.ci_low, r.ci_high);
    for (const auto& w : r.warnings) std::printf("  warning: %s\n", w.c_str());
}

void print_identity_line(const gwh::IdentityCheck& c) {
    std::printf("%-24s lhs=%.6f rhs=%.6f diff=%+.2e se=%.2e z=%+.2f\n",
                c.name.c_str(), c.lhs, c.rhs, c.diff, c.se, c.z);
}

// ------------------------------------------------------------- subcommands

struct GammaArgs {
    double alpha = 1.5;
    std::int64_t pool_size = 200000;
    int max_iter = 300;
    double tol = 1e-3;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out;
    std::string report;
    bool timestamp = false;
};

int run_gamma(const GammaArgs& a) {
    gwh::SolveOptions o;
    o.pool_size = a.pool_size;
    o.max_iter = a.max_iter;
    o.tol = a.tol;
    o.seed = a.seed;
    o.threads = a.threads;
    gwh::SolveResult res = gwh::solve_gamma(a.alpha, o);
    gwh::save_pool(res.pool, a.out);
    std::printf("alpha=%.4f pool=%lld iterations=%lld converged=%d final_d1=%.3e "
                "mean=%.6f\n",
                a.alpha, static_cast<long long>(res.pool.size()),
                static_cast<long long>(res.pool.iterations), res.converged ? 1 : 0,
                res.pool.final_d1, res.pool.mean());
    std::printf("wrote %s and %s.json\n", a.out.c_str(), a.out.c_str());
    if (!a.report.empty()) {
        // Thread count never shapes the result, so it stays out of the
        // config echo and reruns compare byte for byte.
        Json cfg{{"alpha", a.alpha},       {"pool_size", a.pool_size},
                 {"max_iter", a.max_iter}, {"tol", a.tol},
                 {"seed", a.seed}};
        gwh::write_report(
            gwh::report_envelope("gamma", cfg, gwh::solve_summary(res), a.timestamp),
            a.report);
    }
    return res.converged ? 0 : 1;
}

struct BetaArgs {
    std::string pool;
    std::int64_t samples = 200000;
    std::int64_t kappa_comps = 20000;
    std::uint64_t seed = 1;
    bool ablation = false;
    std::string out;
    bool timestamp = false;
};

int run_beta(const BetaArgs& a) {
    gwh::ConductancePool pool = gwh::load_pool(a.pool);
    gwh::EstimatorReport bv = gwh::beta_value(pool, gwh::derive_seed(a.seed, 1));
    gwh::EstimatorReport b1 =
        gwh::beta_formula1(pool, a.samples, gwh::derive_seed(a.seed, 2));
    gwh::KappaGrid grid =
        gwh::build_kappa_grid(pool, a.kappa_comps, gwh::derive_seed(a.seed, 3));
    gwh::EstimatorReport b2 =
        gwh::beta_formula2(pool, a.samples, gwh::derive_seed(a.seed, 4), &grid);
    print_report_line(bv);
    print_report_line(b1);
    print_report_line(b2);
    Json results;
    results["beta_value"] = gwh::to_json(bv);
    results["beta_formula1"] = gwh::to_json(b1);
    results["beta_formula2"] = gwh::to_json(b2);
    results["kappa_grid"] = Json{{"kmax", grid.kmax},
                                 {"kmax_tail_prob", grid.kmax_tail_prob},
                                 {"kmax_bias_bound", grid.kmax_bias_bound}};
    int rc = 0;
    if (!bv.warnings.empty() || !b1.warnings.empty() || !b2.warnings.empty()) rc = 1;
    if (a.ablation) {
        gwh::EstimatorReport b2a = gwh::beta_formula2(
            pool, a.samples, gwh::derive_seed(a.seed, 4), &grid, true);
        print_report_line(b2a);
        results["beta_formula2_kappa1"] = gwh::to_json(b2a);
    }
    if (!a.out.empty()) {
        Json cfg{{"pool", a.pool},
                 {"samples", a.samples},
                 {"kappa_comps", a.kappa_comps},
                 {"seed", a.seed}};
        gwh::write_report(gwh::report_envelope("beta", cfg, results, a.timestamp),
                          a.out);
    }
    return rc;
}

struct OdeArgs {
    std::string pool;
    std::vector<double> ells{0.25, 1.0, 4.0};
    std::string out;
    bool timestamp = false;
};

int run_ode(const OdeArgs& a) {
    gwh::ConductancePool pool = gwh::load_pool(a.pool);
    Json rows = Json::array();
    int rc = 0;
    for (double ell : a.ells) {
        gwh::OdeResidual r = gwh::ode_residual(pool, ell);
        double z = r.se > 0 ? r.residual / r.se : 0.0;
        std::printf("ell=%-6g residual=%+.3e se=%.3e z=%+.2f\n", ell, r.residual,
                    r.se, z);
        if (std::fabs(z) > 3.0) rc = 1;
        rows.push_back(gwh::to_json(r, pool.alpha));
    }
    if (!a.out.empty()) {
        Json cfg{{"pool", a.pool}, {"ells", a.ells}};
        gwh::write_report(gwh::report_envelope("ode", cfg, rows, a.timestamp),
                          a.out);
    }
    return rc;
}

struct IdentArgs {
    std::string pool;
    std::string which = "all";
    std::vector<double> rs{1.0, 2.0, 5.0};
    std::int64_t samples = 20000;
    int b_boot = 50;
    std::uint64_t seed = 1;
    std::string out;
    bool timestamp = false;
};

int run_identities(const IdentArgs& a) {
    gwh::ConductancePool pool = gwh::load_pool(a.pool);
    std::vector<gwh::IdentityCheck> checks;
    bool all = a.which == "all";
    if (all || a.which == "moment")
        checks.push_back(gwh::moment_identity(pool, gwh::derive_seed(a.seed, 21)));
    if (a.which == "star" || (all && pool.alpha == 2.0))
        checks.push_back(
            gwh::star_identity(pool, a.samples, gwh::derive_seed(a.seed, 22)));
    else if (all)
        std::printf("star identity skipped: composite sums have infinite "
                    "variance for alpha < 2 (run --which star to force)\n");
    if (all || a.which == "c1")
        checks.push_back(gwh::c1_identity(pool, gwh::derive_seed(a.seed, 23)));
    if (all || a.which == "kappa")
        for (std::size_t i = 0; i < a.rs.size(); ++i)
            checks.push_back(gwh::kappa_consistency(pool, a.rs[i], a.samples,
                                                    a.b_boot,
                                                    gwh::derive_seed(a.seed, 24, i)));
    int rc = 0;
    Json rows = Json::array();
    for (const auto& c : checks) {
        print_identity_line(c);
        if (std::fabs(c.z) > 3.0) rc = 1;
        rows.push_back(gwh::to_json(c));
    }
    if (!a.out.empty()) {
        Json cfg{{"pool", a.pool},
                 {"which", a.which},
                 {"samples", a.samples},
                 {"b_boot", a.b_boot},
                 {"seed", a.seed}};
        gwh::write_report(gwh::report_envelope("identities", cfg, rows, a.timestamp),
                          a.out);
    }
    return rc;
}

struct DiscreteArgs {
    double alpha = 2.0;
    std::vector<std::int32_t> ns;
    std::int64_t replicas = 1000;
    std::uint64_t seed = 1;
    std::string out;
    std::string csv;
    std::string dump;
    std::int32_t dump_n = 8;
    bool timestamp = false;
};

int run_discrete(const DiscreteArgs& a) {
    if (!a.dump.empty()) {
        gwh::OffspringDist law = gwh::OffspringDist::rho_canonical(a.alpha);
        gwh::Rng rng = gwh::Rng::stream(a.seed, gwh::stream_label::discrete, 0);
        gwh::SampleLimits lim;
        gwh::DiscreteTree dt = gwh::sample_conditioned(law, a.dump_n, lim, rng);
        gwh::ReducedTree rt = gwh::reduce(dt, a.dump_n);
        std::ofstream os(a.dump, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open for writing: " + a.dump);
        gwh::dump_reduced(rt, os);
        std::printf("wrote reduced tree (n=%d, %lld nodes) to %s\n", a.dump_n,
                    static_cast<long long>(rt.size()), a.dump.c_str());
        if (a.ns.empty()) return 0;
    }
    if (a.ns.empty()) throw CLI::ValidationError("--n", "at least one level needed");
    std::vector<gwh::ScanRow> rows =
        gwh::discrete_dimension_scan(a.alpha, a.ns, a.replicas, a.seed);
    for (const auto& r : rows)
        std::printf("n=%-5g entropy/log n = %.4f  [%.4f, %.4f]\n", r.key, r.value,
                    r.ci_low, r.ci_high);
    if (!a.csv.empty()) gwh::write_scan_csv(rows, "n", a.csv);
    if (!a.out.empty()) {
        Json cfg{{"alpha", a.alpha},
                 {"n", a.ns},
                 {"replicas", a.replicas},
                 {"seed", a.seed}};
        Json arr = Json::array();
        for (const auto& r : rows) arr.push_back(gwh::to_json(r, "n"));
        gwh::write_report(gwh::report_envelope("discrete", cfg, arr, a.timestamp),
                          a.out);
    }
    return 0;
}

struct CoupleArgs {
    std::vector<double> alphas{1.2, 1.5, 1.8, 2.0};
    std::int64_t grid = 10000;
    bool scan = false;
    std::int64_t pool_size = 50000;
    int max_iter = 120;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out;
    std::string csv;
    bool timestamp = false;
};

int run_couple(const CoupleArgs& a) {
    std::int64_t violations = 0;
    for (std::size_t i = 0; i + 1 < a.alphas.size(); ++i)
        for (std::int64_t g = 0; g < a.grid; ++g) {
            double u = (g + 0.5) / static_cast<double>(a.grid);
            if (gwh::coupled_sample(u, a.alphas[i]) <
                gwh::coupled_sample(u, a.alphas[i + 1]))
                violations += 1;
        }
    std::printf("quantile coupling: %lld violations on %lld points "
                "(offspring stochastically decreasing in alpha)\n",
                static_cast<long long>(violations), static_cast<long long>(a.grid));
    int rc = violations == 0 ? 0 : 1;
    Json results;
    results["coupling_violations"] = violations;
    if (a.scan) {
        gwh::SolveOptions base;
        base.pool_size = a.pool_size;
        base.max_iter = a.max_iter;
        base.seed = a.seed;
        base.threads = a.threads;
        std::vector<gwh::ScanRow> rows = gwh::conductance_mean_scan(a.alphas, base);
        bool decreasing = true;
        for (std::size_t i = 0; i + 1 < rows.size(); ++i)
            if (!(rows[i].ci_low > rows[i + 1].ci_high)) decreasing = false;
        for (const auto& r : rows)
            std::printf("alpha=%-5g E[C]=%.5f  [%.5f, %.5f]\n", r.key, r.value,
                        r.ci_low, r.ci_high);
        std::printf("mean conductance strictly decreasing beyond CI overlap: %s\n",
                    decreasing ? "yes" : "no");
        if (!decreasing) rc = 1;
        if (!a.csv.empty()) gwh::write_scan_csv(rows, "alpha", a.csv);
        Json arr = Json::array();
        for (const auto& r : rows) arr.push_back(gwh::to_json(r, "alpha"));
        results["mean_scan"] = arr;
        results["decreasing_beyond_ci"] = decreasing;
    }
    if (!a.out.empty()) {
        Json cfg{{"alphas", a.alphas}, {"grid", a.grid}, {"scan", a.scan},
                 {"seed", a.seed}};
        gwh::write_report(gwh::report_envelope("couple", cfg, results, a.timestamp),
                          a.out);
    }
    return rc;
}

struct CtgwArgs {
    double alpha = 1.5;
    std::string mode = "growth";
    double r = 4.0;
    std::int64_t replicas = 10000;
    std::vector<double> us{0.5, 1.0, 2.0};
    std::int64_t cap = 1000000;
    bool delta = false;
    std::uint64_t seed = 1;
    std::string out;
    bool timestamp = false;
};

int run_ctgw(const CtgwArgs& a) {
    if (a.mode == "dump") {
        gwh::Rng rng = gwh::Rng::stream(a.seed, gwh::stream_label::ctgw, 0);
        gwh::CtgwTree tree = gwh::sample_ctgw(a.alpha, a.r, a.cap, rng);
        if (a.delta) gwh::map_to_delta(tree);
        if (tree.overflow)
            std::fprintf(stderr, "node cap %lld hit; tree incomplete below r\n",
                         static_cast<long long>(a.cap));
        if (a.out.empty()) {
            gwh::dump_tree(tree, std::cout);
        } else {
            std::ofstream os(a.out, std::ios::binary);
            if (!os) throw std::runtime_error("cannot open for writing: " + a.out);
            gwh::dump_tree(tree, os);
            std::printf("wrote %lld nodes to %s\n",
                        static_cast<long long>(tree.nodes.size()), a.out.c_str());
        }
        return tree.overflow ? 1 : 0;
    }
    if (a.mode == "growth") {
        gwh::OffspringDist th = gwh::OffspringDist::theta(a.alpha);
        gwh::MeanVar mv;
        double scale = std::exp(-a.r / (a.alpha - 1.0));
        for (std::int64_t i = 0; i < a.replicas; ++i) {
            gwh::Rng rng = gwh::Rng::stream(a.seed, gwh::stream_label::ctgw, 1,
                                            static_cast<std::uint64_t>(i));
            mv.add(scale * static_cast<double>(gwh::level_population(th, a.r, rng)));
        }
        double z = (mv.mean - 1.0) / mv.se();
        std::printf("exp(-r/(alpha-1)) E[#level r] = %.4f  se=%.4f  z=%+.2f "
                    "(martingale mean 1)\n",
                    mv.mean, mv.se(), z);
        if (!a.out.empty()) {
            Json cfg{{"alpha", a.alpha}, {"r", a.r}, {"replicas", a.replicas},
                     {"seed", a.seed}};
            Json res{{"normalized_mean", mv.mean}, {"se", mv.se()}, {"z", z}};
            gwh::write_report(gwh::report_envelope("ctgw", cfg, res, a.timestamp),
                              a.out);
        }
        return std::fabs(z) <= 3.0 ? 0 : 1;
    }
    if (a.mode == "laplace") {
        int rc = 0;
        Json rows = Json::array();
        for (std::size_t i = 0; i < a.us.size(); ++i) {
            gwh::LaplaceCheck c = gwh::level_laplace_check(
                a.alpha, a.r, a.us[i], a.replicas, gwh::derive_seed(a.seed, 31, i));
            std::printf("u=%-5g E[exp(-u N_r)] = %.6f  closed=%.6f  z=%+.2f\n",
                        a.us[i], c.empirical, c.closed_form, c.z);
            if (std::fabs(c.z) > 3.0) rc = 1;
            Json row = gwh::to_json(c);
            row["u"] = a.us[i];
            rows.push_back(std::move(row));
        }
        if (!a.out.empty()) {
            Json cfg{{"alpha", a.alpha}, {"r", a.r}, {"replicas", a.replicas},
                     {"seed", a.seed}};
            gwh::write_report(gwh::report_envelope("ctgw", cfg, rows, a.timestamp),
                              a.out);
        }
        return rc;
    }
    throw CLI::ValidationError("--mode", "one of growth|laplace|dump");
}

struct SpeedArgs {
    std::vector<double> alphas{1.2, 1.5, 1.8, 2.0};
    std::int64_t pool_size = 50000;
    int max_iter = 120;
    double tol = 1e-3;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out;
    std::string csv;
    bool timestamp = false;
};

int run_speed(const SpeedArgs& a) {
    gwh::SolveOptions base;
    base.pool_size = a.pool_size;
    base.max_iter = a.max_iter;
    base.tol = a.tol;
    base.seed = a.seed;
    base.threads = a.threads;
    std::vector<gwh::SpeedReport> reps = gwh::speed_scan(a.alphas, base);
    int rc = 0;
    Json arr = Json::array();
    std::vector<gwh::ScanRow> rows;
    for (const auto& sp : reps) {
        std::printf("alpha=%-5g V=%.5f [%.5f, %.5f]  denominator=%.5f\n",
                    sp.speed.alpha, sp.speed.point, sp.speed.ci_low,
                    sp.speed.ci_high, sp.denominator);
        if (!(sp.speed.point < 0.5)) rc = 1;
        arr.push_back(gwh::to_json(sp));
        rows.push_back({sp.speed.alpha, sp.speed.point, sp.speed.ci_low,
                        sp.speed.ci_high});
    }
    std::printf("all speeds below 1/2: %s\n", rc == 0 ? "yes" : "no");
    if (!a.csv.empty()) gwh::write_scan_csv(rows, "alpha", a.csv);
    if (!a.out.empty()) {
        Json cfg{{"alphas", a.alphas}, {"pool_size", a.pool_size},
                 {"max_iter", a.max_iter}, {"seed", a.seed}};
        gwh::write_report(gwh::report_envelope("speed", cfg, arr, a.timestamp),
                          a.out);
    }
    return rc;
}

struct VerifyArgs {
    bool quick = false;
    bool smoke = false;
    std::uint64_t seed = 20240817;
    int threads = 0;
    std::string out = "verify_report.json";
    std::string workdir = "gwharm_battery_tmp";
    std::string cli;
};

int run_verify(const VerifyArgs& a) {
    gwh::BatteryOptions opts;
    opts.scale = a.smoke   ? gwh::BatteryScale::smoke
                 : a.quick ? gwh::BatteryScale::quick
                           : gwh::BatteryScale::full;
    opts.seed = a.seed;
    opts.threads = a.threads;
    opts.cli_path = a.cli;
    opts.workdir = a.workdir;
    std::vector<gwh::CriterionResult> results = gwh::run_battery(opts, std::cout);
    Json cfg{{"scale", gwh::scale_name(opts.scale)}, {"seed", a.seed}};
    gwh::write_report(
        gwh::report_envelope("verify", cfg, gwh::battery_json(results, opts)),
        a.out);
    std::printf("report written to %s\n", a.out.c_str());
    return gwh::battery_passed(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulation and numerical checks for harmonic measure on "
                 "critical stable Galton-Watson trees"};
    app.require_subcommand(1);
    app.set_config("--config", "", "ini file with option defaults");

    GammaArgs ga;
    CLI::App* gamma = app.add_subcommand(
        "gamma", "solve the conductance fixed point by population dynamics");
    gamma->add_option("--alpha", ga.alpha, "stable index in (1,2]")
        ->required()
        ->check(CLI::Range(1.0 + 1e-9, 2.0));
    gamma->add_option("--pool-size", ga.pool_size)->check(CLI::PositiveNumber);
    gamma->add_option("--max-iter", ga.max_iter)->check(CLI::PositiveNumber);
    gamma->add_option("--tol", ga.tol, "Wasserstein-1 stopping tolerance");
    gamma->add_option("--seed", ga.seed);
    gamma->add_option("--threads", ga.threads, "0 = GWHARM_THREADS or all cores");
    gamma->add_option("--out", ga.out, "pool output path (.bin plus .json sidecar)")
        ->required();
    gamma->add_option("--report", ga.report, "JSON convergence report path");
    gamma->add_flag("--timestamp", ga.timestamp, "stamp reports with wall time");

    BetaArgs ba;
    CLI::App* beta = app.add_subcommand(
        "beta", "dimension estimators on a solved conductance pool");
    beta->add_option("--pool", ba.pool, "pool file from gamma")->required();
    beta->add_option("--samples", ba.samples)->check(CLI::PositiveNumber);
    beta->add_option("--kappa-comps", ba.kappa_comps,
                     "composites per kappa grid node")
        ->check(CLI::PositiveNumber);
    beta->add_option("--seed", ba.seed);
    beta->add_flag("--ablation", ba.ablation,
                   "also run the flow estimator with kappa frozen to 1");
    beta->add_option("--out", ba.out, "JSON report path");
    beta->add_flag("--timestamp", ba.timestamp);

    OdeArgs oa;
    CLI::App* ode = app.add_subcommand(
        "ode", "residuals of the Laplace transform equation on a pool");
    ode->add_option("--pool", oa.pool)->required();
    ode->add_option("--ell", oa.ells, "evaluation points");
    ode->add_option("--out", oa.out);
    ode->add_flag("--timestamp", oa.timestamp);

    IdentArgs ia;
    CLI::App* ident = app.add_subcommand(
        "identities", "distributional identities of the fixed point");
    ident->add_option("--pool", ia.pool)->required();
    ident->add_option("--which", ia.which)
        ->check(CLI::IsMember({"all", "moment", "star", "c1", "kappa"}));
    ident->add_option("--r", ia.rs, "radii for the kappa renewal check");
    ident->add_option("--samples", ia.samples)->check(CLI::PositiveNumber);
    ident->add_option("--b-boot", ia.b_boot)->check(CLI::PositiveNumber);
    ident->add_option("--seed", ia.seed);
    ident->add_option("--out", ia.out);
    ident->add_flag("--timestamp", ia.timestamp);

    DiscreteArgs da;
    CLI::App* disc = app.add_subcommand(
        "discrete", "entropy of harmonic measure on conditioned trees");
    disc->add_option("--alpha", da.alpha)->required()->check(
        CLI::Range(1.0 + 1e-9, 2.0));
    disc->add_option("--n", da.ns, "target generations");
    disc->add_option("--replicas", da.replicas)->check(CLI::PositiveNumber);
    disc->add_option("--seed", da.seed);
    disc->add_option("--out", da.out);
    disc->add_option("--csv", da.csv, "scan rows as csv");
    disc->add_option("--dump-tree", da.dump, "write one reduced tree as csv");
    disc->add_option("--dump-n", da.dump_n, "generation for --dump-tree");
    disc->add_flag("--timestamp", da.timestamp);

    CoupleArgs ca;
    CLI::App* couple = app.add_subcommand(
        "couple", "monotonicity in alpha under common random numbers");
    couple->add_option("--alphas", ca.alphas);
    couple->add_option("--grid", ca.grid, "quantile grid points");
    couple->add_flag("--scan", ca.scan, "also solve pools and scan E[C]");
    couple->add_option("--pool-size", ca.pool_size);
    couple->add_option("--max-iter", ca.max_iter);
    couple->add_option("--seed", ca.seed);
    couple->add_option("--threads", ca.threads);
    couple->add_option("--out", ca.out);
    couple->add_option("--csv", ca.csv);
    couple->add_flag("--timestamp", ca.timestamp);

    CtgwArgs cta;
    CLI::App* ctgw = app.add_subcommand(
        "ctgw", "continuous-time branching tree: growth, transforms, dumps");
    ctgw->add_option("--alpha", cta.alpha)->required()->check(
        CLI::Range(1.0 + 1e-9, 2.0));
    ctgw->add_option("--mode", cta.mode)->check(
        CLI::IsMember({"growth", "laplace", "dump"}));
    ctgw->add_option("--r", cta.r, "height")->check(CLI::PositiveNumber);
    ctgw->add_option("--replicas", cta.replicas)->check(CLI::PositiveNumber);
    ctgw->add_option("--u", cta.us, "Laplace evaluation points");
    ctgw->add_option("--cap", cta.cap, "node cap for dump mode");
    ctgw->add_flag("--delta", cta.delta, "map heights to the unit-depth scale");
    ctgw->add_option("--seed", cta.seed);
    ctgw->add_option("--out", cta.out);
    ctgw->add_flag("--timestamp", cta.timestamp);

    SpeedArgs sa;
    CLI::App* speed = app.add_subcommand(
        "speed", "descent speed of the harmonic ray across alpha");
    speed->add_option("--alphas", sa.alphas);
    speed->add_option("--pool-size", sa.pool_size);
    speed->add_option("--max-iter", sa.max_iter);
    speed->add_option("--tol", sa.tol);
    speed->add_option("--seed", sa.seed);
    speed->add_option("--threads", sa.threads);
    speed->add_option("--out", sa.out);
    speed->add_option("--csv", sa.csv);
    speed->add_flag("--timestamp", sa.timestamp);

    VerifyArgs va;
    CLI::App* verify = app.add_subcommand(
        "verify", "run the acceptance battery and write a machine report");
    verify->add_flag("--quick", va.quick, "reduced scale, minutes become seconds");
    verify->add_flag("--smoke", va.smoke, "smallest scale, recursion floor")
        ->excludes(verify->get_option("--quick"));
    verify->add_option("--seed", va.seed);
    verify->add_option("--threads", va.threads);
    verify->add_option("--out", va.out, "report path");
    verify->add_option("--workdir", va.workdir, "scratch directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    va.cli = self_path(argv[0]);
    try {
        if (gamma->parsed()) return run_gamma(ga);
        if (beta->parsed()) return run_beta(ba);
        if (ode->parsed()) return run_ode(oa);
        if (ident->parsed()) return run_identities(ia);
        if (disc->parsed()) return run_discrete(da);
        if (couple->parsed()) return run_couple(ca);
        if (ctgw->parsed()) return run_ctgw(cta);
        if (speed->parsed()) return run_speed(sa);
        if (verify->parsed()) return run_verify(va);
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
