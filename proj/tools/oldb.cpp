// Command-line front end: decay experiments for the undamped Oldroyd-B
// system, Besov norms of checkpoints, power-law refits of emitted CSV, and
// empirical bilinear/commutator estimate censuses.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "oldb/experiment.hpp"
#include "oldb/littlewood_paley.hpp"
#include "oldb/operators.hpp"
#include "oldb/semigroup.hpp"
#include "oldb/solver.hpp"
#include "oldb/synthesis.hpp"

namespace {

using namespace oldb;

constexpr int kExitPass = 0;
constexpr int kExitError = 1;
constexpr int kExitVerdictFail = 2;

struct RunOptions {
    std::string config_path;
    std::string out_dir = "out";
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
};

void add_run_options(CLI::App* cmd, RunOptions& opt) {
    cmd->add_option("--config", opt.config_path, "experiment config file")->required();
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_option("--seed", opt.seed, "override experiment.seed");
    cmd->add_option("--override", opt.overrides, "section.key=value override")
        ->take_all();
}

ExperimentConfig load_experiment(const RunOptions& opt, ExperimentConfig::Kind kind) {
    Config cfg = Config::parse_file(opt.config_path);
    for (const auto& ov : opt.overrides) cfg.apply_override(ov);
    if (opt.seed) cfg.set("experiment.seed", std::to_string(*opt.seed));
    ExperimentConfig exp = ExperimentConfig::from_config(cfg);
    exp.kind = kind;
    return exp;
}

void print_fits(const ExperimentResult& result) {
    for (const auto& [label, fit] : result.fits) {
        std::printf("%-16s slope = %+.4f (stderr %.4f, %zu samples)  theory rate %.4g, "
                    "target %.4g, tol %.3g -> %s\n",
                    label.c_str(), fit.slope, fit.stderr_slope, fit.count, fit.theory_rate,
                    fit.target_rate, fit.tolerance, fit.pass ? "PASS" : "FAIL");
    }
}

int cmd_linear_decay(const RunOptions& opt) {
    ExperimentConfig exp = load_experiment(opt, ExperimentConfig::Kind::LinearOracle);
    ExperimentResult result = run_experiment(exp, opt.out_dir);
    for (Real alpha : exp.alphas)
        std::printf("theory rate (s=%g, alpha=%g, q=%g): %.6g\n", exp.s, alpha, exp.q,
                    decay_rate_formula(exp.n, exp.s, alpha, exp.q));
    print_fits(result);
    for (const auto& path : result.csv_paths) std::printf("wrote %s\n", path.c_str());
    return result.all_pass ? kExitPass : kExitVerdictFail;
}

int cmd_simulate(const RunOptions& opt) {
    ExperimentConfig exp = load_experiment(opt, ExperimentConfig::Kind::NonlinearBox);
    ExperimentResult result = run_experiment(exp, opt.out_dir);
    std::printf("smallness X0 = %.6g (threshold %g): %s\n", result.x0, exp.smallness_threshold,
                result.small_data ? "small data" : "NOT small data");
    print_fits(result);
    std::printf("energy functional nonincreasing: %s\n", result.lyapunov_ok ? "yes" : "NO");
    std::printf("B^{-s} monitor within 2x initial: %s\n", result.bounded_ok ? "yes" : "NO");
    for (const auto& path : result.csv_paths) std::printf("wrote %s\n", path.c_str());
    if (!result.checkpoint_path.empty())
        std::printf("wrote %s\n", result.checkpoint_path.c_str());
    if (result.blowup) {
        std::printf("blow-up detected at t = %.6g; partial output flagged in CSV\n",
                    result.blowup_t);
        return kExitError;
    }
    return result.all_pass ? kExitPass : kExitVerdictFail;
}

struct BesovOptions {
    std::string checkpoint;
    Real s = 0.75;
    Real p = 2.0;
    std::string side = "full";
    int j0 = 0;
};

int cmd_besov(const BesovOptions& opt) {
    SolverState state = load_checkpoint(opt.checkpoint);
    DyadicPartition part(state.grid(), opt.j0);
    BesovSide side = BesovSide::Full;
    if (opt.side == "low") side = BesovSide::Low;
    else if (opt.side == "high") side = BesovSide::High;
    else if (opt.side != "full") throw std::invalid_argument("--side must be full, low or high");
    const BesovSpec spec{opt.s, opt.p, side};

    SpectralField gamma = gamma_from_tau(state.tau);
    const SpectralField* ugamma[] = {&state.u, &gamma};
    const SpectralField* utau[] = {&state.u, &state.tau};
    const auto detail = besov_norm_detail(ugamma, part, spec);
    std::printf("checkpoint t = %.6g, grid n=%d N=%d L=%.6g, j range [%d, %d]\n", state.t,
                state.grid().dim, state.grid().points, state.grid().length, detail.j_lo,
                detail.j_hi);
    std::printf("||u||_{B^%g_{%g,1}} = %.12g\n", opt.s, opt.p, besov_norm(state.u, part, spec));
    std::printf("||tau||         = %.12g\n", besov_norm(state.tau, part, spec));
    std::printf("||gamma||       = %.12g\n", besov_norm(gamma, part, spec));
    std::printf("||(u,gamma)||   = %.12g\n", besov_norm(ugamma, part, spec));
    std::printf("||(u,tau)||     = %.12g\n", besov_norm(utau, part, spec));
    return kExitPass;
}

struct FitOptions {
    std::string csv;
    std::string column;
    std::vector<Real> window;
    std::optional<Real> rate;
    Real tol = 0.05;
};

int cmd_fit(const FitOptions& opt) {
    CsvTable table = read_csv(opt.csv);
    const int it = table.column_index("t");
    const int iv = table.column_index(opt.column);
    if (it < 0) throw std::runtime_error("fit: CSV has no 't' column");
    if (iv < 0) throw std::runtime_error("fit: CSV has no column named " + opt.column);
    std::vector<SeriesPoint> series;
    for (const auto& row : table.rows) series.push_back({row[it], row[iv]});
    FitWindow window{-std::numeric_limits<Real>::infinity(),
                     std::numeric_limits<Real>::infinity()};
    if (opt.window.size() == 2) window = {opt.window[0], opt.window[1]};
    else if (!opt.window.empty()) throw std::invalid_argument("--window needs two values");

    DecayFit fit = fit_decay(series, window);
    std::printf("column %s: slope = %.12g (stderr %.3g, %zu samples)\n", opt.column.c_str(),
                fit.slope, fit.stderr_slope, fit.count);
    if (opt.rate) {
        const bool pass = std::abs(fit.slope + *opt.rate) <= opt.tol;
        std::printf("target rate %.6g, tolerance %.3g -> %s\n", *opt.rate, opt.tol,
                    pass ? "PASS" : "FAIL");
        return pass ? kExitPass : kExitVerdictFail;
    }
    return kExitPass;
}

struct CensusOptions {
    std::string kind = "both";
    int n = 2;
    int N = 64;
    Real L = 2.0 * pi;
    int count = 200;
    std::uint64_t seed = 1;
    Real s1 = 0.7, s2 = 0.7, s = 0.5;
    Real p = 2.0, q = 2.0;
    Real band_lo = 2.0, band_hi = 10.0;
    int j0 = 0;
};

int cmd_census(const CensusOptions& opt) {
    const Grid grid(opt.n, opt.N, opt.L);
    const DyadicPartition part(grid, opt.j0);
    auto summarize = [&](const char* name, auto&& ratio_fn) {
        Real max_ratio = 0, sum = 0;
        for (int i = 0; i < opt.count; ++i) {
            const Real r = ratio_fn(static_cast<std::uint64_t>(i));
            max_ratio = std::max(max_ratio, r);
            sum += r;
        }
        std::printf("%s: count=%d max=%.6g mean=%.6g\n", name, opt.count, max_ratio,
                    sum / opt.count);
    };

    if (opt.kind == "product" || opt.kind == "both") {
        summarize("product", [&](std::uint64_t i) {
            SpectralField u = random_band_scalar(grid, opt.band_lo, opt.band_hi,
                                                 opt.seed ^ (2 * i + 1));
            SpectralField v = random_band_scalar(grid, opt.band_lo, opt.band_hi,
                                                 opt.seed ^ (2 * i + 2) ^ 0x5a5a5a5aULL);
            return lemma_ratio_product(u, v, opt.s1, opt.s2, opt.p, opt.q, part);
        });
    }
    if (opt.kind == "commutator" || opt.kind == "both") {
        summarize("commutator", [&](std::uint64_t i) {
            SpectralField u = random_band_solenoidal(grid, opt.band_lo, opt.band_hi,
                                                     opt.seed ^ (2 * i + 1) ^ 0xc3c3c3c3ULL);
            SpectralField v = random_band_scalar(grid, opt.band_lo, opt.band_hi,
                                                 opt.seed ^ (2 * i + 2) ^ 0x96969696ULL);
            return lemma_ratio_commutator(u, v, opt.s, opt.p, opt.q, part);
        });
    }
    if (opt.kind != "product" && opt.kind != "commutator" && opt.kind != "both")
        throw std::invalid_argument("--kind must be product, commutator or both");
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"undamped Oldroyd-B decay laboratory"};
    app.require_subcommand(1);

    RunOptions linear_opt, sim_opt;
    BesovOptions besov_opt;
    FitOptions fit_opt;
    CensusOptions census_opt;

    CLI::App* linear = app.add_subcommand(
        "linear-decay", "exact linearized decay curves, fits and verdicts");
    add_run_options(linear, linear_opt);

    CLI::App* sim = app.add_subcommand(
        "simulate", "nonlinear periodic-box run with diagnostics and decay fits");
    add_run_options(sim, sim_opt);

    CLI::App* besov = app.add_subcommand("besov", "Besov norms of a checkpoint");
    besov->add_option("--checkpoint", besov_opt.checkpoint, "checkpoint file")->required();
    besov->add_option("--s", besov_opt.s, "regularity index");
    besov->add_option("--p", besov_opt.p, "integrability index");
    besov->add_option("--side", besov_opt.side, "full|low|high");
    besov->add_option("--j0", besov_opt.j0, "low/high split index");

    CLI::App* fit = app.add_subcommand("fit", "refit a power law from an emitted CSV");
    fit->add_option("--csv", fit_opt.csv, "CSV path")->required();
    fit->add_option("--column", fit_opt.column, "column to fit")->required();
    fit->add_option("--window", fit_opt.window, "fit window t_lo t_hi")->expected(2);
    fit->add_option("--rate", fit_opt.rate, "reference decay exponent (positive)");
    fit->add_option("--tol", fit_opt.tol, "verdict tolerance");

    CLI::App* census = app.add_subcommand(
        "lemma-census", "ratio statistics for product/commutator estimates");
    census->add_option("--kind", census_opt.kind, "product|commutator|both");
    census->add_option("--n", census_opt.n, "dimension");
    census->add_option("--N", census_opt.N, "grid points per axis");
    census->add_option("--L", census_opt.L, "box length");
    census->add_option("--count", census_opt.count, "number of random pairs");
    census->add_option("--seed", census_opt.seed, "rng seed");
    census->add_option("--s1", census_opt.s1, "product index s1");
    census->add_option("--s2", census_opt.s2, "product index s2");
    census->add_option("--s", census_opt.s, "commutator index s");
    census->add_option("--p", census_opt.p, "integrability p");
    census->add_option("--q", census_opt.q, "integrability q");
    census->add_option("--band-lo", census_opt.band_lo, "lower |k| of the random band");
    census->add_option("--band-hi", census_opt.band_hi, "upper |k| of the random band");
    census->add_option("--j0", census_opt.j0, "low/high split index");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitPass : kExitError;
    }

    try {
        if (*linear) return cmd_linear_decay(linear_opt);
        if (*sim) return cmd_simulate(sim_opt);
        if (*besov) return cmd_besov(besov_opt);
        if (*fit) return cmd_fit(fit_opt);
        if (*census) return cmd_census(census_opt);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitError;
    }
    return kExitError;
}
