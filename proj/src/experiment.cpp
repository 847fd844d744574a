#include "oldb/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "oldb/littlewood_paley.hpp"
#include "oldb/operators.hpp"
#include "oldb/semigroup.hpp"
#include "oldb/solver.hpp"

namespace oldb {

namespace {

std::string alpha_tag(Real v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string q_tag(Real q) { return std::isinf(q) ? "inf" : alpha_tag(q); }

}  // namespace

ExperimentConfig ExperimentConfig::from_config(const Config& cfg) {
    ExperimentConfig e;
    const std::string kind = cfg.get_string("experiment.kind", "linear-oracle");
    if (kind == "linear-oracle")
        e.kind = Kind::LinearOracle;
    else if (kind == "nonlinear-box")
        e.kind = Kind::NonlinearBox;
    else
        throw std::invalid_argument("experiment.kind must be linear-oracle or nonlinear-box");

    e.n = cfg.get_int("experiment.n", e.n);
    e.s = cfg.get_real("experiment.s", e.s);
    e.p = cfg.get_real("experiment.p", e.p);
    e.q = cfg.get_real("experiment.q", e.q);
    e.alphas = cfg.get_real_list("experiment.alpha", e.alphas);
    e.seed = cfg.get_u64("experiment.seed", e.seed);

    e.N = cfg.get_int("grid.N", e.N);
    e.L = cfg.get_real("grid.L", e.L);
    e.dealias = cfg.get_real("grid.dealias", e.dealias);

    e.delta = cfg.get_real("profile.delta", e.delta);
    e.r_cut = cfg.get_real("profile.r_cut", e.r_cut);
    e.amplitude = cfg.get_real("profile.amplitude", e.amplitude);
    e.gamma0 = cfg.get_real("profile.gamma0", e.gamma0);

    e.b = cfg.get_real("solver.b", e.b);
    e.dt = cfg.get_real("solver.dt", e.dt);
    e.cfl = cfg.get_real("solver.cfl", e.cfl);
    e.order = cfg.get_int("solver.order", e.order);
    e.j0 = cfg.get_int("solver.j0", e.j0);
    e.half_coupling = cfg.get_bool("solver.half_coupling", e.half_coupling);
    e.smallness_threshold = cfg.get_real("solver.smallness_threshold", e.smallness_threshold);

    e.t_start = cfg.get_real("time.t_start", e.t_start);
    e.t_end = cfg.get_real("time.t_end", e.t_end);
    e.samples_per_decade = cfg.get_int("time.samples_per_decade", e.samples_per_decade);

    e.fit_lo = cfg.get_real("fit.window_lo", e.fit_lo);
    e.fit_hi = cfg.get_real("fit.window_hi", e.fit_hi);
    if (cfg.has("fit.tolerance")) e.fit_tolerance = cfg.get_real("fit.tolerance", 0.0);
    return e;
}

void ExperimentConfig::validate() const {
    if (!(delta > 0))
        throw std::invalid_argument(
            "profile.delta > 0 required: theta > s - n/2 for membership in B^{-s}_{2,1}");
    if (!(t_start > 0 && t_end > t_start))
        throw std::invalid_argument("time window requires 0 < t_start < t_end");
    if (samples_per_decade < 1)
        throw std::invalid_argument("time.samples_per_decade must be >= 1");
    if (!(b >= -1.0 && b <= 1.0))
        throw std::invalid_argument("solver.b must lie in [-1, 1]");
    if (kind == Kind::LinearOracle) {
        // The exact linearized curves probe the rate formula beyond the
        // admissible window too; only integrability constrains alpha here.
        if (q != 2.0)
            throw std::invalid_argument(
                "linear-oracle runs evaluate L^2 norms only (experiment.q = 2)");
        for (Real alpha : alphas)
            if (!(alpha + theta() + n / 2.0 > 0))
                throw std::invalid_argument(
                    "integrability requires alpha + theta + n/2 > 0");
    } else {
        for (Real alpha : alphas) predicted_rate(n, s, alpha, q, p);  // names violations
        if (t_end > box_guard() + 1e-9)
            throw std::invalid_argument(
                "time.t_end exceeds the box-effect guard (L/2pi)^2/4; enlarge grid.L");
    }
}

std::vector<Real> log_spaced_times(Real t_start, Real t_end, int per_decade) {
    std::vector<Real> out;
    const Real decades = std::log10(t_end / t_start);
    const int count = std::max(2, static_cast<int>(std::ceil(decades * per_decade)) + 1);
    for (int i = 0; i < count; ++i)
        out.push_back(t_start * std::pow(10.0, decades * i / (count - 1)));
    out.back() = t_end;
    return out;
}

std::string format_real(Real v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const CsvTable& table,
               const std::vector<std::string>& trailing_comments) {
    std::ofstream os(path, std::ios::binary);  // fixed newlines on any platform
    if (!os) throw std::runtime_error("write_csv: cannot open " + path);
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        os << (c ? "," : "") << table.columns[c];
    os << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_real(row[c]);
        os << "\n";
    }
    for (const auto& comment : trailing_comments) os << "# " << comment << "\n";
    if (!os) throw std::runtime_error("write_csv: write failed for " + path);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_csv: cannot open " + path);
    CsvTable table;
    std::string line;
    bool header = true;
    while (std::getline(is, line)) {
        if (line.empty() || line.front() == '#') continue;
        std::istringstream ls(line);
        std::string cell;
        if (header) {
            while (std::getline(ls, cell, ',')) table.columns.push_back(cell);
            header = false;
            continue;
        }
        std::vector<Real> row;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        if (!row.empty()) table.rows.push_back(std::move(row));
    }
    return table;
}

int CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    return -1;
}

namespace {

CsvTable fits_table(const std::vector<LabeledFit>& fits) {
    CsvTable table;
    table.columns = {"label_index", "slope",     "stderr", "samples",
                     "window_lo",   "window_hi", "theory", "target",
                     "tolerance",   "pass"};
    for (std::size_t i = 0; i < fits.size(); ++i) {
        const DecayFit& f = fits[i].fit;
        table.rows.push_back({static_cast<Real>(i), f.slope, f.stderr_slope,
                              static_cast<Real>(f.count), f.window.lo, f.window.hi,
                              f.theory_rate, f.target_rate, f.tolerance,
                              f.pass ? 1.0 : 0.0});
    }
    return table;
}

ExperimentResult run_linear(const ExperimentConfig& cfg, const std::string& out_dir) {
    ExperimentResult result;
    const std::vector<Real> times = log_spaced_times(cfg.t_start, cfg.t_end, cfg.samples_per_decade);
    const RadialProfile profile(cfg.theta(), cfg.r_cut, cfg.amplitude, cfg.n,
                                cfg.gamma0 * cfg.amplitude);

    CsvTable table;
    table.columns.push_back("t");
    std::vector<std::vector<DecayCurvePoint>> curves;
    for (Real alpha : cfg.alphas) {
        table.columns.push_back("norm_w_" + alpha_tag(alpha) + "_" + q_tag(cfg.q));
        curves.push_back(l2_decay_curve(profile, alpha, times, cfg.half_coupling));
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        std::vector<Real> row{times[i]};
        for (const auto& curve : curves) row.push_back(curve[i].value);
        table.rows.push_back(std::move(row));
    }
    const std::string csv_path = out_dir + "/linear_decay.csv";
    write_csv(csv_path, table);
    result.csv_paths.push_back(csv_path);

    for (std::size_t a = 0; a < cfg.alphas.size(); ++a) {
        std::vector<SeriesPoint> series;
        for (const auto& pt : curves[a]) series.push_back({pt.t, pt.value});
        // data with theta = s - n/2 + delta saturates the rate at s + delta
        const Real target = decay_rate_formula(cfg.n, cfg.s + cfg.delta, cfg.alphas[a], cfg.q);
        const Real theory = decay_rate_formula(cfg.n, cfg.s, cfg.alphas[a], cfg.q);
        DecayFit fit = fit_decay_with_verdict(series, {cfg.fit_lo, cfg.fit_hi}, target,
                                              cfg.tolerance(), theory);
        result.all_pass = result.all_pass && fit.pass;
        result.fits.push_back({"w_a" + alpha_tag(cfg.alphas[a]) + "_q" + q_tag(cfg.q), fit});
    }
    const std::string fits_path = out_dir + "/fits.csv";
    write_csv(fits_path, fits_table(result.fits));
    result.csv_paths.push_back(fits_path);
    return result;
}

ExperimentResult run_box(const ExperimentConfig& cfg, const std::string& out_dir) {
    ExperimentResult result;
    const Grid grid(cfg.n, cfg.N, cfg.L, cfg.dealias);
    const DyadicPartition partition(grid, cfg.j0);

    InitialDataParams data;
    data.amplitude = cfg.amplitude;
    data.theta = cfg.theta();
    data.r_cut = cfg.r_cut;
    data.tau_factor = cfg.gamma0;
    data.seed = cfg.seed;
    SolverState state = make_decay_initial_data(grid, data, cfg.b);

    result.x0 = smallness_x0(state, partition, cfg.p);
    result.small_data = result.x0 <= cfg.smallness_threshold;

    DiagnosticsSpec spec;
    for (Real alpha : cfg.alphas) spec.alpha_q.push_back({alpha, cfg.q});
    spec.s = cfg.s;
    spec.p = cfg.p;

    CsvTable table;
    table.columns.push_back("t");
    for (Real alpha : cfg.alphas)
        table.columns.push_back("norm_u_" + alpha_tag(alpha) + "_" + q_tag(cfg.q));
    for (Real alpha : cfg.alphas)
        table.columns.push_back("norm_gamma_" + alpha_tag(alpha) + "_" + q_tag(cfg.q));
    table.columns.insert(table.columns.end(),
                         {"energy", "dissipation", "div_residual", "besov_low", "besov_high_u",
                          "besov_high_gamma", "besov_negs"});

    auto record = [&](const DiagnosticsRecord& rec) {
        std::vector<Real> row{rec.t};
        for (Real v : rec.u_norms) row.push_back(v);
        for (Real v : rec.gamma_norms) row.push_back(v);
        row.insert(row.end(), {rec.energy, rec.dissipation, rec.div_residual, rec.besov_low,
                               rec.besov_high_u, rec.besov_high_gamma, rec.besov_negs});
        table.rows.push_back(std::move(row));
    };

    record(diagnostics(state, spec, partition));

    const Real t_end = cfg.t_end;  // validate() keeps this inside the box guard
    const std::vector<Real> samples = log_spaced_times(cfg.t_start, t_end, cfg.samples_per_decade);
    StepControl control{cfg.dt, cfg.cfl, cfg.order, true};

    std::vector<std::string> comments;
    try {
        for (Real target : samples) {
            while (state.t < target - 1e-9) {
                control.dt = std::min(cfg.dt, target - state.t);
                state = step(state, control);
            }
            record(diagnostics(state, spec, partition));
        }
    } catch (const BlowupError& err) {
        result.blowup = true;
        result.blowup_t = err.last_good_time();
        comments.push_back("partial output: blow-up detected at t = " +
                           format_real(err.last_good_time()));
    }

    const std::string csv_path = out_dir + "/series.csv";
    write_csv(csv_path, table, comments);
    result.csv_paths.push_back(csv_path);

    if (!result.blowup) {
        const std::string ckpt = out_dir + "/state_final.oldb";
        save_checkpoint(ckpt, state);
        result.checkpoint_path = ckpt;
    }

    // Monitors: energy functional nonincreasing, B^{-s}_{2,1} bounded by 2x initial.
    const int i_low = table.column_index("besov_low");
    const int i_hu = table.column_index("besov_high_u");
    const int i_hg = table.column_index("besov_high_gamma");
    const int i_negs = table.column_index("besov_negs");
    Real prev_lyap = -1;
    const Real negs0 = table.rows.empty() ? 0.0 : table.rows.front()[i_negs];
    for (const auto& row : table.rows) {
        const Real lyap = row[i_low] + row[i_hu] + row[i_hg];
        if (prev_lyap >= 0 && lyap > prev_lyap * (1.0 + 1e-3)) result.lyapunov_ok = false;
        prev_lyap = lyap;
        if (row[i_negs] > 2.0 * negs0) result.bounded_ok = false;
    }

    // Fits against the reference exponent; the pair norm is exact for q = 2.
    if (!result.blowup) {
        for (std::size_t a = 0; a < cfg.alphas.size(); ++a) {
            const int iu = 1 + static_cast<int>(a);
            const int ig = 1 + static_cast<int>(cfg.alphas.size() + a);
            std::vector<SeriesPoint> series;
            for (const auto& row : table.rows) {
                const Real value = cfg.q == 2.0
                                       ? std::sqrt(row[iu] * row[iu] + row[ig] * row[ig])
                                       : std::max(row[iu], row[ig]);
                series.push_back({row[0], value});
            }
            const Real theory = decay_rate_formula(cfg.n, cfg.s, cfg.alphas[a], cfg.q);
            const FitWindow window{cfg.fit_lo, std::min(cfg.fit_hi, t_end)};
            DecayFit fit =
                fit_decay_with_verdict(series, window, theory, cfg.tolerance(), theory);
            result.all_pass = result.all_pass && fit.pass;
            result.fits.push_back(
                {"pair_a" + alpha_tag(cfg.alphas[a]) + "_q" + q_tag(cfg.q), fit});
        }
        const std::string fits_path = out_dir + "/fits.csv";
        write_csv(fits_path, fits_table(result.fits));
        result.csv_paths.push_back(fits_path);
    } else {
        result.all_pass = false;
    }
    result.all_pass = result.all_pass && result.lyapunov_ok && result.bounded_ok;
    return result;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    std::filesystem::create_directories(out_dir);
    return cfg.kind == ExperimentConfig::Kind::LinearOracle ? run_linear(cfg, out_dir)
                                                            : run_box(cfg, out_dir);
}

}  // namespace oldb
