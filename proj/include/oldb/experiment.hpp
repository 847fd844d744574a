#ifndef OLDB_EXPERIMENT_HPP
#define OLDB_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oldb/config.hpp"
#include "oldb/fitting.hpp"

namespace oldb {

/// One decay experiment: either the exact linearized evolution on R^n
/// (kind = linear-oracle) or a nonlinear periodic-box run (kind =
/// nonlinear-box), sampled at log-spaced times and fitted on a window.
struct ExperimentConfig {
    enum class Kind { LinearOracle, NonlinearBox };

    Kind kind = Kind::LinearOracle;
    int n = 2;
    Real s = 0.75;
    Real p = 2.0;
    Real q = 2.0;
    std::vector<Real> alphas{0.0};
    std::uint64_t seed = 1;

    int N = 256;
    Real L = 32.0 * pi;
    Real dealias = 2.0 / 3.0;

    Real delta = 0.05;       // theta = s - n/2 + delta
    Real r_cut = 1.0;
    Real amplitude = 1.0;
    Real gamma0 = 0.0;       // initial Gamma amplitude relative to u

    Real b = 0.0;
    Real dt = 0.05;
    Real cfl = 0.4;
    int order = 3;
    int j0 = 0;
    bool half_coupling = true;
    Real smallness_threshold = 0.1;

    Real t_start = 1.0;
    Real t_end = 1e4;
    int samples_per_decade = 16;

    Real fit_lo = 100.0;
    Real fit_hi = 1e4;
    std::optional<Real> fit_tolerance;  // defaults per kind: 0.05 / 0.15

    static ExperimentConfig from_config(const Config& cfg);
    void validate() const;  // throws naming the violated constraint

    Real theta() const { return s - n / 2.0 + delta; }
    Real box_guard() const { return (L / (2.0 * pi)) * (L / (2.0 * pi)) / 4.0; }
    Real tolerance() const {
        return fit_tolerance ? *fit_tolerance : (kind == Kind::LinearOracle ? 0.05 : 0.15);
    }
};

struct LabeledFit {
    std::string label;
    DecayFit fit;
};

struct ExperimentResult {
    std::vector<std::string> csv_paths;
    std::vector<LabeledFit> fits;
    bool all_pass = true;

    // nonlinear-box extras
    Real x0 = 0;                // smallness functional of the data
    bool small_data = true;     // x0 <= threshold
    bool lyapunov_ok = true;    // energy functional nonincreasing (1e-3 rel)
    bool bounded_ok = true;     // B^{-s}_{2,1} monitor <= 2x initial
    bool blowup = false;
    Real blowup_t = 0;
    std::string checkpoint_path;
};

std::vector<Real> log_spaced_times(Real t_start, Real t_end, int per_decade);

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

// CSV plumbing shared by the harness and the fit subcommand. Values are
// written with %.17g so reruns are byte-identical; '#'-prefixed lines are
// comments (used to flag partial output after a blow-up).
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Real>> rows;

    int column_index(const std::string& name) const;  // -1 when absent
};

void write_csv(const std::string& path, const CsvTable& table,
               const std::vector<std::string>& trailing_comments = {});
CsvTable read_csv(const std::string& path);

std::string format_real(Real v);  // %.17g

}  // namespace oldb

#endif
