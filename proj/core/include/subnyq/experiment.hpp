#pragma once

// Reproducible Monte Carlo experiments over the sampling/recovery pipelines,
// plus the simulation-methodology studies (grid density, tone-grid mismatch)
// and rate-bound reports.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "subnyq/samplers.hpp"
#include "subnyq/signal_models.hpp"
#include "subnyq/spectral_recovery.hpp"

namespace subnyq {

enum class Scenario { mwc, pns, rd, fri, bounds, density };

std::string_view to_string(Scenario s);
Scenario scenario_from_string(std::string_view name);  // throws a config error

// ---------------------------------------------------------------------------
// Scenario parameters. Every field has a default; JSON keys equal the field names
// and are grouped under "model", "sampler" and "recovery".

struct MwcParams {
  // model
  int band_count = 6;
  double band_width = 50e3;
  double f_max = 0.0;            // 0: L f_p
  std::vector<double> carriers;  // empty: drawn per trial on the DFT grid
  BandContent content = BandContent::random_gaussian;
  double constant_i = 1.0;
  double constant_q = 0.0;
  // sampler
  int channels = 35;
  int chips_per_period = 195;
  double aliasing_rate = 51e3;
  double channel_rate = 51e3;
  int periods = 61;  // samples per channel T; duration = T / f_p
  MixingModel mixing = MixingModel::analog_exact;
  std::optional<std::uint64_t> pattern_seed;  // default: derived from the experiment seed
  // recovery
  int sparsity_bound = 0;  // 0: 2N
  double eig_tol = 1e-12;
  double residual_tol = 1e-8;
  FrameRoot frame_root = FrameRoot::eigen;
  double nmse_threshold = 1e-4;

  double effective_f_max() const;
  friend bool operator==(const MwcParams&, const MwcParams&) = default;
};

struct PnsParams {
  double f_l = 600e3;
  double f_u = 625e3;
  int samples_per_channel = 64;
  int phase_candidates = 0;  // 0: every grid point inside (0, T_s)
  std::optional<double> phase;
  double nmse_threshold = 1e-6;
  friend bool operator==(const PnsParams&, const PnsParams&) = default;
};

struct RdParams {
  int tone_grid_size = 512;
  int active_count = 5;
  double mismatch = 0.0;  // tones at k + mismatch
  int rate = 128;
  std::optional<std::uint64_t> chip_seed;
  double residual_tol = 0.0;
  double nmse_threshold = 1e-8;
  friend bool operator==(const RdParams&, const RdParams&) = default;
};

enum class KernelKind { lowpass, sos };

struct FriParams {
  int pulse_count = 3;
  double period = 1.0;
  double min_separation = 0.5;  // minimum circular gap between delays, in units of period / L
  std::string pulse = "dirac";
  std::vector<double> pulse_params;
  KernelKind kernel = KernelKind::lowpass;
  int coefficient_count = 0;  // 0: 2L + 1
  double delay_tolerance = 1e-6;      // relative to the period
  double amplitude_tolerance = 1e-6;  // relative
  friend bool operator==(const FriParams&, const FriParams&) = default;
};

struct BoundsParams {
  int band_count = 6;
  double band_width = 50e6;
  double f_max = 5e9;
  int channels = 35;
  double channel_rate = 51e6;
  friend bool operator==(const BoundsParams&, const BoundsParams&) = default;
};

struct DensityParams {
  int chips_per_period = 9;
  std::vector<int> densities{1, 2, 5, 10, 50, 100};
  std::optional<std::uint64_t> pattern_seed;
  friend bool operator==(const DensityParams&, const DensityParams&) = default;
};

using ScenarioParams = std::variant<MwcParams, PnsParams, RdParams, FriParams, BoundsParams, DensityParams>;

struct OutputPaths {
  std::string dir;  // empty: nothing written
  std::string trials_csv = "trials.csv";
  std::string timings_csv = "timings.csv";
  std::string summary_json = "summary.json";
  friend bool operator==(const OutputPaths&, const OutputPaths&) = default;
};

struct ExperimentConfig {
  int trials = 1;
  std::uint64_t seed = 0;
  double grid_density_factor = 10.0;
  OutputPaths output;
  ScenarioParams params = MwcParams{};

  Scenario scenario() const;
  void validate() const;  // throws Error(Stage::config) naming the field path
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Default parameters for a scenario.
ExperimentConfig default_config(Scenario s);

/// Strict parse: unknown keys and type mismatches raise config errors carrying the field path.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Every field written out, so parse(serialize(c)) == c.
nlohmann::json serialize_config(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Results

struct TrialResult {
  int trial = 0;
  std::uint64_t seed = 0;
  std::optional<bool> support_exact;
  std::optional<double> support_jaccard;
  std::optional<int> true_support_size;
  std::optional<int> recovered_support_size;
  std::optional<double> nmse;
  std::optional<double> max_delay_error;      // FRI, fraction of the period
  std::optional<double> max_amplitude_error;  // FRI, relative
  std::optional<std::string> failure;         // stage/kind tag or metric:<name>
  std::vector<std::pair<std::string, double>> timings;  // stage name, seconds

  bool success() const { return !failure.has_value(); }
};

struct ExperimentSummary {
  Scenario scenario = Scenario::mwc;
  int trials = 0;
  int successes = 0;
  std::optional<double> median_nmse;
  std::optional<double> max_nmse;
  double wall_time = 0.0;
  std::map<std::string, int> failures;
  std::vector<TrialResult> results;
  nlohmann::json details;  // scenario-specific extras (derived grid, bounds, density table)

  double success_rate() const { return trials ? static_cast<double>(successes) / trials : 0.0; }
  nlohmann::json to_json() const;
};

/// Runs all trials; writes trials/timings CSV and summary JSON when cfg.output.dir is set.
ExperimentSummary run_experiment(const ExperimentConfig& cfg);

/// CSV header and rows of the per-trial table (no timings, byte-identical across runs).
std::string trials_csv(const std::vector<TrialResult>& results);
std::string timings_csv(const std::vector<TrialResult>& results);

// ---------------------------------------------------------------------------
// Methodology studies

struct DensityRow {
  int density = 1;            // r, quadrature nodes per chip
  double max_error = 0.0;     // Gauss-Legendre, max_l |c_il - closed form|
  double midpoint_error = 0.0;  // plain r-point Riemann (cell-midpoint) rule, for comparison
};

/// Sign-waveform Fourier coefficients by r-node quadrature per chip versus the closed form.
std::vector<DensityRow> density_convergence(const std::vector<int>& pattern, int chips_per_period,
                                            const std::vector<int>& densities);

/// r-node Gauss-Legendre rule on [0, 1].
void gauss_legendre(int r, std::vector<double>& nodes, std::vector<double>& weights);

struct MismatchOptions {
  int tone_grid_size = 512;
  int rate = 128;
  int active_count = 5;
  int trials = 20;
  std::uint64_t seed = 0;
};

struct MismatchRow {
  double delta = 0.0;
  int trials = 0;
  double median_nmse = 0.0;
  double max_nmse = 0.0;
  double support_success_rate = 0.0;
};

/// RD recovery of tones at k + delta with a dictionary built for integer k; NMSE of the
/// integrate-and-dump vector reconstructed from the recovered coefficients.
std::vector<MismatchRow> mismatch_sweep(const std::vector<double>& deltas, const MismatchOptions& opts = {});

struct BoundsReport {
  double nyquist = 0.0;
  double occupancy = 0.0;  // N B / f_nyq
  double landau = 0.0;
  double blind = 0.0;
  double sampler_rate = 0.0;
  bool sampler_meets_blind = false;
  bool reducing = false;  // blind < nyquist
  double compute_load = 0.0;  // 2 N m f_s
  nlohmann::json to_json() const;
};

BoundsReport bounds_report(const MultibandSpec& spec, int channels, double channel_rate);

}  // namespace subnyq
