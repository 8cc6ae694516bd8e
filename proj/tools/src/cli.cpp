#include "subnyq_cli/cli.hpp"

#include <CLI11.hpp>

#include <sstream>

#include "subnyq/error.hpp"
#include "subnyq/experiment.hpp"
#include "subnyq/io.hpp"
#include "subnyq/samplers.hpp"

namespace subnyq::cli {
namespace {

constexpr const char* kColumnsHelp = R"(Output files (simulate --out DIR):
  trials.csv   trial,seed,support_exact,support_jaccard,true_support_size,
               recovered_support_size,nmse,max_delay_error,max_amplitude_error,failure
               Blank cells mean "not applicable":
                 mwc  support_* columns are slice sets, nmse is resynthesis NMSE
                 pns  support_* blank, nmse is reconstruction NMSE on the dense grid
                 rd   support_* are tone slots, nmse is coefficient NMSE
                      (dump-vector NMSE when model.mismatch > 0)
                 fri  support_* blank, max_delay_error is a fraction of the period,
                      max_amplitude_error is relative, nmse is amplitude NMSE
               failure is empty on success, else stage/kind or metric:<name>
  timings.csv  trial,stage,seconds (wall time, not reproducible)
  summary.json success rate, median/max NMSE, failure histogram, details
density CSV:   density,max_error,midpoint_error
mismatch CSV:  delta,trials,median_nmse,max_nmse,support_success_rate

Exit codes: 0 ok, 1 config error, 2 runtime/recovery error, 3 I/O error.)";

int exit_code(const Error& e)
{
  switch (e.kind()) {
    case ErrorKind::config:
    case ErrorKind::invalid_argument: return config_error;
    case ErrorKind::numerical: return runtime_error;
    case ErrorKind::io: return io_error;
  }
  return runtime_error;
}

void emit(const std::string& text, const std::string& path, std::ostream& out)
{
  if (path.empty()) out << text;
  else io::write_text(path, text);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Sub-Nyquist sampling workbench"};
  app.footer(kColumnsHelp);
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo experiment");
  std::string scenario;
  std::string config_path;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  simulate->add_option("scenario", scenario, "mwc | pns | rd | fri | bounds | density")->required();
  simulate->add_option("--config", config_path, "JSON experiment config (defaults when omitted)");
  simulate->add_option("--trials", trials, "Override the trial count");
  simulate->add_option("--seed", seed, "Override the experiment seed");
  simulate->add_option("--out", out_dir, "Directory for trials.csv, timings.csv, summary.json");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Landau / blind / Nyquist rates for a band model");
  std::string bounds_config;
  bounds->add_option("--config", bounds_config, "JSON config of a bounds or mwc scenario")->required();

  // density
  auto* density = app.add_subcommand("density", "Sign-waveform coefficient error vs quadrature density");
  std::uint64_t pattern_seed = 0;
  int chips = 9;
  std::vector<int> densities{1, 2, 5, 10, 50, 100};
  std::string density_out;
  density->add_option("--pattern-seed", pattern_seed, "Seed of the random sign pattern");
  density->add_option("--chips", chips, "Chips per period M (odd)");
  density->add_option("--densities", densities, "Quadrature nodes per chip, increasing")->delimiter(',');
  density->add_option("--out", density_out, "Write the CSV here instead of stdout");

  // mismatch
  auto* mismatch = app.add_subcommand("mismatch", "Random demodulator error vs tone-grid mismatch");
  std::vector<double> deltas{0.0, 0.1, 0.25, 0.5};
  MismatchOptions mopts;
  std::string mismatch_out;
  mismatch->add_option("--deltas", deltas, "Offsets of the tones from the integer grid, in [0, 0.5]")->delimiter(',');
  mismatch->add_option("--tones", mopts.tone_grid_size, "Tone grid size W");
  mismatch->add_option("--rate", mopts.rate, "Integrate-and-dump rate R");
  mismatch->add_option("--active", mopts.active_count, "Number of tones K");
  mismatch->add_option("--trials", mopts.trials, "Trials per offset");
  mismatch->add_option("--seed", mopts.seed, "Experiment seed");
  mismatch->add_option("--out", mismatch_out, "Write the CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : config_error;
  }

  try {
    if (simulate->parsed()) {
      ExperimentConfig cfg = config_path.empty() ? default_config(scenario_from_string(scenario)) : load_config(config_path);
      if (to_string(cfg.scenario()) != scenario)
        fail(Stage::config, ErrorKind::config,
             "scenario: config describes '" + std::string(to_string(cfg.scenario())) + "', not '" + scenario + "'");
      if (trials) cfg.trials = *trials;
      if (seed) cfg.seed = *seed;
      if (out_dir) cfg.output.dir = *out_dir;
      cfg.validate();
      const ExperimentSummary summary = run_experiment(cfg);
      out << summary.to_json().dump(2) << '\n';
    } else if (bounds->parsed()) {
      const ExperimentConfig cfg = load_config(bounds_config);
      MultibandSpec spec;
      int channels = 0;
      double rate = 0.0;
      if (const auto* p = std::get_if<BoundsParams>(&cfg.params)) {
        spec.band_count = p->band_count;
        spec.band_width = p->band_width;
        spec.f_max = p->f_max;
        channels = p->channels;
        rate = p->channel_rate;
      } else if (const auto* p = std::get_if<MwcParams>(&cfg.params)) {
        spec.band_count = p->band_count;
        spec.band_width = p->band_width;
        spec.f_max = p->effective_f_max();
        channels = p->channels;
        rate = p->channel_rate;
      } else {
        fail(Stage::config, ErrorKind::config, "scenario: bounds needs a bounds or mwc config");
      }
      out << bounds_report(spec, channels, rate).to_json().dump(2) << '\n';
    } else if (density->parsed()) {
      const auto pattern = random_sign_patterns(1, chips, pattern_seed)[0];
      std::ostringstream csv;
      csv << "density,max_error,midpoint_error\n";
      for (const auto& row : density_convergence(pattern, chips, densities))
        csv << row.density << ',' << io::format_double(row.max_error) << ',' << io::format_double(row.midpoint_error)
            << '\n';
      emit(csv.str(), density_out, out);
    } else if (mismatch->parsed()) {
      std::ostringstream csv;
      csv << "delta,trials,median_nmse,max_nmse,support_success_rate\n";
      for (const auto& row : mismatch_sweep(deltas, mopts))
        csv << io::format_double(row.delta) << ',' << row.trials << ',' << io::format_double(row.median_nmse) << ','
            << io::format_double(row.max_nmse) << ',' << io::format_double(row.support_success_rate) << '\n';
      emit(csv.str(), mismatch_out, out);
    }
  } catch (const Error& e) {
    err << "error [" << e.tag() << "]: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return runtime_error;
  }
  return ok;
}

}  // namespace subnyq::cli
