#include "subnyq/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "subnyq/dft.hpp"
#include "subnyq/error.hpp"
#include "subnyq/fri_recovery.hpp"
#include "subnyq/io.hpp"
#include "subnyq/rng.hpp"
#include "subnyq/sparse_recovery.hpp"

namespace subnyq {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& msg)
{
  fail(Stage::config, ErrorKind::config, path + ": " + msg);
}

void check(bool cond, const std::string& path, const std::string& msg)
{
  if (!cond) config_error(path, msg);
}

// ---------------------------------------------------------------------------
// Enum <-> string tables

template <class E>
struct EnumName {
  E value;
  const char* name;
};

constexpr EnumName<Scenario> kScenarioNames[] = {{Scenario::mwc, "mwc"}, {Scenario::pns, "pns"},
                                                 {Scenario::rd, "rd"},   {Scenario::fri, "fri"},
                                                 {Scenario::bounds, "bounds"}, {Scenario::density, "density"}};
constexpr EnumName<BandContent> kContentNames[] = {
    {BandContent::random_gaussian, "random_gaussian"}, {BandContent::constant, "constant"}, {BandContent::zero, "zero"}};
constexpr EnumName<MixingModel> kMixingNames[] = {{MixingModel::analog_exact, "analog_exact"},
                                                  {MixingModel::grid_pointwise, "grid_pointwise"}};
constexpr EnumName<FrameRoot> kFrameNames[] = {{FrameRoot::eigen, "eigen"},
                                               {FrameRoot::pivoted_cholesky, "pivoted_cholesky"}};
constexpr EnumName<KernelKind> kKernelNames[] = {{KernelKind::lowpass, "lowpass"}, {KernelKind::sos, "sos"}};

template <class E, std::size_t N>
const char* enum_name(const EnumName<E> (&table)[N], E v)
{
  for (const auto& e : table)
    if (e.value == v) return e.name;
  return "?";
}

template <class E, std::size_t N>
std::optional<E> enum_value(const EnumName<E> (&table)[N], std::string_view name)
{
  for (const auto& e : table)
    if (name == e.name) return e.value;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Strict JSON object reader

class Fields {
public:
  Fields(const json* j, std::string path) : j_(j), path_(std::move(path))
  {
    if (j_ && !j_->is_null()) check(j_->is_object(), path_, "expected an object");
    if (j_ && j_->is_null()) j_ = nullptr;
  }

  template <class T>
  void get(const char* key, T& out)
  {
    seen_.insert(key);
    if (!j_ || !j_->contains(key)) return;
    read((*j_)[key], child(key), out);
  }

  template <class E, std::size_t N>
  void get_enum(const char* key, E& out, const EnumName<E> (&table)[N])
  {
    std::string name = enum_name(table, out);
    get(key, name);
    const auto v = enum_value(table, name);
    if (!v) config_error(child(key), "unknown value '" + name + "'");
    out = *v;
  }

  void mark(const char* key) { seen_.insert(key); }

  void finish() const
  {
    if (!j_) return;
    for (const auto& [key, value] : j_->items())
      if (!seen_.count(key)) config_error(child(key), "unknown field");
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
  static void read(const json& v, const std::string& path, int& out)
  {
    check(v.is_number_integer(), path, "expected an integer");
    const auto x = v.get<std::int64_t>();
    check(x >= std::numeric_limits<int>::min() && x <= std::numeric_limits<int>::max(), path, "integer out of range");
    out = static_cast<int>(x);
  }
  static void read(const json& v, const std::string& path, std::uint64_t& out)
  {
    check(v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0), path,
          "expected a non-negative integer");
    out = v.get<std::uint64_t>();
  }
  static void read(const json& v, const std::string& path, double& out)
  {
    check(v.is_number(), path, "expected a number");
    out = v.get<double>();
    check(std::isfinite(out), path, "expected a finite number");
  }
  static void read(const json& v, const std::string& path, std::string& out)
  {
    check(v.is_string(), path, "expected a string");
    out = v.get<std::string>();
  }
  template <class T>
  static void read(const json& v, const std::string& path, std::vector<T>& out)
  {
    check(v.is_array(), path, "expected an array");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      T x{};
      read(v[i], path + "[" + std::to_string(i) + "]", x);
      out.push_back(x);
    }
  }
  template <class T>
  static void read(const json& v, const std::string& path, std::optional<T>& out)
  {
    if (v.is_null()) {
      out.reset();
      return;
    }
    T x{};
    read(v, path, x);
    out = x;
  }

  const json* j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class T>
json opt_json(const std::optional<T>& v)
{
  return v ? json(*v) : json(nullptr);
}

const json* section(const json& j, const char* key)
{
  return j.contains(key) ? &j[key] : nullptr;
}

// ---------------------------------------------------------------------------
// Per-scenario parse / serialize / validate

void parse_params(const json& j, MwcParams& p)
{
  Fields model(section(j, "model"), "model");
  model.get("band_count", p.band_count);
  model.get("band_width", p.band_width);
  model.get("f_max", p.f_max);
  model.get("carriers", p.carriers);
  model.get_enum("content", p.content, kContentNames);
  model.get("constant_i", p.constant_i);
  model.get("constant_q", p.constant_q);
  model.finish();
  Fields sampler(section(j, "sampler"), "sampler");
  sampler.get("channels", p.channels);
  sampler.get("chips_per_period", p.chips_per_period);
  sampler.get("aliasing_rate", p.aliasing_rate);
  sampler.get("channel_rate", p.channel_rate);
  sampler.get("periods", p.periods);
  sampler.get_enum("mixing", p.mixing, kMixingNames);
  sampler.get("pattern_seed", p.pattern_seed);
  sampler.finish();
  Fields recovery(section(j, "recovery"), "recovery");
  recovery.get("sparsity_bound", p.sparsity_bound);
  recovery.get("eig_tol", p.eig_tol);
  recovery.get("residual_tol", p.residual_tol);
  recovery.get_enum("frame_root", p.frame_root, kFrameNames);
  recovery.get("nmse_threshold", p.nmse_threshold);
  recovery.finish();
}

void to_json_params(json& j, const MwcParams& p)
{
  j["model"] = {{"band_count", p.band_count}, {"band_width", p.band_width}, {"f_max", p.f_max},
                {"carriers", p.carriers},     {"content", enum_name(kContentNames, p.content)},
                {"constant_i", p.constant_i}, {"constant_q", p.constant_q}};
  j["sampler"] = {{"channels", p.channels},
                  {"chips_per_period", p.chips_per_period},
                  {"aliasing_rate", p.aliasing_rate},
                  {"channel_rate", p.channel_rate},
                  {"periods", p.periods},
                  {"mixing", enum_name(kMixingNames, p.mixing)},
                  {"pattern_seed", opt_json(p.pattern_seed)}};
  j["recovery"] = {{"sparsity_bound", p.sparsity_bound},
                   {"eig_tol", p.eig_tol},
                   {"residual_tol", p.residual_tol},
                   {"frame_root", enum_name(kFrameNames, p.frame_root)},
                   {"nmse_threshold", p.nmse_threshold}};
}

void validate_params(const MwcParams& p)
{
  check(p.band_count >= 2 && p.band_count % 2 == 0, "model.band_count", "must be a positive even number");
  check(p.band_width > 0.0, "model.band_width", "must be positive");
  check(p.f_max >= 0.0, "model.f_max", "must be non-negative (0 selects L f_p)");
  check(p.carriers.empty() || p.carriers.size() == static_cast<std::size_t>(p.band_count / 2), "model.carriers",
        "must be empty or hold band_count/2 carriers");
  check(p.channels >= 1, "sampler.channels", "must be >= 1");
  check(p.chips_per_period >= 1 && p.chips_per_period % 2 == 1, "sampler.chips_per_period", "must be odd");
  check(p.aliasing_rate > 0.0, "sampler.aliasing_rate", "must be positive");
  check(std::abs(p.channel_rate - p.aliasing_rate) <= 1e-12 * p.aliasing_rate, "sampler.channel_rate",
        "must equal aliasing_rate (basic configuration)");
  check(p.periods >= 1 && p.periods % 2 == 1, "sampler.periods", "must be odd (no half-bin tie at the lowpass edge)");
  const double lfp = p.aliasing_rate * ((p.chips_per_period - 1) / 2);
  check(p.effective_f_max() <= lfp * (1.0 + 1e-12), "model.f_max", "must not exceed L f_p");
  check(p.sparsity_bound >= 0 && p.sparsity_bound <= p.channels, "recovery.sparsity_bound",
        "must lie in [0, channels]");
  check(p.eig_tol >= 0.0, "recovery.eig_tol", "must be non-negative");
  check(p.residual_tol >= 0.0, "recovery.residual_tol", "must be non-negative");
  check(p.nmse_threshold > 0.0, "recovery.nmse_threshold", "must be positive");
}

void parse_params(const json& j, PnsParams& p)
{
  Fields model(section(j, "model"), "model");
  model.get("f_l", p.f_l);
  model.get("f_u", p.f_u);
  model.finish();
  Fields sampler(section(j, "sampler"), "sampler");
  sampler.get("samples_per_channel", p.samples_per_channel);
  sampler.get("phase_candidates", p.phase_candidates);
  sampler.get("phase", p.phase);
  sampler.finish();
  Fields recovery(section(j, "recovery"), "recovery");
  recovery.get("nmse_threshold", p.nmse_threshold);
  recovery.finish();
}

void to_json_params(json& j, const PnsParams& p)
{
  j["model"] = {{"f_l", p.f_l}, {"f_u", p.f_u}};
  j["sampler"] = {{"samples_per_channel", p.samples_per_channel},
                  {"phase_candidates", p.phase_candidates},
                  {"phase", opt_json(p.phase)}};
  j["recovery"] = {{"nmse_threshold", p.nmse_threshold}};
}

void validate_params(const PnsParams& p)
{
  check(p.f_l > 0.0, "model.f_l", "must be positive");
  check(p.f_u > p.f_l, "model.f_u", "must exceed f_l");
  check(p.samples_per_channel >= 1, "sampler.samples_per_channel", "must be >= 1");
  check(p.phase_candidates >= 0, "sampler.phase_candidates", "must be non-negative");
  check(!p.phase || (*p.phase > 0.0 && *p.phase < 1.0 / (p.f_u - p.f_l)), "sampler.phase", "must lie in (0, T_s)");
  check(p.nmse_threshold > 0.0, "recovery.nmse_threshold", "must be positive");
}

void parse_params(const json& j, RdParams& p)
{
  Fields model(section(j, "model"), "model");
  model.get("tone_grid_size", p.tone_grid_size);
  model.get("active_count", p.active_count);
  model.get("mismatch", p.mismatch);
  model.finish();
  Fields sampler(section(j, "sampler"), "sampler");
  sampler.get("rate", p.rate);
  sampler.get("chip_seed", p.chip_seed);
  sampler.finish();
  Fields recovery(section(j, "recovery"), "recovery");
  recovery.get("residual_tol", p.residual_tol);
  recovery.get("nmse_threshold", p.nmse_threshold);
  recovery.finish();
}

void to_json_params(json& j, const RdParams& p)
{
  j["model"] = {{"tone_grid_size", p.tone_grid_size}, {"active_count", p.active_count}, {"mismatch", p.mismatch}};
  j["sampler"] = {{"rate", p.rate}, {"chip_seed", opt_json(p.chip_seed)}};
  j["recovery"] = {{"residual_tol", p.residual_tol}, {"nmse_threshold", p.nmse_threshold}};
}

void validate_params(const RdParams& p)
{
  check(p.tone_grid_size >= 2, "model.tone_grid_size", "must be >= 2");
  check(p.active_count >= 1 && p.active_count <= p.rate, "model.active_count", "must lie in [1, sampler.rate]");
  check(p.mismatch >= 0.0 && p.mismatch <= 0.5, "model.mismatch", "must lie in [0, 0.5]");
  check(p.rate >= 1 && p.tone_grid_size % p.rate == 0, "sampler.rate", "must divide tone_grid_size");
  check(p.residual_tol >= 0.0, "recovery.residual_tol", "must be non-negative");
  check(p.nmse_threshold > 0.0, "recovery.nmse_threshold", "must be positive");
}

void parse_params(const json& j, FriParams& p)
{
  Fields model(section(j, "model"), "model");
  model.get("pulse_count", p.pulse_count);
  model.get("period", p.period);
  model.get("min_separation", p.min_separation);
  model.get("pulse", p.pulse);
  model.get("pulse_params", p.pulse_params);
  model.finish();
  Fields sampler(section(j, "sampler"), "sampler");
  sampler.get_enum("kernel", p.kernel, kKernelNames);
  sampler.get("coefficient_count", p.coefficient_count);
  sampler.finish();
  Fields recovery(section(j, "recovery"), "recovery");
  recovery.get("delay_tolerance", p.delay_tolerance);
  recovery.get("amplitude_tolerance", p.amplitude_tolerance);
  recovery.finish();
}

void to_json_params(json& j, const FriParams& p)
{
  j["model"] = {{"pulse_count", p.pulse_count},
                {"period", p.period},
                {"min_separation", p.min_separation},
                {"pulse", p.pulse},
                {"pulse_params", p.pulse_params}};
  j["sampler"] = {{"kernel", enum_name(kKernelNames, p.kernel)}, {"coefficient_count", p.coefficient_count}};
  j["recovery"] = {{"delay_tolerance", p.delay_tolerance}, {"amplitude_tolerance", p.amplitude_tolerance}};
}

PulseSpectrum make_pulse(const std::string& name, const std::vector<double>& params)
{
  if (name == "dirac" && params.empty()) return PulseSpectrum::dirac();
  if (name == "gaussian" && params.size() == 1) return PulseSpectrum::gaussian(params[0]);
  if (name == "raised_cosine" && params.size() == 2) return PulseSpectrum::raised_cosine(params[0], params[1]);
  config_error("model.pulse", "unknown pulse '" + name + "' or wrong parameter count");
}

void validate_params(const FriParams& p)
{
  check(p.pulse_count >= 1, "model.pulse_count", "must be >= 1");
  check(p.period > 0.0, "model.period", "must be positive");
  check(p.min_separation >= 0.0 && p.min_separation < 1.0, "model.min_separation", "must lie in [0, 1)");
  try {
    make_pulse(p.pulse, p.pulse_params);
  } catch (const Error& e) {
    if (e.stage() == Stage::config) throw;
    config_error("model.pulse_params", e.what());
  }
  check(p.coefficient_count == 0 || p.coefficient_count >= 2 * p.pulse_count + 1, "sampler.coefficient_count",
        "must be 0 or >= 2 pulse_count + 1");
  check(p.delay_tolerance > 0.0, "recovery.delay_tolerance", "must be positive");
  check(p.amplitude_tolerance > 0.0, "recovery.amplitude_tolerance", "must be positive");
}

void parse_params(const json& j, BoundsParams& p)
{
  Fields model(section(j, "model"), "model");
  model.get("band_count", p.band_count);
  model.get("band_width", p.band_width);
  model.get("f_max", p.f_max);
  model.finish();
  Fields sampler(section(j, "sampler"), "sampler");
  sampler.get("channels", p.channels);
  sampler.get("channel_rate", p.channel_rate);
  sampler.finish();
  Fields recovery(section(j, "recovery"), "recovery");
  recovery.finish();
}

void to_json_params(json& j, const BoundsParams& p)
{
  j["model"] = {{"band_count", p.band_count}, {"band_width", p.band_width}, {"f_max", p.f_max}};
  j["sampler"] = {{"channels", p.channels}, {"channel_rate", p.channel_rate}};
  j["recovery"] = json::object();
}

void validate_params(const BoundsParams& p)
{
  check(p.band_count >= 2 && p.band_count % 2 == 0, "model.band_count", "must be a positive even number");
  check(p.band_width > 0.0, "model.band_width", "must be positive");
  check(p.f_max > 0.0, "model.f_max", "must be positive");
  check(p.band_count * p.band_width < 2.0 * p.f_max, "model.band_width", "bands cover the whole Nyquist range");
  check(p.channels >= 0, "sampler.channels", "must be non-negative");
  check(p.channel_rate >= 0.0, "sampler.channel_rate", "must be non-negative");
}

void parse_params(const json& j, DensityParams& p)
{
  Fields model(section(j, "model"), "model");
  model.get("chips_per_period", p.chips_per_period);
  model.finish();
  Fields sampler(section(j, "sampler"), "sampler");
  sampler.get("densities", p.densities);
  sampler.get("pattern_seed", p.pattern_seed);
  sampler.finish();
  Fields recovery(section(j, "recovery"), "recovery");
  recovery.finish();
}

void to_json_params(json& j, const DensityParams& p)
{
  j["model"] = {{"chips_per_period", p.chips_per_period}};
  j["sampler"] = {{"densities", p.densities}, {"pattern_seed", opt_json(p.pattern_seed)}};
  j["recovery"] = json::object();
}

void validate_params(const DensityParams& p)
{
  check(p.chips_per_period >= 1 && p.chips_per_period % 2 == 1, "model.chips_per_period", "must be odd");
  check(!p.densities.empty(), "sampler.densities", "must not be empty");
  for (std::size_t i = 0; i < p.densities.size(); ++i) {
    check(p.densities[i] >= 1, "sampler.densities[" + std::to_string(i) + "]", "must be >= 1");
    if (i) check(p.densities[i] > p.densities[i - 1], "sampler.densities", "must be increasing");
  }
}

// ---------------------------------------------------------------------------
// Trial helpers

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

class StageTimer {
public:
  explicit StageTimer(TrialResult& r) : r_(r), t0_(Clock::now()) {}
  void lap(const char* stage)
  {
    r_.timings.emplace_back(stage, seconds_since(t0_));
    t0_ = Clock::now();
  }

private:
  TrialResult& r_;
  Clock::time_point t0_;
};

void set_support_metrics(TrialResult& r, const SupportSet& truth, const SupportSet& found)
{
  r.support_exact = truth == found;
  r.support_jaccard = truth.jaccard(found);
  r.true_support_size = static_cast<int>(truth.size());
  r.recovered_support_size = static_cast<int>(found.size());
}

std::vector<double> random_carriers(const MwcParams& p, double duration, Rng& rng)
{
  const double f_max = p.effective_f_max();
  const long lo = static_cast<long>(std::ceil(p.band_width * duration / 2.0 - 1e-9));
  const long hi = static_cast<long>(std::floor((f_max - p.band_width / 2.0) * duration + 1e-9));
  const long gap = static_cast<long>(std::ceil(p.band_width * duration - 1e-9));
  const int count = p.band_count / 2;
  require(hi >= lo, Stage::signal, "band does not fit below f_max");
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::vector<long> picked;
    for (int i = 0; i < count; ++i) picked.push_back(rng.uniform_int(lo, hi));
    std::sort(picked.begin(), picked.end());
    bool ok = true;
    for (std::size_t i = 1; i < picked.size(); ++i) ok = ok && picked[i] - picked[i - 1] >= gap;
    if (!ok) continue;
    std::vector<double> carriers;
    for (long q : picked) carriers.push_back(static_cast<double>(q) / duration);
    return carriers;
  }
  fail(Stage::signal, ErrorKind::invalid_argument, "could not place non-overlapping bands below f_max");
}

double median(std::vector<double> v)
{
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// --- MWC -------------------------------------------------------------------

struct MwcSetup {
  MwcConfig cfg;
  CMatrix c;
  double grid_rate = 0.0;
  double duration = 0.0;
  int sparsity_bound = 0;
  std::optional<MwcSimulator> sim;
};

MwcSetup mwc_setup(const ExperimentConfig& ec, const MwcParams& p)
{
  MwcSetup s;
  s.cfg.channels = p.channels;
  s.cfg.chips_per_period = p.chips_per_period;
  s.cfg.aliasing_rate = p.aliasing_rate;
  s.cfg.channel_rate = p.channel_rate;
  s.cfg.sign_patterns = random_sign_patterns(p.channels, p.chips_per_period,
                                             p.pattern_seed.value_or(stream_seed(ec.seed, "patterns")));
  s.c = mwc_matrix(s.cfg);
  const double chip_rate = p.chips_per_period * p.aliasing_rate;
  const double per_chip = std::max(1.0, std::ceil(ec.grid_density_factor * 2.0 * p.effective_f_max() / chip_rate - 1e-9));
  s.grid_rate = per_chip * chip_rate;
  s.duration = p.periods / p.aliasing_rate;
  s.sparsity_bound = p.sparsity_bound ? p.sparsity_bound : std::min(p.channels, 2 * p.band_count);
  s.sim.emplace(s.cfg, s.grid_rate, s.duration, p.mixing);
  return s;
}

void mwc_trial(const MwcParams& p, const MwcSetup& s, std::uint64_t seed, TrialResult& r)
{
  StageTimer timer(r);
  MultibandSpec spec;
  spec.band_count = p.band_count;
  spec.band_width = p.band_width;
  spec.f_max = p.effective_f_max();
  spec.content = p.content;
  spec.constant_i = p.constant_i;
  spec.constant_q = p.constant_q;
  if (p.carriers.empty()) {
    Rng rng(stream_seed(seed, "carriers"));
    spec.carriers = random_carriers(p, s.duration, rng);
  } else {
    spec.carriers = p.carriers;
  }
  const DenseSignal x = gen_multiband(spec, s.grid_rate, s.duration, stream_seed(seed, "content"));
  timer.lap("signal");
  const CMatrix y = s.sim->sample(x);
  timer.lap("sample");
  CtfOptions opts;
  opts.eig_tol = p.eig_tol;
  opts.residual_tol = p.residual_tol;
  opts.real_input = true;
  opts.frame_root = p.frame_root;
  const SupportSet found = ctf(y, s.c, s.sparsity_bound, opts);
  timer.lap("ctf");
  const SliceRecovery rec = recover_slices(y, s.c, found);
  timer.lap("recover");
  const DenseSignal x_hat = mwc_resynthesize(rec, p.aliasing_rate, s.grid_rate, s.duration);
  timer.lap("resynthesize");

  set_support_metrics(r, true_slice_support(spec, s.cfg, s.duration), found);
  r.nmse = nmse(x, x_hat);
  if (!*r.support_exact) r.failure = "metric:support";
  else if (!(*r.nmse <= p.nmse_threshold)) r.failure = "metric:nmse";
}

// --- PNS -------------------------------------------------------------------

struct PnsSetup {
  double grid_rate = 0.0;
  double duration = 0.0;
  double phase = 0.0;
  PnsConfig cfg;
};

PnsSetup pns_setup(const ExperimentConfig& ec, const PnsParams& p)
{
  PnsSetup s;
  const double b = p.f_u - p.f_l;
  const double per_interval = std::ceil(ec.grid_density_factor * 2.0 * p.f_u / b - 1e-9);
  s.grid_rate = per_interval * b;
  s.duration = p.samples_per_channel / b;
  const int candidates = p.phase_candidates ? p.phase_candidates : static_cast<int>(per_interval) - 1;
  require(candidates >= 1, Stage::config, "grid too coarse to place a PNS offset");
  s.phase = p.phase ? *p.phase : select_pns_phase(p.f_l, p.f_u, candidates);
  s.cfg.interval = 1.0 / b;
  s.cfg.offsets = {0.0, s.phase};
  return s;
}

void pns_trial(const PnsParams& p, const PnsSetup& s, std::uint64_t seed, TrialResult& r)
{
  StageTimer timer(r);
  const DenseSignal x = gen_bandpass(p.f_l, p.f_u, s.grid_rate, s.duration, stream_seed(seed, "content"));
  timer.lap("signal");
  const auto ys = pns_sample(x, s.cfg);
  timer.lap("sample");
  const DenseSignal x_hat = pns_reconstruct(ys[0], ys[1], p.f_l, p.f_u, s.phase, s.grid_rate);
  timer.lap("reconstruct");
  r.nmse = nmse(x, x_hat);
  if (!(*r.nmse <= p.nmse_threshold)) r.failure = "metric:nmse";
}

// --- RD --------------------------------------------------------------------

struct RdSetup {
  RdConfig cfg;
  CMatrix tones;    // F
  CMatrix sensing;  // A = Phi F
  Eigen::MatrixXcd phi;
};

RdSetup rd_setup(int w, int rate, std::uint64_t chip_seed)
{
  RdSetup s;
  s.cfg.tone_grid_size = w;
  s.cfg.rate = rate;
  s.cfg.chips = random_chips(w, chip_seed);
  s.phi = rd_mixing_matrix(s.cfg).cast<Complex>();
  s.tones = rd_tone_matrix(w);
  s.sensing = s.phi * s.tones;
  return s;
}

struct RdOutcome {
  bool support_exact = false;
  SupportSet truth;
  SupportSet found;
  double coefficient_nmse = 0.0;
  double dump_nmse = 0.0;
};

RdOutcome rd_run(const RdSetup& s, int active_count, double delta, std::uint64_t seed, double residual_tol)
{
  const int w = s.cfg.tone_grid_size;
  const HarmonicSpec spec = random_harmonic(w, active_count, stream_seed(seed, "tones"));
  std::vector<double> freqs;
  for (int k : spec.active_indices) freqs.push_back(k + delta);
  const CVector f = rd_dumps(freqs, spec.coefficients, w);
  const CVector y = s.phi * f;
  const SparseSolution sol = omp(y, s.sensing, active_count, residual_tol);

  RdOutcome out;
  for (int k : spec.active_indices) out.truth.insert(static_cast<int>(dft::bin_index(k, static_cast<std::size_t>(w))));
  out.found = sol.support;
  out.support_exact = out.truth == out.found;
  const CVector z_hat = sol.dense(w);
  const CVector z = harmonic_coefficient_vector(spec);
  const ComplexSeq zv(z.data(), z.data() + w), zh(z_hat.data(), z_hat.data() + w);
  out.coefficient_nmse = nmse(zv, zh);
  const CVector f_hat = s.tones * z_hat;
  const ComplexSeq fv(f.data(), f.data() + w), fh(f_hat.data(), f_hat.data() + w);
  out.dump_nmse = nmse(fv, fh);
  return out;
}

void rd_trial(const RdParams& p, const RdSetup& s, std::uint64_t seed, TrialResult& r)
{
  StageTimer timer(r);
  const RdOutcome o = rd_run(s, p.active_count, p.mismatch, seed, p.residual_tol);
  timer.lap("sample_and_recover");
  set_support_metrics(r, o.truth, o.found);
  if (p.mismatch == 0.0) {
    r.nmse = o.coefficient_nmse;
    if (!o.support_exact) r.failure = "metric:support";
  } else {
    r.nmse = o.dump_nmse;  // no integer-grid truth to compare coefficients against
  }
  if (!r.failure && !(*r.nmse <= p.nmse_threshold)) r.failure = "metric:nmse";
}

// --- FRI -------------------------------------------------------------------

FriSpec random_fri_spec(const FriParams& p, std::uint64_t seed)
{
  Rng rng(seed);
  const int l = p.pulse_count;
  const double tau = p.period;
  const double gap = p.min_separation * tau / l;
  // Uniform spacing on the circle conditioned on all gaps >= gap.
  std::vector<double> u(static_cast<std::size_t>(l));
  for (auto& v : u) v = rng.uniform(0.0, tau - l * gap);
  std::sort(u.begin(), u.end());
  const double shift = rng.uniform(0.0, tau);
  FriSpec spec;
  spec.period = tau;
  for (int i = 0; i < l; ++i) {
    double t = std::fmod(u[static_cast<std::size_t>(i)] + i * gap + shift, tau);
    if (t >= tau) t -= tau;
    spec.delays.push_back(t);
  }
  std::sort(spec.delays.begin(), spec.delays.end());
  for (int i = 0; i < l; ++i) spec.amplitudes.emplace_back(rng.sign() * rng.uniform(0.5, 1.5), 0.0);
  spec.pulse = make_pulse(p.pulse, p.pulse_params);
  return spec;
}

SamplingKernel make_kernel(const FriParams& p)
{
  const int m = p.coefficient_count ? p.coefficient_count : 2 * p.pulse_count + 1;
  const int k_min = -((m - 1) / 2);
  if (p.kernel == KernelKind::lowpass) return LowpassKernel{k_min, k_min + m - 1, p.period};
  return SosKernel{k_min, ComplexSeq(static_cast<std::size_t>(m), Complex(1.0, 0.0)), p.period};
}

/// Errors after matching estimated to planted pulses. Both lists are sorted by delay, so
/// the best assignment by circular distance is one of the cyclic rotations.
std::pair<double, double> fri_errors(const FriSpec& truth, const FriSpec& est)
{
  const std::size_t l = truth.delays.size();
  if (est.delays.size() != l) return {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  const double tau = truth.period;
  double best_delay = std::numeric_limits<double>::infinity();
  double best_amp = std::numeric_limits<double>::infinity();
  for (std::size_t rot = 0; rot < l; ++rot) {
    double d = 0.0, a = 0.0;
    for (std::size_t i = 0; i < l; ++i) {
      const std::size_t j = (i + rot) % l;
      const double diff = std::remainder(est.delays[j] - truth.delays[i], tau);
      d = std::max(d, std::abs(diff) / tau);
      a = std::max(a, std::abs(est.amplitudes[j] - truth.amplitudes[i]) / std::abs(truth.amplitudes[i]));
    }
    if (d < best_delay) {
      best_delay = d;
      best_amp = a;
    }
  }
  return {best_delay, best_amp};
}

void fri_trial(const FriParams& p, double density, std::uint64_t seed, TrialResult& r)
{
  StageTimer timer(r);
  const SamplingKernel kernel = make_kernel(p);
  const int m = kernel_size(kernel);
  const int k_top = std::max(std::abs(kernel_k_min(kernel)), std::abs(kernel_k_min(kernel) + m - 1));
  const double per_period = std::max(std::ceil(density * m), static_cast<double>(2 * k_top + 2));
  const FriSpec spec = random_fri_spec(p, stream_seed(seed, "pulses"));
  const DenseSignal x = gen_fri_periodic(spec, per_period / p.period, 1);
  timer.lap("signal");
  const ComplexSeq c = kernel_sample(x, kernel);
  timer.lap("sample");
  const FriSpec est = fri_recover(c, kernel, p.pulse_count, spec.pulse);
  timer.lap("recover");
  const auto [delay_err, amp_err] = fri_errors(spec, est);
  r.max_delay_error = delay_err;
  r.max_amplitude_error = amp_err;
  // Amplitude NMSE under the same matching.
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < spec.amplitudes.size(); ++i) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < est.delays.size(); ++j) {
      const double d = std::abs(std::remainder(est.delays[j] - spec.delays[i], spec.period));
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    num += std::norm(est.amplitudes[best] - spec.amplitudes[i]);
    den += std::norm(spec.amplitudes[i]);
  }
  r.nmse = num / den;
  if (!(delay_err <= p.delay_tolerance)) r.failure = "metric:delay";
  else if (!(amp_err <= p.amplitude_tolerance)) r.failure = "metric:amplitude";
}

std::string opt_cell(const std::optional<double>& v)
{
  return v ? io::format_double(*v) : std::string();
}

}  // namespace

// ---------------------------------------------------------------------------
// Public API

std::string_view to_string(Scenario s) { return enum_name(kScenarioNames, s); }

Scenario scenario_from_string(std::string_view name)
{
  const auto v = enum_value(kScenarioNames, name);
  if (!v) config_error("scenario", "unknown scenario '" + std::string(name) + "'");
  return *v;
}

double MwcParams::effective_f_max() const
{
  return f_max > 0.0 ? f_max : aliasing_rate * ((chips_per_period - 1) / 2);
}

Scenario ExperimentConfig::scenario() const { return static_cast<Scenario>(params.index()); }

void ExperimentConfig::validate() const
{
  check(trials >= 1, "trials", "must be >= 1");
  check(grid_density_factor >= 1.0, "grid_density_factor", "must be >= 1");
  std::visit([](const auto& p) { validate_params(p); }, params);
}

ExperimentConfig default_config(Scenario s)
{
  ExperimentConfig cfg;
  switch (s) {
    case Scenario::mwc: cfg.params = MwcParams{}; break;
    case Scenario::pns: cfg.params = PnsParams{}; break;
    case Scenario::rd: cfg.params = RdParams{}; break;
    case Scenario::fri: cfg.params = FriParams{}; break;
    case Scenario::bounds: cfg.params = BoundsParams{}; break;
    case Scenario::density: cfg.params = DensityParams{}; break;
  }
  return cfg;
}

ExperimentConfig parse_config(const json& j)
{
  check(j.is_object(), "<root>", "config must be a JSON object");
  Fields top(&j, "");
  std::string scenario_name;
  top.get("scenario", scenario_name);
  check(!scenario_name.empty(), "scenario", "missing required field");
  ExperimentConfig cfg = default_config(scenario_from_string(scenario_name));
  top.get("trials", cfg.trials);
  top.get("seed", cfg.seed);
  top.get("grid_density_factor", cfg.grid_density_factor);
  top.mark("model");
  top.mark("sampler");
  top.mark("recovery");
  top.mark("output");
  Fields out(section(j, "output"), "output");
  out.get("dir", cfg.output.dir);
  out.get("trials_csv", cfg.output.trials_csv);
  out.get("timings_csv", cfg.output.timings_csv);
  out.get("summary_json", cfg.output.summary_json);
  out.finish();
  top.finish();
  std::visit([&](auto& p) { parse_params(j, p); }, cfg.params);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
  const std::string text = io::read_text(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(Stage::config, ErrorKind::config, path.string() + ": invalid JSON: " + e.what());
  }
  return parse_config(j);
}

json serialize_config(const ExperimentConfig& cfg)
{
  json j;
  j["scenario"] = std::string(to_string(cfg.scenario()));
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["grid_density_factor"] = cfg.grid_density_factor;
  std::visit([&](const auto& p) { to_json_params(j, p); }, cfg.params);
  j["output"] = {{"dir", cfg.output.dir},
                 {"trials_csv", cfg.output.trials_csv},
                 {"timings_csv", cfg.output.timings_csv},
                 {"summary_json", cfg.output.summary_json}};
  return j;
}

json ExperimentSummary::to_json() const
{
  json j;
  j["scenario"] = std::string(subnyq::to_string(scenario));
  j["trials"] = trials;
  j["successes"] = successes;
  j["success_rate"] = success_rate();
  j["median_nmse"] = median_nmse ? json(*median_nmse) : json(nullptr);
  j["max_nmse"] = max_nmse ? json(*max_nmse) : json(nullptr);
  j["wall_time_s"] = wall_time;
  j["failures"] = failures;
  j["details"] = details;
  return j;
}

std::string trials_csv(const std::vector<TrialResult>& results)
{
  std::ostringstream out;
  out << "trial,seed,support_exact,support_jaccard,true_support_size,recovered_support_size,nmse,"
         "max_delay_error,max_amplitude_error,failure\n";
  for (const auto& r : results) {
    out << r.trial << ',' << r.seed << ',';
    if (r.support_exact) out << (*r.support_exact ? 1 : 0);
    out << ',' << opt_cell(r.support_jaccard) << ',';
    if (r.true_support_size) out << *r.true_support_size;
    out << ',';
    if (r.recovered_support_size) out << *r.recovered_support_size;
    out << ',' << opt_cell(r.nmse) << ',' << opt_cell(r.max_delay_error) << ',' << opt_cell(r.max_amplitude_error)
        << ',' << r.failure.value_or("") << '\n';
  }
  return out.str();
}

std::string timings_csv(const std::vector<TrialResult>& results)
{
  std::ostringstream out;
  out << "trial,stage,seconds\n";
  for (const auto& r : results)
    for (const auto& [stage, t] : r.timings) out << r.trial << ',' << stage << ',' << io::format_double(t) << '\n';
  return out.str();
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg)
{
  cfg.validate();
  const auto t0 = Clock::now();
  ExperimentSummary summary;
  summary.scenario = cfg.scenario();

  // Single-shot scenarios.
  if (const auto* p = std::get_if<BoundsParams>(&cfg.params)) {
    MultibandSpec spec;
    spec.band_count = p->band_count;
    spec.band_width = p->band_width;
    spec.f_max = p->f_max;
    const BoundsReport rep = bounds_report(spec, p->channels, p->channel_rate);
    summary.details = rep.to_json();
    TrialResult r;
    summary.results.push_back(r);
  } else if (const auto* p = std::get_if<DensityParams>(&cfg.params)) {
    const auto pattern = random_sign_patterns(1, p->chips_per_period,
                                              p->pattern_seed.value_or(stream_seed(cfg.seed, "patterns")))[0];
    const auto rows = density_convergence(pattern, p->chips_per_period, p->densities);
    json table = json::array();
    bool monotone = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      table.push_back({{"density", rows[i].density},
                       {"max_error", rows[i].max_error},
                       {"midpoint_error", rows[i].midpoint_error}});
      if (i && rows[i].max_error > rows[i - 1].max_error + 1e-12) monotone = false;
    }
    summary.details = {{"pattern", pattern}, {"rows", table}, {"non_increasing", monotone}};
    TrialResult r;
    if (!monotone) r.failure = "metric:monotonicity";
    summary.results.push_back(r);
  } else {
    std::optional<MwcSetup> mwc;
    std::optional<PnsSetup> pns;
    std::optional<RdSetup> rd;
    if (const auto* p = std::get_if<MwcParams>(&cfg.params)) {
      mwc = mwc_setup(cfg, *p);
      summary.details = {{"grid_rate", mwc->grid_rate},
                         {"duration", mwc->duration},
                         {"sparsity_bound", mwc->sparsity_bound},
                         {"f_max", p->effective_f_max()},
                         {"coherence", mutual_coherence(mwc->c)}};
    } else if (const auto* p = std::get_if<PnsParams>(&cfg.params)) {
      pns = pns_setup(cfg, *p);
      summary.details = {{"grid_rate", pns->grid_rate},
                         {"duration", pns->duration},
                         {"phase", pns->phase},
                         {"phase_margin", pns_phase_margin(pns->phase, p->f_l, p->f_u)},
                         {"beta_values", pns_beta_values(p->f_l, p->f_u)}};
    } else if (const auto* p = std::get_if<RdParams>(&cfg.params)) {
      rd = rd_setup(p->tone_grid_size, p->rate, p->chip_seed.value_or(stream_seed(cfg.seed, "chips")));
    }

    for (int i = 0; i < cfg.trials; ++i) {
      TrialResult r;
      r.trial = i;
      r.seed = trial_seed(cfg.seed, static_cast<std::uint64_t>(i));
      try {
        std::visit(
            [&](const auto& p) {
              using P = std::decay_t<decltype(p)>;
              if constexpr (std::is_same_v<P, MwcParams>) mwc_trial(p, *mwc, r.seed, r);
              else if constexpr (std::is_same_v<P, PnsParams>) pns_trial(p, *pns, r.seed, r);
              else if constexpr (std::is_same_v<P, RdParams>) rd_trial(p, *rd, r.seed, r);
              else if constexpr (std::is_same_v<P, FriParams>) fri_trial(p, cfg.grid_density_factor, r.seed, r);
            },
            cfg.params);
      } catch (const Error& e) {
        r.failure = e.tag();
      } catch (const std::exception&) {
        r.failure = "runtime";
      }
      summary.results.push_back(std::move(r));
    }
  }

  std::vector<double> nmses;
  for (const auto& r : summary.results) {
    ++summary.trials;
    if (r.success()) ++summary.successes;
    else ++summary.failures[*r.failure];
    if (r.nmse && std::isfinite(*r.nmse)) nmses.push_back(*r.nmse);
  }
  if (!nmses.empty()) {
    summary.median_nmse = median(nmses);
    summary.max_nmse = *std::max_element(nmses.begin(), nmses.end());
  }
  summary.wall_time = seconds_since(t0);

  if (!cfg.output.dir.empty()) {
    const std::filesystem::path dir(cfg.output.dir);
    io::write_text(dir / cfg.output.trials_csv, trials_csv(summary.results));
    io::write_text(dir / cfg.output.timings_csv, timings_csv(summary.results));
    io::write_text(dir / cfg.output.summary_json, summary.to_json().dump(2) + "\n");
  }
  return summary;
}

// ---------------------------------------------------------------------------
// Methodology studies

void gauss_legendre(int r, std::vector<double>& nodes, std::vector<double>& weights)
{
  require(r >= 1, Stage::sampler, "quadrature order must be >= 1");
  // Golub-Welsch: eigenpairs of the symmetric Jacobi matrix of the Legendre recurrence.
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(r, r);
  for (int i = 1; i < r; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    jac(i, i - 1) = b;
    jac(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  nodes.resize(static_cast<std::size_t>(r));
  weights.resize(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    nodes[static_cast<std::size_t>(i)] = 0.5 * (es.eigenvalues()(i) + 1.0);
    weights[static_cast<std::size_t>(i)] = v0 * v0;  // 2 v0^2 on [-1, 1], halved for [0, 1]
  }
}

std::vector<DensityRow> density_convergence(const std::vector<int>& pattern, int chips_per_period,
                                            const std::vector<int>& densities)
{
  MwcConfig cfg;
  cfg.channels = 1;
  cfg.chips_per_period = chips_per_period;
  cfg.aliasing_rate = 1.0;
  cfg.channel_rate = 1.0;
  cfg.sign_patterns = {pattern};
  const CMatrix closed = mwc_matrix(cfg);
  const int half = cfg.harmonic_limit();
  const int m = chips_per_period;

  auto quadrature_error = [&](const std::vector<double>& nodes, const std::vector<double>& weights) {
    double worst = 0.0;
    for (int l = -half; l <= half; ++l) {
      Complex sum{};
      for (int k = 0; k < m; ++k)
        for (std::size_t i = 0; i < nodes.size(); ++i)
          sum += static_cast<double>(pattern[static_cast<std::size_t>(k)]) * weights[i] *
                 expj(-kTwoPi * l * (k + nodes[i]) / m);
      worst = std::max(worst, std::abs(sum / static_cast<double>(m) - closed(0, l + half)));
    }
    return worst;
  };

  std::vector<DensityRow> rows;
  for (std::size_t i = 0; i < densities.size(); ++i) {
    const int r = densities[i];
    require(r >= 1, Stage::sampler, "density must be >= 1 point per chip");
    if (i) require(r > densities[i - 1], Stage::sampler, "densities must be increasing");
    DensityRow row;
    row.density = r;
    std::vector<double> nodes, weights;
    gauss_legendre(r, nodes, weights);
    row.max_error = quadrature_error(nodes, weights);
    for (int j = 0; j < r; ++j) {
      nodes[static_cast<std::size_t>(j)] = (j + 0.5) / r;
      weights[static_cast<std::size_t>(j)] = 1.0 / r;
    }
    row.midpoint_error = quadrature_error(nodes, weights);
    rows.push_back(row);
  }
  return rows;
}

std::vector<MismatchRow> mismatch_sweep(const std::vector<double>& deltas, const MismatchOptions& opts)
{
  require(opts.trials >= 1, Stage::sampler, "mismatch sweep needs at least one trial");
  require(opts.active_count >= 1 && opts.active_count <= opts.rate, Stage::sampler, "need 1 <= K <= R");
  const RdSetup s = rd_setup(opts.tone_grid_size, opts.rate, stream_seed(opts.seed, "chips"));
  std::vector<MismatchRow> rows;
  for (double delta : deltas) {
    require(delta >= 0.0 && delta <= 0.5, Stage::sampler, "mismatch offsets must lie in [0, 0.5]");
    MismatchRow row;
    row.delta = delta;
    row.trials = opts.trials;
    std::vector<double> errs;
    int exact = 0;
    for (int i = 0; i < opts.trials; ++i) {
      const RdOutcome o = rd_run(s, opts.active_count, delta, trial_seed(opts.seed, static_cast<std::uint64_t>(i)), 0.0);
      errs.push_back(o.dump_nmse);
      exact += o.support_exact ? 1 : 0;
    }
    row.median_nmse = median(errs);
    row.max_nmse = *std::max_element(errs.begin(), errs.end());
    row.support_success_rate = static_cast<double>(exact) / opts.trials;
    rows.push_back(row);
  }
  return rows;
}

json BoundsReport::to_json() const
{
  return {{"nyquist", nyquist},         {"occupancy", occupancy},
          {"landau", landau},           {"blind", blind},
          {"sampler_rate", sampler_rate}, {"sampler_meets_blind", sampler_meets_blind},
          {"reducing", reducing},       {"compute_load", compute_load}};
}

BoundsReport bounds_report(const MultibandSpec& spec, int channels, double channel_rate)
{
  spec.validate();
  BoundsReport r;
  r.nyquist = spec.nyquist_rate();
  r.occupancy = spec.occupied_measure() / r.nyquist;
  r.landau = landau_min_rate(spec.occupied_measure());
  r.blind = blind_min_rate(r.occupancy, r.nyquist);
  r.sampler_rate = channels * channel_rate;
  r.sampler_meets_blind = r.sampler_rate >= r.blind * (1.0 - 1e-12);
  r.reducing = r.blind < r.nyquist;
  r.compute_load = mwc_compute_load(spec.band_count, channels, channel_rate);
  return r;
}

}  // namespace subnyq
