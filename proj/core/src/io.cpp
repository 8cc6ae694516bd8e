#include "subnyq/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "subnyq/error.hpp"

namespace subnyq::io {
namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out)
{
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) fail(Stage::io, ErrorKind::io, "cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in)
{
  std::ifstream in(path, mode);
  if (!in) fail(Stage::io, ErrorKind::io, "cannot open " + path.string() + " for reading");
  return in;
}

void finish(std::ofstream& out, const std::filesystem::path& path)
{
  out.flush();
  if (!out) fail(Stage::io, ErrorKind::io, "write to " + path.string() + " failed");
}

double parse_double(const std::string& s, const std::filesystem::path& path)
{
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  fail(Stage::io, ErrorKind::io, "malformed number '" + s + "' in " + path.string());
}

std::vector<std::string> split(const std::string& line)
{
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

void write_pairs(std::ostream& out, const Complex& v)
{
  out << format_double(v.real()) << ',' << format_double(v.imag());
}

template <class T>
void put(std::ostream& out, T v)
{
  static_assert(std::endian::native == std::endian::little, "binary dumps assume a little-endian host");
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in, const std::filesystem::path& path)
{
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) fail(Stage::io, ErrorKind::io, "truncated binary file " + path.string());
  return v;
}

}  // namespace

std::string format_double(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

void write_signal_csv(const std::filesystem::path& path, const DenseSignal& x)
{
  auto out = open_out(path);
  out << "grid_rate,duration,real_valued\n";
  out << format_double(x.grid_rate()) << ',' << format_double(x.duration()) << ',' << (x.real_valued() ? 1 : 0) << '\n';
  out << "re,im\n";
  for (const auto& v : x.samples()) {
    write_pairs(out, v);
    out << '\n';
  }
  finish(out, path);
}

DenseSignal read_signal_csv(const std::filesystem::path& path)
{
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != "grid_rate,duration,real_valued")
    fail(Stage::io, ErrorKind::io, "missing signal header in " + path.string());
  std::getline(in, line);
  const auto meta = split(line);
  if (meta.size() != 3) fail(Stage::io, ErrorKind::io, "malformed signal metadata in " + path.string());
  const double rate = parse_double(meta[0], path);
  const bool real = meta[2] == "1";
  std::getline(in, line);
  ComplexSeq samples;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 2) fail(Stage::io, ErrorKind::io, "malformed sample row in " + path.string());
    samples.emplace_back(parse_double(cells[0], path), parse_double(cells[1], path));
  }
  return DenseSignal(std::move(samples), rate, real);
}

void write_signal_binary(const std::filesystem::path& path, const DenseSignal& x)
{
  auto out = open_out(path, std::ios::out | std::ios::binary);
  out.write("SNQ1", 4);
  put<std::uint64_t>(out, x.size());
  put<double>(out, x.grid_rate());
  put<std::uint8_t>(out, x.real_valued() ? 1 : 0);
  for (const auto& v : x.samples()) {
    put<double>(out, v.real());
    put<double>(out, v.imag());
  }
  finish(out, path);
}

DenseSignal read_signal_binary(const std::filesystem::path& path)
{
  auto in = open_in(path, std::ios::in | std::ios::binary);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "SNQ1", 4) != 0) fail(Stage::io, ErrorKind::io, "bad magic in " + path.string());
  const auto n = get<std::uint64_t>(in, path);
  const auto rate = get<double>(in, path);
  const auto real = get<std::uint8_t>(in, path);
  ComplexSeq samples(n);
  for (auto& v : samples) {
    const double re = get<double>(in, path);
    const double im = get<double>(in, path);
    v = Complex(re, im);
  }
  return DenseSignal(std::move(samples), rate, real != 0);
}

void write_channels_csv(const std::filesystem::path& path, const CMatrix& y)
{
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < y.rows(); ++i) out << (i ? "," : "") << "ch" << i << "_re,ch" << i << "_im";
  out << '\n';
  for (Eigen::Index n = 0; n < y.cols(); ++n) {
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      if (i) out << ',';
      write_pairs(out, y(i, n));
    }
    out << '\n';
  }
  finish(out, path);
}

void write_channels_csv(const std::filesystem::path& path, const std::vector<ComplexSeq>& channels)
{
  std::size_t len = channels.empty() ? 0 : channels.front().size();
  for (const auto& c : channels)
    require(c.size() == len, Stage::io, "channels must have equal length");
  CMatrix y(static_cast<Eigen::Index>(channels.size()), static_cast<Eigen::Index>(len));
  for (std::size_t i = 0; i < channels.size(); ++i)
    for (std::size_t n = 0; n < len; ++n) y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n)) = channels[i][n];
  write_channels_csv(path, y);
}

void write_slices_csv(const std::filesystem::path& path, const SliceRecovery& rec)
{
  auto out = open_out(path);
  out << "slice";
  for (Eigen::Index n = 0; n < rec.length(); ++n) out << ",re" << n << ",im" << n;
  out << '\n';
  const auto slices = rec.slice_indices();
  for (std::size_t i = 0; i < slices.size(); ++i) {
    out << slices[i];
    for (Eigen::Index n = 0; n < rec.length(); ++n) {
      out << ',';
      write_pairs(out, rec.sequences(static_cast<Eigen::Index>(i), n));
    }
    out << '\n';
  }
  finish(out, path);
}

void write_matrix_csv(const std::filesystem::path& path, const CMatrix& m)
{
  auto out = open_out(path);
  for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << "c" << j << "_re,c" << j << "_im";
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      write_pairs(out, m(i, j));
    }
    out << '\n';
  }
  finish(out, path);
}

nlohmann::json fri_spec_to_json(const FriSpec& spec)
{
  nlohmann::json j;
  j["period"] = spec.period;
  j["pulse_count"] = spec.pulse_count();
  j["delays"] = spec.delays;
  auto amps = nlohmann::json::array();
  for (const auto& a : spec.amplitudes) amps.push_back({a.real(), a.imag()});
  j["amplitudes"] = amps;
  j["pulse"] = {{"name", spec.pulse.name()}, {"params", spec.pulse.params()}};
  return j;
}

FriSpec fri_spec_from_json(const nlohmann::json& j)
{
  try {
    FriSpec spec;
    spec.period = j.at("period").get<double>();
    spec.delays = j.at("delays").get<std::vector<double>>();
    for (const auto& a : j.at("amplitudes")) spec.amplitudes.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
    if (j.contains("pulse_count") && j["pulse_count"].get<int>() != spec.pulse_count())
      fail(Stage::io, ErrorKind::io, "pulse_count disagrees with the delay list");
    if (j.contains("pulse")) {
      const auto name = j["pulse"].at("name").get<std::string>();
      const auto params = j["pulse"].value("params", std::vector<double>{});
      if (name == "dirac") {
        spec.pulse = PulseSpectrum::dirac();
      } else if (name == "gaussian" && params.size() == 1) {
        spec.pulse = PulseSpectrum::gaussian(params[0]);
      } else if (name == "raised_cosine" && params.size() == 2) {
        spec.pulse = PulseSpectrum::raised_cosine(params[0], params[1]);
      } else {
        fail(Stage::io, ErrorKind::io, "unknown pulse '" + name + "'");
      }
    }
    return spec;
  } catch (const nlohmann::json::exception& e) {
    fail(Stage::io, ErrorKind::io, std::string("malformed FRI spec: ") + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& content)
{
  auto out = open_out(path);
  out << content;
  finish(out, path);
}

std::string read_text(const std::filesystem::path& path)
{
  auto in = open_in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace subnyq::io
