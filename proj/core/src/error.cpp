#include "subnyq/error.hpp"

namespace subnyq {

std::string_view to_string(Stage stage)
{
  switch (stage) {
    case Stage::signal: return "signal";
    case Stage::sampler: return "sampler";
    case Stage::sparse: return "sparse";
    case Stage::spectral: return "spectral";
    case Stage::fri_coefficients: return "fri_coefficients";
    case Stage::fri_annihilation: return "fri_annihilation";
    case Stage::fri_roots: return "fri_roots";
    case Stage::fri_amplitudes: return "fri_amplitudes";
    case Stage::config: return "config";
    case Stage::io: return "io";
  }
  return "unknown";
}

std::string_view to_string(ErrorKind kind)
{
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

Error::Error(Stage stage, ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(stage)) + ": " + message), stage_(stage), kind_(kind)
{
}

std::string Error::tag() const
{
  return std::string(to_string(stage_)) + "/" + std::string(to_string(kind_));
}

void fail(Stage stage, ErrorKind kind, const std::string& message)
{
  throw Error(stage, kind, message);
}

}  // namespace subnyq
