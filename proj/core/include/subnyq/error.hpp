#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace subnyq {

/// Pipeline stage that raised an error. Used as the failure tag in experiment output.
enum class Stage {
  signal,
  sampler,
  sparse,
  spectral,
  fri_coefficients,
  fri_annihilation,
  fri_roots,
  fri_amplitudes,
  config,
  io,
};

enum class ErrorKind {
  invalid_argument,  // precondition or type invariant violated
  numerical,         // rank deficiency, degenerate configuration
  config,            // experiment config schema violation
  io,
};

std::string_view to_string(Stage stage);
std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(Stage stage, ErrorKind kind, const std::string& message);

  Stage stage() const noexcept { return stage_; }
  ErrorKind kind() const noexcept { return kind_; }

  /// "stage/kind", e.g. "fri_annihilation/numerical".
  std::string tag() const;

private:
  Stage stage_;
  ErrorKind kind_;
};

[[noreturn]] void fail(Stage stage, ErrorKind kind, const std::string& message);

inline void require(bool condition, Stage stage, const std::string& message)
{
  if (!condition) fail(stage, ErrorKind::invalid_argument, message);
}

}  // namespace subnyq
