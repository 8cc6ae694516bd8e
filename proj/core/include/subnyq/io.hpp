#pragma once

// CSV / JSON / binary dumps of signals, measurements and estimates.
// Floats are written as %.16e (17 significant digits) so output is reproducible.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "subnyq/fri_recovery.hpp"
#include "subnyq/signal_models.hpp"
#include "subnyq/spectral_recovery.hpp"
#include "subnyq/types.hpp"

namespace subnyq::io {

/// Fixed 17-significant-digit scientific formatting.
std::string format_double(double v);

/// Header line `grid_rate,duration,real_valued`, one value line, then `re,im` rows.
void write_signal_csv(const std::filesystem::path& path, const DenseSignal& x);
DenseSignal read_signal_csv(const std::filesystem::path& path);

/// Little-endian: "SNQ1", uint64 length, float64 grid_rate, uint8 real flag, then re/im pairs.
void write_signal_binary(const std::filesystem::path& path, const DenseSignal& x);
DenseSignal read_signal_binary(const std::filesystem::path& path);

/// One row per time index n; columns ch<i>_re, ch<i>_im per channel (rows of y).
void write_channels_csv(const std::filesystem::path& path, const CMatrix& y);
void write_channels_csv(const std::filesystem::path& path, const std::vector<ComplexSeq>& channels);

/// One row per recovered slice: slice index l, then re,im pairs of z_l[n].
void write_slices_csv(const std::filesystem::path& path, const SliceRecovery& rec);

/// One row per matrix row; re,im pairs per column.
void write_matrix_csv(const std::filesystem::path& path, const CMatrix& m);

nlohmann::json fri_spec_to_json(const FriSpec& spec);
/// Rebuilds the pulse from its name and parameters (dirac, gaussian, raised_cosine).
FriSpec fri_spec_from_json(const nlohmann::json& j);

void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

}  // namespace subnyq::io
