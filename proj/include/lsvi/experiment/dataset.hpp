#pragma once

#include "lsvi/energy.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>

namespace lsvi::experiment {

/// Numeric CSV, one observation per line, last column the response. Blank
/// lines and lines starting with '#' are skipped. Logistic responses may be
/// given as {0,1} or {-1,+1}; both are mapped to {-1,+1}.
///
/// Throws ParseError (1-based row/column) for non-numeric cells and
/// DomainError for responses outside the allowed label sets.
GlmDataset load_dataset(const std::filesystem::path& path, GlmKind kind, bool standardize);
GlmDataset parse_dataset(std::istream& in, GlmKind kind, bool standardize);

/// Centre every feature column and scale it to unit (population) variance.
/// Constant columns are only centred.
void standardize_features(GlmDataset& data);

/// Standard-normal design; linear: y = X z + N(0,1) noise; logistic:
/// P(y = +1) = sigmoid(x^T z). The true z is standard normal. Deterministic in seed.
GlmDataset synth_dataset(GlmKind kind, int N, int d, std::uint64_t seed);

void write_dataset(const GlmDataset& data, std::ostream& out);
void write_dataset(const GlmDataset& data, const std::filesystem::path& path);

/// FNV-1a over the bit patterns of X (row-major) then y.
std::uint64_t checksum(const GlmDataset& data);

std::string_view to_string(GlmKind kind);
GlmKind parse_kind(std::string_view name);

}  // namespace lsvi::experiment
