#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "literalis/corpus.hpp"

namespace literalis {

/// The seven literality heuristics, in a fixed order used for array indexing.
enum class Signal : std::uint8_t { pos_sim, tree_sim, density, crossings, seg_sem, tok_sim_raw, tok_sim_pen };

inline constexpr std::size_t kSignalCount = 7;
inline constexpr std::array<Signal, kSignalCount> kAllSignals = {
    Signal::pos_sim, Signal::tree_sim,    Signal::density,    Signal::crossings,
    Signal::seg_sem, Signal::tok_sim_raw, Signal::tok_sim_pen};

constexpr std::size_t index_of(Signal s) noexcept { return static_cast<std::size_t>(s); }
std::string_view to_string(Signal s) noexcept;
std::optional<Signal> parse_signal(std::string_view name) noexcept;

/// +1 when a higher value means more literal, -1 when lower does (crossings).
constexpr int polarity(Signal s) noexcept { return s == Signal::crossings ? -1 : +1; }

/// Raw heuristic values for one record. An empty optional is a missing signal.
struct SignalVector {
  std::optional<double> pos_sim;
  std::optional<double> tree_sim;
  std::optional<double> density;
  std::optional<std::uint64_t> crossings;
  std::optional<double> seg_sem;
  std::optional<double> tok_sim_raw;
  std::optional<double> tok_sim_pen;
  /// |A| / max(|s|, |h|) exceeded 1 (many-to-many alignment) and was clamped.
  bool density_clamped = false;

  std::optional<double> get(Signal s) const noexcept;
  void set(Signal s, std::optional<double> v);

  friend bool operator==(const SignalVector&, const SignalVector&) = default;
};

/// 2 |LCS(a, b)| / (|a| + |b|). Missing when both sequences are empty.
std::optional<double> lcs_ratio(std::span<const std::string> a, std::span<const std::string> b);

/// Length of the longest common subsequence.
std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

/// Jaccard index of two label sets (duplicates ignored). Missing when both
/// are empty.
std::optional<double> jaccard(std::span<const std::string> a, std::span<const std::string> b);

/// Number of crossing link pairs after sorting by (src, hyp). O(n log n).
std::uint64_t count_crossings(std::span<const AlignmentLink> links);

/// Cosine similarity, clamped to [-1, 1]. Throws DomainError on a dimension
/// mismatch, empty input or a zero vector.
double cosine(std::span<const double> u, std::span<const double> v);

std::optional<double> pos_sim(const FeatureRecord& r);
std::optional<double> tree_sim(const FeatureRecord& r);

struct DensityValue {
  double value = 0.0;
  bool clamped = false;
};

/// |A| / max(|s|, |h|), clamped to [0, 1]. Throws DegenerateInputError when
/// either token sequence is empty.
DensityValue density(const FeatureRecord& r);
std::uint64_t crossings(const FeatureRecord& r);
std::optional<double> tok_sim_raw(const FeatureRecord& r);
/// tok_sim_raw * density; 0 for an empty alignment.
double tok_sim_pen(const FeatureRecord& r);

/// All seven signals for one record.
SignalVector score_record(const FeatureRecord& r);

}  // namespace literalis
