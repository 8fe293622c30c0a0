#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "literalis/signals.hpp"

namespace literalis {

/// Observed [min, max] of one signal within one normalization group.
struct Range {
  double min = 0.0;
  double max = 0.0;
  bool available = false;

  void observe(double x) noexcept {
    if (!available) {
      min = max = x;
      available = true;
    } else {
      if (x < min) min = x;
      if (x > max) max = x;
    }
  }
  void merge(const Range& o) noexcept {
    if (o.available) {
      observe(o.min);
      observe(o.max);
    }
  }
  friend bool operator==(const Range&, const Range&) = default;
};

/// Whether ranges are fitted per language pair or per (language pair, task).
enum class NormalizerScope { lp, lp_task };

std::string normalizer_key(NormalizerScope scope, std::string_view lp, Task task);

/// Per-group min-max ranges for every signal. Fitting is a commutative
/// min/max reduction, so partial normalizers from shards can be merged.
class Normalizer {
 public:
  using Ranges = std::array<Range, kSignalCount>;

  explicit Normalizer(NormalizerScope scope = NormalizerScope::lp) : scope_(scope) {}

  NormalizerScope scope() const noexcept { return scope_; }

  void observe(const std::string& key, const SignalVector& v);
  void merge(const Normalizer& other);

  const Ranges* find(const std::string& key) const;
  const std::map<std::string, Ranges>& groups() const noexcept { return groups_; }

  /// JSON sidecar keyed by group, then signal name.
  std::string to_json() const;
  static Normalizer from_json(std::string_view text);

  friend bool operator==(const Normalizer&, const Normalizer&) = default;

 private:
  NormalizerScope scope_;
  std::map<std::string, Ranges> groups_;
};

/// Fits a normalizer over (key, signals) pairs.
template <class Range_>
Normalizer fit_normalizers(const Range_& keyed_signals, NormalizerScope scope = NormalizerScope::lp) {
  Normalizer n(scope);
  for (const auto& [key, vec] : keyed_signals) n.observe(key, vec);
  return n;
}

/// (x - min) / (max - min) clamped to [0, 1]; 0.5 for a zero range.
/// Throws DomainError when min > max.
double normalize(double x, double min, double max);

/// Softmax-of-hit-rates weighting.
struct SliConfig {
  /// Hit rate per eligible signal. Signals absent here are not used.
  std::array<std::optional<double>, kSignalCount> hit_rates{};
  double temperature = 0.5;

  static SliConfig defaults();
  static SliConfig from_json(std::string_view text);
  std::string to_json() const;

  bool eligible(Signal s) const noexcept { return hit_rates[index_of(s)].has_value(); }
  /// Throws DomainError unless every hit rate is in (0, 1], the temperature is
  /// positive and at least one signal is eligible.
  void validate() const;
};

using SignalMask = std::array<bool, kSignalCount>;
using WeightMap = std::array<double, kSignalCount>;

/// w_i = exp(h_i / tau) / sum_j exp(h_j / tau) over eligible signals set in
/// `available`; zero elsewhere. Throws DomainError when none is available.
WeightMap softmax_weights(const SliConfig& cfg, const SignalMask& available);

struct SliResult {
  double value = 0.0;
  /// Signals that contributed (eligible, present in the record, fitted).
  SignalMask used{};
  /// Number of contributing signals whose raw value fell outside the fitted range.
  unsigned clamped = 0;
};

/// Weighted sum of normalized signals; weights renormalized over the signals
/// present in this record. Throws DomainError when the group was never
/// fitted or no eligible signal is present.
SliResult compute_sli(const SignalVector& vec, const Normalizer& norm, const SliConfig& cfg,
                      const std::string& key);

inline double sli(const SignalVector& vec, const Normalizer& norm, const SliConfig& cfg,
                  const std::string& key) {
  return compute_sli(vec, norm, cfg, key).value;
}

}  // namespace literalis
