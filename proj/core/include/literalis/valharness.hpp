#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "literalis/corpus.hpp"
#include "literalis/signals.hpp"
#include "literalis/stats.hpp"

namespace literalis {

/// A source sentence with a literal and an idiomatic rendering. The feature
/// records, when present, are the adapter's annotations of each candidate.
struct TripletInstance {
  std::string id;
  std::string source;
  std::string literal;
  std::string idiomatic;
  std::string tgt_lang;
  std::optional<FeatureRecord> literal_features;
  std::optional<FeatureRecord> idiomatic_features;
};

/// Percentage of literal segments in a mixture variant.
inline constexpr std::array<int, 4> kMixtureLevels = {100, 66, 33, 0};

/// Three concatenated triplets with four target variants. variants[v] holds
/// kMixtureLevels[v]; variant v has exactly v idiomatic segments.
struct MixtureInstance {
  std::string id;
  std::string source;
  std::string tgt_lang;
  std::array<std::string, 4> variants;
  std::array<std::string, 3> base_ids;
  /// Segment slots in the order they are flipped to idiomatic.
  std::array<int, 3> flip_order{0, 1, 2};
  std::uint64_t seed = 0;
  std::array<std::optional<FeatureRecord>, 4> features;
};

enum class HitOutcome { hit, miss, tie };
std::string_view to_string(HitOutcome o) noexcept;

/// hit iff polarity * literal > polarity * idiomatic; tie iff equal.
HitOutcome hit_outcome(double v_literal, double v_idiomatic, int polarity) noexcept;

struct HitCounts {
  std::size_t hit = 0;
  std::size_t miss = 0;
  std::size_t tie = 0;
  /// Triplets where the signal was missing for either candidate.
  std::size_t excluded = 0;

  std::size_t scored() const noexcept { return hit + miss + tie; }
  double hit_rate() const noexcept { return scored() ? double(hit) / double(scored()) : 0.0; }
  double miss_rate() const noexcept { return scored() ? double(miss) / double(scored()) : 0.0; }
  double tie_rate() const noexcept { return scored() ? double(tie) / double(scored()) : 0.0; }
  void add(const HitCounts& o) noexcept {
    hit += o.hit, miss += o.miss, tie += o.tie, excluded += o.excluded;
  }
};

using SignalHitCounts = std::array<HitCounts, kSignalCount>;

struct HitRateTable {
  SignalHitCounts overall{};
  std::map<std::string, SignalHitCounts> by_lang;
};

struct ScoredTriplet {
  std::string tgt_lang;
  SignalVector literal;
  SignalVector idiomatic;
};

/// Throws DomainError on empty input.
HitRateTable hit_rates(std::span<const ScoredTriplet> triplets);

/// Scores the embedded feature records first. Throws DomainError when a
/// triplet lacks features.
HitRateTable hit_rates(std::span<const TripletInstance> triplets);

/// Concatenates three triplets (single-space joiner) into a mixture, flipping
/// slots to idiomatic in `flip_order`.
MixtureInstance make_mixture(const std::array<const TripletInstance*, 3>& parts, const std::array<int, 3>& flip_order);

/// n mixtures. Instance k uses substream k of `seed`: it draws one triplet
/// uniformly among languages with at least three triplets, two further
/// distinct triplets of the same language, and a random flip order. Throws
/// DomainError when n < 1 or no language has three triplets.
std::vector<MixtureInstance> augment(std::span<const TripletInstance> base, std::size_t n, std::uint64_t seed,
                                     unsigned jobs = 1);

struct GradientRow {
  Signal signal = Signal::pos_sim;
  std::size_t n = 0;
  std::array<double, 4> means{};
  std::optional<stats::FriedmanResult> friedman;
  std::size_t excluded = 0;
};

/// Per-signal means at the four literality levels and a Friedman test over
/// the instances where the signal is present in all four variants.
/// `scored[i][v]` is empty when variant v of instance i was not annotated.
std::vector<GradientRow> gradient_table(std::span<const std::array<std::optional<SignalVector>, 4>> scored);
std::vector<GradientRow> gradient_table(std::span<const MixtureInstance> mixtures);

TripletInstance parse_triplet(std::string_view line, std::size_t line_no);
std::string serialize_triplet(const TripletInstance& t);
MixtureInstance parse_mixture(std::string_view line, std::size_t line_no);
std::string serialize_mixture(const MixtureInstance& m);

std::vector<TripletInstance> read_triplets(std::istream& in);
std::vector<MixtureInstance> read_mixtures(std::istream& in);

}  // namespace literalis
