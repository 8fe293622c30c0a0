#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "literalis/corpus.hpp"
#include "literalis/stats.hpp"

namespace literalis {

/// One line of SLI output.
struct SliRecord {
  std::string id;
  std::string lp;
  std::string system;
  Task task = Task::single;
  std::optional<int> position;
  double sli = 0.0;
  std::optional<std::string> segment;  // written only when the corpus had one

  const std::string& segment_key() const noexcept { return segment ? *segment : id; }
  friend bool operator==(const SliRecord&, const SliRecord&) = default;
};

SliRecord parse_sli_record(std::string_view line, std::size_t line_no);
std::string serialize_sli_record(const SliRecord& r);
std::vector<SliRecord> read_sli_records(std::istream& in);

/// An initial translation and its post-edition.
struct EditPair {
  std::string init_id;
  std::string pe_id;
  std::string lp;
  std::string system;  // the post-editor
  Domain domain = Domain::unknown;
  double sli_init = 0.0;
  double sli_pe = 0.0;
  bool same_text = false;
  std::optional<double> quality_init;
  std::optional<double> quality_pe;
};

struct DynamicsConfig {
  double epsilon = 0.005;
  /// Throws DomainError unless epsilon > 0.
  void validate() const;
};

enum class EditClass { unchanged, deliteralizing, reliteralizing, neutral };
std::string_view to_string(EditClass c) noexcept;

/// unchanged iff same_text; otherwise the sign of sli_pe - sli_init beyond
/// the open band (-epsilon, +epsilon). A change of exactly epsilon is neutral.
EditClass classify_edit(const EditPair& p, const DynamicsConfig& cfg);

/// Uses the post-edition's `altered` flag when present, otherwise compares
/// the whitespace-trimmed, space-joined hypothesis tokens.
bool same_text(const FeatureRecord& init, const FeatureRecord& pe);

struct PairingStats {
  std::size_t post_edits = 0;
  std::size_t paired = 0;
  std::size_t missing_counterpart = 0;
  std::size_t missing_sli = 0;
  std::size_t filtered = 0;
};

/// Links every post_edit record carrying `sli_counterpart_id` to its initial
/// translation. The quality part of `filter` is applied to the initial
/// translation, the metadata part to the post-edition. Output is ordered by
/// post-edition id.
std::vector<EditPair> build_edit_pairs(std::span<const FeatureRecord> records,
                                       const std::unordered_map<std::string, double>& sli_by_id,
                                       const CorpusFilter& filter = {}, PairingStats* stats = nullptr);

struct AlterationRow {
  std::string system;
  std::string lp;
  std::size_t n = 0;
  std::size_t altered = 0;
  double altered_share() const noexcept { return n ? double(altered) / double(n) : 0.0; }
};

struct AlterationSummary {
  std::vector<AlterationRow> per_lp;
  /// Per system: unweighted mean of its per-LP shares (or record-weighted).
  std::map<std::string, double> overall;
};

AlterationSummary alteration_share(std::span<const EditPair> pairs, bool record_weighted = false);

/// Edit dynamics for one (domain, system) group. Percentages are suppressed (empty) when their
/// denominator is zero.
struct DynamicsRow {
  std::string domain;  // "all" for the all-domains block
  std::string system;
  std::size_t n = 0;
  std::size_t unchanged = 0;
  std::size_t altered = 0;
  std::size_t deliteralizing = 0;
  std::size_t reliteralizing = 0;
  std::size_t neutral = 0;
  std::optional<double> mean_quality_delta;  // mean(quality_pe - quality_init)

  std::optional<double> pct_unchanged() const noexcept;
  std::optional<double> pct_altered() const noexcept;
  std::optional<double> pct_deliteralizing() const noexcept;
  std::optional<double> pct_reliteralizing() const noexcept;
  std::optional<double> pct_neutral() const noexcept;
};

/// Rows for the all-domains block followed by one block per domain; systems
/// sorted within each block.
std::vector<DynamicsRow> dynamics_table(std::span<const EditPair> pairs, const DynamicsConfig& cfg);

struct TriggerRow {
  std::string system;
  std::size_t n = 0;
  std::optional<stats::CorrelationResult> point_biserial;
  std::optional<stats::CorrelationResult> spearman;
  std::string note;  // why a system was excluded
};

/// Correlation of sli_init with the altered flag per post-editing system.
/// Positive = more literal originals more likely to be altered.
std::vector<TriggerRow> revision_trigger(std::span<const EditPair> pairs, const stats::PermutationOptions& opt);

struct TrajectoryRow {
  std::string system;
  std::map<int, double> mean_by_position;
  std::map<int, std::size_t> count_by_position;
  /// Every successive position has a strictly lower mean (needs >= 2 positions).
  bool strictly_decreasing = false;
};

/// Mean SLI per (system, position) for iterative records. By default the mean
/// of per-LP means; `record_weighted` averages records directly.
std::vector<TrajectoryRow> trajectory(std::span<const SliRecord> records, bool record_weighted = false);

/// Per-system SLI overview: single-translation mean, iterative means by position and
/// post-edition mean per system.
struct SliTableRow {
  std::string system;
  std::optional<double> single;
  std::map<int, double> iterative;
  std::optional<double> post_edit;
};

std::vector<SliTableRow> sli_table(std::span<const SliRecord> records, bool record_weighted = false);

}  // namespace literalis
