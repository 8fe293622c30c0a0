#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace literalis {

enum class Task { single, iterative, post_edit };
enum class Domain { news, social, speech, literary, unknown };

std::string_view to_string(Task t) noexcept;
std::string_view to_string(Domain d) noexcept;
std::optional<Task> parse_task(std::string_view s) noexcept;
std::optional<Domain> parse_domain(std::string_view s) noexcept;

/// One word-alignment link, 1-based on both sides.
struct AlignmentLink {
  std::uint32_t src = 0;
  std::uint32_t hyp = 0;

  friend bool operator==(const AlignmentLink&, const AlignmentLink&) = default;
  friend auto operator<=>(const AlignmentLink&, const AlignmentLink&) = default;
};

/// A (source, hypothesis) pair with its precomputed annotations.
///
/// `pair_cos[k]` is the cosine of the word embeddings linked by
/// `alignment[k]`. Arc sets are kept sorted and deduplicated.
struct FeatureRecord {
  std::string id;
  std::string lp;
  std::string system;
  Task task = Task::single;
  std::optional<int> position;
  Domain domain = Domain::unknown;

  std::vector<std::string> src_tokens;
  std::vector<std::string> hyp_tokens;
  std::optional<std::vector<std::string>> src_pos;
  std::optional<std::vector<std::string>> hyp_pos;
  std::optional<std::vector<std::string>> src_arcs;
  std::optional<std::vector<std::string>> hyp_arcs;

  std::vector<AlignmentLink> alignment;
  std::vector<double> pair_cos;
  double seg_cos = 0.0;

  std::optional<double> quality;
  std::optional<bool> altered;
  std::optional<std::string> sli_counterpart_id;
  /// Source-segment key shared by every system's output for the same
  /// segment; used for paired comparisons. Falls back to `id` when absent.
  std::optional<std::string> segment;

  const std::string& segment_key() const noexcept { return segment ? *segment : id; }

  friend bool operator==(const FeatureRecord&, const FeatureRecord&) = default;
};

inline constexpr double kMaxQuality = 25.0;
inline constexpr int kFormatVersion = 1;

/// Parses one JSONL line. Throws SchemaError naming the field and line.
FeatureRecord parse_record(std::string_view line, std::size_t line_no = 1);

/// Single-line JSON with the same field names parse_record accepts.
std::string serialize_record(const FeatureRecord& r);

/// Checks every record invariant; throws SchemaError on the first violation.
void validate_record(const FeatureRecord& r, std::size_t line_no = 1);

/// NFC normalization of UTF-8 text; invalid sequences become U+FFFD.
std::string nfc(std::string_view utf8);

/// Metadata and quality selection. Empty sets do not constrain.
struct CorpusFilter {
  std::optional<double> max_quality;
  /// When true the quality filter keeps `quality <= max_quality` instead of
  /// the default strict `quality < max_quality`.
  bool quality_inclusive = false;
  std::set<Task> tasks;
  std::set<std::string> systems;
  std::set<std::string> lps;
  std::set<Domain> domains;

  bool empty() const noexcept {
    return !max_quality && tasks.empty() && systems.empty() && lps.empty() && domains.empty();
  }

  bool passes_quality(const FeatureRecord& r) const noexcept;
  bool passes_metadata(const FeatureRecord& r) const noexcept;
  bool matches(const FeatureRecord& r) const noexcept {
    return passes_quality(r) && passes_metadata(r);
  }
};

/// Throws DomainError when max_quality is negative.
void validate_filter(const CorpusFilter& f);

/// Order-preserving selection of the records matching `f`.
std::vector<FeatureRecord> stream_filter(std::span<const FeatureRecord> records,
                                         const CorpusFilter& f);

/// Reads a JSONL stream line by line. Blank lines are skipped but still
/// counted, so reported line numbers match the file.
class JsonlReader {
 public:
  explicit JsonlReader(std::istream& in) : in_(in) {}

  /// Next non-blank line, or false at end of stream.
  bool next(std::string& line);
  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

/// Streams every record of `in` through `filter` into `sink`. Throws on the
/// first malformed line. Returns the number of records kept.
std::size_t for_each_record(std::istream& in, const CorpusFilter& filter,
                            const std::function<void(FeatureRecord&&)>& sink);

std::vector<FeatureRecord> read_records(std::istream& in, const CorpusFilter& filter = {});

struct ValidationIssue {
  std::size_t line = 0;
  std::string field;
  std::string message;
};

/// Parses every line and collects all schema violations rather than stopping
/// at the first one.
std::vector<ValidationIssue> validate_stream(std::istream& in, std::size_t* records_seen = nullptr);

}  // namespace literalis
