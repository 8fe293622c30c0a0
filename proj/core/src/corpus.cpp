#include "literalis/corpus.hpp"

#include <algorithm>
#include <istream>

#include <nlohmann/json.hpp>
#include <rapidjson/document.h>
#include <rapidjson/error/en.h>
#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "literalis/error.hpp"
#include "json_detail.hpp"

namespace literalis {

using json = nlohmann::json;

namespace {

constexpr std::string_view kTaskNames[] = {"single", "iterative", "post_edit"};
constexpr std::string_view kDomainNames[] = {"news", "social", "speech", "literary", "unknown"};

bool is_ascii(std::string_view s) noexcept {
  return std::all_of(s.begin(), s.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

using Value = rapidjson::Value;

class FieldReader {
 public:
  FieldReader(const Value& obj, std::size_t line) : obj_(obj), line_(line) {}

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw SchemaError(field, line_, what);
  }

  const Value* find(const char* field) const {
    auto it = obj_.FindMember(field);
    if (it == obj_.MemberEnd() || it->value.IsNull()) return nullptr;
    return &it->value;
  }

  const Value& require(const char* field) const {
    const Value* v = find(field);
    if (!v) fail(field, "missing mandatory field");
    return *v;
  }

  std::string string(const char* field, const Value& v) const {
    if (!v.IsString()) fail(field, "expected a string");
    return nfc({v.GetString(), v.GetStringLength()});
  }

  double number(const char* field, const Value& v) const {
    if (!v.IsNumber()) fail(field, "expected a number");
    return v.GetDouble();
  }

  std::vector<std::string> strings(const char* field, const Value& v) const {
    if (!v.IsArray()) fail(field, "expected an array of strings");
    std::vector<std::string> out;
    out.reserve(v.Size());
    for (const auto& e : v.GetArray()) {
      if (!e.IsString()) fail(field, "expected an array of strings");
      out.push_back(nfc({e.GetString(), e.GetStringLength()}));
    }
    return out;
  }

 private:
  const Value& obj_;
  std::size_t line_;
};

FeatureRecord record_from_value(const Value& obj, std::size_t line) {
  FieldReader rd(obj, line);
  if (!obj.IsObject()) rd.fail("", "expected a JSON object");

  const Value& fmt = rd.require("fmt");
  if (!fmt.IsInt64() || fmt.GetInt64() != kFormatVersion) rd.fail("fmt", "unsupported schema version (expected 1)");

  FeatureRecord r;
  r.id = rd.string("id", rd.require("id"));
  r.lp = rd.string("lp", rd.require("lp"));
  r.system = rd.string("system", rd.require("system"));

  const std::string task = rd.string("task", rd.require("task"));
  auto t = parse_task(task);
  if (!t) rd.fail("task", "unknown task '" + task + "'");
  r.task = *t;

  if (const Value* v = rd.find("position")) {
    if (!v->IsInt64()) rd.fail("position", "expected an integer");
    const long long p = v->GetInt64();
    if (p < 1 || p > 1'000'000) rd.fail("position", "must be >= 1");
    r.position = static_cast<int>(p);
  }
  if (const Value* v = rd.find("domain")) {
    const std::string d = rd.string("domain", *v);
    auto dom = parse_domain(d);
    if (!dom) rd.fail("domain", "unknown domain '" + d + "'");
    r.domain = *dom;
  }

  r.src_tokens = rd.strings("src_tokens", rd.require("src_tokens"));
  r.hyp_tokens = rd.strings("hyp_tokens", rd.require("hyp_tokens"));
  if (const Value* v = rd.find("src_pos")) r.src_pos = rd.strings("src_pos", *v);
  if (const Value* v = rd.find("hyp_pos")) r.hyp_pos = rd.strings("hyp_pos", *v);
  for (auto [name, slot] : {std::pair{"src_arcs", &r.src_arcs}, std::pair{"hyp_arcs", &r.hyp_arcs}}) {
    if (const Value* v = rd.find(name)) {
      auto arcs = rd.strings(name, *v);
      std::sort(arcs.begin(), arcs.end());
      arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
      *slot = std::move(arcs);
    }
  }

  const Value& al = rd.require("alignment");
  if (!al.IsArray()) rd.fail("alignment", "expected an array of [i, j] pairs");
  r.alignment.reserve(al.Size());
  for (const auto& link : al.GetArray()) {
    if (!link.IsArray() || link.Size() != 2 || !link[0].IsInt64() || !link[1].IsInt64())
      rd.fail("alignment", "expected an array of [i, j] pairs");
    const long long i = link[0].GetInt64();
    const long long j = link[1].GetInt64();
    if (i < 1 || j < 1 || i > static_cast<long long>(r.src_tokens.size()) ||
        j > static_cast<long long>(r.hyp_tokens.size()))
      rd.fail("alignment", "index out of bounds (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    r.alignment.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
  }

  if (const Value* v = rd.find("pair_cos")) {
    if (!v->IsArray()) rd.fail("pair_cos", "expected an array of numbers");
    r.pair_cos.reserve(v->Size());
    for (const auto& c : v->GetArray()) r.pair_cos.push_back(rd.number("pair_cos", c));
  } else if (!r.alignment.empty()) {
    rd.fail("pair_cos", "missing mandatory field");
  }

  r.seg_cos = rd.number("seg_cos", rd.require("seg_cos"));

  if (const Value* v = rd.find("quality")) r.quality = rd.number("quality", *v);
  if (const Value* v = rd.find("altered")) {
    if (!v->IsBool()) rd.fail("altered", "expected a boolean");
    r.altered = v->GetBool();
  }
  if (const Value* v = rd.find("sli_counterpart_id"))
    r.sli_counterpart_id = rd.string("sli_counterpart_id", *v);
  if (const Value* v = rd.find("segment")) r.segment = rd.string("segment", *v);

  validate_record(r, line);
  return r;
}

}  // namespace

// Nested records (triplet and mixture features) go through the same parser.
FeatureRecord detail::record_from_json(const json& obj, std::size_t line) { return parse_record(obj.dump(), line); }

namespace {

bool is_header(const json& obj) {
  return obj.is_object() && obj.contains("provenance") && !obj.contains("id");
}

}  // namespace

std::string_view to_string(Task t) noexcept { return kTaskNames[static_cast<int>(t)]; }
std::string_view to_string(Domain d) noexcept { return kDomainNames[static_cast<int>(d)]; }

std::optional<Task> parse_task(std::string_view s) noexcept {
  for (int i = 0; i < 3; ++i)
    if (kTaskNames[i] == s) return static_cast<Task>(i);
  return std::nullopt;
}

std::optional<Domain> parse_domain(std::string_view s) noexcept {
  for (int i = 0; i < 5; ++i)
    if (kDomainNames[i] == s) return static_cast<Domain>(i);
  return std::nullopt;
}

std::string nfc(std::string_view utf8) {
  if (is_ascii(utf8)) return std::string(utf8);
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  const auto src = icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  if (norm->isNormalized(src, status) && U_SUCCESS(status)) {
    std::string out;
    return src.toUTF8String(out);
  }
  status = U_ZERO_ERROR;
  const icu::UnicodeString dst = norm->normalize(src, status);
  if (U_FAILURE(status)) throw DomainError("NFC normalization failed");
  std::string out;
  return dst.toUTF8String(out);
}

void validate_record(const FeatureRecord& r, std::size_t line) {
  auto fail = [line](const char* field, const std::string& what) { throw SchemaError(field, line, what); };

  if (r.id.empty()) fail("id", "must be non-empty");
  if (r.lp.empty()) fail("lp", "must be non-empty");
  if (r.task == Task::iterative && !r.position) fail("position", "required for iterative records");
  if (r.task != Task::iterative && r.position) fail("position", "only allowed for iterative records");
  if (r.position && *r.position < 1) fail("position", "must be >= 1");

  if (r.src_pos && r.src_pos->size() != r.src_tokens.size())
    fail("src_pos", "length differs from src_tokens");
  if (r.hyp_pos && r.hyp_pos->size() != r.hyp_tokens.size())
    fail("hyp_pos", "length differs from hyp_tokens");

  for (const auto& link : r.alignment) {
    if (link.src < 1 || link.hyp < 1 || link.src > r.src_tokens.size() || link.hyp > r.hyp_tokens.size())
      fail("alignment", "index out of bounds (" + std::to_string(link.src) + ", " +
                            std::to_string(link.hyp) + ")");
  }
  {
    std::vector<AlignmentLink> sorted(r.alignment);
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      fail("alignment", "duplicate alignment link");
  }
  if (r.pair_cos.size() != r.alignment.size())
    fail("pair_cos", "pair_cos length mismatch (" + std::to_string(r.pair_cos.size()) + " values for " +
                         std::to_string(r.alignment.size()) + " links)");
  for (double c : r.pair_cos)
    if (!(c >= -1.0 && c <= 1.0)) fail("pair_cos", "cosine outside [-1, 1]");
  if (!(r.seg_cos >= -1.0 && r.seg_cos <= 1.0)) fail("seg_cos", "cosine outside [-1, 1]");
  if (r.quality && !(*r.quality >= 0.0 && *r.quality <= kMaxQuality))
    fail("quality", "outside [0, 25]");
}

FeatureRecord parse_record(std::string_view line, std::size_t line_no) {
  // Records dominate input volume, so they skip the DOM library used elsewhere.
  rapidjson::Document doc;
  doc.Parse<rapidjson::kParseFullPrecisionFlag>(line.data(), line.size());
  if (doc.HasParseError())
    throw SchemaError("", line_no,
                      std::string("malformed JSON: ") + rapidjson::GetParseError_En(doc.GetParseError()) +
                          " at offset " + std::to_string(doc.GetErrorOffset()));
  return record_from_value(doc, line_no);
}

nlohmann::ordered_json detail::record_to_json(const FeatureRecord& r) {
  nlohmann::ordered_json o;
  o["fmt"] = kFormatVersion;
  o["id"] = r.id;
  o["lp"] = r.lp;
  o["system"] = r.system;
  o["task"] = to_string(r.task);
  if (r.position) o["position"] = *r.position;
  o["domain"] = to_string(r.domain);
  o["src_tokens"] = r.src_tokens;
  o["hyp_tokens"] = r.hyp_tokens;
  if (r.src_pos) o["src_pos"] = *r.src_pos;
  if (r.hyp_pos) o["hyp_pos"] = *r.hyp_pos;
  if (r.src_arcs) o["src_arcs"] = *r.src_arcs;
  if (r.hyp_arcs) o["hyp_arcs"] = *r.hyp_arcs;
  auto& al = o["alignment"] = nlohmann::ordered_json::array();
  for (const auto& link : r.alignment) al.push_back({link.src, link.hyp});
  o["pair_cos"] = r.pair_cos;
  o["seg_cos"] = r.seg_cos;
  if (r.quality) o["quality"] = *r.quality;
  if (r.altered) o["altered"] = *r.altered;
  if (r.sli_counterpart_id) o["sli_counterpart_id"] = *r.sli_counterpart_id;
  if (r.segment) o["segment"] = *r.segment;
  return o;
}

std::string serialize_record(const FeatureRecord& r) { return detail::record_to_json(r).dump(); }

bool CorpusFilter::passes_quality(const FeatureRecord& r) const noexcept {
  if (!max_quality) return true;
  if (!r.quality) return false;
  return quality_inclusive ? *r.quality <= *max_quality : *r.quality < *max_quality;
}

bool CorpusFilter::passes_metadata(const FeatureRecord& r) const noexcept {
  if (!tasks.empty() && !tasks.contains(r.task)) return false;
  if (!systems.empty() && !systems.contains(r.system)) return false;
  if (!lps.empty() && !lps.contains(r.lp)) return false;
  if (!domains.empty() && !domains.contains(r.domain)) return false;
  return true;
}

void validate_filter(const CorpusFilter& f) {
  if (f.max_quality && !(*f.max_quality >= 0.0)) throw DomainError("max_quality must be >= 0");
}

std::vector<FeatureRecord> stream_filter(std::span<const FeatureRecord> records, const CorpusFilter& f) {
  std::vector<FeatureRecord> out;
  for (const auto& r : records)
    if (f.matches(r)) out.push_back(r);
  return out;
}

bool JsonlReader::next(std::string& line) {
  while (std::getline(in_, line)) {
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) return true;
  }
  return false;
}

namespace {

// The adapter may emit a provenance header as the first line.
bool skip_header(const std::string& line) {
  if (line.find("\"provenance\"") != std::string::npos) {
    try {
      return is_header(json::parse(line));
    } catch (const json::parse_error&) {
      return false;
    }
  }
  return false;
}

}  // namespace

std::size_t for_each_record(std::istream& in, const CorpusFilter& filter,
                            const std::function<void(FeatureRecord&&)>& sink) {
  JsonlReader reader(in);
  std::string line;
  std::size_t kept = 0;
  bool first = true;
  while (reader.next(line)) {
    if (first) {
      first = false;
      if (skip_header(line)) continue;
    }
    FeatureRecord r = parse_record(line, reader.line_no());
    if (filter.matches(r)) {
      sink(std::move(r));
      ++kept;
    }
  }
  if (in.bad()) throw IoError("read failure");
  return kept;
}

std::vector<FeatureRecord> read_records(std::istream& in, const CorpusFilter& filter) {
  std::vector<FeatureRecord> out;
  for_each_record(in, filter, [&](FeatureRecord&& r) { out.push_back(std::move(r)); });
  return out;
}

std::vector<ValidationIssue> validate_stream(std::istream& in, std::size_t* records_seen) {
  JsonlReader reader(in);
  std::string line;
  std::vector<ValidationIssue> issues;
  std::size_t seen = 0;
  bool first = true;
  while (reader.next(line)) {
    if (first) {
      first = false;
      if (skip_header(line)) continue;
    }
    ++seen;
    try {
      (void)parse_record(line, reader.line_no());
    } catch (const SchemaError& e) {
      issues.push_back({e.line(), e.field(), e.what()});
    }
  }
  if (in.bad()) throw IoError("read failure");
  if (records_seen) *records_seen = seen;
  return issues;
}

}  // namespace literalis
