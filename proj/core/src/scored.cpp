#include "literalis/scored.hpp"

#include <istream>

#include <nlohmann/json.hpp>

#include "literalis/error.hpp"

namespace literalis {

ScoredRecord score(const FeatureRecord& r) {
  return {r.id, r.lp, r.system, r.task, r.position, r.domain, r.segment, score_record(r)};
}

std::string serialize_scored(const ScoredRecord& r) {
  using nlohmann::ordered_json;
  ordered_json o;
  o["id"] = r.id;
  for (Signal s : kAllSignals) {
    const char* name = to_string(s).data();
    if (s == Signal::crossings)
      o[name] = r.signals.crossings ? ordered_json(*r.signals.crossings) : ordered_json(nullptr);
    else if (auto v = r.signals.get(s))
      o[name] = *v;
    else
      o[name] = nullptr;
  }
  o["density_clamped"] = r.signals.density_clamped;
  o["lp"] = r.lp;
  o["system"] = r.system;
  o["task"] = to_string(r.task);
  o["position"] = r.position ? ordered_json(*r.position) : ordered_json(nullptr);
  o["domain"] = to_string(r.domain);
  if (r.segment) o["segment"] = *r.segment;
  return o.dump();
}

ScoredRecord parse_scored(std::string_view line, std::size_t line_no) {
  nlohmann::json o;
  try {
    o = nlohmann::json::parse(line.begin(), line.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("", line_no, std::string("malformed JSON: ") + e.what());
  }
  ScoredRecord r;
  std::string field;
  try {
    field = "id";
    r.id = o.at("id").get<std::string>();
    field = "lp";
    r.lp = o.at("lp").get<std::string>();
    field = "system";
    r.system = o.at("system").get<std::string>();
    field = "task";
    const auto task = parse_task(o.at("task").get<std::string>());
    if (!task) throw SchemaError("task", line_no, "unknown task");
    r.task = *task;
    field = "position";
    if (auto it = o.find("position"); it != o.end() && !it->is_null()) r.position = it->get<int>();
    field = "domain";
    if (auto it = o.find("domain"); it != o.end() && !it->is_null()) {
      const auto d = parse_domain(it->get<std::string>());
      if (!d) throw SchemaError("domain", line_no, "unknown domain");
      r.domain = *d;
    }
    field = "segment";
    if (auto it = o.find("segment"); it != o.end() && !it->is_null()) r.segment = it->get<std::string>();
    for (Signal s : kAllSignals) {
      field = std::string(to_string(s));
      auto it = o.find(field);
      if (it == o.end() || it->is_null()) continue;
      if (s == Signal::crossings)
        r.signals.crossings = it->get<std::uint64_t>();
      else
        r.signals.set(s, it->get<double>());
    }
    field = "density_clamped";
    if (auto it = o.find("density_clamped"); it != o.end()) r.signals.density_clamped = it->get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(field, line_no, e.what());
  }
  return r;
}

std::vector<ScoredRecord> read_scored(std::istream& in) {
  JsonlReader reader(in);
  std::string line;
  std::vector<ScoredRecord> out;
  while (reader.next(line)) out.push_back(parse_scored(line, reader.line_no()));
  if (in.bad()) throw IoError("read failure");
  return out;
}

}  // namespace literalis
