#include "literalis/dynamics.hpp"

#include <algorithm>
#include <istream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "literalis/error.hpp"

namespace literalis {

namespace {

// Mean that does not depend on the order values were collected in.
double sorted_mean(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Mean of per-LP means, or of all values when record_weighted.
double grouped_mean(const std::map<std::string, std::vector<double>>& by_lp, bool record_weighted) {
  std::vector<double> values;
  for (const auto& [lp, v] : by_lp) {
    if (record_weighted)
      values.insert(values.end(), v.begin(), v.end());
    else
      values.push_back(sorted_mean(v));
  }
  return sorted_mean(std::move(values));
}

std::string trimmed_text(const std::vector<std::string>& tokens) {
  std::string s;
  for (const auto& t : tokens) {
    if (!s.empty()) s += ' ';
    s += t;
  }
  const auto b = s.find_first_not_of(" \t\n\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\n\r");
  return s.substr(b, e - b + 1);
}

std::optional<double> pct(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

SliRecord parse_sli_record(std::string_view line, std::size_t line_no) {
  nlohmann::json o;
  try {
    o = nlohmann::json::parse(line.begin(), line.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("", line_no, std::string("malformed JSON: ") + e.what());
  }
  SliRecord r;
  try {
    r.id = o.at("id").get<std::string>();
    r.lp = o.at("lp").get<std::string>();
    r.system = o.at("system").get<std::string>();
    const auto task = parse_task(o.at("task").get<std::string>());
    if (!task) throw SchemaError("task", line_no, "unknown task");
    r.task = *task;
    if (auto it = o.find("position"); it != o.end() && !it->is_null()) r.position = it->get<int>();
    r.sli = o.at("sli").get<double>();
    if (auto it = o.find("segment"); it != o.end() && !it->is_null()) r.segment = it->get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("", line_no, e.what());
  }
  if (!(r.sli >= 0.0 && r.sli <= 1.0)) throw SchemaError("sli", line_no, "outside [0, 1]");
  return r;
}

std::string serialize_sli_record(const SliRecord& r) {
  nlohmann::ordered_json o;
  o["id"] = r.id;
  o["lp"] = r.lp;
  o["system"] = r.system;
  o["task"] = to_string(r.task);
  o["position"] = r.position ? nlohmann::ordered_json(*r.position) : nlohmann::ordered_json(nullptr);
  o["sli"] = r.sli;
  if (r.segment) o["segment"] = *r.segment;
  return o.dump();
}

std::vector<SliRecord> read_sli_records(std::istream& in) {
  JsonlReader reader(in);
  std::string line;
  std::vector<SliRecord> out;
  while (reader.next(line)) out.push_back(parse_sli_record(line, reader.line_no()));
  if (in.bad()) throw IoError("read failure");
  return out;
}

void DynamicsConfig::validate() const {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be > 0");
}

std::string_view to_string(EditClass c) noexcept {
  switch (c) {
    case EditClass::unchanged: return "unchanged";
    case EditClass::deliteralizing: return "deliteralizing";
    case EditClass::reliteralizing: return "reliteralizing";
    case EditClass::neutral: return "neutral";
  }
  return "";
}

EditClass classify_edit(const EditPair& p, const DynamicsConfig& cfg) {
  if (p.same_text) return EditClass::unchanged;
  if (p.sli_pe < p.sli_init - cfg.epsilon) return EditClass::deliteralizing;
  if (p.sli_pe > p.sli_init + cfg.epsilon) return EditClass::reliteralizing;
  return EditClass::neutral;
}

bool same_text(const FeatureRecord& init, const FeatureRecord& pe) {
  if (pe.altered) return !*pe.altered;
  return trimmed_text(init.hyp_tokens) == trimmed_text(pe.hyp_tokens);
}

std::vector<EditPair> build_edit_pairs(std::span<const FeatureRecord> records,
                                       const std::unordered_map<std::string, double>& sli_by_id,
                                       const CorpusFilter& filter, PairingStats* stats) {
  std::unordered_map<std::string_view, const FeatureRecord*> by_id;
  by_id.reserve(records.size());
  for (const auto& r : records) by_id.emplace(r.id, &r);

  PairingStats st;
  std::vector<EditPair> pairs;
  for (const auto& pe : records) {
    if (pe.task != Task::post_edit || !pe.sli_counterpart_id) continue;
    ++st.post_edits;
    auto it = by_id.find(*pe.sli_counterpart_id);
    if (it == by_id.end()) {
      ++st.missing_counterpart;
      continue;
    }
    const FeatureRecord& init = *it->second;
    if (!filter.passes_quality(init) || !filter.passes_metadata(pe)) {
      ++st.filtered;
      continue;
    }
    auto si = sli_by_id.find(init.id);
    auto sp = sli_by_id.find(pe.id);
    if (si == sli_by_id.end() || sp == sli_by_id.end()) {
      ++st.missing_sli;
      continue;
    }
    if (init.lp != pe.lp) throw DomainError("edit pair '" + pe.id + "' links records of different language pairs");
    EditPair p;
    p.init_id = init.id;
    p.pe_id = pe.id;
    p.lp = pe.lp;
    p.system = pe.system;
    p.domain = pe.domain;
    p.sli_init = si->second;
    p.sli_pe = sp->second;
    p.same_text = same_text(init, pe);
    p.quality_init = init.quality;
    p.quality_pe = pe.quality;
    pairs.push_back(std::move(p));
  }
  std::sort(pairs.begin(), pairs.end(), [](const EditPair& a, const EditPair& b) { return a.pe_id < b.pe_id; });
  st.paired = pairs.size();
  if (stats) *stats = st;
  return pairs;
}

AlterationSummary alteration_share(std::span<const EditPair> pairs, bool record_weighted) {
  std::map<std::pair<std::string, std::string>, AlterationRow> rows;
  for (const auto& p : pairs) {
    auto& row = rows[{p.system, p.lp}];
    row.system = p.system;
    row.lp = p.lp;
    ++row.n;
    row.altered += !p.same_text;
  }
  AlterationSummary out;
  std::map<std::string, std::pair<std::vector<double>, std::pair<std::size_t, std::size_t>>> per_system;
  for (auto& [key, row] : rows) {
    auto& acc = per_system[row.system];
    acc.first.push_back(row.altered_share());
    acc.second.first += row.altered;
    acc.second.second += row.n;
    out.per_lp.push_back(row);
  }
  for (auto& [system, acc] : per_system)
    out.overall[system] = record_weighted ? double(acc.second.first) / double(acc.second.second)
                                          : sorted_mean(acc.first);
  return out;
}

std::optional<double> DynamicsRow::pct_unchanged() const noexcept { return pct(unchanged, n); }
std::optional<double> DynamicsRow::pct_altered() const noexcept { return pct(altered, n); }
std::optional<double> DynamicsRow::pct_deliteralizing() const noexcept { return pct(deliteralizing, altered); }
std::optional<double> DynamicsRow::pct_reliteralizing() const noexcept { return pct(reliteralizing, altered); }
std::optional<double> DynamicsRow::pct_neutral() const noexcept { return pct(neutral, altered); }

std::vector<DynamicsRow> dynamics_table(std::span<const EditPair> pairs, const DynamicsConfig& cfg) {
  cfg.validate();
  // Domain "all" sorts first through the explicit block index.
  std::map<std::tuple<int, std::string, std::string>, DynamicsRow> rows;
  std::map<std::tuple<int, std::string, std::string>, std::vector<double>> deltas;
  for (const auto& p : pairs) {
    const EditClass c = classify_edit(p, cfg);
    const std::string dom(to_string(p.domain));
    for (auto key : {std::tuple{0, std::string("all"), p.system}, std::tuple{1, dom, p.system}}) {
      auto& row = rows[key];
      row.domain = std::get<1>(key);
      row.system = p.system;
      ++row.n;
      switch (c) {
        case EditClass::unchanged: ++row.unchanged; break;
        case EditClass::deliteralizing: ++row.altered, ++row.deliteralizing; break;
        case EditClass::reliteralizing: ++row.altered, ++row.reliteralizing; break;
        case EditClass::neutral: ++row.altered, ++row.neutral; break;
      }
      if (p.quality_init && p.quality_pe) deltas[key].push_back(*p.quality_pe - *p.quality_init);
    }
  }
  std::vector<DynamicsRow> out;
  for (auto& [key, row] : rows) {
    if (auto it = deltas.find(key); it != deltas.end()) row.mean_quality_delta = sorted_mean(it->second);
    out.push_back(row);
  }
  return out;
}

std::vector<TriggerRow> revision_trigger(std::span<const EditPair> pairs, const stats::PermutationOptions& opt) {
  std::map<std::string, std::vector<const EditPair*>> by_system;
  for (const auto& p : pairs) by_system[p.system].push_back(&p);

  std::vector<TriggerRow> out;
  for (auto& [system, group] : by_system) {
    std::sort(group.begin(), group.end(), [](const EditPair* a, const EditPair* b) { return a->pe_id < b->pe_id; });
    TriggerRow row;
    row.system = system;
    row.n = group.size();
    std::vector<int> altered(group.size());
    std::vector<double> sli(group.size());
    for (std::size_t i = 0; i < group.size(); ++i) {
      altered[i] = group[i]->same_text ? 0 : 1;
      sli[i] = group[i]->sli_init;
    }
    const auto ones = static_cast<std::size_t>(std::count(altered.begin(), altered.end(), 1));
    if (group.size() < 3) {
      row.note = "fewer than 3 pairs";
    } else if (ones == 0 || ones == group.size()) {
      row.note = ones == 0 ? "no altered segments" : "every segment altered";
    } else {
      try {
        row.point_biserial = stats::point_biserial(altered, sli, opt);
        const std::vector<double> coded(altered.begin(), altered.end());
        row.spearman = stats::spearman(sli, coded, opt);
      } catch (const DomainError& e) {
        row.note = e.what();
      }
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<TrajectoryRow> trajectory(std::span<const SliRecord> records, bool record_weighted) {
  std::map<std::string, std::map<int, std::map<std::string, std::vector<double>>>> groups;
  for (const auto& r : records) {
    if (r.task != Task::iterative || !r.position) continue;
    groups[r.system][*r.position][r.lp].push_back(r.sli);
  }
  std::vector<TrajectoryRow> out;
  for (const auto& [system, by_pos] : groups) {
    TrajectoryRow row;
    row.system = system;
    for (const auto& [pos, by_lp] : by_pos) {
      row.mean_by_position[pos] = grouped_mean(by_lp, record_weighted);
      std::size_t n = 0;
      for (const auto& [lp, v] : by_lp) n += v.size();
      row.count_by_position[pos] = n;
    }
    row.strictly_decreasing = row.mean_by_position.size() >= 2;
    std::optional<double> prev;
    for (const auto& [pos, mean] : row.mean_by_position) {
      if (prev && !(mean < *prev)) row.strictly_decreasing = false;
      prev = mean;
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<SliTableRow> sli_table(std::span<const SliRecord> records, bool record_weighted) {
  // (task, position) -> lp -> values, per system. Position 0 stands for "none".
  std::map<std::string, std::map<std::pair<Task, int>, std::map<std::string, std::vector<double>>>> groups;
  for (const auto& r : records) groups[r.system][{r.task, r.position.value_or(0)}][r.lp].push_back(r.sli);

  std::vector<SliTableRow> out;
  for (const auto& [system, cells] : groups) {
    SliTableRow row;
    row.system = system;
    for (const auto& [cell, by_lp] : cells) {
      const double m = grouped_mean(by_lp, record_weighted);
      switch (cell.first) {
        case Task::single: row.single = m; break;
        case Task::iterative: row.iterative[cell.second] = m; break;
        case Task::post_edit: row.post_edit = m; break;
      }
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace literalis
