#include "literalis/valharness.hpp"

#include <algorithm>
#include <cmath>
#include <istream>

#include <nlohmann/json.hpp>

#include "json_detail.hpp"
#include "literalis/error.hpp"
#include "literalis/parallel.hpp"
#include "literalis/rng.hpp"

namespace literalis {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string_view to_string(HitOutcome o) noexcept {
  switch (o) {
    case HitOutcome::hit: return "hit";
    case HitOutcome::miss: return "miss";
    case HitOutcome::tie: return "tie";
  }
  return "";
}

HitOutcome hit_outcome(double v_literal, double v_idiomatic, int polarity) noexcept {
  const double lit = polarity * v_literal;
  const double idio = polarity * v_idiomatic;
  if (lit > idio) return HitOutcome::hit;
  if (lit == idio) return HitOutcome::tie;
  return HitOutcome::miss;
}

HitRateTable hit_rates(std::span<const ScoredTriplet> triplets) {
  if (triplets.empty()) throw DomainError("hit_rates: no triplets");
  HitRateTable table;
  for (const auto& t : triplets) {
    auto& lang = table.by_lang[t.tgt_lang];
    for (Signal s : kAllSignals) {
      const std::size_t i = index_of(s);
      const auto lit = t.literal.get(s);
      const auto idio = t.idiomatic.get(s);
      HitCounts c;
      if (!lit || !idio) {
        c.excluded = 1;
      } else {
        switch (hit_outcome(*lit, *idio, polarity(s))) {
          case HitOutcome::hit: c.hit = 1; break;
          case HitOutcome::miss: c.miss = 1; break;
          case HitOutcome::tie: c.tie = 1; break;
        }
      }
      lang[i].add(c);
      table.overall[i].add(c);
    }
  }
  return table;
}

HitRateTable hit_rates(std::span<const TripletInstance> triplets) {
  std::vector<ScoredTriplet> scored;
  scored.reserve(triplets.size());
  for (const auto& t : triplets) {
    if (!t.literal_features || !t.idiomatic_features)
      throw DomainError("hit_rates: triplet '" + t.id + "' has no feature annotations");
    scored.push_back({t.tgt_lang, score_record(*t.literal_features), score_record(*t.idiomatic_features)});
  }
  return hit_rates(scored);
}

MixtureInstance make_mixture(const std::array<const TripletInstance*, 3>& parts,
                             const std::array<int, 3>& flip_order) {
  MixtureInstance m;
  m.tgt_lang = parts[0]->tgt_lang;
  m.flip_order = flip_order;
  std::array<bool, 3> idiomatic{};
  for (int v = 0; v < 4; ++v) {
    if (v > 0) idiomatic[static_cast<std::size_t>(flip_order[static_cast<std::size_t>(v - 1)])] = true;
    std::string text;
    for (std::size_t slot = 0; slot < 3; ++slot) {
      if (slot) text += ' ';
      text += idiomatic[slot] ? parts[slot]->idiomatic : parts[slot]->literal;
    }
    m.variants[static_cast<std::size_t>(v)] = std::move(text);
  }
  for (std::size_t slot = 0; slot < 3; ++slot) {
    if (slot) m.source += ' ';
    m.source += parts[slot]->source;
    m.base_ids[slot] = parts[slot]->id;
  }
  return m;
}

std::vector<MixtureInstance> augment(std::span<const TripletInstance> base, std::size_t n, std::uint64_t seed,
                                     unsigned jobs) {
  if (n < 1) throw DomainError("augment: n must be >= 1");
  if (base.size() < 3) throw DomainError("augment: need at least 3 base triplets");

  std::map<std::string, std::vector<std::size_t>> by_lang;
  for (std::size_t i = 0; i < base.size(); ++i) by_lang[base[i].tgt_lang].push_back(i);
  std::vector<std::size_t> pool;
  for (const auto& [lang, idx] : by_lang)
    if (idx.size() >= 3) pool.insert(pool.end(), idx.begin(), idx.end());
  if (pool.empty()) throw DomainError("augment: no target language has 3 base triplets");
  std::sort(pool.begin(), pool.end());

  std::vector<MixtureInstance> out(n);
  parallel_for(n, jobs, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      SplitMix64 gen(substream_seed(seed, k));
      const std::size_t first = pool[uniform_below(gen, pool.size())];
      const auto& group = by_lang.at(base[first].tgt_lang);
      std::size_t second, third;
      do second = group[uniform_below(gen, group.size())]; while (second == first);
      do third = group[uniform_below(gen, group.size())]; while (third == first || third == second);

      std::array<int, 3> order{0, 1, 2};
      for (std::size_t i = 2; i > 0; --i) std::swap(order[i], order[uniform_below(gen, i + 1)]);

      MixtureInstance m = make_mixture({&base[first], &base[second], &base[third]}, order);
      m.id = "mix-" + std::to_string(k);
      m.seed = seed;
      out[k] = std::move(m);
    }
  });
  return out;
}

std::vector<GradientRow> gradient_table(std::span<const std::array<std::optional<SignalVector>, 4>> scored) {
  std::vector<GradientRow> rows;
  for (Signal s : kAllSignals) {
    GradientRow row;
    row.signal = s;
    std::vector<std::vector<double>> matrix;
    for (const auto& inst : scored) {
      std::vector<double> vals;
      for (const auto& v : inst) {
        if (!v) break;
        const auto x = v->get(s);
        if (!x) break;
        vals.push_back(*x);
      }
      if (vals.size() != 4) {
        ++row.excluded;
        continue;
      }
      matrix.push_back(std::move(vals));
    }
    row.n = matrix.size();
    if (row.n > 0) {
      for (std::size_t level = 0; level < 4; ++level) {
        double sum = 0.0;
        for (const auto& r : matrix) sum += r[level];
        row.means[level] = sum / static_cast<double>(row.n);
      }
    }
    if (row.n >= 2) row.friedman = stats::friedman(matrix);
    rows.push_back(row);
  }
  return rows;
}

std::vector<GradientRow> gradient_table(std::span<const MixtureInstance> mixtures) {
  std::vector<std::array<std::optional<SignalVector>, 4>> scored(mixtures.size());
  for (std::size_t i = 0; i < mixtures.size(); ++i)
    for (std::size_t v = 0; v < 4; ++v)
      if (mixtures[i].features[v]) scored[i][v] = score_record(*mixtures[i].features[v]);
  return gradient_table(scored);
}

namespace {

json parse_object(std::string_view line, std::size_t line_no) {
  json obj;
  try {
    obj = json::parse(line.begin(), line.end());
  } catch (const json::parse_error& e) {
    throw SchemaError("", line_no, std::string("malformed JSON: ") + e.what());
  }
  if (!obj.is_object()) throw SchemaError("", line_no, "expected a JSON object");
  return obj;
}

std::string required_string(const json& obj, const char* field, std::size_t line_no) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) throw SchemaError(field, line_no, "missing mandatory field");
  if (!it->is_string()) throw SchemaError(field, line_no, "expected a string");
  return nfc(it->get_ref<const std::string&>());
}

std::optional<FeatureRecord> optional_features(const json& obj, const char* key, std::size_t line_no) {
  auto feats = obj.find("features");
  if (feats == obj.end() || !feats->is_object()) return std::nullopt;
  auto it = feats->find(key);
  if (it == feats->end() || it->is_null()) return std::nullopt;
  try {
    return detail::record_from_json(*it, line_no);
  } catch (const SchemaError& e) {
    throw SchemaError(std::string("features.") + key + "." + e.field(), line_no, e.detail());
  }
}

const char* level_key(std::size_t v) {
  static constexpr const char* keys[] = {"100", "66", "33", "0"};
  return keys[v];
}

}  // namespace

TripletInstance parse_triplet(std::string_view line, std::size_t line_no) {
  const json obj = parse_object(line, line_no);
  TripletInstance t;
  if (auto it = obj.find("id"); it != obj.end() && it->is_string())
    t.id = nfc(it->get_ref<const std::string&>());
  else
    t.id = "triplet-" + std::to_string(line_no);
  t.source = required_string(obj, "source", line_no);
  t.literal = required_string(obj, "literal", line_no);
  t.idiomatic = required_string(obj, "idiomatic", line_no);
  t.tgt_lang = required_string(obj, "tgt_lang", line_no);
  t.literal_features = optional_features(obj, "literal", line_no);
  t.idiomatic_features = optional_features(obj, "idiomatic", line_no);
  return t;
}

std::string serialize_triplet(const TripletInstance& t) {
  ojson o;
  o["id"] = t.id;
  o["source"] = t.source;
  o["literal"] = t.literal;
  o["idiomatic"] = t.idiomatic;
  o["tgt_lang"] = t.tgt_lang;
  if (t.literal_features || t.idiomatic_features) {
    auto& f = o["features"] = ojson::object();
    if (t.literal_features) f["literal"] = detail::record_to_json(*t.literal_features);
    if (t.idiomatic_features) f["idiomatic"] = detail::record_to_json(*t.idiomatic_features);
  }
  return o.dump();
}

MixtureInstance parse_mixture(std::string_view line, std::size_t line_no) {
  const json obj = parse_object(line, line_no);
  MixtureInstance m;
  m.id = required_string(obj, "id", line_no);
  m.source = required_string(obj, "source", line_no);
  m.tgt_lang = required_string(obj, "tgt_lang", line_no);
  auto variants = obj.find("variants");
  if (variants == obj.end() || !variants->is_object()) throw SchemaError("variants", line_no, "missing mandatory field");
  for (std::size_t v = 0; v < 4; ++v) m.variants[v] = required_string(*variants, level_key(v), line_no);
  if (auto prov = obj.find("provenance"); prov != obj.end() && prov->is_object()) {
    try {
      const auto ids = prov->at("base_ids").get<std::vector<std::string>>();
      const auto order = prov->at("flip_order").get<std::vector<int>>();
      if (ids.size() != 3 || order.size() != 3) throw SchemaError("provenance", line_no, "expected 3 entries");
      auto sorted = order;
      std::sort(sorted.begin(), sorted.end());
      if (sorted != std::vector<int>{0, 1, 2})
        throw SchemaError("provenance", line_no, "flip_order must be a permutation of 0, 1, 2");
      std::copy(ids.begin(), ids.end(), m.base_ids.begin());
      std::copy(order.begin(), order.end(), m.flip_order.begin());
      m.seed = prov->value("seed", std::uint64_t{0});
    } catch (const json::exception& e) {
      throw SchemaError("provenance", line_no, e.what());
    }
  }
  for (std::size_t v = 0; v < 4; ++v) m.features[v] = optional_features(obj, level_key(v), line_no);
  return m;
}

std::string serialize_mixture(const MixtureInstance& m) {
  ojson o;
  o["id"] = m.id;
  o["source"] = m.source;
  o["tgt_lang"] = m.tgt_lang;
  auto& variants = o["variants"] = ojson::object();
  for (std::size_t v = 0; v < 4; ++v) variants[level_key(v)] = m.variants[v];
  o["provenance"] = {{"base_ids", m.base_ids}, {"flip_order", m.flip_order}, {"seed", m.seed}};
  if (std::any_of(m.features.begin(), m.features.end(), [](const auto& f) { return f.has_value(); })) {
    auto& f = o["features"] = ojson::object();
    for (std::size_t v = 0; v < 4; ++v)
      if (m.features[v]) f[level_key(v)] = detail::record_to_json(*m.features[v]);
  }
  return o.dump();
}

std::vector<TripletInstance> read_triplets(std::istream& in) {
  JsonlReader reader(in);
  std::string line;
  std::vector<TripletInstance> out;
  while (reader.next(line)) out.push_back(parse_triplet(line, reader.line_no()));
  if (in.bad()) throw IoError("read failure");
  return out;
}

std::vector<MixtureInstance> read_mixtures(std::istream& in) {
  JsonlReader reader(in);
  std::string line;
  std::vector<MixtureInstance> out;
  while (reader.next(line)) out.push_back(parse_mixture(line, reader.line_no()));
  if (in.bad()) throw IoError("read failure");
  return out;
}

}  // namespace literalis
