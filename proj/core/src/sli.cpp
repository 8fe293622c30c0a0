#include "literalis/sli.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "literalis/error.hpp"

namespace literalis {

using ojson = nlohmann::ordered_json;

std::string normalizer_key(NormalizerScope scope, std::string_view lp, Task task) {
  std::string key(lp);
  if (scope == NormalizerScope::lp_task) {
    key += '|';
    key += to_string(task);
  }
  return key;
}

void Normalizer::observe(const std::string& key, const SignalVector& v) {
  auto& ranges = groups_[key];
  for (Signal s : kAllSignals)
    if (auto x = v.get(s)) ranges[index_of(s)].observe(*x);
}

void Normalizer::merge(const Normalizer& other) {
  if (other.scope_ != scope_) throw DomainError("cannot merge normalizers with different scopes");
  for (const auto& [key, ranges] : other.groups_) {
    auto& mine = groups_[key];
    for (std::size_t i = 0; i < kSignalCount; ++i) mine[i].merge(ranges[i]);
  }
}

const Normalizer::Ranges* Normalizer::find(const std::string& key) const {
  auto it = groups_.find(key);
  return it == groups_.end() ? nullptr : &it->second;
}

std::string Normalizer::to_json() const {
  ojson out;
  out["fmt"] = 1;
  out["scope"] = scope_ == NormalizerScope::lp ? "lp" : "lp_task";
  auto& groups = out["groups"] = ojson::object();
  for (const auto& [key, ranges] : groups_) {
    auto& g = groups[key] = ojson::object();
    for (Signal s : kAllSignals) {
      const Range& r = ranges[index_of(s)];
      g[std::string(to_string(s))] = r.available ? ojson{{"min", r.min}, {"max", r.max}} : ojson(nullptr);
    }
  }
  return out.dump(2) + "\n";
}

Normalizer Normalizer::from_json(std::string_view text) {
  nlohmann::json in;
  try {
    in = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError(std::string("normalizer: malformed JSON: ") + e.what());
  }
  try {
    const std::string scope = in.at("scope").get<std::string>();
    if (scope != "lp" && scope != "lp_task") throw DomainError("normalizer: unknown scope '" + scope + "'");
    Normalizer n(scope == "lp" ? NormalizerScope::lp : NormalizerScope::lp_task);
    for (const auto& [key, g] : in.at("groups").items()) {
      auto& ranges = n.groups_[key];
      for (const auto& [name, v] : g.items()) {
        auto s = parse_signal(name);
        if (!s) throw DomainError("normalizer: unknown signal '" + name + "'");
        if (v.is_null()) continue;
        Range r{v.at("min").get<double>(), v.at("max").get<double>(), true};
        if (r.min > r.max) throw DomainError("normalizer: min > max for " + key + "/" + name);
        ranges[index_of(*s)] = r;
      }
    }
    return n;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("normalizer: ") + e.what());
  }
}

double normalize(double x, double min, double max) {
  if (min > max) throw DomainError("normalize: min > max");
  if (min == max) return 0.5;
  return std::clamp((x - min) / (max - min), 0.0, 1.0);
}

SliConfig SliConfig::defaults() {
  SliConfig c;
  c.hit_rates[index_of(Signal::seg_sem)] = 0.99;
  c.hit_rates[index_of(Signal::tok_sim_pen)] = 0.98;
  c.hit_rates[index_of(Signal::tok_sim_raw)] = 0.95;
  c.hit_rates[index_of(Signal::density)] = 0.90;
  c.hit_rates[index_of(Signal::tree_sim)] = 0.75;
  c.hit_rates[index_of(Signal::pos_sim)] = 0.73;
  c.temperature = 0.5;
  return c;
}

void SliConfig::validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) throw DomainError("sli config: temperature must be > 0");
  if (hit_rates[index_of(Signal::crossings)])
    throw DomainError("sli config: crossings cannot be an SLI signal (lower = more literal)");
  bool any = false;
  for (Signal s : kAllSignals) {
    if (const auto& h = hit_rates[index_of(s)]) {
      if (!(*h > 0.0 && *h <= 1.0))
        throw DomainError("sli config: hit rate for " + std::string(to_string(s)) + " outside (0, 1]");
      any = true;
    }
  }
  if (!any) throw DomainError("sli config: no eligible signal");
}

SliConfig SliConfig::from_json(std::string_view text) {
  nlohmann::json in;
  try {
    in = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError(std::string("sli config: malformed JSON: ") + e.what());
  }
  SliConfig c;
  try {
    if (in.contains("temperature")) c.temperature = in.at("temperature").get<double>();
    for (const auto& [name, h] : in.at("hit_rates").items()) {
      auto s = parse_signal(name);
      if (!s) throw DomainError("sli config: unknown signal '" + name + "'");
      c.hit_rates[index_of(*s)] = h.get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("sli config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string SliConfig::to_json() const {
  ojson out;
  out["temperature"] = temperature;
  auto& h = out["hit_rates"] = ojson::object();
  for (Signal s : kAllSignals)
    if (hit_rates[index_of(s)]) h[std::string(to_string(s))] = *hit_rates[index_of(s)];
  return out.dump(2) + "\n";
}

namespace {

// Unnormalized softmax terms exp((h_i - h_max) / tau); zero where unused.
WeightMap softmax_terms(const SliConfig& cfg, const SignalMask& available) {
  double hmax = -std::numeric_limits<double>::infinity();
  for (Signal s : kAllSignals)
    if (available[index_of(s)] && cfg.eligible(s)) hmax = std::max(hmax, *cfg.hit_rates[index_of(s)]);
  if (!std::isfinite(hmax)) throw DomainError("softmax_weights: no available eligible signal");
  WeightMap terms{};
  for (Signal s : kAllSignals)
    if (available[index_of(s)] && cfg.eligible(s))
      terms[index_of(s)] = std::exp((*cfg.hit_rates[index_of(s)] - hmax) / cfg.temperature);
  return terms;
}

}  // namespace

WeightMap softmax_weights(const SliConfig& cfg, const SignalMask& available) {
  WeightMap w = softmax_terms(cfg, available);
  double total = 0.0;
  for (double t : w) total += t;
  for (double& t : w) t /= total;
  return w;
}

SliResult compute_sli(const SignalVector& vec, const Normalizer& norm, const SliConfig& cfg,
                      const std::string& key) {
  const auto* ranges = norm.find(key);
  if (!ranges) throw DomainError("sli: normalization group '" + key + "' was not fitted");

  SliResult res;
  std::array<double, kSignalCount> normalized{};
  for (Signal s : kAllSignals) {
    const std::size_t i = index_of(s);
    if (!cfg.eligible(s)) continue;
    const auto x = vec.get(s);
    const Range& r = (*ranges)[i];
    if (!x || !r.available) continue;
    res.used[i] = true;
    if (*x < r.min || *x > r.max) ++res.clamped;
    normalized[i] = normalize(*x, r.min, r.max);
  }
  const WeightMap terms = softmax_terms(cfg, res.used);
  // Dividing once at the end keeps the result exactly 0 or 1 at the extremes
  // and never above 1.
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < kSignalCount; ++i) {
    if (!res.used[i]) continue;
    num += terms[i] * normalized[i];
    den += terms[i];
  }
  res.value = std::clamp(num / den, 0.0, 1.0);
  return res;
}

}  // namespace literalis
