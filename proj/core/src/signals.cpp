#include "literalis/signals.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "literalis/error.hpp"

namespace literalis {

namespace {

constexpr std::string_view kSignalNames[kSignalCount] = {
    "pos_sim", "tree_sim", "density", "crossings", "seg_sem", "tok_sim_raw", "tok_sim_pen"};

// Counts pairs (k < m) with v[k] > v[m]; sorts v as a side effect.
std::uint64_t count_inversions(std::vector<std::uint32_t>& v, std::vector<std::uint32_t>& buf) {
  const std::size_t n = v.size();
  std::uint64_t inv = 0;
  buf.resize(n);
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n);
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (v[i] <= v[j]) {
          buf[k++] = v[i++];
        } else {
          inv += mid - i;
          buf[k++] = v[j++];
        }
      }
      while (i < mid) buf[k++] = v[i++];
      while (j < hi) buf[k++] = v[j++];
    }
    v.swap(buf);
  }
  return inv;
}

}  // namespace

std::string_view to_string(Signal s) noexcept { return kSignalNames[index_of(s)]; }

std::optional<Signal> parse_signal(std::string_view name) noexcept {
  for (Signal s : kAllSignals)
    if (kSignalNames[index_of(s)] == name) return s;
  return std::nullopt;
}

std::optional<double> SignalVector::get(Signal s) const noexcept {
  switch (s) {
    case Signal::pos_sim: return pos_sim;
    case Signal::tree_sim: return tree_sim;
    case Signal::density: return density;
    case Signal::crossings:
      return crossings ? std::optional<double>(static_cast<double>(*crossings)) : std::nullopt;
    case Signal::seg_sem: return seg_sem;
    case Signal::tok_sim_raw: return tok_sim_raw;
    case Signal::tok_sim_pen: return tok_sim_pen;
  }
  return std::nullopt;
}

void SignalVector::set(Signal s, std::optional<double> v) {
  switch (s) {
    case Signal::pos_sim: pos_sim = v; break;
    case Signal::tree_sim: tree_sim = v; break;
    case Signal::density: density = v; break;
    case Signal::crossings:
      if (v && (*v < 0 || *v != std::floor(*v))) throw DomainError("crossings must be a nonnegative integer");
      crossings = v ? std::optional<std::uint64_t>(static_cast<std::uint64_t>(*v)) : std::nullopt;
      break;
    case Signal::seg_sem: seg_sem = v; break;
    case Signal::tok_sim_raw: tok_sim_raw = v; break;
    case Signal::tok_sim_pen: tok_sim_pen = v; break;
  }
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.size() < b.size()) std::swap(a, b);
  if (b.empty()) return 0;
  // Row over the shorter sequence.
  std::vector<std::uint32_t> row(b.size() + 1, 0);
  for (const auto& x : a) {
    std::uint32_t diag = 0;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::uint32_t up = row[j];
      row[j] = (x == b[j - 1]) ? diag + 1 : std::max(up, row[j - 1]);
      diag = up;
    }
  }
  return row.back();
}

std::optional<double> lcs_ratio(std::span<const std::string> a, std::span<const std::string> b) {
  const std::size_t total = a.size() + b.size();
  if (total == 0) return std::nullopt;
  return 2.0 * static_cast<double>(lcs_length(a, b)) / static_cast<double>(total);
}

namespace {

bool strictly_sorted(std::span<const std::string> v) {
  return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
}

std::vector<std::string> as_set(std::span<const std::string> v) {
  std::vector<std::string> out(v.begin(), v.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::optional<double> jaccard(std::span<const std::string> a, std::span<const std::string> b) {
  // Parsed records already hold sorted, deduplicated arc sets.
  if (!strictly_sorted(a) || !strictly_sorted(b)) {
    const auto sa = as_set(a), sb = as_set(b);
    return jaccard(sa, sb);
  }
  std::size_t inter = 0, i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++inter, ++i, ++j;
    }
  }
  const std::size_t uni = a.size() + b.size() - inter;
  if (uni == 0) return std::nullopt;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::uint64_t count_crossings(std::span<const AlignmentLink> links) {
  if (links.size() < 2) return 0;
  std::vector<AlignmentLink> sorted(links.begin(), links.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::uint32_t> hyp(sorted.size()), buf;
  std::transform(sorted.begin(), sorted.end(), hyp.begin(), [](const AlignmentLink& l) { return l.hyp; });
  return count_inversions(hyp, buf);
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw DomainError("cosine: dimension mismatch");
  if (u.empty()) throw DomainError("cosine: empty vectors");
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) throw DomainError("cosine: zero vector");
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

std::optional<double> pos_sim(const FeatureRecord& r) {
  if (!r.src_pos || !r.hyp_pos) return std::nullopt;
  return lcs_ratio(*r.src_pos, *r.hyp_pos);
}

std::optional<double> tree_sim(const FeatureRecord& r) {
  if (!r.src_arcs || !r.hyp_arcs) return std::nullopt;
  return jaccard(*r.src_arcs, *r.hyp_arcs);
}

DensityValue density(const FeatureRecord& r) {
  if (r.src_tokens.empty() || r.hyp_tokens.empty())
    throw DegenerateInputError("density: empty token sequence in record '" + r.id + "'");
  const double longer = static_cast<double>(std::max(r.src_tokens.size(), r.hyp_tokens.size()));
  const double d = static_cast<double>(r.alignment.size()) / longer;
  if (d > 1.0) return {1.0, true};
  return {d, false};
}

std::uint64_t crossings(const FeatureRecord& r) { return count_crossings(r.alignment); }

std::optional<double> tok_sim_raw(const FeatureRecord& r) {
  if (r.pair_cos.empty()) return std::nullopt;
  // Summed in sorted order so the mean does not depend on link order.
  std::vector<double> sorted(r.pair_cos);
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double c : sorted) sum += c;
  return sum / static_cast<double>(sorted.size());
}

double tok_sim_pen(const FeatureRecord& r) {
  const DensityValue d = density(r);
  const auto raw = tok_sim_raw(r);
  return raw ? *raw * d.value : 0.0;
}

SignalVector score_record(const FeatureRecord& r) {
  SignalVector v;
  const DensityValue d = density(r);
  v.density = d.value;
  v.density_clamped = d.clamped;
  v.pos_sim = pos_sim(r);
  v.tree_sim = tree_sim(r);
  v.crossings = crossings(r);
  v.seg_sem = r.seg_cos;
  v.tok_sim_raw = tok_sim_raw(r);
  v.tok_sim_pen = v.tok_sim_raw ? *v.tok_sim_raw * d.value : 0.0;
  return v;
}

}  // namespace literalis
