#include "literalis/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "literalis/error.hpp"
#include "literalis/parallel.hpp"
#include "literalis/rng.hpp"

namespace literalis::stats {

namespace {

struct SideCounts {
  std::uint64_t at_or_below = 0;
  std::uint64_t at_or_above = 0;
};

template <class DrawMean>
SideCounts count_sides(const ResampleOptions& opt, DrawMean&& draw_mean) {
  // Each resample owns substream k, so the counts only depend on the seed.
  std::vector<signed char> side(opt.n_resamples);
  parallel_for(opt.n_resamples, opt.jobs, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      SplitMix64 gen(substream_seed(opt.seed, k));
      const double m = draw_mean(gen);
      side[k] = m < 0.0 ? -1 : (m > 0.0 ? 1 : 0);
    }
  });
  SideCounts c;
  for (signed char s : side) {
    if (s <= 0) ++c.at_or_below;
    if (s >= 0) ++c.at_or_above;
  }
  return c;
}

double two_sided_p(const SideCounts& c, std::uint64_t n_resamples) {
  const double far = static_cast<double>(std::min(c.at_or_below, c.at_or_above));
  return std::min(1.0, 2.0 * (far + 1.0) / (static_cast<double>(n_resamples) + 1.0));
}

void check_options(const ResampleOptions& opt) {
  if (opt.n_resamples < 1) throw DomainError("bootstrap: n_resamples must be >= 1");
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Centered copy and sum of squares.
double center(std::span<const double> in, std::vector<double>& out) {
  const double m = mean_of(in);
  out.resize(in.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[i] = in[i] - m;
    ss += out[i] * out[i];
  }
  return ss;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Pearson r with a permutation p-value. Permutation k shuffles y with its own
// substream, so the p-value does not depend on `jobs`.
CorrelationResult permutation_correlation(std::span<const double> x, std::span<const double> y,
                                          const PermutationOptions& opt, CorrelationMethod method,
                                          std::optional<double> observed = std::nullopt) {
  std::vector<double> xc, yc;
  const double sxx = center(x, xc);
  const double syy = center(y, yc);
  if (sxx == 0.0 || syy == 0.0) throw DomainError("zero variance");
  const double scale = std::sqrt(sxx) * std::sqrt(syy);
  const double r = observed ? *observed : std::clamp(dot(xc, yc) / scale, -1.0, 1.0);

  CorrelationResult res;
  res.coefficient = r;
  res.n = x.size();
  res.method = method;
  if (opt.n_permutations == 0) return res;

  const double threshold = std::abs(r) - 1e-12;
  std::vector<unsigned char> extreme(opt.n_permutations, 0);
  parallel_for(opt.n_permutations, opt.jobs, [&](std::size_t begin, std::size_t end) {
    std::vector<double> perm(yc.size());
    for (std::size_t k = begin; k < end; ++k) {
      SplitMix64 gen(substream_seed(opt.seed, k));
      std::copy(yc.begin(), yc.end(), perm.begin());
      for (std::size_t i = perm.size() - 1; i > 0; --i)
        std::swap(perm[i], perm[uniform_below(gen, i + 1)]);
      extreme[k] = std::abs(dot(xc, perm) / scale) >= threshold;
    }
  });
  const auto hits = static_cast<double>(std::count(extreme.begin(), extreme.end(), 1));
  res.p_value = std::min(1.0, (hits + 1.0) / (static_cast<double>(opt.n_permutations) + 1.0));
  return res;
}

}  // namespace

BootstrapResult paired_bootstrap(const ScoreMap& a, const ScoreMap& b, const ResampleOptions& opt) {
  check_options(opt);
  std::vector<std::pair<std::string_view, double>> shared;
  for (const auto& [id, va] : a)
    if (auto it = b.find(id); it != b.end()) shared.emplace_back(id, va - it->second);
  if (shared.empty()) throw DomainError("paired_bootstrap: no shared ids");
  std::sort(shared.begin(), shared.end());

  std::vector<double> diffs(shared.size());
  std::transform(shared.begin(), shared.end(), diffs.begin(), [](const auto& p) { return p.second; });
  const std::size_t n = diffs.size();

  const SideCounts c = count_sides(opt, [&](SplitMix64& gen) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += diffs[uniform_below(gen, n)];
    return s / static_cast<double>(n);
  });

  BootstrapResult res;
  res.mean_diff = mean_of(diffs);
  res.p_value = two_sided_p(c, opt.n_resamples);
  res.n_resamples = opt.n_resamples;
  res.seed = opt.seed;
  res.n = n;
  return res;
}

BootstrapResult unpaired_bootstrap(std::span<const double> a, std::span<const double> b,
                                   const ResampleOptions& opt) {
  check_options(opt);
  if (a.empty() || b.empty()) throw DomainError("unpaired_bootstrap: empty sample");
  const SideCounts c = count_sides(opt, [&](SplitMix64& gen) {
    double sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sa += a[uniform_below(gen, a.size())];
    for (std::size_t i = 0; i < b.size(); ++i) sb += b[uniform_below(gen, b.size())];
    return sa / static_cast<double>(a.size()) - sb / static_cast<double>(b.size());
  });
  BootstrapResult res;
  res.mean_diff = mean_of(a) - mean_of(b);
  res.p_value = two_sided_p(c, opt.n_resamples);
  res.n_resamples = opt.n_resamples;
  res.seed = opt.seed;
  res.n = a.size() + b.size();
  res.paired = false;
  return res;
}

std::vector<PairwiseComparison> pairwise_compare(const std::map<std::string, ScoreMap>& scores_by_system,
                                                 const ResampleOptions& opt) {
  std::vector<PairwiseComparison> out;
  for (auto a = scores_by_system.begin(); a != scores_by_system.end(); ++a) {
    for (auto b = std::next(a); b != scores_by_system.end(); ++b) {
      PairwiseComparison c{a->first, b->first, std::nullopt};
      try {
        c.result = paired_bootstrap(a->second, b->second, opt);
      } catch (const DomainError&) {
        // no shared ids
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i + 1;
    while (j < order.size() && x[order[j]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1 .. j
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = r;
    i = j;
  }
  return ranks;
}

FriedmanResult friedman(std::span<const std::vector<double>> rows) {
  const std::size_t n = rows.size();
  if (n < 2) throw DomainError("friedman: need at least 2 subjects");
  const std::size_t k = rows.front().size();
  if (k < 2) throw DomainError("friedman: need at least 2 treatments");

  std::vector<double> rank_sums(k, 0.0);
  double sum_sq_ranks = 0.0;
  for (const auto& row : rows) {
    if (row.size() != k) throw DomainError("friedman: ragged matrix");
    for (double v : row)
      if (std::isnan(v)) throw DomainError("friedman: missing cell");
    const auto r = average_ranks(row);
    for (std::size_t j = 0; j < k; ++j) {
      rank_sums[j] += r[j];
      sum_sq_ranks += r[j] * r[j];
    }
  }
  const double nd = static_cast<double>(n), kd = static_cast<double>(k);
  const double expected = nd * (kd + 1.0) / 2.0;
  double between = 0.0;
  for (double rs : rank_sums) between += (rs - expected) * (rs - expected);
  const double denom = sum_sq_ranks - nd * kd * (kd + 1.0) * (kd + 1.0) / 4.0;

  FriedmanResult res;
  res.n = n;
  res.k = k;
  if (denom <= 0.0) return res;  // every row fully tied
  res.statistic = (kd - 1.0) * between / denom;
  res.p_value = chi_square_sf(res.statistic, kd - 1.0);
  return res;
}

std::string_view to_string(CorrelationMethod m) noexcept {
  switch (m) {
    case CorrelationMethod::pearson: return "pearson";
    case CorrelationMethod::point_biserial: return "point_biserial";
    case CorrelationMethod::spearman: return "spearman";
  }
  return "";
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("pearson: length mismatch");
  if (x.size() < 2) throw DomainError("pearson: need at least 2 observations");
  std::vector<double> xc, yc;
  const double sxx = center(x, xc);
  const double syy = center(y, yc);
  if (sxx == 0.0 || syy == 0.0) throw DomainError("zero variance");
  return std::clamp(dot(xc, yc) / (std::sqrt(sxx) * std::sqrt(syy)), -1.0, 1.0);
}

CorrelationResult point_biserial(std::span<const int> binary, std::span<const double> cont,
                                 const PermutationOptions& opt) {
  if (binary.size() != cont.size()) throw DomainError("point_biserial: length mismatch");
  if (binary.size() < 3) throw DomainError("point_biserial: need at least 3 observations");
  std::vector<double> coded(binary.size());
  std::size_t ones = 0;
  for (std::size_t i = 0; i < binary.size(); ++i) {
    if (binary[i] != 0 && binary[i] != 1) throw DomainError("point_biserial: binary values must be 0 or 1");
    ones += static_cast<std::size_t>(binary[i]);
    coded[i] = binary[i];
  }
  if (ones == 0 || ones == binary.size()) throw DomainError("point_biserial: single class");

  // r = (M1 - M0) / s * sqrt(p q), s the population sd of `cont`. Swapping
  // the classes swaps M1 and M0, so recoding flips the sign exactly.
  double sum1 = 0.0, sum0 = 0.0;
  for (std::size_t i = 0; i < binary.size(); ++i) (binary[i] ? sum1 : sum0) += cont[i];
  const double n = static_cast<double>(binary.size());
  const double n1 = static_cast<double>(ones), n0 = n - n1;
  std::vector<double> centered;
  const double ss = center(cont, centered);
  if (ss == 0.0) throw DomainError("zero variance");
  const double r = std::clamp((sum1 / n1 - sum0 / n0) * std::sqrt(n1 * n0) / (n * std::sqrt(ss / n)), -1.0, 1.0);
  return permutation_correlation(coded, cont, opt, CorrelationMethod::point_biserial, r);
}

CorrelationResult spearman(std::span<const double> x, std::span<const double> y, const PermutationOptions& opt) {
  if (x.size() != y.size()) throw DomainError("spearman: length mismatch");
  if (x.size() < 3) throw DomainError("spearman: need at least 3 observations");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return permutation_correlation(rx, ry, opt, CorrelationMethod::spearman);
}

double raw_agreement(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.size() != b.size()) throw DomainError("agreement: length mismatch");
  if (a.empty()) throw DomainError("agreement: empty input");
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += a[i] == b[i];
  return static_cast<double>(same) / static_cast<double>(a.size());
}

double cohen_kappa(std::span<const std::string> a, std::span<const std::string> b) {
  const double po = raw_agreement(a, b);
  std::map<std::string_view, std::pair<std::size_t, std::size_t>> marginals;
  for (const auto& l : a) ++marginals[l].first;
  for (const auto& l : b) ++marginals[l].second;
  const double n = static_cast<double>(a.size());
  double pe = 0.0;
  for (const auto& [label, counts] : marginals)
    pe += (static_cast<double>(counts.first) / n) * (static_cast<double>(counts.second) / n);
  if (pe >= 1.0) throw DomainError("cohen_kappa: chance agreement is 1");
  return (po - pe) / (1.0 - pe);
}

double gamma_q(double a, double x) {
  if (!(a > 0.0)) throw DomainError("gamma_q: a must be > 0");
  if (std::isnan(x)) throw DomainError("gamma_q: x is NaN");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double log_prefactor = a * std::log(x) - x - std::lgamma(a);
  constexpr double eps = 1e-16;
  constexpr int max_iter = 10'000;

  if (x < a + 1.0) {
    // Series for P(a, x).
    double term = 1.0 / a, sum = term;
    for (int n = 1; n < max_iter; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::abs(term) < std::abs(sum) * eps) break;
    }
    return std::clamp(1.0 - sum * std::exp(log_prefactor), 0.0, 1.0);
  }

  // Continued fraction for Q(a, x), modified Lentz.
  constexpr double tiny = std::numeric_limits<double>::min() / eps;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < max_iter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < eps) break;
  }
  return std::clamp(std::exp(log_prefactor) * h, 0.0, 1.0);
}

double chi_square_sf(double x, double df) {
  if (!(df > 0.0)) throw DomainError("chi_square_sf: df must be > 0");
  return gamma_q(df / 2.0, x / 2.0);
}

std::string_view stars(double p) noexcept {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

}  // namespace literalis::stats
