#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace literalis::stats {

/// Scores keyed by item id (segment key).
using ScoreMap = std::unordered_map<std::string, double>;

struct BootstrapResult {
  double mean_diff = 0.0;
  double p_value = 1.0;
  std::uint64_t n_resamples = 0;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  bool paired = true;
};

struct ResampleOptions {
  std::uint64_t n_resamples = 10'000;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

/// Paired bootstrap of mean(a - b) over the ids present in both maps.
///
/// Each resample draws |shared| id pairs with replacement. The p-value is
/// two-sided: twice the smoothed share, (r + 1) / (n + 1), of resampled mean
/// differences falling on the far side of zero (zero counts on both sides),
/// capped at 1. Resample k uses its own substream of `seed`, so results are
/// identical for every `jobs`. Throws DomainError on an empty intersection.
BootstrapResult paired_bootstrap(const ScoreMap& a, const ScoreMap& b, const ResampleOptions& opt = {});

/// Two-sample fallback for disjoint id sets: each group is resampled
/// independently. Labelled unpaired in the result.
BootstrapResult unpaired_bootstrap(std::span<const double> a, std::span<const double> b,
                                   const ResampleOptions& opt = {});

struct PairwiseComparison {
  std::string system_a;
  std::string system_b;
  std::optional<BootstrapResult> result;  // empty when no ids are shared
};

/// Paired bootstrap for every unordered pair of systems (a < b, mean a - b).
/// Every pair uses the same seed.
std::vector<PairwiseComparison> pairwise_compare(const std::map<std::string, ScoreMap>& scores_by_system,
                                                 const ResampleOptions& opt = {});

struct FriedmanResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  std::size_t k = 0;
};

/// Tie-corrected Friedman test over an n x k matrix (subjects x treatments).
/// p from the chi-square(k - 1) upper tail. Throws DomainError when n < 2,
/// k < 2, rows are ragged, or a cell is NaN.
FriedmanResult friedman(std::span<const std::vector<double>> rows);

enum class CorrelationMethod { pearson, point_biserial, spearman };
std::string_view to_string(CorrelationMethod m) noexcept;

struct CorrelationResult {
  double coefficient = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  CorrelationMethod method = CorrelationMethod::pearson;
};

struct PermutationOptions {
  std::uint64_t n_permutations = 10'000;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

/// Pearson r. Throws DomainError on length mismatch, n < 2 or zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson correlation of a 0/1 coding with a continuous variable; two-sided
/// permutation p-value. Throws DomainError when a class is empty, lengths
/// differ, n < 3, or `cont` is constant ("zero variance").
CorrelationResult point_biserial(std::span<const int> binary, std::span<const double> cont,
                                 const PermutationOptions& opt = {});

/// Pearson correlation of average ranks; two-sided permutation p-value.
CorrelationResult spearman(std::span<const double> x, std::span<const double> y,
                           const PermutationOptions& opt = {});

/// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> x);

/// Fraction of positions where the labels agree.
double raw_agreement(std::span<const std::string> a, std::span<const std::string> b);

/// (p_o - p_e) / (1 - p_e). Throws DomainError on empty or mismatched
/// input, or when p_e = 1.
double cohen_kappa(std::span<const std::string> a, std::span<const std::string> b);

/// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

/// P(X > x) for X ~ chi-square(df).
double chi_square_sf(double x, double df);

/// "***" p < 0.001, "**" p < 0.01, "*" p < 0.05, "" otherwise.
std::string_view stars(double p) noexcept;

}  // namespace literalis::stats
