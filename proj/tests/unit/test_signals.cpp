#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "literalis/error.hpp"
#include "literalis/signals.hpp"
#include "synthetic.hpp"

using namespace literalis;

namespace {

// Top-down memoized LCS, independent of the library's rolling-row DP.
std::size_t lcs_oracle(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
    if (i == a.size() || j == b.size()) return 0;
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::size_t best = a[i] == b[j] ? 1 + go(i + 1, j + 1) : std::max(go(i + 1, j), go(i, j + 1));
    return memo[key] = best;
  };
  return go(0, 0);
}

// Definition: two links cross when their order on one side is the reverse of
// the other.
std::uint64_t crossings_oracle(const std::vector<AlignmentLink>& a) {
  std::uint64_t n = 0;
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t m = k + 1; m < a.size(); ++m) {
      const auto &p = a[k], &q = a[m];
      if ((p.src < q.src && p.hyp > q.hyp) || (p.src > q.src && p.hyp < q.hyp)) ++n;
    }
  return n;
}

double jaccard_oracle(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end()), uni = sa;
  uni.insert(sb.begin(), sb.end());
  std::size_t inter = 0;
  for (const auto& x : sa) inter += sb.count(x);
  return double(inter) / double(uni.size());
}

FeatureRecord simple(std::vector<std::string> src, std::vector<std::string> hyp) {
  FeatureRecord r;
  r.id = "t";
  r.lp = "en-fr_FR";
  r.system = "s";
  r.src_tokens = std::move(src);
  r.hyp_tokens = std::move(hyp);
  return r;
}

std::vector<std::string> random_labels(synth::Gen& g, std::size_t max_len) {
  std::vector<std::string> v(g.below(max_len + 1));
  for (auto& x : v) x = g.tag();
  return v;
}

}  // namespace

TEST(LcsRatio, Examples) {
  const std::vector<std::string> nvn{"NOUN", "VERB", "NOUN"}, nn{"NOUN", "NOUN"}, e{};
  EXPECT_DOUBLE_EQ(*lcs_ratio(nvn, nvn), 1.0);
  EXPECT_DOUBLE_EQ(*lcs_ratio(nvn, nn), 0.8);  // 2*2/5
  EXPECT_FALSE(lcs_ratio(e, e).has_value());
  EXPECT_DOUBLE_EQ(*lcs_ratio(nvn, e), 0.0);
  EXPECT_DOUBLE_EQ(*lcs_ratio(std::vector<std::string>{"A"}, std::vector<std::string>{"B"}), 0.0);
}

TEST(LcsRatio, MatchesMemoizedOracleAndIsSymmetric) {
  synth::Gen g(101);
  for (int t = 0; t < 1000; ++t) {
    const auto a = random_labels(g, 12), b = random_labels(g, 12);
    const std::size_t want = lcs_oracle(a, b);
    ASSERT_EQ(lcs_length(a, b), want);
    if (a.empty() && b.empty()) continue;
    EXPECT_EQ(*lcs_ratio(a, b), 2.0 * double(want) / double(a.size() + b.size()));
    EXPECT_EQ(*lcs_ratio(a, b), *lcs_ratio(b, a));
  }
}

TEST(TreeSim, Examples) {
  const std::vector<std::string> abc{"a", "b", "c"}, bcd{"b", "c", "d"}, e{};
  EXPECT_DOUBLE_EQ(*jaccard(abc, abc), 1.0);
  EXPECT_DOUBLE_EQ(*jaccard(abc, bcd), 0.5);  // 2 shared of 4
  EXPECT_FALSE(jaccard(e, e).has_value());
  EXPECT_DOUBLE_EQ(*jaccard(abc, e), 0.0);
  const std::vector<std::string> unsorted{"c", "a", "b", "a"};
  EXPECT_DOUBLE_EQ(*jaccard(unsorted, bcd), 0.5);
}

TEST(TreeSim, MatchesSetOracleSymmetricAndOneIffEqual) {
  synth::Gen g(7);
  for (int t = 0; t < 1000; ++t) {
    auto a = random_labels(g, 6), b = random_labels(g, 6);
    synth::sort_unique(a);
    synth::sort_unique(b);
    if (a.empty() && b.empty()) {
      EXPECT_FALSE(jaccard(a, b));
      continue;
    }
    ASSERT_EQ(*jaccard(a, b), jaccard_oracle(a, b));
    EXPECT_EQ(*jaccard(a, b), *jaccard(b, a));
    EXPECT_EQ(*jaccard(a, b) == 1.0, a == b);
  }
}

TEST(Crossings, Examples) {
  EXPECT_EQ(count_crossings(std::vector<AlignmentLink>{}), 0u);
  EXPECT_EQ(count_crossings(std::vector<AlignmentLink>{{1, 1}}), 0u);
  EXPECT_EQ(count_crossings(std::vector<AlignmentLink>{{1, 1}, {2, 2}}), 0u);
  EXPECT_EQ(count_crossings(std::vector<AlignmentLink>{{1, 2}, {2, 1}, {3, 3}}), 1u);
  for (std::uint32_t k = 1; k <= 9; ++k) {
    std::vector<AlignmentLink> rev;
    for (std::uint32_t i = 1; i <= k; ++i) rev.push_back({i, k + 1 - i});
    EXPECT_EQ(count_crossings(rev), std::uint64_t(k) * (k - 1) / 2);
  }
}

TEST(Crossings, FanOutsDoNotCross) {
  EXPECT_EQ(count_crossings(std::vector<AlignmentLink>{{1, 3}, {1, 1}, {1, 2}}), 0u);
  EXPECT_EQ(count_crossings(std::vector<AlignmentLink>{{2, 1}, {1, 1}, {3, 1}}), 0u);
  EXPECT_EQ(count_crossings(std::vector<AlignmentLink>{{1, 2}, {1, 3}, {2, 1}}), 2u);
}

TEST(Crossings, ExhaustiveSmallGridAgainstDefinition) {
  // every subset of a 3x3 grid up to 6 links, in a shuffled order
  synth::Gen g(1);
  std::vector<AlignmentLink> cells;
  for (std::uint32_t i = 1; i <= 3; ++i)
    for (std::uint32_t j = 1; j <= 3; ++j) cells.push_back({i, j});
  int checked = 0;
  for (unsigned mask = 0; mask < (1u << 9); ++mask) {
    std::vector<AlignmentLink> a;
    for (unsigned b = 0; b < 9; ++b)
      if (mask >> b & 1u) a.push_back(cells[b]);
    if (a.size() > 6) continue;
    g.shuffle(a);
    ASSERT_EQ(count_crossings(a), crossings_oracle(a));
    ++checked;
  }
  EXPECT_EQ(checked, 466);
}

TEST(Crossings, RandomAlignmentsAgainstDefinition) {
  synth::Gen g(2);
  for (int t = 0; t < 1000; ++t) {
    std::vector<AlignmentLink> a(g.below(40));
    for (auto& l : a) l = {static_cast<std::uint32_t>(1 + g.below(15)), static_cast<std::uint32_t>(1 + g.below(15))};
    ASSERT_EQ(count_crossings(a), crossings_oracle(a));
  }
}

TEST(Cosine, Examples) {
  const std::vector<double> u{1, 2, 2}, v{2, 1, 2}, e1{1, 0, 0}, e2{0, 1, 0};
  EXPECT_NEAR(cosine(u, v), 8.0 / 9.0, 1e-15);
  EXPECT_DOUBLE_EQ(cosine(e1, e1), 1.0);
  EXPECT_DOUBLE_EQ(cosine(e1, e2), 0.0);
  const std::vector<double> w{0.1, 0.2, 0.3};
  EXPECT_LE(cosine(w, w), 1.0);
  const std::vector<double> zero{0, 0, 0}, short_{1, 2};
  EXPECT_THROW(cosine(zero, u), DomainError);
  EXPECT_THROW(cosine(u, short_), DomainError);
}

TEST(Density, ExamplesAndClamp) {
  auto r = simple({"a", "b", "c", "d"}, {"w", "x"});
  r.alignment = {{1, 1}, {2, 2}};
  r.pair_cos = {1, 1};
  EXPECT_DOUBLE_EQ(density(r).value, 0.5);
  EXPECT_FALSE(density(r).clamped);

  auto m = simple({"a", "b"}, {"x", "y"});
  m.alignment = {{1, 1}, {1, 2}, {2, 1}, {2, 2}};
  m.pair_cos = {1, 1, 1, 1};
  EXPECT_DOUBLE_EQ(density(m).value, 1.0);
  EXPECT_TRUE(density(m).clamped);
  EXPECT_TRUE(score_record(m).density_clamped);
}

TEST(Density, EmptyTokensAreDegenerate) {
  EXPECT_THROW(density(simple({}, {"x"})), DegenerateInputError);
  EXPECT_THROW(score_record(simple({"a"}, {})), DegenerateInputError);
}

TEST(Density, UnalignedHypTokenLowersDensity) {
  synth::Gen g(4);
  for (int t = 0; t < 300; ++t) {
    auto r = synth::random_record(g, "d");
    if (r.hyp_tokens.size() < r.src_tokens.size()) std::swap(r.src_tokens, r.hyp_tokens), r.alignment.clear(),
                                                  r.pair_cos.clear();
    if (r.alignment.empty()) r.alignment = {{1, 1}}, r.pair_cos = {0.5};
    if (density(r).clamped) continue;
    const double before = density(r).value;
    r.hyp_tokens.push_back("extra");
    EXPECT_LT(density(r).value, before);
  }
}

TEST(TokSim, Examples) {
  auto r = simple({"a", "b"}, {"x", "y"});
  r.alignment = {{1, 1}};
  r.pair_cos = {0.5};
  EXPECT_DOUBLE_EQ(*tok_sim_raw(r), 0.5);
  r.alignment = {{1, 1}, {2, 2}};
  r.pair_cos = {1.0, 0.0};
  EXPECT_DOUBLE_EQ(*tok_sim_raw(r), 0.5);
  r.alignment.clear();
  r.pair_cos.clear();
  EXPECT_FALSE(tok_sim_raw(r).has_value());
  EXPECT_EQ(tok_sim_pen(r), 0.0);
}

TEST(TokSim, PenaltyIsRawTimesDensity) {
  // raw 0.8 over 2 links in a 4-token segment: density 0.5
  auto r = simple({"a", "b", "c", "d"}, {"w", "x", "y", "z"});
  r.alignment = {{1, 1}, {2, 2}};
  r.pair_cos = {0.9, 0.7};
  EXPECT_NEAR(tok_sim_pen(r), 0.4, 1e-15);
  auto lit = synth::literal_record({{"a", "b"}, {"X", "Y"}, {}}, "l");
  EXPECT_DOUBLE_EQ(tok_sim_pen(lit), 1.0);
}

TEST(TokSim, PenaltyBoundedByRaw) {
  synth::Gen g(9);
  for (int t = 0; t < 1000; ++t) {
    const auto r = synth::random_record(g, "p");
    const auto raw = tok_sim_raw(r);
    const double pen = tok_sim_pen(r);
    if (!raw) {
      EXPECT_EQ(pen, 0.0);
      continue;
    }
    if (*raw >= 0) {
      EXPECT_GE(pen, 0.0);
      EXPECT_LE(pen, std::max(0.0, *raw));
    }
  }
}

TEST(ScoreRecord, MaximalLiteralityFixture) {
  synth::Gen g(5);
  const auto s = synth::make_source(g, 9);
  const auto v = score_record(synth::literal_record(s, "lit"));
  EXPECT_EQ(v.pos_sim, 1.0);
  EXPECT_EQ(v.tree_sim, 1.0);
  EXPECT_EQ(v.density, 1.0);
  EXPECT_EQ(v.tok_sim_raw, 1.0);
  EXPECT_EQ(v.tok_sim_pen, 1.0);
  EXPECT_EQ(v.seg_sem, 1.0);
  EXPECT_EQ(v.crossings, 0u);
  EXPECT_FALSE(v.density_clamped);
}

TEST(ScoreRecord, ParserlessRecordMissesSyntaxSignalsOnly) {
  synth::Gen g(6);
  const auto r = synth::random_record(g, "np", false);
  const auto v = score_record(r);
  EXPECT_FALSE(v.pos_sim);
  EXPECT_FALSE(v.tree_sim);
  EXPECT_TRUE(v.density);
  EXPECT_TRUE(v.crossings);
  EXPECT_TRUE(v.seg_sem);
  EXPECT_TRUE(v.tok_sim_pen);
}

TEST(ScoreRecord, EachFieldIsItsStandaloneOperation) {
  synth::Gen g(10);
  for (int t = 0; t < 500; ++t) {
    const auto r = synth::random_record(g, "c", t % 4 != 0);
    const auto v = score_record(r);
    EXPECT_EQ(v.pos_sim, pos_sim(r));
    EXPECT_EQ(v.tree_sim, tree_sim(r));
    EXPECT_EQ(v.density, density(r).value);
    EXPECT_EQ(v.density_clamped, density(r).clamped);
    EXPECT_EQ(v.crossings, crossings(r));
    EXPECT_EQ(v.seg_sem, r.seg_cos);
    EXPECT_EQ(v.tok_sim_raw, tok_sim_raw(r));
    EXPECT_EQ(v.tok_sim_pen, tok_sim_pen(r));
    EXPECT_EQ(score_record(r), v);
  }
}

TEST(ScoreRecord, AlignmentOrderDoesNotMatter) {
  synth::Gen g(12);
  for (int t = 0; t < 300; ++t) {
    auto r = synth::random_record(g, "o");
    const auto before = score_record(r);
    std::vector<std::size_t> idx(r.alignment.size());
    std::iota(idx.begin(), idx.end(), 0);
    g.shuffle(idx);
    auto p = r;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      p.alignment[k] = r.alignment[idx[k]];
      p.pair_cos[k] = r.pair_cos[idx[k]];
    }
    EXPECT_EQ(score_record(p), before);
  }
}

TEST(SignalVector, GetSetAndNames) {
  SignalVector v;
  v.set(Signal::crossings, 3.0);
  EXPECT_EQ(v.crossings, 3u);
  EXPECT_EQ(v.get(Signal::crossings), 3.0);
  EXPECT_THROW(v.set(Signal::crossings, 1.5), DomainError);
  v.set(Signal::tree_sim, std::nullopt);
  EXPECT_FALSE(v.get(Signal::tree_sim));
  for (Signal s : kAllSignals) EXPECT_EQ(parse_signal(to_string(s)), s);
  EXPECT_FALSE(parse_signal("bleu"));
  EXPECT_EQ(polarity(Signal::crossings), -1);
  EXPECT_EQ(polarity(Signal::density), 1);
}
