#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "literalis/dynamics.hpp"
#include "literalis/scored.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using namespace literalis;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "literalis");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_lines(const fs::path& p, const std::vector<std::string>& lines) {
  std::ofstream o(p, std::ios::binary);
  for (const auto& l : lines) o << l << '\n';
}

void write_records(const fs::path& p, const std::vector<FeatureRecord>& recs) {
  std::vector<std::string> lines;
  for (const auto& r : recs) lines.push_back(serialize_record(r));
  write_lines(p, lines);
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("literalis-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  std::string path(const std::string& name) const { return (dir / name).string(); }

  // corpus -> signals -> normalizer -> sli
  void pipeline(const std::vector<FeatureRecord>& recs) {
    write_records(dir / "corpus.jsonl", recs);
    ASSERT_EQ(run({"score", "--in", path("corpus.jsonl"), "--out", path("signals.jsonl")}).code, 0);
    ASSERT_EQ(run({"sli", "fit", "--signals", path("signals.jsonl"), "--out", path("norm.json")}).code, 0);
    ASSERT_EQ(run({"sli", "apply", "--signals", path("signals.jsonl"), "--normalizer", path("norm.json"), "--out",
                   path("sli.jsonl")})
                  .code,
              0);
  }

  fs::path dir;
};

}  // namespace

TEST_F(Cli, ValidateCleanFile) {
  synth::Gen g(1);
  std::vector<FeatureRecord> recs;
  for (int i = 0; i < 20; ++i) recs.push_back(synth::random_record(g, "r" + std::to_string(i)));
  write_records(dir / "a.jsonl", recs);
  const auto r = run({"validate", path("a.jsonl")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("20 records, 0 errors"), std::string::npos);
}

TEST_F(Cli, ValidateReportsBadLine) {
  synth::Gen g(2);
  std::vector<std::string> lines;
  for (int i = 0; i < 3; ++i) lines.push_back(serialize_record(synth::random_record(g, "r" + std::to_string(i))));
  auto bad = synth::random_record(g, "bad");
  bad.pair_cos.push_back(0.5);  // one more cosine than links
  lines.insert(lines.begin() + 1, serialize_record(bad));
  write_lines(dir / "a.jsonl", lines);
  const auto r = run({"validate", path("a.jsonl")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("4 records, 1 errors"), std::string::npos);
  EXPECT_NE(r.err.find("pair_cos"), std::string::npos) << r.err;
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST_F(Cli, ValidateMissingFileIsIoError) {
  EXPECT_EQ(run({"validate", path("nope.jsonl")}).code, 2);
  EXPECT_EQ(run({"score", "--in", path("nope.jsonl"), "--out", "-"}).code, 2);
}

TEST_F(Cli, ScoreIdentityAndParserlessRecords) {
  synth::Gen g(3);
  const auto src = synth::make_source(g, 6);
  auto lit = synth::literal_record(src, "lit");
  auto bare = synth::random_record(g, "bare", false);
  write_records(dir / "a.jsonl", {lit, bare});
  const auto r = run({"score", "--in", path("a.jsonl"), "--out", "-"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  const auto scored = read_scored(in);
  ASSERT_EQ(scored.size(), 2u);
  for (Signal s : kAllSignals) {
    ASSERT_TRUE(scored[0].signals.get(s)) << to_string(s);
    EXPECT_EQ(*scored[0].signals.get(s), s == Signal::crossings ? 0.0 : 1.0) << to_string(s);
  }
  EXPECT_FALSE(scored[1].signals.get(Signal::pos_sim));
  EXPECT_FALSE(scored[1].signals.get(Signal::tree_sim));
  EXPECT_TRUE(scored[1].signals.get(Signal::seg_sem));
  EXPECT_NE(r.out.find("\"pos_sim\":null"), std::string::npos);
}

TEST_F(Cli, ScoreIsByteIdenticalAcrossRunsAndJobs) {
  synth::Gen g(4);
  std::vector<FeatureRecord> recs;
  for (int i = 0; i < 500; ++i) recs.push_back(synth::random_record(g, "r" + std::to_string(i)));
  write_records(dir / "a.jsonl", recs);
  ASSERT_EQ(run({"score", "--in", path("a.jsonl"), "--out", path("s1.jsonl")}).code, 0);
  ASSERT_EQ(run({"score", "--in", path("a.jsonl"), "--out", path("s2.jsonl")}).code, 0);
  ASSERT_EQ(run({"score", "--in", path("a.jsonl"), "--out", path("s4.jsonl"), "--jobs", "4"}).code, 0);
  EXPECT_EQ(slurp(dir / "s1.jsonl"), slurp(dir / "s2.jsonl"));
  EXPECT_EQ(slurp(dir / "s1.jsonl"), slurp(dir / "s4.jsonl"));
}

TEST_F(Cli, ScoreFilters) {
  synth::Gen g(5);
  std::vector<FeatureRecord> recs;
  for (int i = 0; i < 200; ++i) recs.push_back(synth::random_record(g, "r" + std::to_string(i)));
  write_records(dir / "a.jsonl", recs);
  const auto r = run({"score", "--in", path("a.jsonl"), "--out", "-", "--max-quality", "5", "--system", "mt-a,mt-b"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::size_t want = 0;
  for (const auto& x : recs) want += x.quality && *x.quality < 5.0 && x.system != "human";
  EXPECT_EQ(static_cast<std::size_t>(std::count(r.out.begin(), r.out.end(), '\n')), want);
  EXPECT_EQ(run({"score", "--in", path("a.jsonl"), "--out", "-", "--max-quality", "-1"}).code, 64);
  EXPECT_EQ(run({"score", "--in", path("a.jsonl"), "--out", "-", "--task", "bogus"}).code, 64);
}

TEST_F(Cli, SingleRecordCorpusGivesHalf) {
  synth::Gen g(6);
  pipeline({synth::random_record(g, "only")});
  std::ifstream in(dir / "sli.jsonl");
  const auto recs = read_sli_records(in);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].sli, 0.5);
}

TEST_F(Cli, RefitOnShuffledInputGivesIdenticalSidecar) {
  synth::Gen g(7);
  std::vector<FeatureRecord> recs;
  for (int i = 0; i < 300; ++i) recs.push_back(synth::random_record(g, "r" + std::to_string(i)));
  pipeline(recs);
  const auto first = slurp(dir / "norm.json");
  g.shuffle(recs);
  write_records(dir / "shuffled.jsonl", recs);
  ASSERT_EQ(run({"score", "--in", path("shuffled.jsonl"), "--out", path("sig2.jsonl")}).code, 0);
  ASSERT_EQ(run({"sli", "fit", "--signals", path("sig2.jsonl"), "--out", path("norm2.json")}).code, 0);
  EXPECT_EQ(first, slurp(dir / "norm2.json"));
}

TEST_F(Cli, MissingSignalGroupLogsRenormalization) {
  synth::Gen g(8);
  std::vector<FeatureRecord> recs;
  for (int i = 0; i < 10; ++i) {
    auto r = synth::random_record(g, "r" + std::to_string(i), false);
    r.lp = "en-ja_JP";
    recs.push_back(r);
  }
  write_records(dir / "a.jsonl", recs);
  ASSERT_EQ(run({"score", "--in", path("a.jsonl"), "--out", path("s.jsonl")}).code, 0);
  ASSERT_EQ(run({"sli", "fit", "--signals", path("s.jsonl"), "--out", path("n.json")}).code, 0);
  const auto r = run({"sli", "apply", "--signals", path("s.jsonl"), "--normalizer", path("n.json"), "--out", "-"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("group en-ja_JP: weights renormalized over available signals"), std::string::npos) << r.err;
  EXPECT_EQ(r.err.find("pos_sim="), std::string::npos);
  std::istringstream in(r.out);
  for (const auto& s : read_sli_records(in)) {
    EXPECT_GE(s.sli, 0.0);
    EXPECT_LE(s.sli, 1.0);
  }
}

TEST_F(Cli, CompareIdenticalSystemsGivesPOne) {
  synth::Gen g(9);
  std::vector<std::string> lines;
  for (int k = 0; k < 40; ++k) {
    const double v = g.unit();
    for (const char* sys : {"a", "b"})
      lines.push_back(serialize_sli_record({std::string(sys) + std::to_string(k), "en-fr", sys, Task::single,
                                            std::nullopt, v, "s" + std::to_string(k)}));
  }
  write_lines(dir / "sli.jsonl", lines);
  const auto r = run({"analyze", "compare", "--sli", path("sli.jsonl"), "--seed", "3", "--n-resamples", "999",
                      "--out-dir", path("rep"), "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, path("rep/compare.json") + "\n");
  const auto j = slurp(dir / "rep" / "compare.json");
  EXPECT_NE(j.find("\"p\": 1.0"), std::string::npos) << j;
  EXPECT_NE(j.find("\"mean_diff\": 0.0"), std::string::npos) << j;
}

TEST_F(Cli, AnalysesAreDeterministicAcrossRunsAndJobs) {
  pipeline(synth::study_corpus(10, 120));
  for (const std::string analysis : {"compare", "triggers", "dynamics", "trajectory"}) {
    std::vector<std::string> outputs;
    for (const auto& [run_dir, jobs] : std::vector<std::pair<std::string, std::string>>{
             {"r1", "1"}, {"r2", "1"}, {"r3", "3"}}) {
      const auto r = run({"analyze", analysis, "--sli", path("sli.jsonl"), "--corpus", path("corpus.jsonl"),
                          "--seed", "42", "--n-resamples", "500", "--jobs", jobs, "--out-dir", path(run_dir)});
      ASSERT_EQ(r.code, 0) << analysis << ": " << r.err;
      std::string all;
      for (const auto& e : fs::directory_iterator(dir / run_dir)) all += e.path().filename().string() + slurp(e);
      outputs.push_back(all);
      fs::remove_all(dir / run_dir);
    }
    EXPECT_FALSE(outputs[0].empty());
    EXPECT_EQ(outputs[0], outputs[1]) << analysis;
    EXPECT_EQ(outputs[0], outputs[2]) << analysis;
  }
}

TEST_F(Cli, TriggersAndDynamicsProduceRows) {
  pipeline(synth::study_corpus(11, 200));
  auto r = run({"analyze", "triggers", "--sli", path("sli.jsonl"), "--corpus", path("corpus.jsonl"), "--seed", "1",
                "--n-resamples", "200", "--out-dir", path("rep"), "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto triggers = slurp(dir / "rep" / "triggers.csv");
  EXPECT_EQ(triggers.rfind("system,n,pb_r,pb_p,rho,rho_p,note\neditor,200,", 0), 0u) << triggers;

  r = run({"analyze", "dynamics", "--sli", path("sli.jsonl"), "--corpus", path("corpus.jsonl"), "--out-dir",
           path("rep"), "--format", "csv", "--domain", "news,social", "--max-quality", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "rep" / "dynamics.csv"));
  EXPECT_TRUE(fs::exists(dir / "rep" / "alteration.csv"));
  EXPECT_NE(r.err.find("paired"), std::string::npos);
}

TEST_F(Cli, AugmentThenHitratesAndGradient) {
  std::vector<std::string> lines;
  for (const auto& t : synth::make_triplets(12, 6, {"fr", "de"})) lines.push_back(serialize_triplet(t));
  write_lines(dir / "triplets.jsonl", lines);
  ASSERT_EQ(run({"augment", "--triplets", path("triplets.jsonl"), "--n", "40", "--seed", "5", "--out",
                 path("m1.jsonl")})
                .code,
            0);
  ASSERT_EQ(run({"augment", "--triplets", path("triplets.jsonl"), "--n", "40", "--seed", "5", "--jobs", "4",
                 "--out", path("m2.jsonl")})
                .code,
            0);
  EXPECT_EQ(slurp(dir / "m1.jsonl"), slurp(dir / "m2.jsonl"));

  auto r = run({"analyze", "validate-heuristics", "--triplets", path("triplets.jsonl"), "--out-dir", path("rep")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "rep" / "hitrates.csv"));
  EXPECT_TRUE(fs::exists(dir / "rep" / "hitrates.json"));

  // mixtures from augment carry no features; the gradient needs annotated ones
  std::ifstream min(dir / "m1.jsonl");
  auto mixtures = read_mixtures(min);
  const auto base = synth::make_triplets(12, 6, {"fr", "de"});
  lines.clear();
  for (auto& m : mixtures) {
    synth::annotate_mixture(m, base);
    lines.push_back(serialize_mixture(m));
  }
  write_lines(dir / "annotated.jsonl", lines);
  r = run({"analyze", "gradient", "--mixtures", path("annotated.jsonl"), "--out-dir", path("rep"), "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir / "rep" / "gradient.csv").rfind("heuristic,N,100%,66%,33%,0%,p_value,chi2,excluded\n", 0), 0u);
}

TEST_F(Cli, ExitCodes) {
  write_lines(dir / "empty.jsonl", {});
  auto r = run({"analyze", "no-such-analysis", "--sli", path("empty.jsonl")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("unknown analysis"), std::string::npos);
  EXPECT_EQ(run({"analyze", "compare", "--sli", path("empty.jsonl")}).code, 64) << "missing --seed";
  EXPECT_EQ(run({"analyze", "triggers", "--sli", path("empty.jsonl"), "--corpus", path("empty.jsonl")}).code, 64);
  EXPECT_EQ(run({"analyze", "trajectory", "--sli", path("empty.jsonl"), "--domain", "news"}).code, 64);
  EXPECT_EQ(run({"analyze", "trajectory", "--sli", path("empty.jsonl"), "--format", "xml"}).code, 64);
  EXPECT_EQ(run({"analyze", "dynamics", "--sli", path("empty.jsonl"), "--corpus", path("empty.jsonl"), "--epsilon",
                 "0"})
                .code,
            64);
  EXPECT_EQ(run({"analyze", "trajectory", "--sli", path("missing.jsonl")}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 64);
  EXPECT_EQ(run({}).code, 64);
  EXPECT_EQ(run({"score"}).code, 64);
  EXPECT_EQ(run({"--help"}).code, 0);

  write_lines(dir / "bad.jsonl", {"{\"id\": 3}"});
  r = run({"score", "--in", path("bad.jsonl"), "--out", "-"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("line 1"), std::string::npos) << r.err;
}

TEST_F(Cli, CompareRejectsDuplicateSegments) {
  write_lines(dir / "sli.jsonl", {serialize_sli_record({"x1", "l", "a", Task::single, std::nullopt, 0.5, "s"}),
                                  serialize_sli_record({"x2", "l", "a", Task::single, std::nullopt, 0.6, "s"})});
  const auto r = run({"analyze", "compare", "--sli", path("sli.jsonl"), "--seed", "1", "--out-dir", path("rep")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("duplicate"), std::string::npos);
}

TEST_F(Cli, ShippedConfigMatchesDefaults) {
  synth::Gen g(13);
  std::vector<FeatureRecord> recs;
  for (int i = 0; i < 50; ++i) recs.push_back(synth::random_record(g, "r" + std::to_string(i)));
  pipeline(recs);
  const auto r = run({"sli", "apply", "--signals", path("signals.jsonl"), "--normalizer", path("norm.json"), "--config",
                      LITERALIS_DATA_DIR "/sli_config.json", "--out", "-"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, slurp(dir / "sli.jsonl"));
}
