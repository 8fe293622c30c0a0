#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <unordered_set>

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "literalis/corpus.hpp"
#include "literalis/dynamics.hpp"
#include "literalis/error.hpp"
#include "literalis/parallel.hpp"
#include "literalis/report.hpp"
#include "literalis/scored.hpp"
#include "literalis/sli.hpp"
#include "literalis/valharness.hpp"

namespace literalis::cli {

namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

std::string slurp(const std::string& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failure on '" + path + "'");
  return ss.str();
}

// "-" is stdout.
class Output {
 public:
  Output(const std::string& path, std::ostream& out) {
    if (path == "-") {
      os_ = &out;
    } else {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw IoError("cannot open '" + path + "' for writing");
      os_ = &file_;
    }
  }
  std::ostream& stream() { return *os_; }
  void close() {
    os_->flush();
    if (!*os_) throw IoError("write failure");
    if (file_.is_open()) file_.close();
  }

 private:
  std::ofstream file_;
  std::ostream* os_ = nullptr;
};

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto log = std::make_shared<spdlog::logger>("literalis", sink);
  log->set_pattern("[%l] %v");
  log->set_level(spdlog::level::info);
  if (const char* env = std::getenv("LITERALIS_LOG")) {
    const std::string v(env);
    auto level = spdlog::level::from_str(v);
    // from_str maps unknown names to off; only honour real names.
    if (level != spdlog::level::off || v == "off") log->set_level(level);
  }
  return log;
}

// Filter flags shared by several subcommands.
struct FilterArgs {
  double max_quality = 0.0;
  CLI::Option* max_quality_opt = nullptr;
  bool quality_inclusive = false;
  std::vector<std::string> tasks, systems, lps, domains;

  void attach(CLI::App* app) {
    max_quality_opt = app->add_option("--max-quality", max_quality, "keep records with quality below this");
    app->add_flag("--quality-inclusive", quality_inclusive, "keep quality equal to --max-quality too");
    app->add_option("--task", tasks, "single, iterative or post_edit")->delimiter(',');
    app->add_option("--system", systems)->delimiter(',');
    app->add_option("--lp", lps)->delimiter(',');
    app->add_option("--domain", domains)->delimiter(',');
  }

  CorpusFilter build() const {
    CorpusFilter f;
    if (max_quality_opt && max_quality_opt->count()) f.max_quality = max_quality;
    f.quality_inclusive = quality_inclusive;
    for (const auto& t : tasks) {
      auto v = parse_task(t);
      if (!v) throw UsageError("unknown task '" + t + "'");
      f.tasks.insert(*v);
    }
    for (const auto& d : domains) {
      auto v = parse_domain(d);
      if (!v) throw UsageError("unknown domain '" + d + "'");
      f.domains.insert(*v);
    }
    f.systems.insert(systems.begin(), systems.end());
    f.lps.insert(lps.begin(), lps.end());
    try {
      validate_filter(f);
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
    return f;
  }
};

struct ReportWriter {
  std::string out_dir = ".";
  std::vector<std::string> formats{"csv", "json"};

  void check() const {
    for (const auto& f : formats)
      if (f != "csv" && f != "json") throw UsageError("unknown report format '" + f + "'");
  }

  void write(const std::string& name, const Table& t, std::ostream& out) const {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create '" + out_dir + "': " + ec.message());
    for (const auto& f : formats) {
      const std::string path = (fs::path(out_dir) / (name + "." + f)).string();
      Output o(path, out);
      if (f == "csv")
        t.write_csv(o.stream());
      else
        t.write_json(o.stream());
      o.close();
      out << path << '\n';
    }
  }
};

std::vector<FeatureRecord> load_corpus(const std::vector<std::string>& paths, const CorpusFilter& filter) {
  std::vector<FeatureRecord> records;
  for (const auto& p : paths) {
    auto in = open_in(p);
    try {
      for_each_record(in, filter, [&](FeatureRecord&& r) { records.push_back(std::move(r)); });
    } catch (const SchemaError& e) {
      throw SchemaError(e.field(), e.line(), p + ": " + e.detail());
    }
  }
  return records;
}

std::vector<SliRecord> load_sli(const std::string& path) {
  auto in = open_in(path);
  return read_sli_records(in);
}

// Keeps SLI records matching the metadata filter; when a corpus is given, also
// drops ids whose feature record fails the full filter (quality, domain).
std::vector<SliRecord> filter_sli(std::vector<SliRecord> records, const CorpusFilter& f,
                                  const std::vector<std::string>& corpus_paths) {
  std::optional<std::unordered_set<std::string>> keep;
  if (!corpus_paths.empty()) {
    keep.emplace();
    for (const auto& r : load_corpus(corpus_paths, f)) keep->insert(r.id);
  } else if (f.max_quality || !f.domains.empty()) {
    throw UsageError("--max-quality and --domain need --corpus for SLI-based analyses");
  }
  std::vector<SliRecord> out;
  for (auto& r : records) {
    if (!f.tasks.empty() && !f.tasks.count(r.task)) continue;
    if (!f.systems.empty() && !f.systems.count(r.system)) continue;
    if (!f.lps.empty() && !f.lps.count(r.lp)) continue;
    if (keep && !keep->count(r.id)) continue;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<EditPair> load_pairs(const std::vector<std::string>& corpus_paths, const std::string& sli_path,
                                 const CorpusFilter& filter, spdlog::logger& log) {
  const auto records = load_corpus(corpus_paths, {});
  std::unordered_map<std::string, double> sli_by_id;
  for (const auto& r : load_sli(sli_path)) sli_by_id[r.id] = r.sli;
  PairingStats st;
  auto pairs = build_edit_pairs(records, sli_by_id, filter, &st);
  log.info("paired {} of {} post-editions ({} without counterpart, {} without SLI, {} filtered)", st.paired,
           st.post_edits, st.missing_counterpart, st.missing_sli, st.filtered);
  return pairs;
}

int cmd_validate(const std::vector<std::string>& paths, std::ostream& out, std::ostream& err) {
  bool io_failed = false;
  std::size_t total_issues = 0;
  for (const auto& p : paths) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
      err << "error: cannot open '" << p << "'\n";
      io_failed = true;
      continue;
    }
    std::size_t seen = 0;
    const auto issues = validate_stream(in, &seen);
    for (const auto& i : issues) err << p << ": " << i.message << '\n';
    total_issues += issues.size();
    out << p << ": " << seen << " records, " << issues.size() << " errors\n";
  }
  if (io_failed) return kExitIo;
  return total_issues ? kExitDomain : kExitOk;
}

int cmd_score(const std::vector<std::string>& paths, const CorpusFilter& filter, const std::string& out_path,
              unsigned jobs, std::ostream& out, spdlog::logger& log) {
  const auto records = load_corpus(paths, filter);
  std::vector<std::string> lines(records.size());
  std::vector<char> clamped(records.size(), 0);
  parallel_for(records.size(), jobs, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const auto s = score(records[i]);
      clamped[i] = s.signals.density_clamped;
      lines[i] = serialize_scored(s);
    }
  });
  Output o(out_path, out);
  for (const auto& l : lines) o.stream() << l << '\n';
  o.close();
  std::size_t n_clamped = 0;
  for (char c : clamped) n_clamped += c;
  if (n_clamped) log.warn("{} records had density above 1 (clamped)", n_clamped);
  log.info("scored {} records", records.size());
  return kExitOk;
}

int cmd_sli_fit(const std::string& signals_path, bool per_task, const std::string& out_path, std::ostream& out,
                spdlog::logger& log) {
  auto in = open_in(signals_path);
  const auto scored = read_scored(in);
  Normalizer norm(per_task ? NormalizerScope::lp_task : NormalizerScope::lp);
  for (const auto& r : scored) norm.observe(normalizer_key(norm.scope(), r.lp, r.task), r.signals);
  Output o(out_path, out);
  o.stream() << norm.to_json() << '\n';
  o.close();
  log.info("fitted {} normalizer groups from {} records", norm.groups().size(), scored.size());
  return kExitOk;
}

std::string weights_text(const WeightMap& w) {
  std::string s;
  for (Signal sig : kAllSignals) {
    if (w[index_of(sig)] == 0.0) continue;
    if (!s.empty()) s += ", ";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", w[index_of(sig)]);
    s += std::string(to_string(sig)) + "=" + buf;
  }
  return s;
}

int cmd_sli_apply(const std::string& signals_path, const std::string& norm_path, const std::string& config_path,
                  const std::string& out_path, std::ostream& out, spdlog::logger& log) {
  const Normalizer norm = Normalizer::from_json(slurp(norm_path));
  SliConfig cfg = config_path.empty() ? SliConfig::defaults() : SliConfig::from_json(slurp(config_path));
  cfg.validate();

  // Groups where an eligible signal was never observed get renormalized weights.
  for (const auto& [key, ranges] : norm.groups()) {
    SignalMask mask{};
    bool missing = false;
    for (Signal s : kAllSignals) {
      if (!cfg.eligible(s)) continue;
      mask[index_of(s)] = ranges[index_of(s)].available;
      missing |= !mask[index_of(s)];
    }
    if (!missing) continue;
    bool any = false;
    for (bool b : mask) any |= b;
    if (!any) {
      log.warn("group {}: no eligible signal available", key);
      continue;
    }
    log.info("group {}: weights renormalized over available signals: {}", key,
             weights_text(softmax_weights(cfg, mask)));
  }

  auto in = open_in(signals_path);
  const auto scored = read_scored(in);
  Output o(out_path, out);
  std::size_t clamped = 0;
  for (const auto& r : scored) {
    const auto res = compute_sli(r.signals, norm, cfg, normalizer_key(norm.scope(), r.lp, r.task));
    clamped += res.clamped;
    SliRecord s{r.id, r.lp, r.system, r.task, r.position, res.value, r.segment};
    o.stream() << serialize_sli_record(s) << '\n';
  }
  o.close();
  if (clamped) log.warn("{} signal values fell outside the fitted range and were clamped", clamped);
  return kExitOk;
}

std::string compare_key(const SliRecord& r) {
  std::string k = r.segment_key();
  k += '|';
  k += r.lp;
  k += '|';
  k += to_string(r.task);
  k += '|';
  k += r.position ? std::to_string(*r.position) : "";
  return k;
}

int cmd_augment(const std::string& triplets_path, std::size_t n, std::uint64_t seed, unsigned jobs,
                const std::string& out_path, std::ostream& out) {
  auto in = open_in(triplets_path);
  const auto base = read_triplets(in);
  const auto mixtures = augment(base, n, seed, jobs);
  Output o(out_path, out);
  for (const auto& m : mixtures) o.stream() << serialize_mixture(m) << '\n';
  o.close();
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"literalis: translation literality analytics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "literalis 0.1.0");

  unsigned jobs = 1;
  std::uint64_t seed = 0;

  auto* validate = app.add_subcommand("validate", "check feature JSONL files against the schema");
  std::vector<std::string> validate_paths;
  validate->add_option("paths", validate_paths)->required();

  auto* score = app.add_subcommand("score", "compute raw signals for every record");
  std::vector<std::string> score_in;
  std::string score_out = "-";
  FilterArgs score_filter;
  score->add_option("--in", score_in, "feature JSONL")->required();
  score->add_option("--out", score_out, "signal JSONL ('-' for stdout)");
  score->add_option("--jobs", jobs)->check(CLI::Range(1u, 1024u));
  score_filter.attach(score);

  auto* sli = app.add_subcommand("sli", "fit normalizers or compute SLI");
  sli->require_subcommand(1);
  auto* fit = sli->add_subcommand("fit", "fit per-LP min-max normalizers");
  std::string fit_signals, fit_out;
  bool per_task = false;
  fit->add_option("--signals", fit_signals)->required();
  fit->add_option("--out", fit_out, "normalizer sidecar JSON")->required();
  fit->add_flag("--per-task", per_task, "one normalizer per (lp, task)");

  auto* apply = sli->add_subcommand("apply", "compute SLI with a fitted normalizer");
  std::string apply_signals, apply_norm, apply_config, apply_out = "-";
  apply->add_option("--signals", apply_signals)->required();
  apply->add_option("--normalizer", apply_norm)->required();
  apply->add_option("--config", apply_config, "SLI config JSON (default weights when omitted)");
  apply->add_option("--out", apply_out);

  auto* analyze = app.add_subcommand("analyze", "compare, triggers, dynamics, trajectory, hitrates, gradient");
  std::string analysis, an_sli, an_triplets, an_mixtures;
  std::vector<std::string> an_corpus;
  std::uint64_t n_resamples = 10'000;
  double epsilon = 0.005;
  bool record_weighted = false;
  ReportWriter reports;
  FilterArgs an_filter;
  analyze->add_option("analysis", analysis)->required();
  analyze->add_option("--sli", an_sli, "SLI JSONL");
  analyze->add_option("--corpus", an_corpus, "feature JSONL");
  analyze->add_option("--triplets", an_triplets, "triplet JSONL with features");
  analyze->add_option("--mixtures", an_mixtures, "mixture JSONL with features");
  analyze->add_option("--out-dir", reports.out_dir);
  analyze->add_option("--format", reports.formats, "csv,json")->delimiter(',');
  auto* an_seed = analyze->add_option("--seed", seed);
  analyze->add_option("--n-resamples", n_resamples, "bootstrap resamples or permutations")
      ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{100'000'000}));
  analyze->add_option("--epsilon", epsilon);
  analyze->add_flag("--record-weighted", record_weighted, "average records instead of per-LP means");
  analyze->add_option("--jobs", jobs)->check(CLI::Range(1u, 1024u));
  an_filter.attach(analyze);

  auto* aug = app.add_subcommand("augment", "build three-segment mixtures from triplets");
  std::string aug_triplets, aug_out = "-";
  std::size_t aug_n = 0;
  aug->add_option("--triplets", aug_triplets)->required();
  aug->add_option("--n", aug_n)->required()->check(CLI::PositiveNumber);
  aug->add_option("--seed", seed)->required();
  aug->add_option("--out", aug_out);
  aug->add_option("--jobs", jobs)->check(CLI::Range(1u, 1024u));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  auto log = make_logger(err);
  try {
    if (*validate) return cmd_validate(validate_paths, out, err);
    if (*score) return cmd_score(score_in, score_filter.build(), score_out, jobs, out, *log);
    if (*fit) return cmd_sli_fit(fit_signals, per_task, fit_out, out, *log);
    if (*apply) return cmd_sli_apply(apply_signals, apply_norm, apply_config, apply_out, out, *log);
    if (*aug) return cmd_augment(aug_triplets, aug_n, seed, jobs, aug_out, out);

    // analyze
    if (analysis == "validate-heuristics") analysis = "hitrates";
    static const std::set<std::string> known{"compare", "triggers", "dynamics", "trajectory", "hitrates", "gradient"};
    if (!known.count(analysis)) {
      err << "error: unknown analysis '" << analysis
          << "' (expected compare, triggers, dynamics, trajectory, hitrates or gradient)\n";
      return kExitDomain;
    }
    reports.check();
    const CorpusFilter filter = an_filter.build();
    auto need = [](bool ok, const char* what) {
      if (!ok) throw UsageError(what);
    };
    const bool randomized = analysis == "compare" || analysis == "triggers";
    if (randomized) need(an_seed->count() > 0, "--seed is required for this analysis");

    if (analysis == "compare") {
      need(!an_sli.empty(), "compare needs --sli");
      const auto records = filter_sli(load_sli(an_sli), filter, an_corpus);
      std::map<std::string, stats::ScoreMap> by_system;
      for (const auto& r : records) {
        if (!by_system[r.system].emplace(compare_key(r), r.sli).second)
          throw DomainError("duplicate segment '" + compare_key(r) + "' for system '" + r.system + "'");
      }
      const auto rows = stats::pairwise_compare(by_system, {n_resamples, seed, jobs});
      reports.write("compare", comparison_report(rows), out);
    } else if (analysis == "triggers") {
      need(!an_sli.empty() && !an_corpus.empty(), "triggers needs --sli and --corpus");
      const auto pairs = load_pairs(an_corpus, an_sli, filter, *log);
      const auto rows = revision_trigger(pairs, {n_resamples, seed, jobs});
      for (const auto& r : rows)
        if (!r.note.empty()) log->warn("system {} excluded: {}", r.system, r.note);
      reports.write("triggers", trigger_report(rows), out);
    } else if (analysis == "dynamics") {
      need(!an_sli.empty() && !an_corpus.empty(), "dynamics needs --sli and --corpus");
      DynamicsConfig cfg{epsilon};
      try {
        cfg.validate();
      } catch (const DomainError& e) {
        throw UsageError(e.what());
      }
      const auto pairs = load_pairs(an_corpus, an_sli, filter, *log);
      reports.write("dynamics", dynamics_report(dynamics_table(pairs, cfg)), out);
      reports.write("alteration", alteration_report(alteration_share(pairs, record_weighted)), out);
    } else if (analysis == "trajectory") {
      need(!an_sli.empty(), "trajectory needs --sli");
      const auto records = filter_sli(load_sli(an_sli), filter, an_corpus);
      reports.write("trajectory", trajectory_report(trajectory(records, record_weighted)), out);
      reports.write("sli_table", sli_table_report(sli_table(records, record_weighted)), out);
    } else if (analysis == "hitrates") {
      need(!an_triplets.empty(), "hitrates needs --triplets");
      auto in = open_in(an_triplets);
      const auto triplets = read_triplets(in);
      reports.write("hitrates", hit_rate_report(hit_rates(triplets)), out);
    } else {
      need(!an_mixtures.empty(), "gradient needs --mixtures");
      auto in = open_in(an_mixtures);
      const auto mixtures = read_mixtures(in);
      reports.write("gradient", gradient_report(gradient_table(mixtures)), out);
    }
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  }
}

}  // namespace literalis::cli
