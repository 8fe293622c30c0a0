#include "literalis/report.hpp"

#include <cstdio>
#include <ostream>

#include <nlohmann/json.hpp>

namespace literalis {

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  std::string s(buf);
  if (s == "-0.0000") s = "0.0000";
  return s;
}

std::vector<Cell> row_of(std::initializer_list<Cell> cells) { return cells; }

Cell count(std::size_t n) { return static_cast<std::int64_t>(n); }

}  // namespace

Cell cell(const std::optional<double>& v) { return v ? Cell(*v) : Cell(std::monostate{}); }

void Table::write_csv(std::ostream& out) const {
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << csv_escape(columns[i]);
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) out << csv_escape(v);
            else if constexpr (std::is_same_v<T, std::int64_t>) out << v;
            else if constexpr (std::is_same_v<T, double>) out << fixed4(v);
          },
          row[i]);
    }
    out << '\n';
  }
}

void Table::write_json(std::ostream& out) const {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json o;
    for (std::size_t i = 0; i < row.size() && i < columns.size(); ++i) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) o[columns[i]] = nullptr;
            else o[columns[i]] = v;
          },
          row[i]);
    }
    arr.push_back(std::move(o));
  }
  out << arr.dump(2) << '\n';
}

Table hit_rate_report(const HitRateTable& t) {
  Table tab{{"signal", "tgt_lang", "n", "hit", "miss", "tie", "excluded"}, {}};
  auto emit = [&](const std::string& lang, const SignalHitCounts& counts) {
    for (Signal s : kAllSignals) {
      const HitCounts& c = counts[index_of(s)];
      const bool any = c.scored() > 0;
      tab.rows.push_back(row_of({std::string(to_string(s)), lang, count(c.scored()),
                                 any ? Cell(c.hit_rate()) : Cell{}, any ? Cell(c.miss_rate()) : Cell{},
                                 any ? Cell(c.tie_rate()) : Cell{}, count(c.excluded)}));
    }
  };
  emit("all", t.overall);
  for (const auto& [lang, counts] : t.by_lang) emit(lang, counts);
  return tab;
}

Table gradient_report(const std::vector<GradientRow>& rows) {
  Table tab{{"heuristic", "N", "100%", "66%", "33%", "0%", "p_value", "chi2", "excluded"}, {}};
  for (const auto& r : rows) {
    std::vector<Cell> row{std::string(to_string(r.signal)), count(r.n)};
    for (double m : r.means) row.push_back(r.n ? Cell(m) : Cell{});
    row.push_back(r.friedman ? Cell(r.friedman->p_value) : Cell{});
    row.push_back(r.friedman ? Cell(r.friedman->statistic) : Cell{});
    row.push_back(count(r.excluded));
    tab.rows.push_back(std::move(row));
  }
  return tab;
}

Table comparison_report(const std::vector<stats::PairwiseComparison>& rows) {
  Table tab{{"system_a", "system_b", "mean_diff", "p", "stars", "n"}, {}};
  for (const auto& r : rows) {
    if (r.result)
      tab.rows.push_back(row_of({r.system_a, r.system_b, r.result->mean_diff, r.result->p_value,
                                 std::string(stats::stars(r.result->p_value)), count(r.result->n)}));
    else
      tab.rows.push_back(row_of({r.system_a, r.system_b, Cell{}, Cell{}, std::string(), count(0)}));
  }
  return tab;
}

Table trigger_report(const std::vector<TriggerRow>& rows) {
  Table tab{{"system", "n", "pb_r", "pb_p", "rho", "rho_p", "note"}, {}};
  for (const auto& r : rows) {
    auto coef = [](const auto& c) { return c ? Cell(c->coefficient) : Cell{}; };
    auto pval = [](const auto& c) { return c ? Cell(c->p_value) : Cell{}; };
    tab.rows.push_back(row_of({r.system, count(r.n), coef(r.point_biserial), pval(r.point_biserial),
                               coef(r.spearman), pval(r.spearman), r.note}));
  }
  return tab;
}

Table dynamics_report(const std::vector<DynamicsRow>& rows) {
  Table tab{{"domain", "system", "n", "unchanged_n", "unchanged_pct", "altered_n", "altered_pct", "delit_n",
             "delit_pct", "relit_n", "relit_pct", "neutral_pct", "mean_quality_delta"},
            {}};
  for (const auto& r : rows)
    tab.rows.push_back(row_of({r.domain, r.system, count(r.n), count(r.unchanged), cell(r.pct_unchanged()),
                               count(r.altered), cell(r.pct_altered()), count(r.deliteralizing),
                               cell(r.pct_deliteralizing()), count(r.reliteralizing), cell(r.pct_reliteralizing()),
                               cell(r.pct_neutral()), cell(r.mean_quality_delta)}));
  return tab;
}

Table alteration_report(const AlterationSummary& s) {
  Table tab{{"system", "lp", "n", "altered", "altered_share", "unchanged_share"}, {}};
  for (const auto& r : s.per_lp)
    tab.rows.push_back(row_of({r.system, r.lp, count(r.n), count(r.altered), r.altered_share(),
                               1.0 - r.altered_share()}));
  for (const auto& [system, share] : s.overall)
    tab.rows.push_back(row_of({system, std::string("overall"), Cell{}, Cell{}, share, 1.0 - share}));
  return tab;
}

Table trajectory_report(const std::vector<TrajectoryRow>& rows) {
  Table tab{{"system", "position", "n", "mean_sli", "strictly_decreasing"}, {}};
  for (const auto& r : rows)
    for (const auto& [pos, mean] : r.mean_by_position)
      tab.rows.push_back(row_of({r.system, static_cast<std::int64_t>(pos), count(r.count_by_position.at(pos)), mean,
                                 std::string(r.strictly_decreasing ? "true" : "false")}));
  return tab;
}

Table sli_table_report(const std::vector<SliTableRow>& rows) {
  int max_pos = 5;
  for (const auto& r : rows)
    if (!r.iterative.empty()) max_pos = std::max(max_pos, r.iterative.rbegin()->first);
  Table tab;
  tab.columns = {"system", "trans"};
  for (int p = 1; p <= max_pos; ++p) tab.columns.push_back("#" + std::to_string(p));
  tab.columns.push_back("pe");
  for (const auto& r : rows) {
    std::vector<Cell> row{r.system, cell(r.single)};
    for (int p = 1; p <= max_pos; ++p) {
      auto it = r.iterative.find(p);
      row.push_back(it == r.iterative.end() ? Cell{} : Cell(it->second));
    }
    row.push_back(cell(r.post_edit));
    tab.rows.push_back(std::move(row));
  }
  return tab;
}

}  // namespace literalis
