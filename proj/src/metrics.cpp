#include "verikit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <tuple>

#include "verikit/error.hpp"
#include "verikit/jsonl.hpp"
#include "verikit/log.hpp"

namespace verikit {

double pass_at_k(long long n, long long c, long long k) {
  if (n < 1 || k < 1 || k > n || c < 0 || c > n) {
    throw Error(ErrorKind::domain_error,
                "pass@k needs 1 <= k <= n and 0 <= c <= n; got n=" + std::to_string(n) +
                    " c=" + std::to_string(c) + " k=" + std::to_string(k));
  }
  if (c == 0) return 0.0;
  if (k > n - c) return 1.0;
  if (k == 1) return static_cast<double>(c) / static_cast<double>(n);
  double prod = 1.0;
  for (long long i = n - c + 1; i <= n; ++i) {
    prod *= 1.0 - static_cast<double>(k) / static_cast<double>(i);
  }
  return 1.0 - prod;
}

namespace {

void validate_outcome(const ProblemOutcome& outcome) {
  if (outcome.n < 1 || outcome.c < 0 || outcome.c > outcome.n) {
    throw Error(ErrorKind::domain_error,
                "outcome for " + outcome.task_id + " violates 0 <= c <= n, n >= 1");
  }
}

// Sorted before summing so the mean is exactly permutation-invariant.
double mean_sorted(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

double aggregate_pass_at_k(const std::vector<ProblemOutcome>& outcomes, long long k) {
  if (outcomes.empty()) {
    throw Error(ErrorKind::empty_input, "no problem outcomes to aggregate");
  }
  std::vector<double> values;
  values.reserve(outcomes.size());
  for (const auto& outcome : outcomes) {
    validate_outcome(outcome);
    if (k > outcome.n) {
      throw Error(ErrorKind::k_exceeds_n,
                  "k=" + std::to_string(k) + " exceeds n=" + std::to_string(outcome.n) +
                      " for " + outcome.task_id);
    }
    values.push_back(pass_at_k(outcome.n, outcome.c, k));
  }
  return mean_sorted(std::move(values));
}

AggregateResult aggregate_excluding_partial(const std::vector<ProblemOutcome>& outcomes,
                                            long long k) {
  if (outcomes.empty()) {
    throw Error(ErrorKind::empty_input, "no problem outcomes to aggregate");
  }
  std::vector<double> values;
  AggregateResult result;
  for (const auto& outcome : outcomes) {
    validate_outcome(outcome);
    if (k > outcome.n) {
      ++result.excluded;
      continue;
    }
    values.push_back(pass_at_k(outcome.n, outcome.c, k));
  }
  if (result.excluded > 0) {
    log::warn(std::to_string(result.excluded) + " problems have fewer than " +
              std::to_string(k) + " samples and were excluded from pass@" + std::to_string(k));
  }
  if (values.empty()) {
    throw Error(ErrorKind::empty_input,
                "every problem has fewer than " + std::to_string(k) + " samples");
  }
  result.value = mean_sorted(std::move(values));
  return result;
}

std::vector<ProblemOutcome> outcomes_from_results(const std::vector<SampleResult>& results) {
  std::map<std::pair<std::string, double>, ProblemOutcome> grouped;
  for (const auto& r : results) {
    auto& outcome = grouped[{r.task_id, r.temperature}];
    if (outcome.n == 0) {
      outcome.task_id = r.task_id;
      outcome.temperature = r.temperature;
    }
    ++outcome.n;
    if (r.sim == SimStatus::pass) ++outcome.c;
  }
  std::vector<ProblemOutcome> outcomes;
  outcomes.reserve(grouped.size());
  for (auto& [key, outcome] : grouped) outcomes.push_back(std::move(outcome));
  return outcomes;
}

std::vector<TypeRow> accuracy_by_type(const std::vector<SampleResult>& results,
                                      const std::map<std::string, std::string>& type_map) {
  std::map<std::string, TypeRow> rows;
  std::map<std::string, std::set<std::string>> tasks_per_type;
  for (const auto& r : results) {
    const auto it = type_map.find(r.task_id);
    if (it == type_map.end()) {
      throw Error(ErrorKind::unmapped_task_id,
                  "task \"" + r.task_id + "\" has no circuit type");
    }
    TypeRow& row = rows[it->second];
    row.circuit_type = it->second;
    ++row.tries;
    if (r.sim == SimStatus::pass) ++row.successes;
    tasks_per_type[it->second].insert(r.task_id);
  }
  std::vector<TypeRow> out;
  out.reserve(rows.size());
  for (auto& [type, row] : rows) {
    row.problems = tasks_per_type[type].size();
    row.accuracy_pct =
        round2(100.0 * static_cast<double>(row.successes) / static_cast<double>(row.tries));
    out.push_back(std::move(row));
  }
  return out;
}

double round2(double value) { return std::round(value * 100.0) / 100.0; }

std::string percent_string(double pct, bool forced_sign) {
  char buf[48];
  std::snprintf(buf, sizeof buf, forced_sign ? "%+.2f%%" : "%.2f%%", round2(pct));
  return buf;
}

EvalReport build_report(const std::vector<RunInput>& runs, std::vector<int> ks,
                        const std::map<std::string, std::string>* type_map) {
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  EvalReport report;
  report.ks = ks;
  for (const auto& run : runs) {
    RunSummary summary;
    summary.label = run.label;
    const auto outcomes = outcomes_from_results(run.results);
    std::set<double> temperatures;
    for (const auto& o : outcomes) temperatures.insert(o.temperature);
    for (double t : temperatures) {
      std::vector<ProblemOutcome> at_t;
      for (const auto& o : outcomes) {
        if (o.temperature == t) at_t.push_back(o);
      }
      TemperatureRow row;
      row.temperature = t;
      for (int k : ks) {
        row.cells.push_back({k, aggregate_excluding_partial(at_t, k).value});
      }
      summary.rows.push_back(std::move(row));
    }
    report.runs.push_back(std::move(summary));
  }
  if (type_map && !runs.empty()) {
    report.type_rows = accuracy_by_type(runs[0].results, *type_map);
    if (runs.size() > 1) {
      report.baseline_type_rows = accuracy_by_type(runs[1].results, *type_map);
    }
  }
  return report;
}

std::optional<ReportFormat> report_format_from_string(std::string_view text) {
  if (text == "plain") return ReportFormat::plain;
  if (text == "markdown") return ReportFormat::markdown;
  if (text == "json") return ReportFormat::json;
  return std::nullopt;
}

namespace {

std::string format_temperature(double t) {
  std::ostringstream out;
  out << t;
  return out.str();
}

jsonl::json type_row_to_json(const TypeRow& row) {
  jsonl::json obj;
  obj["circuit_type"] = row.circuit_type;
  obj["problems"] = row.problems;
  obj["tries"] = row.tries;
  obj["successes"] = row.successes;
  obj["accuracy_pct"] = row.accuracy_pct;
  return obj;
}

TypeRow type_row_from_json(const jsonl::json& obj) {
  TypeRow row;
  row.circuit_type = obj.at("circuit_type").get<std::string>();
  row.problems = obj.at("problems").get<std::size_t>();
  row.tries = obj.at("tries").get<std::size_t>();
  row.successes = obj.at("successes").get<std::size_t>();
  row.accuracy_pct = obj.at("accuracy_pct").get<double>();
  return row;
}

jsonl::json report_to_json(const EvalReport& report) {
  jsonl::json obj;
  obj["ks"] = report.ks;
  obj["runs"] = jsonl::json::array();
  for (const auto& run : report.runs) {
    jsonl::json run_obj;
    run_obj["label"] = run.label;
    run_obj["rows"] = jsonl::json::array();
    for (const auto& row : run.rows) {
      jsonl::json row_obj;
      row_obj["temperature"] = row.temperature;
      row_obj["cells"] = jsonl::json::array();
      for (const auto& cell : row.cells) {
        row_obj["cells"].push_back({{"k", cell.k}, {"value", cell.value}});
      }
      run_obj["rows"].push_back(std::move(row_obj));
    }
    obj["runs"].push_back(std::move(run_obj));
  }
  obj["type_rows"] = jsonl::json::array();
  for (const auto& row : report.type_rows) obj["type_rows"].push_back(type_row_to_json(row));
  obj["baseline_type_rows"] = jsonl::json::array();
  for (const auto& row : report.baseline_type_rows) {
    obj["baseline_type_rows"].push_back(type_row_to_json(row));
  }
  return obj;
}

// Markdown table helper shared by the plain renderer (plain uses the same
// rows without the separator ruling).
std::string render_table(const std::vector<std::vector<std::string>>& rows, bool markdown) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    if (widths.size() < row.size()) widths.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i) {
      widths[i] = std::max(widths[i], row[i].size());
    }
  }
  std::ostringstream out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (markdown) out << "|";
    for (std::size_t i = 0; i < widths.size(); ++i) {
      const std::string& cell = i < rows[r].size() ? rows[r][i] : "";
      out << ' ' << cell << std::string(widths[i] - cell.size(), ' ');
      out << (markdown ? " |" : " ");
    }
    out << '\n';
    if (markdown && r == 0) {
      out << "|";
      for (std::size_t i = 0; i < widths.size(); ++i) {
        out << std::string(widths[i] + 2, '-') << "|";
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string heading(const std::string& title, bool markdown) {
  if (markdown) return "## " + title + "\n\n";
  return title + "\n" + std::string(title.size(), '=') + "\n";
}

std::string render_text(const EvalReport& report, bool markdown) {
  std::ostringstream out;

  if (!report.runs.empty()) {
    out << heading("Pass@k Summary", markdown);
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header = {"Run", "Temperature"};
    for (int k : report.ks) header.push_back("pass@" + std::to_string(k));
    rows.push_back(header);
    for (const auto& run : report.runs) {
      for (const auto& row : run.rows) {
        std::vector<std::string> line = {run.label, format_temperature(row.temperature)};
        for (const auto& cell : row.cells) {
          line.push_back(percent_string(cell.value * 100.0));
        }
        rows.push_back(std::move(line));
      }
    }
    out << render_table(rows, markdown);
  }

  if (report.runs.size() >= 2) {
    const RunSummary& subject = report.runs[0];
    const RunSummary& baseline = report.runs[1];
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header = {"Temperature"};
    for (int k : report.ks) header.push_back("pass@" + std::to_string(k));
    rows.push_back(header);
    for (const auto& row : subject.rows) {
      const auto base_row =
          std::find_if(baseline.rows.begin(), baseline.rows.end(),
                       [&](const TemperatureRow& r) { return r.temperature == row.temperature; });
      if (base_row == baseline.rows.end()) continue;
      std::vector<std::string> line = {format_temperature(row.temperature)};
      for (std::size_t i = 0; i < row.cells.size() && i < base_row->cells.size(); ++i) {
        const double delta_pct = row.cells[i].value * 100.0 - base_row->cells[i].value * 100.0;
        line.push_back(percent_string(delta_pct, /*forced_sign=*/true));
      }
      rows.push_back(std::move(line));
    }
    if (rows.size() > 1) {
      out << '\n' << heading("Improvement (" + subject.label + " vs " + baseline.label + ")",
                             markdown);
      out << render_table(rows, markdown);
    }
  }

  if (!report.type_rows.empty()) {
    out << '\n' << heading("Accuracy by Circuit Type", markdown);
    const bool with_baseline = !report.baseline_type_rows.empty();
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header = {"Circuit Type", "Problems", "Tries", "Successes",
                                       "Accuracy"};
    if (with_baseline) {
      header.push_back("Baseline");
      header.push_back("Difference");
    }
    rows.push_back(header);
    for (const auto& row : report.type_rows) {
      std::vector<std::string> line = {row.circuit_type, std::to_string(row.problems),
                                       std::to_string(row.tries),
                                       std::to_string(row.successes),
                                       percent_string(row.accuracy_pct)};
      if (with_baseline) {
        const auto base = std::find_if(
            report.baseline_type_rows.begin(), report.baseline_type_rows.end(),
            [&](const TypeRow& r) { return r.circuit_type == row.circuit_type; });
        if (base != report.baseline_type_rows.end()) {
          line.push_back(percent_string(base->accuracy_pct));
          const double subject_raw =
              100.0 * static_cast<double>(row.successes) / static_cast<double>(row.tries);
          const double base_raw = 100.0 * static_cast<double>(base->successes) /
                                  static_cast<double>(base->tries);
          line.push_back(percent_string(subject_raw - base_raw, /*forced_sign=*/true));
        } else {
          line.push_back("-");
          line.push_back("-");
        }
      }
      rows.push_back(std::move(line));
    }
    out << render_table(rows, markdown);
  }

  return out.str();
}

}  // namespace

std::string render_report(const EvalReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::plain: return render_text(report, false);
    case ReportFormat::markdown: return render_text(report, true);
    case ReportFormat::json: return report_to_json(report).dump(2) + "\n";
  }
  return {};
}

EvalReport report_from_json(const std::string& text) {
  const jsonl::json obj = jsonl::json::parse(text, nullptr, false);
  if (obj.is_discarded()) {
    throw Error(ErrorKind::parse_error, "unparseable report JSON");
  }
  EvalReport report;
  report.ks = obj.at("ks").get<std::vector<int>>();
  for (const auto& run_obj : obj.at("runs")) {
    RunSummary run;
    run.label = run_obj.at("label").get<std::string>();
    for (const auto& row_obj : run_obj.at("rows")) {
      TemperatureRow row;
      row.temperature = row_obj.at("temperature").get<double>();
      for (const auto& cell : row_obj.at("cells")) {
        row.cells.push_back({cell.at("k").get<int>(), cell.at("value").get<double>()});
      }
      run.rows.push_back(std::move(row));
    }
    report.runs.push_back(std::move(run));
  }
  for (const auto& row : obj.at("type_rows")) report.type_rows.push_back(type_row_from_json(row));
  for (const auto& row : obj.at("baseline_type_rows")) {
    report.baseline_type_rows.push_back(type_row_from_json(row));
  }
  return report;
}

}  // namespace verikit
