#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "verikit/sim.hpp"

namespace verikit {

// Per-problem tally at one temperature: n samples generated, c passed.
struct ProblemOutcome {
  std::string task_id;
  double temperature = 0.0;
  int n = 0;
  int c = 0;
  std::optional<std::string> circuit_type;

  bool operator==(const ProblemOutcome&) const = default;
};

// Unbiased estimator of the probability that at least one of k draws (without
// replacement) from n samples hits one of the c passing ones:
// 1 - C(n-c,k)/C(n,k), evaluated as 1 - prod_{i=n-c+1..n} (1 - k/i).
// Exact at the edges: 1 when k > n-c, c/n when k == 1.
// Throws Error(domain_error) unless 1 <= k <= n and 0 <= c <= n.
double pass_at_k(long long n, long long c, long long k);

// Arithmetic mean of per-problem pass@k. Throws Error(empty_input) on an
// empty list and Error(k_exceeds_n) when any problem has n < k.
double aggregate_pass_at_k(const std::vector<ProblemOutcome>& outcomes, long long k);

struct AggregateResult {
  double value = 0.0;
  std::size_t excluded = 0;  // problems with n < k, skipped with a warning
};

// Same mean, but problems with fewer than k samples are excluded instead of
// failing (partial-run tolerance for report building).
AggregateResult aggregate_excluding_partial(const std::vector<ProblemOutcome>& outcomes,
                                            long long k);

// Groups results into per-(task_id, temperature) outcomes, counting
// sim == pass as success. Output sorted by (task_id, temperature).
std::vector<ProblemOutcome> outcomes_from_results(const std::vector<SampleResult>& results);

struct TypeRow {
  std::string circuit_type;
  std::size_t problems = 0;   // distinct tasks
  std::size_t tries = 0;      // samples across all temperatures
  std::size_t successes = 0;  // sim == pass
  double accuracy_pct = 0.0;  // 100 * successes / tries, rounded to 2 decimals

  bool operator==(const TypeRow&) const = default;
};

// Per-circuit-type accuracy over all temperatures, rows alphabetical by type.
// Throws Error(unmapped_task_id) when a result's task is not in the map.
std::vector<TypeRow> accuracy_by_type(const std::vector<SampleResult>& results,
                                      const std::map<std::string, std::string>& type_map);

// Round to 2 decimals, ties away from zero (55.625 -> 55.63, -0.955 -> -0.96).
double round2(double value);

// "40.59%"; with forced_sign, "+22.48%" / "-0.95%".
std::string percent_string(double pct, bool forced_sign = false);

struct PassAtKCell {
  int k = 0;
  double value = 0.0;  // probability in [0,1]

  bool operator==(const PassAtKCell&) const = default;
};

struct TemperatureRow {
  double temperature = 0.0;
  std::vector<PassAtKCell> cells;

  bool operator==(const TemperatureRow&) const = default;
};

struct RunSummary {
  std::string label;
  std::vector<TemperatureRow> rows;  // temperatures ascending

  bool operator==(const RunSummary&) const = default;
};

struct EvalReport {
  std::vector<int> ks;            // ascending
  std::vector<RunSummary> runs;   // first run is the subject, second the baseline
  std::vector<TypeRow> type_rows;
  std::vector<TypeRow> baseline_type_rows;

  bool operator==(const EvalReport&) const = default;
};

struct RunInput {
  std::string label;
  std::vector<SampleResult> results;
};

// Builds the full report: per-run temperature x k matrices, plus per-type
// tables when a type map is supplied (first run, and second run as baseline).
EvalReport build_report(const std::vector<RunInput>& runs, std::vector<int> ks,
                        const std::map<std::string, std::string>* type_map = nullptr);

enum class ReportFormat { plain, markdown, json };

std::optional<ReportFormat> report_format_from_string(std::string_view text);

// Renders the summary matrix, the first-vs-second-run improvement matrix
// (deltas of unrounded percentages, then rounded), and the type tables.
// Deterministic: temperatures ascending, k ascending, types alphabetical.
// The json format round-trips through report_from_json.
std::string render_report(const EvalReport& report, ReportFormat format);

EvalReport report_from_json(const std::string& text);

}  // namespace verikit
