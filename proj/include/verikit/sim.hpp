#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "verikit/client.hpp"
#include "verikit/problem.hpp"
#include "verikit/scan.hpp"

namespace verikit {

inline constexpr const char* kDefaultFailurePattern = R"(Mismatches:\s*[1-9][0-9]*)";

struct JudgeConfig {
  std::string failure_pattern = kDefaultFailurePattern;
  // true: any stdout line matching the pattern fails the run (mismatch
  // counter convention). false: the pattern is a success marker and some
  // line must match for a pass.
  bool fail_on_match = true;
};

struct SimConfig {
  std::string compile_cmd = "iverilog -o {output} {sources}";
  std::string run_cmd = "vvp {output}";
  double timeout_secs = 30.0;
  double grace_secs = 5.0;
  bool keep_artifacts = false;
  bool record_durations = true;
  std::filesystem::path work_root;  // empty: system temp dir
  JudgeConfig judge;
};

enum class SimStatus {
  pass,
  compile_error,
  runtime_mismatch,
  timeout,
  not_attempted,
};

const char* to_string(SimStatus status);
std::optional<SimStatus> sim_status_from_string(std::string_view text);

struct SampleResult {
  std::string task_id;
  int sample_index = 0;
  double temperature = 0.0;
  scan::ExtractionOutcome extraction = scan::ExtractionOutcome::empty_input;
  SimStatus sim = SimStatus::not_attempted;
  std::string message;
  double duration_s = 0.0;
  // Filled by the failure classifier; not part of the results file.
  std::string error_class;

  bool operator==(const SampleResult&) const = default;
};

// Judge verdict for a completed run: pass iff the exit status is success and
// the stdout pattern rule holds. `message` explains a failure.
bool judge(int exit_code, bool abnormal, const std::string& stdout_text,
           const JudgeConfig& config, std::string* message);

// Extracts the sample's module, builds the candidate source (module_header +
// body when the problem has a header, the full module otherwise), compiles
// and runs it against the problem's testbench in a fresh temp dir, and
// judges stdout. Compile and run share the timeout budget. Throws
// Error(simulator_not_found) when the configured tool cannot be started.
SampleResult evaluate_sample(const Problem& problem, const RawSample& sample,
                             const SimConfig& config);

// Evaluates every sample with a pool of `workers` evaluators. Results come
// back sorted by (task_id, temperature, sample_index) and are identical
// regardless of worker count (durations aside). When out_path is given,
// each result is appended as soon as its canonical prefix completes. Throws
// Error(unknown_task_id) when a sample references a missing problem.
std::vector<SampleResult> run_suite(const std::vector<Problem>& problems,
                                    const std::vector<RawSample>& samples,
                                    const SimConfig& config, std::size_t workers,
                                    const std::optional<std::filesystem::path>& out_path = {});

void write_results(const std::vector<SampleResult>& results, const std::filesystem::path& path);
std::vector<SampleResult> read_results(const std::filesystem::path& path);

}  // namespace verikit
