#include "verikit/sim.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <regex>
#include <set>
#include <thread>
#include <tuple>

#include "verikit/error.hpp"
#include "verikit/jsonl.hpp"
#include "verikit/log.hpp"
#include "verikit/subprocess.hpp"

namespace verikit {

namespace {

constexpr std::size_t kMessageCap = 4096;

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
  if (from.empty()) return text;
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

std::string sanitize_message(std::string text, const std::filesystem::path& work_dir) {
  text = replace_all(std::move(text), work_dir.string() + "/", "");
  text = replace_all(std::move(text), work_dir.string(), "<work>");
  if (text.size() > kMessageCap) {
    text.resize(kMessageCap);
    text += "\n[truncated]";
  }
  return text;
}

std::filesystem::path make_work_dir(const std::filesystem::path& root) {
  std::filesystem::path base = root.empty() ? std::filesystem::temp_directory_path() : root;
  std::filesystem::create_directories(base);
  std::string tmpl = (base / "verikit-XXXXXX").string();
  if (!mkdtemp(tmpl.data())) {
    throw Error(ErrorKind::io_error, "cannot create work dir under " + base.string());
  }
  return std::filesystem::path(tmpl);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io_error, "cannot write " + path.string());
  out << text;
}

}  // namespace

const char* to_string(SimStatus status) {
  switch (status) {
    case SimStatus::pass: return "pass";
    case SimStatus::compile_error: return "compile_error";
    case SimStatus::runtime_mismatch: return "runtime_mismatch";
    case SimStatus::timeout: return "timeout";
    case SimStatus::not_attempted: return "not_attempted";
  }
  return "not_attempted";
}

std::optional<SimStatus> sim_status_from_string(std::string_view text) {
  for (SimStatus s : {SimStatus::pass, SimStatus::compile_error, SimStatus::runtime_mismatch,
                      SimStatus::timeout, SimStatus::not_attempted}) {
    if (text == to_string(s)) return s;
  }
  return std::nullopt;
}

bool judge(int exit_code, bool abnormal, const std::string& stdout_text,
           const JudgeConfig& config, std::string* message) {
  if (abnormal || exit_code != 0) {
    if (message) *message = "exit status " + std::to_string(exit_code);
    return false;
  }
  const std::regex pattern(config.failure_pattern);
  std::size_t pos = 0;
  bool matched = false;
  std::string matched_line;
  while (pos <= stdout_text.size() && !matched) {
    std::size_t eol = stdout_text.find('\n', pos);
    if (eol == std::string::npos) eol = stdout_text.size();
    const std::string line = stdout_text.substr(pos, eol - pos);
    if (std::regex_search(line, pattern)) {
      matched = true;
      matched_line = line;
    }
    if (eol == stdout_text.size()) break;
    pos = eol + 1;
  }
  if (config.fail_on_match) {
    if (matched) {
      if (message) *message = matched_line;
      return false;
    }
    return true;
  }
  if (!matched) {
    if (message) *message = "no line matched the success pattern";
    return false;
  }
  return true;
}

SampleResult evaluate_sample(const Problem& problem, const RawSample& sample,
                             const SimConfig& config) {
  SampleResult result;
  result.task_id = sample.task_id;
  result.sample_index = sample.sample_index;
  result.temperature = sample.temperature;

  const scan::ExtractionResult extraction = scan::extract_completion(sample.completion);
  result.extraction = extraction.outcome;
  if (!extraction.ok()) {
    result.sim = SimStatus::not_attempted;
    return result;
  }

  std::string candidate;
  if (problem.module_header) {
    candidate = *problem.module_header + "\n" + extraction.module->body;
  } else {
    candidate = extraction.module->full_text;
  }
  if (!candidate.empty() && candidate.back() != '\n') candidate.push_back('\n');

  const std::filesystem::path work_dir = make_work_dir(config.work_root);
  struct Cleanup {
    const std::filesystem::path& dir;
    bool keep;
    ~Cleanup() {
      if (!keep) {
        std::error_code ec;
        std::filesystem::remove_all(dir, ec);
      }
    }
  } cleanup{work_dir, config.keep_artifacts};

  write_file(work_dir / "candidate.v", candidate);
  write_file(work_dir / "tb.v", problem.test);

  const std::vector<std::string> sources = {"candidate.v", "tb.v"};
  const std::string output = "sim.out";
  const auto started = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  };

  const auto compile_argv =
      expand_command(split_command(config.compile_cmd), output, sources);
  const RunResult compiled = run_command(compile_argv, work_dir, config.timeout_secs);
  if (compiled.spawn_failed) {
    throw Error(ErrorKind::simulator_not_found,
                "cannot start \"" + compile_argv.front() + "\"");
  }
  if (compiled.timed_out) {
    result.sim = SimStatus::timeout;
    result.message = "compile timed out";
    result.duration_s = config.record_durations ? elapsed() : 0.0;
    return result;
  }
  if (!compiled.success()) {
    result.sim = SimStatus::compile_error;
    result.message = sanitize_message(
        compiled.err.empty() ? compiled.out : compiled.err, work_dir);
    result.duration_s = config.record_durations ? elapsed() : 0.0;
    return result;
  }

  const double remaining = config.timeout_secs - elapsed();
  if (remaining <= 0.0) {
    result.sim = SimStatus::timeout;
    result.message = "compile exhausted the time budget";
    result.duration_s = config.record_durations ? elapsed() : 0.0;
    return result;
  }
  const auto run_argv = expand_command(split_command(config.run_cmd), output, sources);
  const RunResult ran = run_command(run_argv, work_dir, remaining);
  if (ran.spawn_failed) {
    throw Error(ErrorKind::simulator_not_found, "cannot start \"" + run_argv.front() + "\"");
  }
  if (ran.timed_out) {
    result.sim = SimStatus::timeout;
    result.message = "run timed out";
    result.duration_s = config.record_durations ? elapsed() : 0.0;
    return result;
  }

  std::string message;
  if (judge(ran.exit_code, ran.signaled, ran.out, config.judge, &message)) {
    result.sim = SimStatus::pass;
  } else {
    result.sim = SimStatus::runtime_mismatch;
    result.message = sanitize_message(message, work_dir);
  }
  result.duration_s = config.record_durations ? elapsed() : 0.0;
  return result;
}

namespace {

jsonl::json result_to_json(const SampleResult& r) {
  jsonl::json obj;
  obj["task_id"] = r.task_id;
  obj["sample_index"] = r.sample_index;
  obj["temperature"] = r.temperature;
  obj["extraction_outcome"] = scan::to_string(r.extraction);
  obj["sim"] = to_string(r.sim);
  if (!r.message.empty()) obj["message"] = r.message;
  obj["duration_s"] = r.duration_s;
  return obj;
}

SampleResult result_from_json(const jsonl::json& obj, const std::string& where) {
  for (const char* key : {"task_id", "sample_index", "temperature", "extraction_outcome",
                          "sim", "duration_s"}) {
    if (!obj.contains(key)) {
      throw Error(ErrorKind::parse_error, where + ": result record missing \"" + key + "\"");
    }
  }
  SampleResult r;
  r.task_id = obj["task_id"].get<std::string>();
  r.sample_index = obj["sample_index"].get<int>();
  r.temperature = obj["temperature"].get<double>();
  const auto extraction =
      scan::extraction_outcome_from_string(obj["extraction_outcome"].get<std::string>());
  const auto sim = sim_status_from_string(obj["sim"].get<std::string>());
  if (!extraction || !sim) {
    throw Error(ErrorKind::parse_error, where + ": unknown outcome value");
  }
  r.extraction = *extraction;
  r.sim = *sim;
  r.message = obj.value("message", "");
  r.duration_s = obj["duration_s"].get<double>();
  return r;
}

}  // namespace

std::vector<SampleResult> run_suite(const std::vector<Problem>& problems,
                                    const std::vector<RawSample>& samples,
                                    const SimConfig& config, std::size_t workers,
                                    const std::optional<std::filesystem::path>& out_path) {
  std::map<std::string, const Problem*> by_id;
  for (const auto& p : problems) by_id[p.task_id] = &p;
  for (const auto& s : samples) {
    if (!by_id.contains(s.task_id)) {
      throw Error(ErrorKind::unknown_task_id, "no problem with task_id \"" + s.task_id + "\"");
    }
  }

  std::vector<const RawSample*> ordered;
  ordered.reserve(samples.size());
  for (const auto& s : samples) ordered.push_back(&s);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const RawSample* a, const RawSample* b) {
                     return std::tie(a->task_id, a->temperature, a->sample_index) <
                            std::tie(b->task_id, b->temperature, b->sample_index);
                   });

  std::optional<jsonl::Writer> writer;
  if (out_path) writer.emplace(*out_path);

  std::vector<SampleResult> results(ordered.size());
  std::atomic<std::size_t> next{0};
  std::mutex collect_mutex;
  std::map<std::size_t, const SampleResult*> done;
  std::size_t next_to_write = 0;
  std::exception_ptr fatal;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= ordered.size()) return;
      {
        std::lock_guard lock(collect_mutex);
        if (fatal) return;
      }
      SampleResult result;
      try {
        result = evaluate_sample(*by_id.at(ordered[i]->task_id), *ordered[i], config);
      } catch (...) {
        std::lock_guard lock(collect_mutex);
        if (!fatal) fatal = std::current_exception();
        return;
      }
      std::lock_guard lock(collect_mutex);
      results[i] = std::move(result);
      done.emplace(i, &results[i]);
      while (!done.empty() && done.begin()->first == next_to_write) {
        if (writer) writer->write(result_to_json(*done.begin()->second));
        done.erase(done.begin());
        ++next_to_write;
      }
    }
  };

  const std::size_t threads =
      std::max<std::size_t>(1, std::min(workers, std::max<std::size_t>(1, ordered.size())));
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (fatal) std::rethrow_exception(fatal);
  return results;
}

void write_results(const std::vector<SampleResult>& results,
                   const std::filesystem::path& path) {
  jsonl::Writer out(path);
  for (const auto& r : results) out.write(result_to_json(r));
}

std::vector<SampleResult> read_results(const std::filesystem::path& path) {
  std::vector<SampleResult> results;
  for (const auto& obj : jsonl::read_file(path)) {
    results.push_back(result_from_json(obj, path.string()));
  }
  return results;
}

}  // namespace verikit
