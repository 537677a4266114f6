#include "verikit/client.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <tuple>

#include <httplib.h>

#include "verikit/error.hpp"
#include "verikit/jsonl.hpp"
#include "verikit/log.hpp"

namespace verikit {

namespace {

struct SplitUrl {
  std::string base;
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorKind::config_error, "endpoint URL needs a scheme: " + url);
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorKind::config_error, "unsupported endpoint scheme: " + scheme);
  }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme == "https") {
    throw Error(ErrorKind::config_error, "https endpoints need a TLS-enabled build");
  }
#endif
  const std::size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string first_line_trimmed(const std::string& text) {
  std::string line = text.substr(0, text.find('\n'));
  std::size_t begin = 0;
  std::size_t end = line.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(line[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(line[end - 1]))) --end;
  return line.substr(begin, end - begin);
}

}  // namespace

ChatClient::ChatClient(const GenerationConfig& config) : config_(config) {
  if (config.endpoint_url.empty()) {
    throw Error(ErrorKind::config_error, "no endpoint URL configured");
  }
  const SplitUrl split = split_url(config.endpoint_url);
  base_ = split.base;
  path_ = split.path;
  if (!config.api_key_env.empty()) {
    if (const char* key = std::getenv(config.api_key_env.c_str())) api_key_ = key;
  }
}

std::string ChatClient::chat(const std::vector<ChatMessage>& messages, double temperature,
                             int max_tokens) const {
  jsonl::json body;
  body["model"] = config_.model_name;
  body["messages"] = jsonl::json::array();
  for (const auto& msg : messages) {
    body["messages"].push_back({{"role", msg.role}, {"content", msg.content}});
  }
  body["temperature"] = temperature;
  body["max_tokens"] = max_tokens;
  const std::string payload = body.dump();

  std::string last_error;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(config_.backoff_initial_ms << (attempt - 1)));
    }
    httplib::Client cli(base_);
    cli.set_connection_timeout(std::chrono::duration<double>(config_.timeout_secs));
    cli.set_read_timeout(std::chrono::duration<double>(config_.timeout_secs));
    cli.set_write_timeout(std::chrono::duration<double>(config_.timeout_secs));
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    auto res = cli.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    jsonl::json reply = jsonl::json::parse(res->body, nullptr, false);
    if (reply.is_discarded()) {
      last_error = "unparseable response body";
      continue;
    }
    try {
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const std::exception&) {
      last_error = "response missing choices[0].message.content";
      continue;
    }
  }
  throw Error(ErrorKind::request_failed, last_error);
}

std::string label_description(const std::string& module_text, const GenerationConfig& config) {
  const ChatClient client(config);
  std::vector<ChatMessage> messages;
  messages.push_back({"user", config.label_instruction + "\n\n" + module_text});
  return first_line_trimmed(client.chat(messages, config.temperature, config.max_new_tokens));
}

namespace {

struct Job {
  std::size_t order = 0;  // canonical position among pending jobs
  const Problem* problem = nullptr;
  int sample_index = 0;
};

// Runs jobs through a bounded worker pool and hands results to `sink` in
// canonical order as soon as each prefix completes.
void run_jobs(const std::vector<Job>& jobs, const GenerationConfig& config,
              const std::function<void(RawSample&&)>& sink, GenerateStats& stats) {
  if (jobs.empty()) return;
  const ChatClient client(config);

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> failed{0};
  std::mutex sink_mutex;
  std::map<std::size_t, RawSample> done;
  std::size_t next_to_write = 0;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job& job = jobs[i];
      RawSample sample;
      sample.task_id = job.problem->task_id;
      sample.sample_index = job.sample_index;
      sample.temperature = config.temperature;
      std::vector<ChatMessage> messages;
      if (!config.system_prompt.empty()) {
        messages.push_back({"system", config.system_prompt});
      }
      messages.push_back({"user", job.problem->description});
      try {
        sample.completion = client.chat(messages, config.temperature, config.max_new_tokens);
      } catch (const Error& err) {
        failed.fetch_add(1);
        log::warn("sample " + sample.task_id + "#" + std::to_string(sample.sample_index) +
                  " failed: " + err.what());
      }
      std::lock_guard lock(sink_mutex);
      done.emplace(job.order, std::move(sample));
      while (!done.empty() && done.begin()->first == next_to_write) {
        sink(std::move(done.begin()->second));
        done.erase(done.begin());
        ++next_to_write;
      }
    }
  };

  const std::size_t threads =
      std::max<std::size_t>(1, std::min(config.concurrency, jobs.size()));
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  stats.requested += jobs.size();
  stats.failed += failed.load();
}

jsonl::json sample_to_json(const RawSample& sample) {
  jsonl::json obj;
  obj["task_id"] = sample.task_id;
  obj["sample_index"] = sample.sample_index;
  obj["temperature"] = sample.temperature;
  obj["completion"] = sample.completion;
  return obj;
}

RawSample sample_from_json(const jsonl::json& obj, const std::string& where) {
  if (!obj.contains("task_id") || !obj.contains("sample_index") ||
      !obj.contains("temperature") || !obj.contains("completion")) {
    throw Error(ErrorKind::parse_error, where + ": sample record missing required keys");
  }
  RawSample sample;
  sample.task_id = obj["task_id"].get<std::string>();
  sample.sample_index = obj["sample_index"].get<int>();
  sample.temperature = obj["temperature"].get<double>();
  sample.completion = obj["completion"].get<std::string>();
  return sample;
}

std::vector<Job> pending_jobs(const std::vector<Problem>& problems,
                              const GenerationConfig& config,
                              const std::set<std::tuple<std::string, double, int>>& existing) {
  std::vector<const Problem*> ordered;
  ordered.reserve(problems.size());
  for (const auto& p : problems) ordered.push_back(&p);
  std::sort(ordered.begin(), ordered.end(),
            [](const Problem* a, const Problem* b) { return a->task_id < b->task_id; });

  std::vector<Job> jobs;
  std::size_t order = 0;
  for (const Problem* p : ordered) {
    for (int s = 0; s < config.num_samples_per_problem; ++s) {
      if (existing.contains({p->task_id, config.temperature, s})) continue;
      jobs.push_back(Job{order++, p, s});
    }
  }
  return jobs;
}

}  // namespace

std::vector<RawSample> generate_samples(const std::vector<Problem>& problems,
                                        const GenerationConfig& config, GenerateStats* stats) {
  GenerateStats local;
  std::vector<RawSample> samples;
  const auto jobs = pending_jobs(problems, config, {});
  samples.reserve(jobs.size());
  run_jobs(jobs, config, [&](RawSample&& s) { samples.push_back(std::move(s)); }, local);
  local.written = samples.size();
  if (stats) *stats = local;
  return samples;
}

GenerateStats generate_to_file(const std::vector<Problem>& problems,
                               const GenerationConfig& config,
                               const std::filesystem::path& out_path, bool resume) {
  GenerateStats stats;
  std::set<std::tuple<std::string, double, int>> existing;
  if (resume) {
    for (const auto& obj : jsonl::read_for_resume(out_path)) {
      const RawSample s = sample_from_json(obj, out_path.string());
      existing.insert({s.task_id, s.temperature, s.sample_index});
    }
    stats.skipped = existing.size();
  }

  const auto jobs = pending_jobs(problems, config, existing);
  jsonl::Writer out(out_path, /*append=*/resume);
  run_jobs(jobs, config, [&](RawSample&& s) { out.write(sample_to_json(s)); }, stats);
  stats.written = static_cast<std::size_t>(out.count());
  return stats;
}

std::vector<RawSample> read_samples(const std::filesystem::path& path) {
  std::vector<RawSample> samples;
  std::set<std::tuple<std::string, double, int>> seen;
  for (const auto& obj : jsonl::read_file(path)) {
    RawSample s = sample_from_json(obj, path.string());
    if (!seen.insert({s.task_id, s.temperature, s.sample_index}).second) {
      throw Error(ErrorKind::parse_error,
                  path.string() + ": duplicate sample " + s.task_id + "#" +
                      std::to_string(s.sample_index));
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

void write_samples(const std::vector<RawSample>& samples, const std::filesystem::path& path) {
  jsonl::Writer out(path);
  for (const auto& s : samples) out.write(sample_to_json(s));
}

}  // namespace verikit
