#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "verikit/problem.hpp"

namespace verikit {

inline constexpr const char* kDefaultApiKeyEnv = "MODEL_API_KEY";
inline constexpr const char* kDefaultLabelInstruction =
    "Generate a short description for the following Verilog module.";
inline constexpr const char* kDefaultGenSystemPrompt =
    "I want you to act as an IC designer, and implement the following description.";

struct GenerationConfig {
  double temperature = 0.2;
  int num_samples_per_problem = 20;
  int max_new_tokens = 500;
  std::string model_name;
  std::string endpoint_url;
  double timeout_secs = 60.0;
  int retries = 3;
  int backoff_initial_ms = 250;
  std::size_t concurrency = 4;
  // Env var holding the bearer token; the key itself never appears in config.
  std::string api_key_env = kDefaultApiKeyEnv;
  // System message for generation requests; empty disables it.
  std::string system_prompt = kDefaultGenSystemPrompt;
  std::string label_instruction = kDefaultLabelInstruction;
};

struct RawSample {
  std::string task_id;
  int sample_index = 0;
  double temperature = 0.0;
  std::string completion;

  bool operator==(const RawSample&) const = default;
};

struct ChatMessage {
  std::string role;
  std::string content;
};

// Minimal chat-completion client: POSTs a messages array and reads back
// choices[0].message.content. Retries with exponential backoff; completion
// text is returned byte-for-byte.
class ChatClient {
 public:
  // Throws Error(config_error) on an unusable endpoint URL.
  explicit ChatClient(const GenerationConfig& config);

  // Throws Error(request_failed) once retries are exhausted.
  std::string chat(const std::vector<ChatMessage>& messages, double temperature,
                   int max_tokens) const;

 private:
  std::string base_;  // scheme://host[:port]
  std::string path_;
  GenerationConfig config_;
  std::string api_key_;
};

// One-line description of a module (first line of the model reply, trimmed).
// Throws Error(request_failed) after retries.
std::string label_description(const std::string& module_text, const GenerationConfig& config);

struct GenerateStats {
  std::size_t requested = 0;  // requests actually issued this run
  std::size_t failed = 0;     // samples persisted with empty completion
  std::size_t skipped = 0;    // samples already present before the run
  std::size_t written = 0;    // samples appended this run
};

// Generates num_samples_per_problem completions per problem at the configured
// temperature, collected in (task_id, sample_index) order. Request failures
// yield empty completions.
std::vector<RawSample> generate_samples(const std::vector<Problem>& problems,
                                        const GenerationConfig& config,
                                        GenerateStats* stats = nullptr);

// Same, persisting incrementally to a JSONL file in canonical order. With
// resume=true, existing (task_id, temperature, sample_index) triples are kept
// and only the missing ones are requested; a damaged trailing line is
// repaired first.
GenerateStats generate_to_file(const std::vector<Problem>& problems,
                               const GenerationConfig& config,
                               const std::filesystem::path& out_path, bool resume);

std::vector<RawSample> read_samples(const std::filesystem::path& path);
void write_samples(const std::vector<RawSample>& samples, const std::filesystem::path& path);

}  // namespace verikit
