#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace verikit {

struct RunResult {
  int exit_code = 0;
  bool timed_out = false;
  bool signaled = false;
  bool spawn_failed = false;
  std::string out;
  std::string err;

  bool success() const { return !timed_out && !signaled && !spawn_failed && exit_code == 0; }
};

// Runs argv[0] with the given arguments in `cwd`, capturing stdout and
// stderr. The child gets its own process group; on deadline the whole group
// is killed with SIGKILL and timed_out is set. Output capture is capped at
// 1 MiB per stream.
RunResult run_command(const std::vector<std::string>& argv, const std::filesystem::path& cwd,
                      double timeout_secs);

// Splits a command template into argv tokens with shell-like quoting:
// single quotes are literal, double quotes allow backslash escapes, and an
// unquoted backslash escapes the next character.
std::vector<std::string> split_command(const std::string& command);

// Substitutes {output} with output_path and {sources} with the source paths
// in each token. A token that is exactly "{sources}" expands to one token per
// source; embedded occurrences are joined with spaces.
std::vector<std::string> expand_command(const std::vector<std::string>& argv,
                                        const std::string& output_path,
                                        const std::vector<std::string>& sources);

}  // namespace verikit
