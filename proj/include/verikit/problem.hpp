#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace verikit {

// One benchmark problem: a natural-language description paired with a
// self-checking testbench. module_header, when present, is prepended to
// extracted completion bodies before simulation.
struct Problem {
  std::string task_id;
  std::string description;
  std::optional<std::string> module_header;
  std::string test;
  std::optional<std::string> circuit_type;
};

// Reads a problems JSONL file. Throws Error(parse_error) when a record is
// missing a required key, when a task_id repeats, or when a test is empty;
// Error(io_error) when the file cannot be read.
std::vector<Problem> load_problems(const std::filesystem::path& path);

void save_problems(const std::vector<Problem>& problems, const std::filesystem::path& path);

// Reads a two-column task_id,circuit_type CSV (header row required).
std::map<std::string, std::string> load_type_map(const std::filesystem::path& path);

}  // namespace verikit
