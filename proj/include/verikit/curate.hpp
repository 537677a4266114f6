#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace verikit {

inline constexpr const char* kDefaultSystemPrompt =
    "I want you to act as an IC designer, and implement the following description.";
inline constexpr const char* kDefaultInstruction =
    "Generate a Verilog module with the following description.";
inline constexpr const char* kDefaultPromptTemplate =
    "## System Prompt: {system_prompt}\n{instruction}\n{description}";
inline constexpr const char* kDefaultCodeColumn = "code";

// One raw corpus cell; may hold zero or more modules.
struct RawRecord {
  std::size_t row_index = 0;
  std::string text;
};

// One curated training example. module and output hold the same full module
// text; prompt is filled by assemble_prompt and description by annotate.
struct DatasetRecord {
  std::string system_prompt;
  std::string instruction;
  std::string module;
  std::string description;
  std::string output;
  std::string prompt;
  std::string module_name;

  bool operator==(const DatasetRecord&) const = default;
};

struct IngestResult {
  std::vector<RawRecord> records;
  std::size_t skipped_rows = 0;
};

// Reads the named column from a CSV file, one RawRecord per parseable row in
// file order. Malformed rows are skipped and counted. Throws Error(io_error)
// or Error(missing_column).
IngestResult ingest_csv(const std::filesystem::path& path, const std::string& column);

struct CleanOptions {
  // Dedup key: trimmed module text; with normalize_dedup, internal whitespace
  // runs outside comments/strings collapse to one space first.
  bool normalize_dedup = false;
  std::string system_prompt = kDefaultSystemPrompt;
  std::string instruction = kDefaultInstruction;
};

struct CleanResult {
  std::vector<DatasetRecord> records;
  std::size_t rows_without_modules = 0;
  std::size_t nameless_dropped = 0;
  std::size_t duplicates_removed = 0;
};

// Extracts every module from every record, drops rows with no modules and
// candidates whose name cannot be recovered, and removes duplicate module
// texts keeping the first occurrence. Source order is preserved.
CleanResult clean(const std::vector<RawRecord>& records, const CleanOptions& options = {});

// Produces the short description for one record; throws Error on failure.
using Labeler = std::function<std::string(const DatasetRecord&)>;

struct AnnotateOptions {
  std::size_t concurrency = 8;
  int retries = 3;
  int backoff_initial_ms = 250;
};

struct AnnotateResult {
  std::vector<DatasetRecord> records;
  std::size_t failed = 0;
};

// Fills each record's description via the labeler. Per-record failures after
// retries leave the description empty and are counted; output order equals
// input order. Only Error(config_error) propagates.
AnnotateResult annotate(std::vector<DatasetRecord> records, const Labeler& labeler,
                        const AnnotateOptions& options = {});

// Substitutes {system_prompt}, {instruction}, {description}, {module_name}
// from the record; "{{" and "}}" escape literal braces. The result is stored
// in record.prompt and returned. Throws Error(unknown_placeholder).
std::string assemble_prompt(DatasetRecord& record, const std::string& prompt_template);

// Writes one seven-field JSON object per record. Records violating the
// structural invariants (module boundaries, name match) are skipped with a
// warning. Returns the count written.
std::size_t export_jsonl(const std::vector<DatasetRecord>& records,
                         const std::filesystem::path& path);

std::vector<DatasetRecord> load_dataset_jsonl(const std::filesystem::path& path);

}  // namespace verikit
