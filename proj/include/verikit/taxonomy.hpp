#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "verikit/problem.hpp"
#include "verikit/scan.hpp"
#include "verikit/sim.hpp"

namespace verikit {

enum class ErrorClass {
  none,
  missing_endmodule,
  repetition,
  undefined_instance,
  foreign_language,
  prompt_echo,
  skeleton_only,
  syntax_error,
  other,
};

inline constexpr ErrorClass kAllErrorClasses[] = {
    ErrorClass::none,          ErrorClass::missing_endmodule, ErrorClass::repetition,
    ErrorClass::undefined_instance, ErrorClass::foreign_language,  ErrorClass::prompt_echo,
    ErrorClass::skeleton_only, ErrorClass::syntax_error,      ErrorClass::other,
};

const char* to_string(ErrorClass error_class);
std::optional<ErrorClass> error_class_from_string(std::string_view text);

struct TaxonomyRules {
  // Plain substrings whose presence (with no endmodule token) marks a
  // completion as non-Verilog source.
  std::vector<std::string> foreign_lexicon = {"#include",  "printf(", "int main(",
                                              "def ",      "import ", "return 0;"};
  // Minimum share of the completion's non-whitespace characters that the
  // longest common substring with the prompt must cover.
  double echo_coverage = 0.6;
  // Minimum consecutive occurrences of a line (or a 2+-line block).
  int repeat_threshold = 3;
};

// Reads a flat key = value rules file (strings, numbers, string arrays).
// Unknown keys are rejected with Error(config_error).
TaxonomyRules load_rules(const std::filesystem::path& path);

// Assigns exactly one failure class by the first matching rule:
//   1. none: the sample passed.
//   2. foreign_language: lexicon hit and no endmodule token.
//   3. prompt_echo: the completion mostly restates the description.
//   4. repetition: a line or block repeats >= threshold times consecutively.
//   5. missing_endmodule: extraction failed and the completion has
//      Verilog-indicative tokens but no endmodule token.
//   6. skeleton_only: extracted body has no behavioral statement.
//   7. undefined_instance: instantiation of a module defined nowhere.
//   8. syntax_error: the simulator rejected the code.
//   9. other.
ErrorClass classify(const RawSample& sample, const scan::ExtractionResult& extraction,
                    SimStatus sim, const Problem& problem, const TaxonomyRules& rules = {});

struct TaxonomyRecord {
  std::string task_id;
  int sample_index = 0;
  double temperature = 0.0;
  ErrorClass error_class = ErrorClass::other;

  bool operator==(const TaxonomyRecord&) const = default;
};

// Joins samples with their results by (task_id, temperature, sample_index),
// classifies each pair, and returns records in that canonical order. Samples
// without a matching result are skipped with a warning.
std::vector<TaxonomyRecord> classify_all(const std::vector<Problem>& problems,
                                         const std::vector<RawSample>& samples,
                                         const std::vector<SampleResult>& results,
                                         const TaxonomyRules& rules = {});

struct ClassCount {
  ErrorClass error_class = ErrorClass::none;
  std::size_t count = 0;
  double pct_of_failed = 0.0;  // share among failed samples; 0 for none

  bool operator==(const ClassCount&) const = default;
};

struct TemperatureTaxonomy {
  double temperature = 0.0;
  std::size_t total = 0;
  std::size_t failed = 0;
  std::vector<ClassCount> counts;  // every class, enum order

  bool operator==(const TemperatureTaxonomy&) const = default;
};

// Per-temperature class counts, temperatures ascending, classes in enum
// order, percentages relative to the failed count.
std::vector<TemperatureTaxonomy> taxonomy_summary(const std::vector<TaxonomyRecord>& records);

std::string render_taxonomy(const std::vector<TemperatureTaxonomy>& summary, bool markdown);

void write_taxonomy(const std::vector<TaxonomyRecord>& records,
                    const std::filesystem::path& path);
std::vector<TaxonomyRecord> read_taxonomy(const std::filesystem::path& path);

}  // namespace verikit
