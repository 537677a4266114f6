#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace verikit::scan {

/// Comment- and string-aware lexical scanning of Verilog text. The scanner is
/// deliberately shallow: it recognizes just enough structure (comments,
/// strings, identifiers, keywords, numbers) to find module boundaries
/// reliably. It is not a parser.

enum class TokenKind {
  keyword,
  identifier,
  line_comment,
  block_comment,
  string_literal,
  punctuation,
  number,
  other,
};

/// One lexical token. `text` views into the source passed to tokenize();
/// keep that buffer alive while tokens are in use.
struct Token {
  TokenKind kind;
  std::string_view text;
  std::size_t offset;  // 0-based byte index into the source
};

/// Tokenizes Verilog source. Total and lossless: concatenating the token
/// texts in order reproduces the input byte-for-byte; malformed input
/// degrades to `other` tokens. Unterminated block comments, strings, and
/// attribute blocks extend to end of input and are reported through
/// `diagnostics` when given.
std::vector<Token> tokenize(std::string_view source,
                            std::vector<std::string>* diagnostics = nullptr);

bool is_verilog_keyword(std::string_view word);

struct SourceSpan {
  std::size_t begin = 0;  // byte offset of the `module` keyword
  std::size_t end = 0;    // one past the matching `endmodule`
};

/// An extracted module: the region from a `module` keyword through its
/// matching `endmodule`, both recognized at keyword level (occurrences inside
/// comments and string literals do not count).
struct VerilogModule {
  std::string name;       // empty when no identifier follows `module`
  std::string full_text;  // source[span.begin..span.end)
  std::string body;       // full_text with the header removed
  SourceSpan span;
};

enum class ExtractionOutcome {
  extracted,
  no_module_keyword,
  missing_endmodule,
  empty_input,
};

const char* to_string(ExtractionOutcome outcome);
std::optional<ExtractionOutcome> extraction_outcome_from_string(std::string_view text);

struct ExtractionResult {
  ExtractionOutcome outcome;
  std::optional<VerilogModule> module;  // set iff outcome == extracted
  std::vector<std::string> diagnostics;

  bool ok() const { return outcome == ExtractionOutcome::extracted; }
};

/// Returns all top-level module...endmodule regions in source order. Each
/// `module` keyword pairs with the next `endmodule` keyword; a nested
/// `module` before that point is kept inside the region greedily and noted
/// as a diagnostic. A trailing `module` with no `endmodule` is omitted and
/// reported via diagnostics.
std::vector<VerilogModule> extract_modules(std::string_view source,
                                           std::vector<std::string>* diagnostics = nullptr);

/// First identifier token after the leading `module` keyword, skipping
/// comments and whitespace. Escaped identifiers (`\name `) are returned with
/// their backslash. Throws Error{name_not_found} when no identifier follows.
std::string extract_module_name(std::string_view module_text);
std::optional<std::string> try_extract_module_name(std::string_view module_text);

/// Removes the module header: everything from the `module` keyword through
/// the first `;` at parenthesis depth 0, inclusive. The result is the module
/// logic ending with `endmodule`, leading whitespace trimmed. Throws
/// Error{no_header_terminator} when no depth-0 `;` exists before the final
/// `endmodule`.
std::string strip_header(std::string_view module_text);
std::optional<std::string> try_strip_header(std::string_view module_text);

/// Turns a raw model completion into a simulator-ready candidate: extracts
/// the first module and strips its header. Failures are in-band outcomes,
/// never exceptions.
ExtractionResult extract_completion(std::string_view completion);

}  // namespace verikit::scan
