#include "verikit/scan.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "verikit/error.hpp"

namespace verikit::scan {

namespace {

// IEEE 1364-2005 reserved words, sorted for binary search.
constexpr auto kKeywords = std::to_array<std::string_view>({
    "always", "and", "assign", "automatic", "begin", "buf", "bufif0", "bufif1",
    "case", "casex", "casez", "cell", "cmos", "config", "deassign", "default",
    "defparam", "design", "disable", "edge", "else", "end", "endcase",
    "endconfig", "endfunction", "endgenerate", "endmodule", "endprimitive",
    "endspecify", "endtable", "endtask", "event", "for", "force", "forever",
    "fork", "function", "generate", "genvar", "highz0", "highz1", "if",
    "ifnone", "incdir", "include", "initial", "inout", "input", "instance",
    "integer", "join", "large", "liblist", "library", "localparam",
    "macromodule", "medium", "module", "nand", "negedge", "nmos", "nor",
    "noshowcancelled", "not", "notif0", "notif1", "or", "output", "parameter",
    "pmos", "posedge", "primitive", "pull0", "pull1", "pulldown", "pullup",
    "pulsestyle_ondetect", "pulsestyle_onevent", "rcmos", "real", "realtime",
    "reg", "release", "repeat", "rnmos", "rpmos", "rtran", "rtranif0",
    "rtranif1", "scalared", "showcancelled", "signed", "small", "specify",
    "specparam", "strong0", "strong1", "supply0", "supply1", "table", "task",
    "time", "tran", "tranif0", "tranif1", "tri", "tri0", "tri1", "triand",
    "trior", "trireg", "unsigned", "use", "uwire", "vectored", "wait", "wand",
    "weak0", "weak1", "while", "wire", "wor", "xnor", "xor",
});
static_assert(std::is_sorted(kKeywords.begin(), kKeywords.end()));

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

bool is_base_char(char c) {
  switch (c) {
    case 'b': case 'B': case 'o': case 'O':
    case 'd': case 'D': case 'h': case 'H':
      return true;
    default:
      return false;
  }
}

bool is_value_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '?';
}

std::string_view trim_view(std::string_view text) {
  std::size_t begin = 0;
  while (begin < text.size() && is_space(text[begin])) ++begin;
  std::size_t end = text.size();
  while (end > begin && is_space(text[end - 1])) --end;
  return text.substr(begin, end - begin);
}

bool is_trivia(TokenKind kind) {
  return kind == TokenKind::line_comment || kind == TokenKind::block_comment ||
         kind == TokenKind::other;
}

}  // namespace

bool is_verilog_keyword(std::string_view word) {
  return std::binary_search(kKeywords.begin(), kKeywords.end(), word);
}

std::vector<Token> tokenize(std::string_view source, std::vector<std::string>* diagnostics) {
  std::vector<Token> tokens;
  auto diag = [&](const std::string& msg) {
    if (diagnostics) diagnostics->push_back(msg);
  };
  auto push = [&](TokenKind kind, std::size_t begin, std::size_t end) {
    tokens.push_back(Token{kind, source.substr(begin, end - begin), begin});
  };

  const std::size_t n = source.size();
  std::size_t i = 0;
  while (i < n) {
    const char c = source[i];
    const std::size_t start = i;

    if (is_space(c)) {
      while (i < n && is_space(source[i])) ++i;
      push(TokenKind::other, start, i);
      continue;
    }

    if (c == '/' && i + 1 < n && source[i + 1] == '/') {
      i += 2;
      while (i < n && source[i] != '\n') ++i;
      push(TokenKind::line_comment, start, i);
      continue;
    }

    if (c == '/' && i + 1 < n && source[i + 1] == '*') {
      i += 2;
      bool closed = false;
      while (i < n) {
        if (source[i] == '*' && i + 1 < n && source[i + 1] == '/') {
          i += 2;
          closed = true;
          break;
        }
        ++i;
      }
      if (!closed) diag("unterminated block comment at offset " + std::to_string(start));
      push(TokenKind::block_comment, start, i);
      continue;
    }

    if (c == '"') {
      ++i;
      bool closed = false;
      while (i < n) {
        if (source[i] == '\\' && i + 1 < n) {
          i += 2;
          continue;
        }
        if (source[i] == '"') {
          ++i;
          closed = true;
          break;
        }
        ++i;
      }
      if (!closed) diag("unterminated string literal at offset " + std::to_string(start));
      push(TokenKind::string_literal, start, i);
      continue;
    }

    // Attribute instance (* ... *), lexed as one opaque token. `(*)` is the
    // event-expression wildcard, not an attribute.
    if (c == '(' && i + 1 < n && source[i + 1] == '*' &&
        !(i + 2 < n && source[i + 2] == ')')) {
      i += 2;
      bool closed = false;
      while (i < n) {
        if (source[i] == '*' && i + 1 < n && source[i + 1] == ')') {
          i += 2;
          closed = true;
          break;
        }
        ++i;
      }
      if (!closed) diag("unterminated attribute at offset " + std::to_string(start));
      push(TokenKind::block_comment, start, i);
      continue;
    }

    if (is_ident_start(c)) {
      ++i;
      while (i < n && is_ident_char(source[i])) ++i;
      std::string_view word = source.substr(start, i - start);
      push(is_verilog_keyword(word) ? TokenKind::keyword : TokenKind::identifier, start, i);
      continue;
    }

    // Escaped identifier: backslash through the next whitespace.
    if (c == '\\' && i + 1 < n && !is_space(source[i + 1])) {
      ++i;
      while (i < n && !is_space(source[i])) ++i;
      push(TokenKind::identifier, start, i);
      continue;
    }

    // System task/function names are not ordinary identifiers.
    if (c == '$' && i + 1 < n && (is_ident_start(source[i + 1]) || source[i + 1] == '$')) {
      ++i;
      while (i < n && is_ident_char(source[i])) ++i;
      push(TokenKind::other, start, i);
      continue;
    }

    // Compiler directives pass through unexpanded.
    if (c == '`' && i + 1 < n && is_ident_start(source[i + 1])) {
      ++i;
      while (i < n && is_ident_char(source[i])) ++i;
      push(TokenKind::other, start, i);
      continue;
    }

    if (std::isdigit(static_cast<unsigned char>(c))) {
      ++i;
      while (i < n && (std::isdigit(static_cast<unsigned char>(source[i])) || source[i] == '_'))
        ++i;
      // Sized based literal: 8'hFF
      if (i < n && source[i] == '\'') {
        std::size_t j = i + 1;
        if (j < n && (source[j] == 's' || source[j] == 'S')) ++j;
        if (j < n && is_base_char(source[j])) {
          i = j + 1;
          while (i < n && is_value_char(source[i])) ++i;
          push(TokenKind::number, start, i);
          continue;
        }
      }
      // Decimal fraction / exponent
      if (i + 1 < n && source[i] == '.' &&
          std::isdigit(static_cast<unsigned char>(source[i + 1]))) {
        ++i;
        while (i < n && (std::isdigit(static_cast<unsigned char>(source[i])) || source[i] == '_'))
          ++i;
      }
      if (i < n && (source[i] == 'e' || source[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < n && (source[j] == '+' || source[j] == '-')) ++j;
        if (j < n && std::isdigit(static_cast<unsigned char>(source[j]))) {
          i = j;
          while (i < n && (std::isdigit(static_cast<unsigned char>(source[i])) || source[i] == '_'))
            ++i;
        }
      }
      push(TokenKind::number, start, i);
      continue;
    }

    // Unsized based literal: 'b1010
    if (c == '\'') {
      std::size_t j = i + 1;
      if (j < n && (source[j] == 's' || source[j] == 'S')) ++j;
      if (j < n && is_base_char(source[j])) {
        i = j + 1;
        while (i < n && is_value_char(source[i])) ++i;
        push(TokenKind::number, start, i);
        continue;
      }
    }

    if (std::isprint(static_cast<unsigned char>(c))) {
      ++i;
      push(TokenKind::punctuation, start, i);
      continue;
    }

    // Anything else (control bytes, non-ASCII) degrades to `other` runs.
    ++i;
    while (i < n && !std::isprint(static_cast<unsigned char>(source[i])) && !is_space(source[i]))
      ++i;
    push(TokenKind::other, start, i);
  }
  return tokens;
}

const char* to_string(ExtractionOutcome outcome) {
  switch (outcome) {
    case ExtractionOutcome::extracted: return "extracted";
    case ExtractionOutcome::no_module_keyword: return "no_module_keyword";
    case ExtractionOutcome::missing_endmodule: return "missing_endmodule";
    case ExtractionOutcome::empty_input: return "empty_input";
  }
  return "unknown";
}

std::optional<ExtractionOutcome> extraction_outcome_from_string(std::string_view text) {
  if (text == "extracted") return ExtractionOutcome::extracted;
  if (text == "no_module_keyword") return ExtractionOutcome::no_module_keyword;
  if (text == "missing_endmodule") return ExtractionOutcome::missing_endmodule;
  if (text == "empty_input") return ExtractionOutcome::empty_input;
  return std::nullopt;
}

namespace {

bool is_module_keyword(const Token& token) {
  return token.kind == TokenKind::keyword && token.text == "module";
}

bool is_endmodule_keyword(const Token& token) {
  return token.kind == TokenKind::keyword && token.text == "endmodule";
}

// First identifier after index `from`, skipping trivia only; punctuation or a
// keyword means there is no name.
std::optional<std::string> name_after(const std::vector<Token>& tokens, std::size_t from) {
  for (std::size_t i = from; i < tokens.size(); ++i) {
    if (is_trivia(tokens[i].kind)) continue;
    if (tokens[i].kind == TokenKind::identifier) return std::string(tokens[i].text);
    return std::nullopt;
  }
  return std::nullopt;
}

// Body start offset (within the token stream's source) after the header
// terminator: the first `;` at parenthesis depth 0 following the `module`
// keyword at `module_index`. Returns nullopt when `endmodule` (or the end of
// input) arrives first.
std::optional<std::size_t> header_end(const std::vector<Token>& tokens,
                                      std::size_t module_index) {
  int depth = 0;
  for (std::size_t i = module_index + 1; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    if (is_endmodule_keyword(t)) return std::nullopt;
    if (t.kind != TokenKind::punctuation) continue;
    if (t.text == "(") {
      ++depth;
    } else if (t.text == ")") {
      if (depth > 0) --depth;
    } else if (t.text == ";" && depth == 0) {
      return t.offset + 1;
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<VerilogModule> extract_modules(std::string_view source,
                                           std::vector<std::string>* diagnostics) {
  auto diag = [&](const std::string& msg) {
    if (diagnostics) diagnostics->push_back(msg);
  };

  std::vector<Token> tokens = tokenize(source, diagnostics);
  std::vector<VerilogModule> modules;

  std::size_t i = 0;
  while (i < tokens.size()) {
    if (is_endmodule_keyword(tokens[i])) {
      diag("unmatched endmodule at offset " + std::to_string(tokens[i].offset));
      ++i;
      continue;
    }
    if (!is_module_keyword(tokens[i])) {
      ++i;
      continue;
    }

    const std::size_t module_index = i;
    std::size_t end_index = tokens.size();
    for (std::size_t j = i + 1; j < tokens.size(); ++j) {
      if (is_module_keyword(tokens[j])) {
        diag("nested module keyword at offset " + std::to_string(tokens[j].offset) +
             " before endmodule; pairing greedily");
        continue;
      }
      if (is_endmodule_keyword(tokens[j])) {
        end_index = j;
        break;
      }
    }
    if (end_index == tokens.size()) {
      diag("module keyword at offset " + std::to_string(tokens[module_index].offset) +
           " has no matching endmodule");
      break;
    }

    VerilogModule mod;
    mod.span.begin = tokens[module_index].offset;
    mod.span.end = tokens[end_index].offset + tokens[end_index].text.size();
    mod.full_text = std::string(source.substr(mod.span.begin, mod.span.end - mod.span.begin));

    if (auto name = name_after(tokens, module_index + 1)) {
      mod.name = *name;
    } else {
      diag("module at offset " + std::to_string(mod.span.begin) + " has no name identifier");
    }

    if (auto body_begin = header_end(tokens, module_index)) {
      std::string_view body = source.substr(*body_begin, mod.span.end - *body_begin);
      while (!body.empty() && is_space(body.front())) body.remove_prefix(1);
      mod.body = std::string(body);
    } else {
      diag("module at offset " + std::to_string(mod.span.begin) +
           " has no header terminator; keeping full text as body");
      mod.body = mod.full_text;
    }

    modules.push_back(std::move(mod));
    i = end_index + 1;
  }
  return modules;
}

std::optional<std::string> try_extract_module_name(std::string_view module_text) {
  std::vector<Token> tokens = tokenize(module_text);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (is_trivia(tokens[i].kind)) continue;
    if (!is_module_keyword(tokens[i])) return std::nullopt;
    return name_after(tokens, i + 1);
  }
  return std::nullopt;
}

std::string extract_module_name(std::string_view module_text) {
  if (auto name = try_extract_module_name(module_text)) return *name;
  throw Error(ErrorKind::name_not_found, "no identifier follows the module keyword");
}

std::optional<std::string> try_strip_header(std::string_view module_text) {
  std::vector<Token> tokens = tokenize(module_text);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (is_trivia(tokens[i].kind)) continue;
    if (!is_module_keyword(tokens[i])) return std::nullopt;
    auto body_begin = header_end(tokens, i);
    if (!body_begin) return std::nullopt;
    std::string_view body = module_text.substr(*body_begin);
    while (!body.empty() && is_space(body.front())) body.remove_prefix(1);
    return std::string(body);
  }
  return std::nullopt;
}

std::string strip_header(std::string_view module_text) {
  if (auto body = try_strip_header(module_text)) return *body;
  throw Error(ErrorKind::no_header_terminator,
              "no `;` at parenthesis depth 0 before endmodule");
}

ExtractionResult extract_completion(std::string_view completion) {
  ExtractionResult result;
  if (trim_view(completion).empty()) {
    result.outcome = ExtractionOutcome::empty_input;
    result.diagnostics.push_back("completion is empty");
    return result;
  }

  std::vector<VerilogModule> modules = extract_modules(completion, &result.diagnostics);
  if (!modules.empty()) {
    result.outcome = ExtractionOutcome::extracted;
    if (modules.size() > 1) {
      result.diagnostics.push_back("completion contains " + std::to_string(modules.size()) +
                                   " modules; keeping the first");
    }
    result.module = std::move(modules.front());
    return result;
  }

  std::vector<Token> tokens = tokenize(completion);
  const bool has_module_keyword =
      std::any_of(tokens.begin(), tokens.end(), [](const Token& t) { return is_module_keyword(t); });
  result.outcome = has_module_keyword ? ExtractionOutcome::missing_endmodule
                                      : ExtractionOutcome::no_module_keyword;
  return result;
}

}  // namespace verikit::scan
