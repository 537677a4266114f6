#include "verikit/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "verikit/error.hpp"
#include "verikit/jsonl.hpp"
#include "verikit/log.hpp"
#include "verikit/metrics.hpp"

namespace verikit {

const char* to_string(ErrorClass error_class) {
  switch (error_class) {
    case ErrorClass::none: return "none";
    case ErrorClass::missing_endmodule: return "missing_endmodule";
    case ErrorClass::repetition: return "repetition";
    case ErrorClass::undefined_instance: return "undefined_instance";
    case ErrorClass::foreign_language: return "foreign_language";
    case ErrorClass::prompt_echo: return "prompt_echo";
    case ErrorClass::skeleton_only: return "skeleton_only";
    case ErrorClass::syntax_error: return "syntax_error";
    case ErrorClass::other: return "other";
  }
  return "other";
}

std::optional<ErrorClass> error_class_from_string(std::string_view text) {
  for (ErrorClass ec : kAllErrorClasses) {
    if (text == to_string(ec)) return ec;
  }
  return std::nullopt;
}

namespace {

bool has_keyword(std::string_view source, std::string_view keyword) {
  for (const scan::Token& tok : scan::tokenize(source)) {
    if (tok.kind == scan::TokenKind::keyword && tok.text == keyword) return true;
  }
  return false;
}

bool matches_lexicon(const std::string& completion, const std::vector<std::string>& lexicon) {
  return std::any_of(lexicon.begin(), lexicon.end(), [&](const std::string& phrase) {
    return !phrase.empty() && completion.find(phrase) != std::string::npos;
  });
}

std::string strip_whitespace(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  }
  return out;
}

// Length of the longest common substring, O(|a|*|b|) with two rows.
std::size_t longest_common_substring(const std::string& a, const std::string& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  std::size_t best = 0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : 0;
      best = std::max(best, cur[j]);
    }
    std::swap(prev, cur);
  }
  return best;
}

bool is_prompt_echo(const std::string& completion, const std::string& description,
                    double coverage) {
  const std::string flat_completion = strip_whitespace(completion);
  const std::string flat_description = strip_whitespace(description);
  if (flat_completion.empty() || flat_description.empty()) return false;
  const std::size_t lcs = longest_common_substring(flat_completion, flat_description);
  return static_cast<double>(lcs) >=
         coverage * static_cast<double>(flat_completion.size());
}

std::vector<std::string> normalized_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line;
    bool pending_space = false;
    for (std::size_t i = pos; i < eol; ++i) {
      const char c = text[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        pending_space = !line.empty();
        continue;
      }
      if (pending_space) line.push_back(' ');
      pending_space = false;
      line.push_back(c);
    }
    lines.push_back(std::move(line));
    if (eol == text.size()) break;
    pos = eol + 1;
  }
  return lines;
}

bool has_repetition(const std::string& completion, int threshold) {
  if (threshold < 2) threshold = 2;
  const std::vector<std::string> lines = normalized_lines(completion);

  int run = 0;
  std::string last;
  for (const auto& line : lines) {
    if (line.empty()) {
      run = 0;
      last.clear();
      continue;
    }
    run = line == last ? run + 1 : 1;
    last = line;
    if (run >= threshold) return true;
  }

  const std::size_t n = lines.size();
  for (std::size_t len = 2; len * static_cast<std::size_t>(threshold) <= n; ++len) {
    for (std::size_t start = 0; start + len * threshold <= n; ++start) {
      bool non_blank = false;
      for (std::size_t i = 0; i < len && !non_blank; ++i) {
        non_blank = !lines[start + i].empty();
      }
      if (!non_blank) continue;
      bool repeats = true;
      for (int rep = 1; rep < threshold && repeats; ++rep) {
        for (std::size_t i = 0; i < len; ++i) {
          if (lines[start + i] != lines[start + rep * len + i]) {
            repeats = false;
            break;
          }
        }
      }
      if (repeats) return true;
    }
  }
  return false;
}

bool has_any_keyword(std::string_view source, std::initializer_list<std::string_view> words) {
  for (const scan::Token& tok : scan::tokenize(source)) {
    if (tok.kind != scan::TokenKind::keyword) continue;
    for (std::string_view w : words) {
      if (tok.text == w) return true;
    }
  }
  return false;
}

// Significant tokens: everything the simulator would see.
std::vector<scan::Token> significant_tokens(const std::vector<scan::Token>& tokens) {
  std::vector<scan::Token> out;
  for (const scan::Token& tok : tokens) {
    switch (tok.kind) {
      case scan::TokenKind::line_comment:
      case scan::TokenKind::block_comment:
        break;
      case scan::TokenKind::other:
        if (!tok.text.empty() &&
            !std::isspace(static_cast<unsigned char>(tok.text.front()))) {
          out.push_back(tok);
        }
        break;
      default:
        out.push_back(tok);
    }
  }
  return out;
}

// Finds `ident [#(...)] ident (` at statement position and reports the
// instantiated name. Statement position: start of text or right after one of
// `;`, `begin`, `end`.
std::vector<std::string> instantiated_names(std::string_view source) {
  const std::vector<scan::Token> tokens = significant_tokens(scan::tokenize(source));
  std::vector<std::string> names;
  auto at_statement_position = [&](std::size_t i) {
    if (i == 0) return true;
    const scan::Token& prev = tokens[i - 1];
    if (prev.kind == scan::TokenKind::punctuation && prev.text == ";") return true;
    if (prev.kind == scan::TokenKind::keyword &&
        (prev.text == "begin" || prev.text == "end")) {
      return true;
    }
    return false;
  };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].kind != scan::TokenKind::identifier) continue;
    if (!at_statement_position(i)) continue;
    std::size_t j = i + 1;
    // Optional parameter override #( ... ).
    if (j + 1 < tokens.size() && tokens[j].kind == scan::TokenKind::punctuation &&
        tokens[j].text == "#" && tokens[j + 1].text == "(") {
      int depth = 0;
      std::size_t scan_pos = j + 1;
      for (; scan_pos < tokens.size(); ++scan_pos) {
        if (tokens[scan_pos].kind != scan::TokenKind::punctuation) continue;
        if (tokens[scan_pos].text == "(") ++depth;
        if (tokens[scan_pos].text == ")" && --depth == 0) break;
      }
      if (scan_pos >= tokens.size()) continue;
      j = scan_pos + 1;
    }
    if (j + 1 >= tokens.size()) continue;
    if (tokens[j].kind != scan::TokenKind::identifier) continue;
    if (tokens[j + 1].kind != scan::TokenKind::punctuation || tokens[j + 1].text != "(") {
      continue;
    }
    names.emplace_back(tokens[i].text);
  }
  return names;
}

bool has_undefined_instance(const std::string& body_or_completion,
                            const std::string& completion, const Problem& problem) {
  const std::vector<std::string> names = instantiated_names(body_or_completion);
  if (names.empty()) return false;

  std::vector<std::string> defined;
  std::vector<std::string> diags;
  for (const scan::VerilogModule& mod : scan::extract_modules(completion, &diags)) {
    if (!mod.name.empty()) defined.push_back(mod.name);
  }
  if (problem.module_header) {
    if (auto own = scan::try_extract_module_name(*problem.module_header)) {
      defined.push_back(*own);
    }
  }
  defined.push_back(problem.task_id);

  return std::any_of(names.begin(), names.end(), [&](const std::string& name) {
    return std::find(defined.begin(), defined.end(), name) == defined.end();
  });
}

bool body_is_skeleton(const std::string& body) {
  if (has_any_keyword(body, {"assign", "always", "initial"})) return false;
  return instantiated_names(body).empty();
}

}  // namespace

ErrorClass classify(const RawSample& sample, const scan::ExtractionResult& extraction,
                    SimStatus sim, const Problem& problem, const TaxonomyRules& rules) {
  if (sim == SimStatus::pass) return ErrorClass::none;

  const bool has_endmodule = has_keyword(sample.completion, "endmodule");
  if (matches_lexicon(sample.completion, rules.foreign_lexicon) && !has_endmodule) {
    return ErrorClass::foreign_language;
  }
  if (is_prompt_echo(sample.completion, problem.description, rules.echo_coverage)) {
    return ErrorClass::prompt_echo;
  }
  if (has_repetition(sample.completion, rules.repeat_threshold)) {
    return ErrorClass::repetition;
  }
  if ((extraction.outcome == scan::ExtractionOutcome::missing_endmodule ||
       extraction.outcome == scan::ExtractionOutcome::no_module_keyword) &&
      !has_endmodule &&
      has_any_keyword(sample.completion,
                      {"assign", "always", "input", "output", "wire", "reg"})) {
    return ErrorClass::missing_endmodule;
  }
  if (extraction.ok() && body_is_skeleton(extraction.module->body)) {
    return ErrorClass::skeleton_only;
  }
  const std::string& instance_scope =
      extraction.ok() ? extraction.module->body : sample.completion;
  if (has_undefined_instance(instance_scope, sample.completion, problem)) {
    return ErrorClass::undefined_instance;
  }
  if (sim == SimStatus::compile_error) return ErrorClass::syntax_error;
  return ErrorClass::other;
}

std::vector<TaxonomyRecord> classify_all(const std::vector<Problem>& problems,
                                         const std::vector<RawSample>& samples,
                                         const std::vector<SampleResult>& results,
                                         const TaxonomyRules& rules) {
  std::map<std::string, const Problem*> by_id;
  for (const auto& p : problems) by_id[p.task_id] = &p;

  using Key = std::tuple<std::string, double, int>;
  std::map<Key, const SampleResult*> result_by_key;
  for (const auto& r : results) {
    result_by_key[{r.task_id, r.temperature, r.sample_index}] = &r;
  }

  std::vector<const RawSample*> ordered;
  ordered.reserve(samples.size());
  for (const auto& s : samples) ordered.push_back(&s);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const RawSample* a, const RawSample* b) {
                     return std::tie(a->task_id, a->temperature, a->sample_index) <
                            std::tie(b->task_id, b->temperature, b->sample_index);
                   });

  std::vector<TaxonomyRecord> records;
  records.reserve(ordered.size());
  std::size_t unmatched = 0;
  for (const RawSample* s : ordered) {
    const auto problem_it = by_id.find(s->task_id);
    const auto result_it = result_by_key.find({s->task_id, s->temperature, s->sample_index});
    if (problem_it == by_id.end() || result_it == result_by_key.end()) {
      ++unmatched;
      continue;
    }
    const scan::ExtractionResult extraction = scan::extract_completion(s->completion);
    TaxonomyRecord record;
    record.task_id = s->task_id;
    record.sample_index = s->sample_index;
    record.temperature = s->temperature;
    record.error_class =
        classify(*s, extraction, result_it->second->sim, *problem_it->second, rules);
    records.push_back(std::move(record));
  }
  if (unmatched > 0) {
    log::warn(std::to_string(unmatched) + " samples had no matching result or problem");
  }
  return records;
}

std::vector<TemperatureTaxonomy> taxonomy_summary(const std::vector<TaxonomyRecord>& records) {
  std::map<double, std::map<ErrorClass, std::size_t>> by_temp;
  for (const auto& rec : records) by_temp[rec.temperature][rec.error_class] += 1;

  std::vector<TemperatureTaxonomy> summary;
  for (const auto& [temperature, counts] : by_temp) {
    TemperatureTaxonomy row;
    row.temperature = temperature;
    for (const auto& [ec, count] : counts) {
      row.total += count;
      if (ec != ErrorClass::none) row.failed += count;
    }
    for (ErrorClass ec : kAllErrorClasses) {
      ClassCount cell;
      cell.error_class = ec;
      const auto it = counts.find(ec);
      cell.count = it == counts.end() ? 0 : it->second;
      if (ec != ErrorClass::none && row.failed > 0) {
        cell.pct_of_failed = round2(100.0 * static_cast<double>(cell.count) /
                                    static_cast<double>(row.failed));
      }
      row.counts.push_back(cell);
    }
    summary.push_back(std::move(row));
  }
  return summary;
}

std::string render_taxonomy(const std::vector<TemperatureTaxonomy>& summary, bool markdown) {
  std::ostringstream out;
  if (markdown) {
    out << "## Failure Taxonomy\n\n";
  } else {
    out << "Failure Taxonomy\n================\n";
  }
  if (summary.empty()) {
    out << "no samples\n";
    return out.str();
  }
  for (const auto& row : summary) {
    std::ostringstream temp;
    temp << row.temperature;
    if (markdown) {
      out << "\n### Temperature " << temp.str() << " (" << row.failed << " of " << row.total
          << " failed)\n\n";
      out << "| Class | Count | % of failed |\n|---|---|---|\n";
      for (const auto& cell : row.counts) {
        out << "| " << to_string(cell.error_class) << " | " << cell.count << " | "
            << (cell.error_class == ErrorClass::none ? std::string("-")
                                                     : percent_string(cell.pct_of_failed))
            << " |\n";
      }
    } else {
      out << "temperature " << temp.str() << ": " << row.failed << " of " << row.total
          << " failed\n";
      for (const auto& cell : row.counts) {
        out << "  " << to_string(cell.error_class) << ": " << cell.count;
        if (cell.error_class != ErrorClass::none) {
          out << " (" << percent_string(cell.pct_of_failed) << ")";
        }
        out << '\n';
      }
    }
  }
  return out.str();
}

void write_taxonomy(const std::vector<TaxonomyRecord>& records,
                    const std::filesystem::path& path) {
  jsonl::Writer out(path);
  for (const auto& rec : records) {
    jsonl::json obj;
    obj["task_id"] = rec.task_id;
    obj["sample_index"] = rec.sample_index;
    obj["temperature"] = rec.temperature;
    obj["error_class"] = to_string(rec.error_class);
    out.write(obj);
  }
}

std::vector<TaxonomyRecord> read_taxonomy(const std::filesystem::path& path) {
  std::vector<TaxonomyRecord> records;
  for (const auto& obj : jsonl::read_file(path)) {
    TaxonomyRecord rec;
    rec.task_id = obj.at("task_id").get<std::string>();
    rec.sample_index = obj.at("sample_index").get<int>();
    rec.temperature = obj.at("temperature").get<double>();
    const auto ec = error_class_from_string(obj.at("error_class").get<std::string>());
    if (!ec) {
      throw Error(ErrorKind::parse_error,
                  path.string() + ": unknown error_class \"" +
                      obj.at("error_class").get<std::string>() + "\"");
    }
    rec.error_class = *ec;
    records.push_back(std::move(rec));
  }
  return records;
}

namespace {

std::string trim_view(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return std::string(text.substr(begin, end - begin));
}

std::string parse_toml_string(std::string_view raw, const std::string& where) {
  const std::string trimmed = trim_view(raw);
  if (trimmed.size() < 2 || trimmed.front() != '"' || trimmed.back() != '"') {
    throw Error(ErrorKind::config_error, where + ": expected a quoted string");
  }
  std::string out;
  for (std::size_t i = 1; i + 1 < trimmed.size(); ++i) {
    char c = trimmed[i];
    if (c == '\\' && i + 2 < trimmed.size()) {
      ++i;
      switch (trimmed[i]) {
        case 'n': c = '\n'; break;
        case 't': c = '\t'; break;
        case '\\': c = '\\'; break;
        case '"': c = '"'; break;
        default: c = trimmed[i]; break;
      }
    }
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> parse_toml_string_array(std::string_view raw,
                                                 const std::string& where) {
  const std::string trimmed = trim_view(raw);
  if (trimmed.size() < 2 || trimmed.front() != '[' || trimmed.back() != ']') {
    throw Error(ErrorKind::config_error, where + ": expected an array");
  }
  std::vector<std::string> items;
  std::string current;
  bool in_string = false;
  for (std::size_t i = 1; i + 1 < trimmed.size(); ++i) {
    const char c = trimmed[i];
    if (in_string) {
      current.push_back(c);
      if (c == '\\' && i + 2 < trimmed.size()) {
        current.push_back(trimmed[++i]);
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
      current.push_back(c);
    } else if (c == ',') {
      if (!trim_view(current).empty()) items.push_back(parse_toml_string(current, where));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!trim_view(current).empty()) items.push_back(parse_toml_string(current, where));
  return items;
}

}  // namespace

TaxonomyRules load_rules(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot open " + path.string());
  TaxonomyRules rules;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    const std::string trimmed = trim_view(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const std::size_t eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::config_error, where + ": expected key = value");
    }
    const std::string key = trim_view(trimmed.substr(0, eq));
    const std::string value = trim_view(trimmed.substr(eq + 1));
    if (key == "echo_coverage") {
      try {
        rules.echo_coverage = std::stod(value);
      } catch (const std::exception&) {
        throw Error(ErrorKind::config_error, where + ": echo_coverage needs a number");
      }
    } else if (key == "repeat_threshold") {
      try {
        rules.repeat_threshold = std::stoi(value);
      } catch (const std::exception&) {
        throw Error(ErrorKind::config_error, where + ": repeat_threshold needs an integer");
      }
    } else if (key == "foreign_lexicon") {
      rules.foreign_lexicon = parse_toml_string_array(value, where);
    } else {
      throw Error(ErrorKind::config_error, where + ": unknown key \"" + key + "\"");
    }
  }
  return rules;
}

}  // namespace verikit
