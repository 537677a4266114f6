#include "verikit/curate.hpp"

#include <atomic>
#include <cctype>
#include <chrono>
#include <mutex>
#include <thread>
#include <unordered_set>

#include "verikit/csv.hpp"
#include "verikit/error.hpp"
#include "verikit/jsonl.hpp"
#include "verikit/log.hpp"
#include "verikit/scan.hpp"

namespace verikit {

namespace {

std::string trim_copy(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return std::string(text.substr(begin, end - begin));
}

// Collapses whitespace runs outside comments and strings to a single space.
std::string normalize_module_text(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (const scan::Token& tok : scan::tokenize(text)) {
    if (tok.kind == scan::TokenKind::other &&
        std::isspace(static_cast<unsigned char>(tok.text.front()))) {
      if (!out.empty() && out.back() != ' ') out.push_back(' ');
      continue;
    }
    out.append(tok.text);
  }
  return trim_copy(out);
}

}  // namespace

IngestResult ingest_csv(const std::filesystem::path& path, const std::string& column) {
  const csv::CsvTable table = csv::read_csv_file(path);
  const auto col = table.column(column);
  if (!col) {
    throw Error(ErrorKind::missing_column, path.string() + ": no column \"" + column + "\"");
  }
  IngestResult result;
  result.skipped_rows = table.skipped;
  if (table.skipped > 0) {
    log::warn("skipped " + std::to_string(table.skipped) + " malformed rows in " + path.string());
  }
  result.records.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    result.records.push_back(RawRecord{i, table.rows[i][*col]});
  }
  return result;
}

CleanResult clean(const std::vector<RawRecord>& records, const CleanOptions& options) {
  CleanResult result;
  std::unordered_set<std::string> seen;
  for (const RawRecord& raw : records) {
    const std::vector<scan::VerilogModule> modules = scan::extract_modules(raw.text);
    if (modules.empty()) {
      ++result.rows_without_modules;
      continue;
    }
    for (const scan::VerilogModule& mod : modules) {
      if (mod.name.empty()) {
        ++result.nameless_dropped;
        log::warn("dropping unnamed module candidate from row " + std::to_string(raw.row_index));
        continue;
      }
      const std::string key = options.normalize_dedup ? normalize_module_text(mod.full_text)
                                                      : trim_copy(mod.full_text);
      if (!seen.insert(key).second) {
        ++result.duplicates_removed;
        continue;
      }
      DatasetRecord rec;
      rec.system_prompt = options.system_prompt;
      rec.instruction = options.instruction;
      rec.module = mod.full_text;
      rec.output = mod.full_text;
      rec.module_name = mod.name;
      result.records.push_back(std::move(rec));
    }
  }
  return result;
}

AnnotateResult annotate(std::vector<DatasetRecord> records, const Labeler& labeler,
                        const AnnotateOptions& options) {
  AnnotateResult result;
  result.records = std::move(records);
  if (result.records.empty()) return result;

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> failed{0};
  std::mutex fatal_mutex;
  std::exception_ptr fatal;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= result.records.size()) return;
      {
        std::lock_guard lock(fatal_mutex);
        if (fatal) return;
      }
      DatasetRecord& rec = result.records[i];
      bool done = false;
      for (int attempt = 0; attempt <= options.retries && !done; ++attempt) {
        if (attempt > 0) {
          std::this_thread::sleep_for(
              std::chrono::milliseconds(options.backoff_initial_ms << (attempt - 1)));
        }
        try {
          rec.description = labeler(rec);
          done = true;
        } catch (const Error& err) {
          if (err.kind() == ErrorKind::config_error) {
            std::lock_guard lock(fatal_mutex);
            if (!fatal) fatal = std::current_exception();
            return;
          }
        } catch (const std::exception&) {
        }
      }
      if (!done) {
        rec.description.clear();
        failed.fetch_add(1);
      }
    }
  };

  const std::size_t threads = std::max<std::size_t>(
      1, std::min(options.concurrency, result.records.size()));
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  if (fatal) std::rethrow_exception(fatal);
  result.failed = failed.load();
  if (result.failed > 0) {
    log::warn(std::to_string(result.failed) + " records could not be labeled");
  }
  return result;
}

std::string assemble_prompt(DatasetRecord& record, const std::string& prompt_template) {
  std::string out;
  out.reserve(prompt_template.size() + record.description.size());
  for (std::size_t i = 0; i < prompt_template.size(); ++i) {
    const char c = prompt_template[i];
    if (c == '{' && i + 1 < prompt_template.size() && prompt_template[i + 1] == '{') {
      out.push_back('{');
      ++i;
      continue;
    }
    if (c == '}' && i + 1 < prompt_template.size() && prompt_template[i + 1] == '}') {
      out.push_back('}');
      ++i;
      continue;
    }
    if (c != '{') {
      out.push_back(c);
      continue;
    }
    const std::size_t close = prompt_template.find('}', i + 1);
    if (close == std::string::npos) {
      throw Error(ErrorKind::unknown_placeholder, "unterminated placeholder in template");
    }
    const std::string name = prompt_template.substr(i + 1, close - i - 1);
    if (name == "system_prompt") {
      out.append(record.system_prompt);
    } else if (name == "instruction") {
      out.append(record.instruction);
    } else if (name == "description") {
      out.append(record.description);
    } else if (name == "module_name") {
      out.append(record.module_name);
    } else {
      throw Error(ErrorKind::unknown_placeholder, "unknown placeholder {" + name + "}");
    }
    i = close;
  }
  record.prompt = out;
  return out;
}

namespace {

bool satisfies_invariants(const DatasetRecord& rec) {
  const std::string trimmed = trim_copy(rec.module);
  if (!trimmed.starts_with("module") || !trimmed.ends_with("endmodule")) return false;
  const auto name = scan::try_extract_module_name(rec.module);
  return name && *name == rec.module_name;
}

}  // namespace

std::size_t export_jsonl(const std::vector<DatasetRecord>& records,
                         const std::filesystem::path& path) {
  jsonl::Writer out(path);
  std::size_t skipped = 0;
  for (const auto& rec : records) {
    if (!satisfies_invariants(rec)) {
      ++skipped;
      continue;
    }
    jsonl::json obj;
    obj["system_prompt"] = rec.system_prompt;
    obj["instruction"] = rec.instruction;
    obj["module"] = rec.module;
    obj["description"] = rec.description;
    obj["output"] = rec.output;
    obj["prompt"] = rec.prompt;
    obj["module_name"] = rec.module_name;
    out.write(obj);
  }
  if (skipped > 0) {
    log::warn("skipped " + std::to_string(skipped) + " records violating dataset invariants");
  }
  return static_cast<std::size_t>(out.count());
}

std::vector<DatasetRecord> load_dataset_jsonl(const std::filesystem::path& path) {
  std::vector<DatasetRecord> records;
  for (const auto& obj : jsonl::read_file(path)) {
    DatasetRecord rec;
    rec.system_prompt = obj.value("system_prompt", "");
    rec.instruction = obj.value("instruction", "");
    rec.module = obj.value("module", "");
    rec.description = obj.value("description", "");
    rec.output = obj.value("output", "");
    rec.prompt = obj.value("prompt", "");
    rec.module_name = obj.value("module_name", "");
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace verikit
