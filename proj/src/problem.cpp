#include "verikit/problem.hpp"

#include <set>

#include "verikit/csv.hpp"
#include "verikit/error.hpp"
#include "verikit/jsonl.hpp"

namespace verikit {

std::vector<Problem> load_problems(const std::filesystem::path& path) {
  const auto records = jsonl::read_file(path);
  std::vector<Problem> problems;
  problems.reserve(records.size());
  std::set<std::string> seen;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    const std::string where = path.string() + " record " + std::to_string(i + 1);
    for (const char* key : {"task_id", "description", "test"}) {
      if (!rec.contains(key) || !rec[key].is_string()) {
        throw Error(ErrorKind::parse_error, where + ": missing text field \"" + key + "\"");
      }
    }
    Problem p;
    p.task_id = rec["task_id"].get<std::string>();
    p.description = rec["description"].get<std::string>();
    p.test = rec["test"].get<std::string>();
    if (rec.contains("module_header") && rec["module_header"].is_string()) {
      p.module_header = rec["module_header"].get<std::string>();
    }
    if (rec.contains("circuit_type") && rec["circuit_type"].is_string()) {
      p.circuit_type = rec["circuit_type"].get<std::string>();
    }
    if (p.test.empty()) {
      throw Error(ErrorKind::parse_error, where + ": empty test");
    }
    if (!seen.insert(p.task_id).second) {
      throw Error(ErrorKind::parse_error, where + ": duplicate task_id \"" + p.task_id + "\"");
    }
    problems.push_back(std::move(p));
  }
  return problems;
}

void save_problems(const std::vector<Problem>& problems, const std::filesystem::path& path) {
  jsonl::Writer out(path);
  for (const auto& p : problems) {
    jsonl::json rec;
    rec["task_id"] = p.task_id;
    rec["description"] = p.description;
    if (p.module_header) rec["module_header"] = *p.module_header;
    rec["test"] = p.test;
    if (p.circuit_type) rec["circuit_type"] = *p.circuit_type;
    out.write(rec);
  }
}

std::map<std::string, std::string> load_type_map(const std::filesystem::path& path) {
  const csv::CsvTable table = csv::read_csv_file(path);
  const auto id_col = table.column("task_id");
  const auto type_col = table.column("circuit_type");
  if (!id_col || !type_col) {
    throw Error(ErrorKind::missing_column,
                path.string() + ": expected columns task_id,circuit_type");
  }
  std::map<std::string, std::string> map;
  for (const auto& row : table.rows) {
    map[row[*id_col]] = row[*type_col];
  }
  return map;
}

}  // namespace verikit
