#include "verikit/csv.hpp"

#include <fstream>
#include <sstream>

#include "verikit/error.hpp"
#include "verikit/log.hpp"

namespace verikit::csv {

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

namespace {

struct Record {
  std::vector<std::string> fields;
  bool ok = true;
};

// Parses one record starting at `pos`; leaves `pos` at the start of the next
// record. On a quoting violation the record is marked bad and parsing resyncs
// at the next raw newline.
Record parse_record(std::string_view text, std::size_t& pos) {
  Record rec;
  std::string field;
  const std::size_t n = text.size();

  while (true) {
    if (pos < n && text[pos] == '"') {
      ++pos;
      bool closed = false;
      while (pos < n) {
        if (text[pos] == '"') {
          if (pos + 1 < n && text[pos + 1] == '"') {
            field.push_back('"');
            pos += 2;
            continue;
          }
          ++pos;
          closed = true;
          break;
        }
        field.push_back(text[pos]);
        ++pos;
      }
      const bool at_boundary =
          pos >= n || text[pos] == ',' || text[pos] == '\n' || text[pos] == '\r';
      if (!closed || !at_boundary) {
        rec.ok = false;
        while (pos < n && text[pos] != '\n') ++pos;
        if (pos < n) ++pos;
        return rec;
      }
    } else {
      while (pos < n && text[pos] != ',' && text[pos] != '\n' && text[pos] != '\r') {
        field.push_back(text[pos]);
        ++pos;
      }
    }

    if (pos < n && text[pos] == ',') {
      rec.fields.push_back(std::move(field));
      field.clear();
      ++pos;
      continue;
    }
    rec.fields.push_back(std::move(field));
    if (pos < n && text[pos] == '\r') ++pos;
    if (pos < n && text[pos] == '\n') ++pos;
    return rec;
  }
}

bool blank_record(const Record& rec) {
  return rec.fields.size() == 1 && rec.fields[0].empty();
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  CsvTable table;
  std::size_t pos = 0;
  bool have_header = false;

  while (pos < text.size()) {
    Record rec = parse_record(text, pos);
    if (!rec.ok) {
      ++table.skipped;
      continue;
    }
    if (blank_record(rec)) continue;
    if (!have_header) {
      table.header = std::move(rec.fields);
      have_header = true;
      continue;
    }
    if (rec.fields.size() != table.header.size()) {
      ++table.skipped;
      continue;
    }
    table.rows.push_back(std::move(rec.fields));
  }
  return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_error, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

}  // namespace verikit::csv
