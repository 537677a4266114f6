#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace verikit::csv {

/// RFC-4180 CSV with a header row. Malformed rows (bad quoting, wrong field
/// count) are dropped and counted rather than failing the whole file.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  int skipped = 0;

  std::optional<std::size_t> column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv_file(const std::filesystem::path& path);  // throws Error{io_error}

}  // namespace verikit::csv
