#pragma once

#include <filesystem>
#include <fstream>
#include <vector>

#include <json.hpp>

namespace verikit::jsonl {

using json = nlohmann::ordered_json;

/// Reads one JSON object per line; blank lines are skipped. Throws
/// Error{io_error} when the file cannot be opened and Error{parse_error}
/// naming the offending line otherwise.
std::vector<json> read_file(const std::filesystem::path& path);

/// Like read_file, but tolerant of a crashed writer: a missing file yields an
/// empty list, and a truncated final line is dropped and trimmed from the
/// file so appending resumes cleanly.
std::vector<json> read_for_resume(const std::filesystem::path& path);

/// Line-buffered JSONL writer; every record is flushed so partial runs leave
/// usable files behind.
class Writer {
public:
  explicit Writer(const std::filesystem::path& path, bool append = false);
  void write(const json& object);
  long count() const { return count_; }

private:
  std::ofstream out_;
  long count_ = 0;
};

}  // namespace verikit::jsonl
