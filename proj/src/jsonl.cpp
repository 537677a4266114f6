#include "verikit/jsonl.hpp"

#include <sstream>
#include <string>

#include "verikit/error.hpp"
#include "verikit/log.hpp"

namespace verikit::jsonl {

namespace {

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_error, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::vector<json> read_file(const std::filesystem::path& path) {
  const std::string text = read_all(path);
  std::vector<json> objects;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    ++line_no;
    std::string_view line(text.data() + pos, eol - pos);
    pos = eol + 1;
    if (line.empty() || line == "\r") continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded()) {
      throw Error(ErrorKind::parse_error,
                  path.string() + ":" + std::to_string(line_no) + ": invalid JSON");
    }
    objects.push_back(std::move(obj));
  }
  return objects;
}

std::vector<json> read_for_resume(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return {};
  const std::string text = read_all(path);

  std::vector<json> objects;
  std::size_t good_end = 0;  // byte offset just past the last intact record
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    const bool complete_line = eol != std::string::npos;
    if (!complete_line) eol = text.size();
    std::string_view line(text.data() + pos, eol - pos);
    const std::size_t next = complete_line ? eol + 1 : text.size();

    if (line.empty() || line == "\r") {
      pos = good_end = next;
      continue;
    }
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !complete_line) {
      log::warn("dropping damaged record tail in " + path.string());
      break;
    }
    objects.push_back(std::move(obj));
    pos = good_end = next;
  }

  if (good_end < text.size()) {
    std::filesystem::resize_file(path, good_end, ec);
    if (ec) throw Error(ErrorKind::io_error, "cannot trim " + path.string());
  }
  return objects;
}

Writer::Writer(const std::filesystem::path& path, bool append) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  out_.open(path, append ? std::ios::app | std::ios::binary : std::ios::binary);
  if (!out_) throw Error(ErrorKind::io_error, "cannot open " + path.string() + " for writing");
}

void Writer::write(const json& object) {
  out_ << object.dump() << '\n';
  out_.flush();
  ++count_;
}

}  // namespace verikit::jsonl
