#pragma once

#include <stdexcept>
#include <string>

namespace verikit {

enum class ErrorKind {
  io_error,
  missing_column,
  unknown_placeholder,
  request_failed,
  config_error,
  simulator_not_found,
  unknown_task_id,
  unmapped_task_id,
  domain_error,
  empty_input,
  k_exceeds_n,
  name_not_found,
  no_header_terminator,
  parse_error,
};

const char* to_string(ErrorKind kind);

/// Single exception type for all fatal errors; per-item failures are
/// represented in-band in the result structures instead.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io_error: return "io_error";
    case ErrorKind::missing_column: return "missing_column";
    case ErrorKind::unknown_placeholder: return "unknown_placeholder";
    case ErrorKind::request_failed: return "request_failed";
    case ErrorKind::config_error: return "config_error";
    case ErrorKind::simulator_not_found: return "simulator_not_found";
    case ErrorKind::unknown_task_id: return "unknown_task_id";
    case ErrorKind::unmapped_task_id: return "unmapped_task_id";
    case ErrorKind::domain_error: return "domain_error";
    case ErrorKind::empty_input: return "empty_input";
    case ErrorKind::k_exceeds_n: return "k_exceeds_n";
    case ErrorKind::name_not_found: return "name_not_found";
    case ErrorKind::no_header_terminator: return "no_header_terminator";
    case ErrorKind::parse_error: return "parse_error";
  }
  return "unknown";
}

}  // namespace verikit
