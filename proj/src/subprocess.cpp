#include "verikit/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <chrono>
#include <cstring>

#include "verikit/error.hpp"

namespace verikit {

namespace {

constexpr std::size_t kCaptureCap = 1 << 20;

void append_capped(std::string& dest, const char* data, std::size_t len) {
  if (dest.size() >= kCaptureCap) return;
  dest.append(data, std::min(len, kCaptureCap - dest.size()));
}

}  // namespace

RunResult run_command(const std::vector<std::string>& argv, const std::filesystem::path& cwd,
                      double timeout_secs) {
  if (argv.empty()) throw Error(ErrorKind::config_error, "empty command");

  int out_pipe[2];
  int err_pipe[2];
  if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0) {
    throw Error(ErrorKind::io_error, "pipe failed: " + std::string(std::strerror(errno)));
  }

  const pid_t pid = fork();
  if (pid < 0) {
    throw Error(ErrorKind::io_error, "fork failed: " + std::string(std::strerror(errno)));
  }

  if (pid == 0) {
    setpgid(0, 0);
    if (!cwd.empty() && chdir(cwd.c_str()) != 0) _exit(126);
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[0]);
    close(err_pipe[1]);
    std::vector<char*> args;
    args.reserve(argv.size() + 1);
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    execvp(args[0], args.data());
    _exit(127);
  }

  setpgid(pid, pid);
  close(out_pipe[1]);
  close(err_pipe[1]);

  RunResult result;
  const auto deadline =
      std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_secs);

  bool out_open = true;
  bool err_open = true;
  bool reaped = false;
  int status = 0;
  bool killed = false;
  char buf[4096];

  while (out_open || err_open || !reaped) {
    if (!killed && std::chrono::steady_clock::now() >= deadline) {
      kill(-pid, SIGKILL);
      result.timed_out = true;
      killed = true;
    }

    struct pollfd fds[2];
    nfds_t nfds = 0;
    if (out_open) fds[nfds++] = {out_pipe[0], POLLIN, 0};
    if (err_open) fds[nfds++] = {err_pipe[0], POLLIN, 0};

    if (nfds > 0) {
      poll(fds, nfds, 50);
      for (nfds_t i = 0; i < nfds; ++i) {
        if (!(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
        const ssize_t n = read(fds[i].fd, buf, sizeof buf);
        const bool is_out = fds[i].fd == out_pipe[0];
        if (n > 0) {
          append_capped(is_out ? result.out : result.err, buf, static_cast<std::size_t>(n));
        } else if (n == 0 || (n < 0 && errno != EAGAIN && errno != EINTR)) {
          close(fds[i].fd);
          (is_out ? out_open : err_open) = false;
        }
      }
    }

    if (!reaped) {
      const pid_t r = waitpid(pid, &status, WNOHANG);
      if (r == pid) {
        reaped = true;
      } else if (r < 0) {
        reaped = true;
        status = 0;
      } else if (!out_open && !err_open) {
        // Pipes closed but the child lingers; let the deadline path kill it.
        struct timespec pause {0, 10'000'000};
        nanosleep(&pause, nullptr);
      }
    }
  }

  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
    if (result.exit_code == 127 || result.exit_code == 126) result.spawn_failed = true;
  } else if (WIFSIGNALED(status)) {
    result.signaled = true;
    result.exit_code = 128 + WTERMSIG(status);
  }
  // Reap any stragglers left in the group.
  kill(-pid, SIGKILL);
  return result;
}

std::vector<std::string> split_command(const std::string& command) {
  std::vector<std::string> tokens;
  std::string current;
  bool in_token = false;
  std::size_t i = 0;
  while (i < command.size()) {
    const char c = command[i];
    if (std::isspace(static_cast<unsigned char>(c)) && !in_token) {
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      tokens.push_back(current);
      current.clear();
      in_token = false;
      ++i;
      continue;
    }
    in_token = true;
    if (c == '\'') {
      const std::size_t close = command.find('\'', i + 1);
      const std::size_t end = close == std::string::npos ? command.size() : close;
      current.append(command, i + 1, end - i - 1);
      i = end + 1;
    } else if (c == '"') {
      ++i;
      while (i < command.size() && command[i] != '"') {
        if (command[i] == '\\' && i + 1 < command.size()) ++i;
        current.push_back(command[i]);
        ++i;
      }
      ++i;
    } else if (c == '\\' && i + 1 < command.size()) {
      current.push_back(command[i + 1]);
      i += 2;
    } else {
      current.push_back(c);
      ++i;
    }
  }
  if (in_token) tokens.push_back(current);
  return tokens;
}

std::vector<std::string> expand_command(const std::vector<std::string>& argv,
                                        const std::string& output_path,
                                        const std::vector<std::string>& sources) {
  auto replace_all = [](std::string text, const std::string& from, const std::string& to) {
    std::size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
      text.replace(pos, from.size(), to);
      pos += to.size();
    }
    return text;
  };

  std::string joined;
  for (const auto& s : sources) {
    if (!joined.empty()) joined.push_back(' ');
    joined.append(s);
  }

  std::vector<std::string> out;
  out.reserve(argv.size() + sources.size());
  for (const auto& token : argv) {
    if (token == "{sources}") {
      out.insert(out.end(), sources.begin(), sources.end());
      continue;
    }
    std::string expanded = replace_all(token, "{output}", output_path);
    expanded = replace_all(std::move(expanded), "{sources}", joined);
    out.push_back(std::move(expanded));
  }
  return out;
}

}  // namespace verikit
