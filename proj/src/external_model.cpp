#include "qpem/external_model.hpp"

#include "qpem/errors.hpp"

#include <cerrno>
#include <charconv>
#include <chrono>
#include <csignal>
#include <cstring>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace qpem {
namespace {

void append_number(std::string& out, Scalar v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

std::string format_requests(const Matrix& xs, Index begin, Index end) {
  std::string out;
  out.reserve(static_cast<std::size_t>(end - begin) * static_cast<std::size_t>(xs.cols()) * 20);
  for (Index i = begin; i < end; ++i) {
    for (Index j = 0; j < xs.cols(); ++j) {
      if (j > 0) out.push_back(',');
      append_number(out, xs(i, j));
    }
    out.push_back('\n');
  }
  return out;
}

struct ChildProcess {
  pid_t pid = -1;
  int stdin_fd = -1;
  int stdout_fd = -1;

  ~ChildProcess() {
    if (stdin_fd >= 0) ::close(stdin_fd);
    if (stdout_fd >= 0) ::close(stdout_fd);
    if (pid > 0) {
      ::kill(pid, SIGKILL);
      int status = 0;
      ::waitpid(pid, &status, 0);
    }
  }

  void close_stdin() {
    if (stdin_fd >= 0) {
      ::close(stdin_fd);
      stdin_fd = -1;
    }
  }

  int wait() {
    int status = 0;
    ::waitpid(pid, &status, 0);
    pid = -1;
    return status;
  }
};

// posix_spawn instead of fork/exec: evaluate() may spawn from several worker
// threads at once, and forking a multithreaded process can deadlock in the
// child before exec. Pipes are O_CLOEXEC so concurrently spawned children do
// not inherit each other's pipe ends (a leaked write end would suppress EOF).
ChildProcess spawn(const std::string& command) {
  int to_child[2];
  int from_child[2];
  if (::pipe2(to_child, O_CLOEXEC) != 0 || ::pipe2(from_child, O_CLOEXEC) != 0) {
    throw ProtocolError("failed to create pipes for external model");
  }

  posix_spawn_file_actions_t actions;
  ::posix_spawn_file_actions_init(&actions);
  // dup2 clears CLOEXEC on the child's stdin/stdout copies.
  ::posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
  ::posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);

  const char* argv[] = {"sh", "-c", command.c_str(), nullptr};
  pid_t pid = -1;
  const int rc = ::posix_spawn(&pid, "/bin/sh", &actions, nullptr, const_cast<char**>(argv),
                               environ);
  ::posix_spawn_file_actions_destroy(&actions);
  ::close(to_child[0]);
  ::close(from_child[1]);
  if (rc != 0) {
    ::close(to_child[1]);
    ::close(from_child[0]);
    throw ProtocolError("failed to spawn external model process");
  }

  ChildProcess child;
  child.pid = pid;
  child.stdin_fd = to_child[1];
  child.stdout_fd = from_child[0];
  ::fcntl(child.stdin_fd, F_SETFL, O_NONBLOCK);
  ::fcntl(child.stdout_fd, F_SETFL, O_NONBLOCK);
  return child;
}

}  // namespace

ExternalModel::ExternalModel(ExternalModelOptions options) : options_(std::move(options)) {
  if (options_.command.empty()) throw ParameterError("external model command is empty");
  if (options_.workers < 1) throw ParameterError("external model worker count must be >= 1");
  // Broken-pipe writes must surface as EPIPE, not kill the process.
  std::signal(SIGPIPE, SIG_IGN);
}

Vector ExternalModel::evaluate_slice(const Matrix& xs, Index begin, Index end) const {
  const std::string request = format_requests(xs, begin, end);
  ChildProcess child = spawn(options_.command);

  std::string response;
  std::size_t written = 0;
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration<double>(std::max(0.0, options_.timeout_seconds));

  while (true) {
    pollfd fds[2];
    nfds_t n_fds = 0;
    int stdout_slot = -1, stdin_slot = -1;
    if (child.stdout_fd >= 0) {
      stdout_slot = static_cast<int>(n_fds);
      fds[n_fds++] = {child.stdout_fd, POLLIN, 0};
    }
    if (child.stdin_fd >= 0 && written < request.size()) {
      stdin_slot = static_cast<int>(n_fds);
      fds[n_fds++] = {child.stdin_fd, POLLOUT, 0};
    }
    if (n_fds == 0) break;

    int timeout_ms = -1;
    if (options_.timeout_seconds > 0) {
      const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      timeout_ms = static_cast<int>(std::max<long long>(0, remaining.count()));
    }
    const int ready = ::poll(fds, n_fds, timeout_ms);
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError("poll on external model pipes failed");
    }
    if (ready == 0) {
      std::ostringstream os;
      os << "external model timed out after " << options_.timeout_seconds
         << " s (points " << begin << ".." << end - 1 << ")";
      throw ProtocolError(os.str());
    }

    if (stdin_slot >= 0 && (fds[stdin_slot].revents & (POLLOUT | POLLERR))) {
      const ssize_t n = ::write(child.stdin_fd, request.data() + written, request.size() - written);
      if (n > 0) {
        written += static_cast<std::size_t>(n);
        if (written == request.size()) child.close_stdin();
      } else if (n < 0 && errno != EAGAIN && errno != EINTR) {
        child.close_stdin();  // child stopped reading; its exit status decides
      }
    }
    if (stdout_slot >= 0 && (fds[stdout_slot].revents & (POLLIN | POLLHUP))) {
      char buf[65536];
      const ssize_t n = ::read(child.stdout_fd, buf, sizeof(buf));
      if (n > 0) {
        response.append(buf, static_cast<std::size_t>(n));
      } else if (n == 0) {
        ::close(child.stdout_fd);
        child.stdout_fd = -1;
      } else if (errno != EAGAIN && errno != EINTR) {
        throw ProtocolError("read from external model failed");
      }
    }
  }

  const int status = child.wait();
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    std::ostringstream os;
    os << "external model '" << options_.command << "' ";
    if (WIFSIGNALED(status)) {
      os << "was killed by signal " << WTERMSIG(status);
    } else {
      os << "exited with status " << WEXITSTATUS(status);
    }
    os << " (points " << begin << ".." << end - 1 << ")";
    throw ProtocolError(os.str());
  }

  const Index expected = end - begin;
  Vector out(expected);
  Index parsed = 0;
  std::size_t pos = 0;
  while (pos < response.size() && parsed < expected) {
    std::size_t eol = response.find('\n', pos);
    if (eol == std::string::npos) eol = response.size();
    std::size_t a = pos;
    std::size_t b = eol;
    while (a < b && std::isspace(static_cast<unsigned char>(response[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(response[b - 1]))) --b;
    if (a < b) {
      Scalar value = 0;
      const auto res = std::from_chars(response.data() + a, response.data() + b, value);
      if (res.ec != std::errc{} || res.ptr != response.data() + b) {
        std::ostringstream os;
        os << "malformed external model output line for point " << begin + parsed << ": '"
           << response.substr(a, b - a) << "'";
        throw ProtocolError(os.str());
      }
      out[parsed++] = value;
    }
    pos = eol + 1;
  }
  if (parsed < expected) {
    std::ostringstream os;
    os << "external model returned " << parsed << " of " << expected
       << " outputs; missing point indices " << begin + parsed << ".." << end - 1;
    throw ProtocolError(os.str());
  }
  return out;
}

Vector ExternalModel::evaluate(const Matrix& xs) const {
  const Index n_rows = xs.rows();
  Vector out = Vector::Zero(n_rows);
  if (n_rows == 0) return out;

  const Index workers = std::max<Index>(1, std::min(options_.workers, n_rows));
  if (workers == 1) {
    out = evaluate_slice(xs, 0, n_rows);
    return out;
  }

  std::vector<std::thread> pool;
  std::mutex error_mutex;
  std::string first_error;
  Index first_error_begin = -1;
  const Index chunk = (n_rows + workers - 1) / workers;
  for (Index w = 0; w < workers; ++w) {
    const Index begin = w * chunk;
    const Index end = std::min(n_rows, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        const Vector slice = evaluate_slice(xs, begin, end);
        out.segment(begin, end - begin) = slice;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error_begin < 0 || begin < first_error_begin) {
          first_error_begin = begin;
          first_error = e.what();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error_begin >= 0) throw ProtocolError(first_error);
  return out;
}

}  // namespace qpem
