#include "dgl/proc.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <mutex>

namespace dgl {

namespace {

void set_nonblocking(int fd) {
  int flags = fcntl(fd, F_GETFL, 0);
  fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

}  // namespace

ProcResult run_process(const std::vector<std::string>& argv, const std::string& stdin_data,
                       double timeout_s) {
  ProcResult result;
  if (argv.empty()) {
    result.spawn_failed = true;
    result.err = "empty command line";
    return result;
  }

  int in_pipe[2], out_pipe[2], err_pipe[2];
  if (pipe(in_pipe) || pipe(out_pipe) || pipe(err_pipe)) {
    result.spawn_failed = true;
    result.err = std::strerror(errno);
    return result;
  }

  auto start = std::chrono::steady_clock::now();
  pid_t pid = fork();
  if (pid < 0) {
    result.spawn_failed = true;
    result.err = std::strerror(errno);
    return result;
  }
  if (pid == 0) {
    dup2(in_pipe[0], 0);
    dup2(out_pipe[1], 1);
    dup2(err_pipe[1], 2);
    close(in_pipe[0]); close(in_pipe[1]);
    close(out_pipe[0]); close(out_pipe[1]);
    close(err_pipe[0]); close(err_pipe[1]);
    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);
    execvp(cargv[0], cargv.data());
    // exec failed; signal it distinctly
    fprintf(stderr, "exec %s failed: %s\n", cargv[0], std::strerror(errno));
    _exit(127);
  }

  close(in_pipe[0]);
  close(out_pipe[1]);
  close(err_pipe[1]);
  set_nonblocking(in_pipe[1]);
  set_nonblocking(out_pipe[0]);
  set_nonblocking(err_pipe[0]);

  // Writing a closed pipe must not kill the parent.
  signal(SIGPIPE, SIG_IGN);

  size_t written = 0;
  bool stdin_open = true;
  if (stdin_data.empty()) {
    close(in_pipe[1]);
    stdin_open = false;
  }
  bool out_open = true, err_open = true;
  auto deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(timeout_s));

  while (out_open || err_open || stdin_open) {
    if (std::chrono::steady_clock::now() >= deadline) {
      result.timed_out = true;
      kill(pid, SIGKILL);
      break;
    }
    struct pollfd fds[3];
    int n = 0;
    int out_idx = -1, err_idx = -1, in_idx = -1;
    if (out_open) { out_idx = n; fds[n++] = {out_pipe[0], POLLIN, 0}; }
    if (err_open) { err_idx = n; fds[n++] = {err_pipe[0], POLLIN, 0}; }
    if (stdin_open) { in_idx = n; fds[n++] = {in_pipe[1], POLLOUT, 0}; }
    int rc = poll(fds, (nfds_t)n, 200);
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }
    char buf[8192];
    if (out_idx >= 0 && (fds[out_idx].revents & (POLLIN | POLLHUP))) {
      ssize_t got = read(out_pipe[0], buf, sizeof buf);
      if (got > 0) result.out.append(buf, (size_t)got);
      else if (got == 0 || (got < 0 && errno != EAGAIN)) { close(out_pipe[0]); out_open = false; }
    }
    if (err_idx >= 0 && (fds[err_idx].revents & (POLLIN | POLLHUP))) {
      ssize_t got = read(err_pipe[0], buf, sizeof buf);
      if (got > 0) result.err.append(buf, (size_t)got);
      else if (got == 0 || (got < 0 && errno != EAGAIN)) { close(err_pipe[0]); err_open = false; }
    }
    if (in_idx >= 0 && (fds[in_idx].revents & (POLLOUT | POLLERR | POLLHUP))) {
      if (fds[in_idx].revents & (POLLERR | POLLHUP)) {
        close(in_pipe[1]);
        stdin_open = false;
      } else {
        ssize_t put = write(in_pipe[1], stdin_data.data() + written, stdin_data.size() - written);
        if (put > 0) {
          written += (size_t)put;
          if (written == stdin_data.size()) { close(in_pipe[1]); stdin_open = false; }
        } else if (put < 0 && errno != EAGAIN) {
          close(in_pipe[1]);
          stdin_open = false;
        }
      }
    }
  }
  if (stdin_open) close(in_pipe[1]);
  if (out_open) close(out_pipe[0]);
  if (err_open) close(err_pipe[0]);

  int status = 0;
  waitpid(pid, &status, 0);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -WTERMSIG(status);
  if (result.exit_code == 127 && result.err.find("exec ") != std::string::npos)
    result.spawn_failed = true;
  result.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

namespace {
std::mutex gate_mutex;
std::condition_variable gate_cv;
int gate_width = 4;
int gate_used = 0;
}  // namespace

void ProcessGate::configure(int width) {
  std::lock_guard lock(gate_mutex);
  gate_width = width > 0 ? width : 1;
  gate_cv.notify_all();
}

void ProcessGate::acquire() {
  std::unique_lock lock(gate_mutex);
  gate_cv.wait(lock, [] { return gate_used < gate_width; });
  ++gate_used;
}

void ProcessGate::release() {
  std::lock_guard lock(gate_mutex);
  --gate_used;
  gate_cv.notify_one();
}

}  // namespace dgl
