#pragma once

#include <string>
#include <vector>

namespace dgl {

struct ProcResult {
  int exit_code = -1;
  bool timed_out = false;
  bool spawn_failed = false;
  std::string out;     // stdout
  std::string err;     // stderr
  double wall_time = 0.0;
};

// Runs argv[0] with the given arguments (no shell), feeding stdin_data and
// capturing stdout/stderr. Kills the process after timeout_s seconds.
ProcResult run_process(const std::vector<std::string>& argv, const std::string& stdin_data,
                       double timeout_s);

// Caps the number of concurrently running external checker processes.
// Default width matches the parallel-run count (4).
class ProcessGate {
 public:
  static void configure(int width);
  static void acquire();
  static void release();

  struct Slot {
    Slot() { acquire(); }
    ~Slot() { release(); }
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;
  };
};

}  // namespace dgl
