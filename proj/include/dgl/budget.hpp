#pragma once

#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace dgl {

struct BudgetExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shared dollar budget with reserve-then-commit semantics and a first-success
// latch. A reservation is granted while neither the committed-plus-inflight
// total has reached the budget nor a sibling has latched success; the commit
// records the realized cost, which may exceed the estimate by at most one
// call. All transitions are journaled for the budget-safety assertions.
class BudgetLedger {
 public:
  explicit BudgetLedger(double budget_dollars, long max_calls = -1);

  struct Event {
    enum class Kind { Reserve, ReserveDenied, Commit, Release, Latch };
    Kind kind;
    double amount = 0.0;
  };

  // Returns false (and journals the denial) when the budget or call cap is
  // exhausted or success was latched.
  bool try_reserve(double estimate);
  void commit(double estimate, double actual);
  void release(double estimate);

  void latch_success();
  bool success_latched() const;

  double budget() const { return budget_; }
  double committed() const;
  long committed_calls() const;
  std::vector<Event> journal() const;

  // True iff no reservation was granted after the success latch was set.
  bool no_reservation_after_latch() const;

 private:
  double budget_;
  long max_calls_;
  mutable std::mutex mutex_;
  double committed_total_ = 0.0;
  double inflight_ = 0.0;
  long calls_ = 0;
  long inflight_calls_ = 0;
  bool latched_ = false;
  std::vector<Event> journal_;
};

}  // namespace dgl
