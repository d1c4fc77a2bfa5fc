#include "dgl/budget.hpp"

namespace dgl {

BudgetLedger::BudgetLedger(double budget_dollars, long max_calls)
    : budget_(budget_dollars), max_calls_(max_calls) {}

bool BudgetLedger::try_reserve(double estimate) {
  std::lock_guard lock(mutex_);
  bool denied = latched_ || committed_total_ + inflight_ >= budget_ ||
                (max_calls_ >= 0 && calls_ + inflight_calls_ >= max_calls_);
  if (denied) {
    journal_.push_back({Event::Kind::ReserveDenied, estimate});
    return false;
  }
  inflight_ += estimate;
  ++inflight_calls_;
  journal_.push_back({Event::Kind::Reserve, estimate});
  return true;
}

void BudgetLedger::commit(double estimate, double actual) {
  std::lock_guard lock(mutex_);
  inflight_ -= estimate;
  --inflight_calls_;
  committed_total_ += actual;
  ++calls_;
  journal_.push_back({Event::Kind::Commit, actual});
}

void BudgetLedger::release(double estimate) {
  std::lock_guard lock(mutex_);
  inflight_ -= estimate;
  --inflight_calls_;
  journal_.push_back({Event::Kind::Release, estimate});
}

void BudgetLedger::latch_success() {
  std::lock_guard lock(mutex_);
  if (!latched_) {
    latched_ = true;
    journal_.push_back({Event::Kind::Latch, 0.0});
  }
}

bool BudgetLedger::success_latched() const {
  std::lock_guard lock(mutex_);
  return latched_;
}

double BudgetLedger::committed() const {
  std::lock_guard lock(mutex_);
  return committed_total_;
}

long BudgetLedger::committed_calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

std::vector<BudgetLedger::Event> BudgetLedger::journal() const {
  std::lock_guard lock(mutex_);
  return journal_;
}

bool BudgetLedger::no_reservation_after_latch() const {
  std::lock_guard lock(mutex_);
  bool latched_seen = false;
  for (const auto& e : journal_) {
    if (e.kind == Event::Kind::Latch) latched_seen = true;
    if (latched_seen && e.kind == Event::Kind::Reserve) return false;
  }
  return true;
}

}  // namespace dgl
