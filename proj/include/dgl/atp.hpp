#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dgl/ast.hpp"
#include "dgl/checkers.hpp"
#include "dgl/oracle.hpp"

namespace dgl {

struct AtpConfig {
  int parallel_runs = 4;
  double per_set_budget = 12.0;  // dollars per set of parallel runs
  int sets = 2;
  long max_calls_per_set = -1;   // optional oracle-call cap (sub-budget runs)
  int max_iterations = 20;       // divergence guard per run
  bool full_history = false;     // ablation: verbatim attempts, no summaries
  size_t outcome_byte_cap = 32 * 1024;
  PriceTable prices;
  double prover_timeout_s = 300.0;
};

struct TacticValidation {
  bool ok = true;
  std::vector<std::string> violations;
};

// ASCII-only, no concluding semicolon, balanced quotes/braces/parens and no
// closing angle bracket after a branch combinator.
TacticValidation validate_tactic(const std::string& text);

// Keeps whole print blocks when cutting prover output down to the byte cap.
std::string truncate_outcome(const std::string& text, size_t byte_cap);

struct AtpToolkit {
  const PromptLibrary* library = nullptr;
  std::shared_ptr<OracleBackend> backend;
  ProverConfig prover;
  std::string run_base_dir;  // empty disables persistence
  std::string stamp;
};

struct AtpResult {
  bool proved = false;
  std::string tactic;
  int winning_set = -1;
  int winning_run = -1;
  double total_cost = 0.0;
  long total_calls = 0;
  double wall_seconds = 0.0;
  std::vector<std::string> run_dirs;
  bool cancellation_clean = true;  // no reservation after the success latch
};

struct ToolUnavailable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fig.-1 pipeline: analyze once per run, then propose-tactic / run-prover /
// summarize until proved or the set budget runs out; sets run in sequence,
// runs within a set in parallel over a shared ledger with first-success
// cancellation.
AtpResult run_verification(const FormulaPtr& problem, const AtpConfig& cfg,
                           const AtpToolkit& toolkit);

}  // namespace dgl
