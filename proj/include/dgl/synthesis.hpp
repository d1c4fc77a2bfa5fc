#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dgl/atp.hpp"
#include "dgl/checkers.hpp"
#include "dgl/oracle.hpp"
#include "dgl/subvalue.hpp"

namespace dgl {

enum class RecoveryMode { LlmGuided, DfsFallback };

struct SynthConfig {
  int parallel_runs = 4;
  double total_budget = 10.0;
  RecoveryMode recovery = RecoveryMode::LlmGuided;
  int dfs_branching = 3;
  std::string guideline;  // informal description of the desired solution
  PassConfig pass;
  PriceTable prices;
  double arith_timeout_s = 30.0;
  double prover_timeout_s = 300.0;
  double try_proof_budget = 1.0;   // dollars for one try-proof excursion
  long try_proof_max_calls = 10;   // whichever cap bites first
  int max_guesses = 40;            // divergence guard per run
};

struct VcAudit {
  SubgameId origin;
  VcPurpose purpose = VcPurpose::GuessJustification;
  int guess_round = 0;
  std::string note;
  std::string formula_text;
  VcKind kind = VcKind::Arithmetic;
  CheckStatus status = CheckStatus::Error;
  std::string tool;
  double wall_time = 0.0;
};

struct GuessAudit {
  SubgameId subgame;
  int attempt = 0;  // 1-based within the current search frame
  std::string formula_text;
  bool accepted = false;
};

struct SynthToolkit {
  const PromptLibrary* library = nullptr;
  std::shared_ptr<OracleBackend> backend;
  SolverConfig solver;
  ProverConfig prover;  // optional; modal checks fail gracefully without it
  std::string run_base_dir;
  std::string stamp;
};

struct SynthResult {
  bool solved = false;
  SubvalueMap map;
  std::string policy_text;
  FormulaPtr precondition;
  std::vector<VcAudit> audit;
  std::vector<GuessAudit> guesses;
  double total_cost = 0.0;
  long total_calls = 0;
  double wall_seconds = 0.0;
  int winning_run = -1;
  bool cancellation_clean = true;
  std::vector<std::string> run_dirs;
};

// Fig.-4 pipeline: analyze and plan once per run, then drive the backward
// pass; every guess is checked immediately (loops retrospectively), failures
// go through the configured recovery. Parallel runs share one budget ledger
// with first-success cancellation.
SynthResult run_synthesis(const FormulaPtr& problem, const SynthConfig& cfg,
                          const SynthToolkit& toolkit);

}  // namespace dgl
