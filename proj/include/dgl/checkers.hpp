#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dgl/ast.hpp"

namespace dgl {

enum class CheckStatus { Valid, Invalid, Unknown, Error };

struct CheckResult {
  CheckStatus status = CheckStatus::Error;
  std::optional<std::map<std::string, Rational>> counterexample;  // Invalid only
  std::string reason;       // Unknown/Error diagnostics
  double wall_time = 0.0;
  std::string tool;         // "smt" or "prover"
  std::string raw_output;
};

struct SolverConfig {
  std::string solver_path;   // SMT-LIB v2 over stdin/stdout
  double timeout_s = 30.0;
};

// Discharges a modality-free formula through the configured solver.
// unsat -> Valid, sat -> Invalid (model extracted and verified by exact
// evaluation before it is attached), unknown/timeout -> Unknown.
CheckResult check_arith(const FormulaPtr& vc, const SolverConfig& cfg);

struct ProverConfig {
  std::string java_path;     // runtime that launches the prover
  std::string jar_path;
  double timeout_s = 300.0;
  std::string work_dir;      // where problem files and transcripts are kept
};

struct ProverOutcome {
  bool proved = false;
  bool tool_error = false;   // launch failure / unparseable output
  std::vector<std::pair<std::string, std::string>> printed_states;
  std::vector<std::string> tactic_progress;  // "auto done (proved, 16ms)" lines
  std::string failure_trace;                 // empty when proved
  std::string raw;
  double duration_s = 0.0;
};

enum class ProverMode { Auto, Tactic };

// Writes the problem file, launches the prover CLI and parses its output.
ProverOutcome check_modal(const FormulaPtr& conjecture, ProverMode mode,
                          const std::string& tactic, const ProverConfig& cfg,
                          const std::string& problem_name = "vc");

// Best-effort, total parse of prover stdout/stderr.
ProverOutcome parse_prover_output(const std::string& text);

// KeYmaera-style archive file holding the printed conjecture.
std::string render_problem_file(const FormulaPtr& conjecture, const std::string& name);

const char* check_status_name(CheckStatus s);

}  // namespace dgl
