#include "dgl/checkers.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "dgl/printer.hpp"
#include "dgl/proc.hpp"
#include "dgl/smt.hpp"
#include "dgl/vars.hpp"

namespace dgl {

const char* check_status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Valid: return "valid";
    case CheckStatus::Invalid: return "invalid";
    case CheckStatus::Unknown: return "unknown";
    case CheckStatus::Error: return "error";
  }
  return "error";
}

CheckResult check_arith(const FormulaPtr& vc, const SolverConfig& cfg) {
  CheckResult result;
  result.tool = "smt";
  std::string script = formula_to_smt(vc);
  if (cfg.solver_path.empty()) {
    result.status = CheckStatus::Error;
    result.reason = "no SMT solver configured";
    return result;
  }
  ProcResult proc;
  {
    ProcessGate::Slot slot;
    proc = run_process({cfg.solver_path}, script, cfg.timeout_s);
  }
  result.wall_time = proc.wall_time;
  result.raw_output = proc.out;
  if (proc.timed_out) {
    result.status = CheckStatus::Unknown;
    result.reason = "timeout";
    return result;
  }
  if (proc.spawn_failed) {
    result.status = CheckStatus::Error;
    result.reason = "solver launch failed: " + proc.err;
    return result;
  }
  std::istringstream lines(proc.out);
  std::string verdict;
  while (std::getline(lines, verdict)) {
    if (verdict == "sat" || verdict == "unsat" || verdict == "unknown") break;
    verdict.clear();
  }
  if (verdict == "unsat") {
    result.status = CheckStatus::Valid;
    return result;
  }
  if (verdict == "sat") {
    result.status = CheckStatus::Invalid;
    auto model = parse_smt_model(proc.out);
    if (model) {
      // Attach only models that demonstrably falsify the formula.
      try {
        std::map<std::string, Rational> env = *model;
        for (const auto& v : free_vars(vc)) env.emplace(v, Rational(0));
        if (!eval_formula_exact(vc, env)) result.counterexample = env;
      } catch (const std::exception&) {
        // quantified or division-degenerate formula; leave the model off
      }
    }
    return result;
  }
  if (verdict == "unknown") {
    result.status = CheckStatus::Unknown;
    result.reason = "solver returned unknown";
    return result;
  }
  result.status = CheckStatus::Error;
  result.reason = "unrecognized solver output";
  if (!proc.err.empty()) result.reason += ": " + proc.err.substr(0, 500);
  return result;
}

std::string render_problem_file(const FormulaPtr& conjecture, const std::string& name) {
  std::set<std::string> program_vars;
  // Variables written anywhere in the formula's games change over time.
  std::function<void(const FormulaPtr&)> scan = [&](const FormulaPtr& f) {
    switch (f->kind) {
      case FormulaKind::Diamond:
      case FormulaKind::Box: {
        auto bv = bound_vars(f->game);
        program_vars.insert(bv.begin(), bv.end());
        scan(f->left);
        return;
      }
      case FormulaKind::True:
      case FormulaKind::False:
      case FormulaKind::Cmp:
        return;
      case FormulaKind::Not:
      case FormulaKind::Forall:
      case FormulaKind::Exists:
        scan(f->left);
        return;
      default:
        scan(f->left);
        scan(f->right);
        return;
    }
  };
  scan(conjecture);

  std::ostringstream os;
  os << "ArchiveEntry \"" << name << "\"\n\n";
  std::set<std::string> constants;
  for (const auto& v : free_vars(conjecture))
    if (!program_vars.count(v)) constants.insert(v);
  if (!constants.empty()) {
    os << "Definitions\n";
    for (const auto& v : constants) os << "  Real " << v << ";\n";
    os << "End.\n\n";
  }
  if (!program_vars.empty()) {
    os << "ProgramVariables\n";
    for (const auto& v : program_vars) os << "  Real " << v << ";\n";
    os << "End.\n\n";
  }
  os << "Problem\n  " << print_formula(conjecture) << "\nEnd.\n\nEnd.\n";
  return os.str();
}

ProverOutcome parse_prover_output(const std::string& text) {
  ProverOutcome out;
  out.raw = text;

  // Print blocks: "===== <label> ==== <body> =====".
  size_t pos = 0;
  while ((pos = text.find("===== ", pos)) != std::string::npos) {
    size_t label_end = text.find(" ====", pos + 6);
    if (label_end == std::string::npos) break;
    std::string label = text.substr(pos + 6, label_end - pos - 6);
    size_t body_start = label_end + 5;
    size_t body_end = text.find("=====", body_start);
    std::string body = body_end == std::string::npos
                           ? text.substr(body_start)
                           : text.substr(body_start, body_end - body_start);
    out.printed_states.emplace_back(label, body);
    pos = body_end == std::string::npos ? text.size() : body_end + 5;
  }

  bool failed_marker = false;
  bool proved_marker = false;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    size_t done_at = line.find(" done (");
    if (done_at != std::string::npos && line.find("=====") == std::string::npos) {
      size_t start = line.rfind(' ', done_at == 0 ? 0 : done_at - 1);
      out.tactic_progress.push_back(line.substr(start == std::string::npos ? 0 : start + 1));
    }
    if (line.rfind("Done", 0) == 0 || line.find(" Done ") != std::string::npos ||
        line.rfind("Done ", 0) == 0) {
      if (line.find("(failed)") != std::string::npos) failed_marker = true;
      if (line.find("(proved") != std::string::npos) proved_marker = true;
    }
    if (line.rfind("FAILED", 0) == 0) failed_marker = true;
    if (line.rfind("PROVED", 0) == 0) proved_marker = true;
    if (line.rfind("Proved ", 0) == 0) proved_marker = true;
    size_t dur = line.find("duration=");
    if (dur != std::string::npos) {
      size_t end = line.find("[ms]", dur);
      if (end != std::string::npos) {
        try {
          out.duration_s = std::stod(line.substr(dur + 9, end - dur - 9)) / 1000.0;
        } catch (const std::exception&) {
        }
      }
    }
  }
  out.proved = proved_marker && !failed_marker;
  if (text.empty()) {
    out.tool_error = true;
    out.failure_trace = "empty prover output";
  } else if (!out.proved) {
    out.failure_trace = text;
  }
  return out;
}

ProverOutcome check_modal(const FormulaPtr& conjecture, ProverMode mode,
                          const std::string& tactic, const ProverConfig& cfg,
                          const std::string& problem_name) {
  ProverOutcome out;
  if (cfg.java_path.empty() || cfg.jar_path.empty()) {
    out.tool_error = true;
    out.failure_trace = "prover not configured";
    return out;
  }
  namespace fs = std::filesystem;
  fs::path dir = cfg.work_dir.empty() ? fs::temp_directory_path() : fs::path(cfg.work_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  fs::path problem = dir / (problem_name + ".kyx");
  {
    std::ofstream f(problem);
    f << render_problem_file(conjecture, problem_name);
  }
  std::string tactic_text = mode == ProverMode::Auto ? "auto" : tactic;
  std::vector<std::string> argv = {
      cfg.java_path, "-Xss20M", "-da", "-jar", cfg.jar_path,
      "-launch", "-prove", problem.string(), "-tactic", tactic_text,
      "-verbose", "-timeout", std::to_string((long)cfg.timeout_s)};
  ProcResult proc;
  {
    ProcessGate::Slot slot;
    proc = run_process(argv, "", cfg.timeout_s + 30.0);
  }
  std::string merged = proc.out;
  if (!proc.err.empty()) merged += "\n" + proc.err;
  if (!cfg.work_dir.empty()) {
    std::ofstream t(dir / (problem_name + ".out.txt"));
    t << merged;
  }
  if (proc.spawn_failed) {
    out.tool_error = true;
    out.failure_trace = "prover launch failed: " + proc.err;
    out.raw = merged;
    return out;
  }
  out = parse_prover_output(merged);
  if (proc.timed_out) {
    out.proved = false;
    out.tool_error = false;
    if (out.failure_trace.empty()) out.failure_trace = "prover timeout";
  }
  out.duration_s = out.duration_s > 0 ? out.duration_s : proc.wall_time;
  return out;
}

}  // namespace dgl
