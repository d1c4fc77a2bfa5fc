#include "dgl/atp.hpp"

#include <cctype>
#include <chrono>
#include <filesystem>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "dgl/printer.hpp"
#include "dgl/runio.hpp"

namespace dgl {

TacticValidation validate_tactic(const std::string& text) {
  TacticValidation v;
  auto flag = [&v](const std::string& msg) {
    v.ok = false;
    v.violations.push_back(msg);
  };
  for (unsigned char c : text)
    if (c >= 128) {
      flag("tactic contains non-ASCII characters");
      break;
    }

  // Scan outside quoted strings and comments.
  int paren = 0, brace = 0;
  bool in_string = false, in_comment = false;
  char last_code_char = '\0';
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_comment) {
      if (c == '*' && i + 1 < text.size() && text[i + 1] == '/') {
        in_comment = false;
        ++i;
      }
      continue;
    }
    if (in_string) {
      if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') {
      in_string = true;
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
      in_comment = true;
      ++i;
      continue;
    }
    if (c == '(') ++paren;
    if (c == ')') {
      --paren;
      // `<(t1, t2)>` is not valid Bellerophon
      size_t k = i + 1;
      while (k < text.size() && std::isspace((unsigned char)text[k])) ++k;
      if (k < text.size() && text[k] == '>')
        flag("branch combinator must not use a closing angle bracket: `<(...)>`");
    }
    if (c == '{') ++brace;
    if (c == '}') --brace;
    if (c == ';') {
      size_t k = i + 1;
      while (k < text.size()) {
        if (std::isspace((unsigned char)text[k])) { ++k; continue; }
        if (text[k] == '/' && k + 1 < text.size() && text[k + 1] == '*') {
          size_t close = text.find("*/", k + 2);
          if (close == std::string::npos) { k = text.size(); break; }
          k = close + 2;
          continue;
        }
        break;
      }
      if (k >= text.size())
        flag("concluding semicolon after the last tactic (the semicolon is a separator)");
      else if (text[k] == ')' || text[k] == ',')
        flag("semicolon directly before '" + std::string(1, text[k]) +
             "' (the semicolon is a separator, not a terminator)");
    }
    if (!std::isspace((unsigned char)c)) last_code_char = c;
  }
  if (in_string) flag("unbalanced double quotes");
  if (in_comment) flag("unterminated comment");
  if (paren != 0) flag("unbalanced parentheses");
  if (brace != 0) flag("unbalanced braces");
  (void)last_code_char;
  return v;
}

std::string truncate_outcome(const std::string& text, size_t byte_cap) {
  if (text.size() <= byte_cap) return text;
  // Cut at the last completed print block before the cap, if any.
  size_t cut = text.rfind("=====", byte_cap);
  if (cut != std::string::npos && cut > 0) cut += 5;
  else cut = byte_cap;
  return text.substr(0, cut) + "\n[... output truncated ...]";
}

namespace {

struct SetOutcome {
  bool proved = false;
  std::string tactic;
  int winning_run = -1;
  double cost = 0.0;
  long calls = 0;
  bool cancellation_clean = true;
  std::vector<std::string> run_dirs;
};

std::string attempts_block(const std::vector<std::pair<std::string, std::string>>& attempts) {
  std::ostringstream os;
  os << "\nThis is what you have been trying so far and the results.\n"
     << "Pay careful attention to not repeat past mistakes and make\n"
     << "progress based on what you have learned.\n";
  for (const auto& [tactic, outcome] : attempts)
    os << "\nProposed Tactic:\n" << tactic << "\n.\nOutcome: " << outcome << "\n";
  return os.str();
}

std::string summary_block(const std::string& summary) {
  if (summary.empty()) return "";
  return "\nThis is what you have been trying so far and the results.\n"
         "Pay careful attention to not repeat past mistakes and make\n"
         "progress based on what you have learned.\n\n" +
         summary + "\n";
}

void one_run(const FormulaPtr& problem, const AtpConfig& cfg, const AtpToolkit& toolkit,
             int set_index, int run_index, BudgetLedger& ledger, std::mutex& winner_mutex,
             SetOutcome& outcome, const std::string& run_dir) {
  std::string formula_text = print_formula(problem);

  std::unique_ptr<RunLedger> run_ledger;
  std::unique_ptr<TranscriptWriter> recorder;
  if (!run_dir.empty()) {
    run_ledger = std::make_unique<RunLedger>(run_dir + "/ledger.jsonl");
    recorder = std::make_unique<TranscriptWriter>(run_dir + "/transcript.jsonl");
  }
  Oracle oracle(toolkit.library, toolkit.backend, cfg.prices, &ledger, recorder.get());
  int artifact_counter = 0;
  auto persist = [&](const std::string& kind, const OracleExchange& e,
                     const std::vector<Message>& rendered) {
    if (run_dir.empty()) return;
    std::ostringstream name;
    name << std::setw(3) << std::setfill('0') << artifact_counter++ << "_" << kind;
    std::ostringstream prompt;
    for (const auto& m : rendered) prompt << "[" << m.role << "]\n" << m.content << "\n\n";
    write_text_file(run_dir + "/prompts/" + name.str() + ".txt", prompt.str());
    write_text_file(run_dir + "/responses/" + name.str() + ".txt", e.response);
    run_ledger->record_exchange(e);
  };
  auto ask = [&](TemplateId id, const SlotMap& slots) {
    OracleExchange e = oracle.ask(id, slots);
    persist(template_name(id), e, render_prompt(toolkit.library->get(id), slots));
    return e;
  };

  try {
    if (ledger.success_latched()) return;
    std::string analysis = ask(TemplateId::AnalyzeGame, {{"game", formula_text}}).response;

    std::string summary;
    std::vector<std::pair<std::string, std::string>> attempts;
    for (int iteration = 0; iteration < cfg.max_iterations; ++iteration) {
      if (ledger.success_latched()) return;
      std::string history = cfg.full_history
                                ? (attempts.empty() ? "" : attempts_block(attempts))
                                : summary_block(summary);
      OracleExchange proposal =
          ask(TemplateId::GetTactic, {{"formula", formula_text}, {"history_block", history}});
      std::string tactic = extract_code_block(proposal.response).text;
      if (!run_dir.empty())
        write_text_file(run_dir + "/tactics/iter" + std::to_string(iteration) + ".txt", tactic);

      std::string outcome_text;
      TacticValidation validation = validate_tactic(tactic);
      if (!validation.ok) {
        std::ostringstream os;
        os << "Tactic rejected before reaching the prover:";
        for (const auto& v : validation.violations) os << "\n- " << v;
        outcome_text = os.str();
      } else {
        if (ledger.success_latched()) return;
        ProverConfig prover = toolkit.prover;
        if (!run_dir.empty()) prover.work_dir = run_dir + "/prover";
        prover.timeout_s = cfg.prover_timeout_s;
        ProverOutcome result = check_modal(problem, ProverMode::Tactic, tactic, prover,
                                           "iter" + std::to_string(iteration));
        if (result.proved) {
          std::lock_guard lock(winner_mutex);
          ledger.latch_success();
          if (!outcome.proved) {
            outcome.proved = true;
            outcome.tactic = tactic;
            outcome.winning_run = run_index;
            if (!run_dir.empty())
              write_text_file(run_dir + "/tactics/winning.txt", tactic);
          }
          return;
        }
        outcome_text = truncate_outcome(result.raw, cfg.outcome_byte_cap);
      }
      attempts.emplace_back(tactic, outcome_text);

      if (!cfg.full_history) {
        try {
          std::string prior = summary.empty()
                                  ? ""
                                  : "\nThe summary of the proof state before this step:\n" +
                                        summary + "\n";
          summary = ask(TemplateId::Summarize, {{"formula", formula_text},
                                                {"analysis", analysis},
                                                {"prior_summary_block", prior},
                                                {"tactic", tactic},
                                                {"outcome", outcome_text}})
                        .response;
        } catch (const BudgetExhausted&) {
          throw;
        } catch (const std::exception&) {
          // keep the previous summary; the failed step still consumed budget
        }
      }
    }
  } catch (const BudgetExhausted&) {
    // set budget consumed; the run simply ends
  } catch (const ReplayMiss&) {
    throw;
  } catch (const std::exception& e) {
    if (run_ledger) run_ledger->record_event("run_error", {{"what", e.what()}});
  }
  (void)set_index;
}

SetOutcome run_one_set(const FormulaPtr& problem, const AtpConfig& cfg,
                       const AtpToolkit& toolkit, int set_index) {
  SetOutcome outcome;
  BudgetLedger ledger(cfg.per_set_budget, cfg.max_calls_per_set);
  std::mutex winner_mutex;

  std::vector<std::string> run_dirs(cfg.parallel_runs);
  for (int k = 0; k < cfg.parallel_runs; ++k) {
    if (!toolkit.run_base_dir.empty()) {
      RunDirectory dir = RunDirectory::create(toolkit.run_base_dir, toolkit.stamp,
                                              set_index * cfg.parallel_runs + k);
      run_dirs[k] = dir.root;
    }
  }

  if (cfg.parallel_runs == 1) {
    one_run(problem, cfg, toolkit, set_index, 0, ledger, winner_mutex, outcome, run_dirs[0]);
  } else {
    std::vector<std::thread> threads;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (int k = 0; k < cfg.parallel_runs; ++k) {
      threads.emplace_back([&, k] {
        try {
          one_run(problem, cfg, toolkit, set_index, k, ledger, winner_mutex, outcome,
                  run_dirs[k]);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  outcome.cost = ledger.committed();
  outcome.calls = ledger.committed_calls();
  outcome.cancellation_clean = ledger.no_reservation_after_latch();
  outcome.run_dirs = run_dirs;
  return outcome;
}

}  // namespace

AtpResult run_verification(const FormulaPtr& problem, const AtpConfig& cfg,
                           const AtpToolkit& toolkit) {
  // Fail fast before spending oracle budget if the prover is not in place.
  if (toolkit.prover.java_path.empty() || toolkit.prover.jar_path.empty())
    throw ToolUnavailable("prover not configured (java runtime and jar paths required)");
  if (!std::filesystem::exists(toolkit.prover.java_path))
    throw ToolUnavailable("prover runtime not found: " + toolkit.prover.java_path);

  auto start = std::chrono::steady_clock::now();
  AtpResult result;
  for (int set_index = 0; set_index < cfg.sets; ++set_index) {
    SetOutcome outcome = run_one_set(problem, cfg, toolkit, set_index);
    result.total_cost += outcome.cost;
    result.total_calls += outcome.calls;
    result.cancellation_clean = result.cancellation_clean && outcome.cancellation_clean;
    for (const auto& d : outcome.run_dirs)
      if (!d.empty()) result.run_dirs.push_back(d);
    if (outcome.proved) {
      result.proved = true;
      result.tactic = outcome.tactic;
      result.winning_set = set_index;
      result.winning_run = outcome.winning_run;
      break;
    }
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!toolkit.run_base_dir.empty()) {
    nlohmann::json doc = {{"status", result.proved ? "proved" : "exhausted"},
                          {"winning_set", result.winning_set},
                          {"winning_run", result.winning_run},
                          {"llm_calls", result.total_calls},
                          {"dollar_cost", result.total_cost},
                          {"minutes", result.wall_seconds / 60.0}};
    if (result.proved) doc["tactic"] = result.tactic;
    write_text_file(toolkit.run_base_dir + "/" + toolkit.stamp + "/result.json",
                    doc.dump(2) + "\n");
  }
  return result;
}

}  // namespace dgl
