#include "dgl/synthesis.hpp"

#include <chrono>
#include <iomanip>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "dgl/parser.hpp"
#include "dgl/printer.hpp"
#include "dgl/runio.hpp"
#include "dgl/smt.hpp"

namespace dgl {

namespace {

struct RunExhausted {};

std::string vc_key(const Vc& vc) {
  return vc.origin + "|" + std::to_string((int)vc.purpose) + "|" + vc.note + "|" +
         std::to_string(vc.guess_round) + "|" + print_formula(vc.formula);
}

class SynthesisRun {
 public:
  SynthesisRun(const FormulaPtr& problem, const SynthConfig& cfg, const SynthToolkit& toolkit,
               int run_index, BudgetLedger& ledger, std::mutex& winner_mutex,
               SynthResult& shared_result, const std::string& run_dir)
      : cfg_(cfg), toolkit_(toolkit), run_index_(run_index), ledger_(ledger),
        winner_mutex_(winner_mutex), shared_result_(shared_result), run_dir_(run_dir),
        oracle_(toolkit.library, toolkit.backend, cfg.prices, &ledger,
                run_dir.empty() ? nullptr : (recorder_ = std::make_unique<TranscriptWriter>(
                                                 run_dir + "/transcript.jsonl"),
                                             recorder_.get())) {
    if (problem->kind != FormulaKind::Diamond)
      throw UnsupportedConstruct(
          "synthesis expects the App.-D diamond encoding with a leading Demon test");
    post_ = problem->left;
    lg_ = label_subgames(problem->game);
    players_ = attribute_players(lg_, RootModality::Diamond);
    labeled_text_ = print_labeled_game(lg_);
    if (!run_dir_.empty())
      run_ledger_ = std::make_unique<RunLedger>(run_dir_ + "/ledger.jsonl");
  }

  void execute() {
    try {
      if (ledger_.success_latched()) return;
      analysis_ = ask(TemplateId::AnalyzeGame, {{"game", labeled_text_}}).response;
      strategy_ = ask(TemplateId::PlanControlStrategy,
                      {{"game", labeled_text_},
                       {"post", print_formula(post_)},
                       {"analysis", analysis_},
                       {"guideline", cfg_.guideline.empty()
                                         ? std::string("(no guideline was provided)")
                                         : cfg_.guideline}})
                      .response;
      log_.push_back("Starting precondition computation.");

      PassState pass = PassState::start_pass(lg_, players_, post_, RootModality::Diamond,
                                             cfg_.pass);
      PassState::Status status = pass.step_symbolic();
      int guesses_made = 0;
      for (;;) {
        if (ledger_.success_latched()) return;
        bool just_guessed = false;
        if (status == PassState::Status::NeedsGuess) {
          if (++guesses_made > cfg_.max_guesses) throw RunExhausted{};
          status = attach_pending_guess(pass);
          just_guessed = true;
        }
        const Vc* failing = check_new_vcs(pass);
        if (failing) {
          log_.push_back(
              "Check succeeded: False.\nFeedback: The formula check failed, indicating it "
              "is wrong, or too complex for the current level of automation. Please revise "
              "your guess or try a more detailed proof tactic.");
          status = resolve_failure(pass, *failing, status);
          continue;
        }
        settle_checked(pass);
        if (just_guessed) {
          log_.push_back("Check succeeded: True.");
          guess_audit_.back().accepted = true;
        }
        if (status == PassState::Status::Complete) {
          finish(pass);
          return;
        }
      }
    } catch (const BudgetExhausted&) {
    } catch (const RunExhausted&) {
    } catch (const ReplayMiss&) {
      flush_trail();
      throw;
    } catch (const UnsupportedConstruct& e) {
      note_event("unsupported_construct", e.what());
    } catch (const std::exception& e) {
      note_event("run_error", e.what());
    }
    flush_trail();
  }

 private:
  OracleExchange ask(TemplateId id, const SlotMap& slots) {
    OracleExchange e = oracle_.ask(id, slots);
    if (!run_dir_.empty()) {
      std::ostringstream name;
      name << std::setw(3) << std::setfill('0') << artifact_counter_++ << "_"
           << template_name(id);
      std::ostringstream prompt;
      for (const auto& m : render_prompt(toolkit_.library->get(id), slots))
        prompt << "[" << m.role << "]\n" << m.content << "\n\n";
      write_text_file(run_dir_ + "/prompts/" + name.str() + ".txt", prompt.str());
      write_text_file(run_dir_ + "/responses/" + name.str() + ".txt", e.response);
      run_ledger_->record_exchange(e);
    }
    return e;
  }

  void note_event(const std::string& kind, const std::string& what) {
    if (run_ledger_) run_ledger_->record_event(kind, {{"what", what}});
  }

  // Exhausted runs still surface their attempt trail; the richest one wins,
  // a solved run's trail always takes precedence.
  void flush_trail() {
    std::lock_guard lock(winner_mutex_);
    if (shared_result_.solved) return;
    if (guess_audit_.size() >= shared_result_.guesses.size()) {
      shared_result_.audit = audit_;
      shared_result_.guesses = guess_audit_;
    }
  }

  std::string joined_log() const {
    std::ostringstream os;
    for (const auto& line : log_) os << line << "\n";
    return os.str();
  }

  // Ask the oracle for the pending guess; parse errors get one re-ask.
  FormulaPtr ask_guess(const GuessRequest& req) {
    TemplateId id = req.kind == GameKind::Repeat      ? TemplateId::GuessLoopInvariant
                    : req.kind == GameKind::Ode       ? TemplateId::GuessOdeSubvalue
                                                      : TemplateId::GuessAssignSubvalue;
    SlotMap slots{{"post", print_formula(req.successor_post)},
                  {"game", labeled_text_},
                  {"analysis", analysis_},
                  {"strategy", strategy_},
                  {"history", joined_log()}};
    if (req.kind == GameKind::Repeat) slots["body"] = req.loop_body_text;
    else slots["subgame"] = "subgame_" + req.subgame + ": " + req.subgame_text;
    for (int attempt = 0; attempt < 2; ++attempt) {
      std::string text = extract_code_block(ask(id, slots).response).text;
      try {
        return parse_formula(text);
      } catch (const ParseError& e) {
        log_.push_back("The proposed formula did not parse: " + std::string(e.what()));
      }
    }
    throw RunExhausted{};
  }

  CheckResult check_vc(const Vc& vc) {
    CheckResult result;
    if (vc.kind == VcKind::Arithmetic) {
      SolverConfig solver = toolkit_.solver;
      solver.timeout_s = cfg_.arith_timeout_s;
      result = check_arith(vc.formula, solver);
    } else {
      // Existing, LLM-free automation first.
      result.tool = "prover";
      if (toolkit_.prover.java_path.empty()) {
        result.status = CheckStatus::Error;
        result.reason = "prover not configured";
      } else {
        ProverConfig prover = toolkit_.prover;
        prover.timeout_s = cfg_.prover_timeout_s;
        if (!run_dir_.empty()) prover.work_dir = run_dir_ + "/prover";
        ProverOutcome outcome =
            check_modal(vc.formula, ProverMode::Auto, "", prover,
                        "vc" + std::to_string(audit_.size()));
        result.status = outcome.proved ? CheckStatus::Valid
                        : outcome.tool_error ? CheckStatus::Error
                                             : CheckStatus::Invalid;
        result.wall_time = outcome.duration_s;
        if (!outcome.proved) result.reason = "prover did not close the goal";
      }
    }
    VcAudit audit;
    audit.origin = vc.origin;
    audit.purpose = vc.purpose;
    audit.guess_round = vc.guess_round;
    audit.note = vc.note;
    audit.formula_text = print_formula(vc.formula);
    audit.kind = vc.kind;
    audit.status = result.status;
    audit.tool = vc.kind == VcKind::Arithmetic ? "smt" : "prover";
    audit.wall_time = result.wall_time;
    audit_.push_back(audit);
    audited_[vc_key(vc)] = result.status;
    return result;
  }

  // Returns the first failing VC in discovery order. Conditions already
  // audited keep their cached verdict, so re-proposing an identical guess
  // fails again without another solver call.
  const Vc* check_new_vcs(PassState& pass) {
    for (const auto& vc : pass.vcs()) {
      auto it = audited_.find(vc_key(vc));
      CheckStatus status;
      if (it != audited_.end()) {
        status = it->second;
      } else {
        status = check_vc(vc).status;
      }
      if (status != CheckStatus::Valid) {
        failing_vc_ = vc;
        return &failing_vc_;
      }
    }
    return nullptr;
  }

  // Marks every guess whose VCs have all been audited valid.
  void settle_checked(PassState& pass) {
    std::map<SubgameId, bool> verdicts;
    for (const auto& id : pass.guessed_ids_reverse_chronological()) {
      bool any = false, all_valid = true;
      for (const auto& a : audit_) {
        if (a.origin != id || a.guess_round != pass.guess_round(id)) continue;
        any = true;
        if (a.status != CheckStatus::Valid) all_valid = false;
      }
      if (any) verdicts[id] = all_valid;
    }
    for (const auto& [id, ok] : verdicts) pass.mark_checked(id, ok);
  }

  PassState::Status attach_pending_guess(PassState& pass) {
    GuessRequest req = pass.pending();
    FormulaPtr guess = ask_guess(req);
    attempts_[req.subgame] += 1;
    guess_audit_.push_back(
        GuessAudit{req.subgame, attempts_[req.subgame], print_formula(guess), false});

    if (req.kind == GameKind::Repeat) {
      log_.push_back("Proposed the following loop invariant for loop " + req.subgame_text +
                     ".\n" + print_formula(guess));
      log_.push_back("Attempting to check invariant by precondition computation on loop body.");
    } else {
      log_.push_back("Proposed precondition for subgame " + req.subgame_text +
                     " and postcondition " + print_formula(req.successor_post) +
                     ".\nPrecondition or invariant: " + print_formula(guess) + ".");
    }
    return pass.attach_guess(req.subgame, guess);
  }

  // App.-B ablation policy: depth-first with a maximum branching factor,
  // retrying the failing node before moving to the previous guess.
  SubgameId choose_dfs_target(PassState& pass, const SubgameId& failed_id) {
    if (attempts_[failed_id] < cfg_.dfs_branching) return failed_id;
    for (const auto& id : pass.guessed_ids_reverse_chronological()) {
      if (id == failed_id) continue;
      if (attempts_[id] < cfg_.dfs_branching) return id;
    }
    throw RunExhausted{};
  }

  // Attempt counters of guesses made after `target` reset: their subtrees are
  // re-derived from scratch once the new guess for `target` lands.
  void drop_audits_after(PassState& pass, const SubgameId& target) {
    for (const auto& id : pass.guessed_ids_reverse_chronological()) {
      if (id == target) break;
      attempts_.erase(id);
    }
  }

  NextAction choose_llm_action(PassState& pass, const Vc& failing) {
    std::vector<SubgameId> guessed = pass.guessed_ids_reverse_chronological();
    std::ostringstream options;
    options << "['try-proof'";
    for (const auto& id : guessed) options << ", 'backtrack-to:" << id << "'";
    options << "]";

    const LabelEntry* entry = lg_.find(failing.origin);
    std::string subgame_text = "subgame_" + failing.origin + ": " +
                               (entry ? print_game(materialize_player_view(
                                            std::make_shared<const Game>(*entry->node),
                                            entry->dual_depth))
                                      : std::string("(unknown)"));
    for (int attempt = 0; attempt < 2; ++attempt) {
      std::string text = extract_code_block(ask(TemplateId::NextAction,
                                                {{"subgame", subgame_text},
                                                 {"game", labeled_text_},
                                                 {"analysis", analysis_},
                                                 {"strategy", strategy_},
                                                 {"log", joined_log()},
                                                 {"options", options.str()}})
                                                .response)
                             .text;
      try {
        return parse_next_action(text, guessed);
      } catch (const ProtocolViolation& e) {
        log_.push_back(std::string("Protocol violation: ") + e.what());
      }
    }
    // Repeated protocol violations: plain retry of the current guess.
    return BacktrackTo{failing.origin};
  }

  bool attempt_try_proof(const Vc& failing) {
    log_.push_back("Trying to prove the failing condition with a detailed tactic.");
    double reservation = cfg_.try_proof_budget;
    bool proved = false;
    if (!toolkit_.prover.java_path.empty() && ledger_.try_reserve(reservation)) {
      AtpConfig sub;
      sub.parallel_runs = 1;
      sub.sets = 1;
      sub.per_set_budget = cfg_.try_proof_budget;
      sub.max_calls_per_set = cfg_.try_proof_max_calls;
      sub.max_iterations = 5;
      sub.prices = cfg_.prices;
      sub.prover_timeout_s = cfg_.prover_timeout_s;
      AtpToolkit sub_toolkit;
      sub_toolkit.library = toolkit_.library;
      sub_toolkit.backend = toolkit_.backend;
      sub_toolkit.prover = toolkit_.prover;
      if (!run_dir_.empty()) sub_toolkit.prover.work_dir = run_dir_ + "/prover";
      try {
        AtpResult sub_result = run_verification(failing.formula, sub, sub_toolkit);
        ledger_.commit(reservation, sub_result.total_cost);
        proved = sub_result.proved;
      } catch (const std::exception&) {
        ledger_.release(reservation);
      }
    }
    if (!proved) {
      log_.push_back("Detailed proof did not close the condition.");
      return false;
    }
    log_.push_back("Detailed proof succeeded; accepting the guess.");
    for (auto it = audit_.rbegin(); it != audit_.rend(); ++it) {
      if (it->origin == failing.origin && it->guess_round == failing.guess_round &&
          it->note == failing.note && it->formula_text == print_formula(failing.formula)) {
        it->status = CheckStatus::Valid;
        it->tool = "prover";
        break;
      }
    }
    audited_[vc_key(failing)] = CheckStatus::Valid;
    return true;
  }

  // Decide and apply recovery until the pass moves again; iterative so that a
  // stubborn try-proof choice cannot grow the stack.
  PassState::Status resolve_failure(PassState& pass, Vc failing, PassState::Status status) {
    for (;;) {
      if (ledger_.success_latched()) throw RunExhausted{};
      pass.mark_checked(failing.origin, false);

      bool want_try_proof = false;
      SubgameId target;
      if (cfg_.recovery == RecoveryMode::DfsFallback) {
        target = choose_dfs_target(pass, failing.origin);
      } else {
        NextAction action = choose_llm_action(pass, failing);
        if (std::holds_alternative<TryProof>(action)) {
          if (tried_proof_.count(vc_key(failing))) {
            // A second try-proof on the same condition degrades to a retry.
            target = failing.origin;
          } else {
            want_try_proof = true;
          }
        } else {
          target = std::get<BacktrackTo>(action).id;
        }
      }

      if (want_try_proof) {
        tried_proof_.insert(vc_key(failing));
        if (attempt_try_proof(failing)) {
          const Vc* next = check_new_vcs(pass);
          if (!next) {
            settle_checked(pass);
            log_.push_back("Check succeeded: True.");
            if (!guess_audit_.empty()) guess_audit_.back().accepted = true;
            return status;
          }
          failing = *next;
        }
        continue;
      }

      log_.push_back("Backtracking to subgame_" + target + ".");
      drop_audits_after(pass, target);
      return pass.backtrack_to(target);
    }
  }

  void finish(PassState& pass) {
    settle_checked(pass);
    for (const auto& e : pass.map().entries)
      if (e.provenance == Provenance::Guessed || e.provenance == Provenance::CheckedFailed)
        if (pass.guess_for(e.subgame).has_value()) return;  // not fully checked

    std::lock_guard lock(winner_mutex_);
    ledger_.latch_success();
    if (shared_result_.solved) return;
    shared_result_.solved = true;
    shared_result_.map = pass.map();
    shared_result_.precondition = pass.map().precondition;
    shared_result_.policy_text = render_policy(pass.map(), lg_, pass.policy_rules());
    shared_result_.audit = audit_;
    shared_result_.guesses = guess_audit_;
    shared_result_.winning_run = run_index_;
    if (!run_dir_.empty()) {
      write_text_file(run_dir_ + "/subvalue_report.md", subvalue_report(pass.map()));
      write_text_file(run_dir_ + "/subvalue_map.tsv", subvalue_machine(pass.map()));
      write_text_file(run_dir_ + "/policy.txt", shared_result_.policy_text);
      nlohmann::json audit_doc = nlohmann::json::array();
      for (const auto& a : audit_)
        audit_doc.push_back({{"origin", a.origin},
                             {"purpose", vc_purpose_name(a.purpose)},
                             {"round", a.guess_round},
                             {"note", a.note},
                             {"formula", a.formula_text},
                             {"kind", a.kind == VcKind::Arithmetic ? "arithmetic" : "modal"},
                             {"tool", a.tool},
                             {"status", check_status_name(a.status)},
                             {"seconds", a.wall_time}});
      write_text_file(run_dir_ + "/vc_audit.json", audit_doc.dump(2) + "\n");
    }
  }

  const SynthConfig& cfg_;
  const SynthToolkit& toolkit_;
  int run_index_;
  BudgetLedger& ledger_;
  std::mutex& winner_mutex_;
  SynthResult& shared_result_;
  std::string run_dir_;
  std::unique_ptr<TranscriptWriter> recorder_;
  std::unique_ptr<RunLedger> run_ledger_;
  Oracle oracle_;

  FormulaPtr post_;
  LabeledGame lg_;
  PlayerMap players_;
  std::string labeled_text_;
  std::string analysis_, strategy_;
  std::vector<std::string> log_;
  std::vector<VcAudit> audit_;
  std::map<std::string, CheckStatus> audited_;
  std::set<std::string> tried_proof_;
  std::vector<GuessAudit> guess_audit_;
  std::map<SubgameId, int> attempts_;
  Vc failing_vc_;
  int artifact_counter_ = 0;
};

}  // namespace

SynthResult run_synthesis(const FormulaPtr& problem, const SynthConfig& cfg,
                          const SynthToolkit& toolkit) {
  auto start = std::chrono::steady_clock::now();
  SynthResult result;
  BudgetLedger ledger(cfg.total_budget);
  std::mutex winner_mutex;

  std::vector<std::string> run_dirs(cfg.parallel_runs);
  for (int k = 0; k < cfg.parallel_runs; ++k)
    if (!toolkit.run_base_dir.empty())
      run_dirs[k] = RunDirectory::create(toolkit.run_base_dir, toolkit.stamp, k).root;

  auto drive = [&](int k) {
    SynthesisRun run(problem, cfg, toolkit, k, ledger, winner_mutex, result, run_dirs[k]);
    run.execute();
  };

  if (cfg.parallel_runs == 1) {
    drive(0);
  } else {
    std::vector<std::thread> threads;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (int k = 0; k < cfg.parallel_runs; ++k) {
      threads.emplace_back([&, k] {
        try {
          drive(k);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  result.total_cost = ledger.committed();
  result.total_calls = ledger.committed_calls();
  result.cancellation_clean = ledger.no_reservation_after_latch();
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const auto& d : run_dirs)
    if (!d.empty()) result.run_dirs.push_back(d);

  if (!toolkit.run_base_dir.empty()) {
    nlohmann::json doc = {{"status", result.solved ? "solved" : "exhausted"},
                          {"winning_run", result.winning_run},
                          {"llm_calls", result.total_calls},
                          {"dollar_cost", result.total_cost},
                          {"minutes", result.wall_seconds / 60.0}};
    if (result.solved) doc["precondition"] = print_formula(result.precondition);
    write_text_file(toolkit.run_base_dir + "/" + toolkit.stamp + "/result.json",
                    doc.dump(2) + "\n");
  }
  return result;
}

}  // namespace dgl
