// Command-line front end: parsing and attribution utilities, the symbolic
// precondition pass, single-condition checks, and the two LLM pipelines
// over the bundled case-study corpus.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dgl/atp.hpp"
#include "dgl/checkers.hpp"
#include "dgl/config.hpp"
#include "dgl/corpus.hpp"
#include "dgl/label.hpp"
#include "dgl/oracle.hpp"
#include "dgl/parser.hpp"
#include "dgl/printer.hpp"
#include "dgl/runio.hpp"
#include "dgl/smt.hpp"
#include "dgl/subvalue.hpp"
#include "dgl/synthesis.hpp"

using namespace dgl;

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitUnsolved = 1;
constexpr int kExitUsage = 2;
constexpr int kExitTool = 3;

struct CommonArgs {
  std::string config_path;
  std::string asset_dir;
  std::string model;
  std::string variant = "verify";
  std::string file;
  std::string text;
};

std::string read_file_or_die(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string resolve_input(const CommonArgs& args) {
  if (!args.text.empty()) return args.text;
  if (!args.file.empty()) return read_file_or_die(args.file);
  if (!args.model.empty()) {
    CorpusEntry entry = load_corpus(args.model, args.asset_dir);
    return args.variant == "synth" ? entry.synthesis_text : entry.verification_text;
  }
  throw CLI::ValidationError("one of --model, --file or --text is required");
}

PriceTable prices_from(const RunConfig& cfg) {
  PriceTable prices;
  prices.per_prompt_token = cfg.price_prompt;
  prices.per_completion_token = cfg.price_completion;
  prices.call_estimate = cfg.call_estimate;
  return prices;
}

std::shared_ptr<OracleBackend> backend_from(const RunConfig& cfg) {
  if (cfg.oracle_backend == "replay") return make_replay_backend(cfg.transcript);
  HttpBackendConfig http;
  http.base_url = cfg.oracle_base_url;
  http.model = cfg.oracle_model;
  if (const char* key = std::getenv(cfg.oracle_key_env.c_str())) http.api_key = key;
  if (http.base_url.empty())
    throw std::runtime_error("live oracle selected but oracle_base_url is not configured");
  return make_http_backend(http);
}

ProverConfig prover_from(const RunConfig& cfg) {
  ProverConfig prover;
  prover.java_path = cfg.prover_java;
  prover.jar_path = cfg.prover_jar;
  prover.timeout_s = cfg.prover_timeout;
  return prover;
}

int cmd_parse(const CommonArgs& args, const std::string& kind) {
  std::string text = resolve_input(args);
  if (kind == "game") {
    GamePtr g = parse_game(text);
    std::string printed = print_game(g);
    std::cout << printed << "\n";
    if (!equal(parse_game(printed), g)) {
      std::cerr << "round-trip mismatch\n";
      return kExitTool;
    }
  } else {
    FormulaPtr f = parse_formula(text);
    std::string printed = print_formula(f);
    std::cout << printed << "\n";
    if (!equal(parse_formula(printed), f)) {
      std::cerr << "round-trip mismatch\n";
      return kExitTool;
    }
  }
  return kExitSuccess;
}

int cmd_attribute(const CommonArgs& args) {
  FormulaPtr f = parse_formula(resolve_input(args));
  RootModality root;
  GamePtr game;
  FormulaPtr body = f;
  if (body->kind == FormulaKind::Imply) body = body->right;
  if (body->kind == FormulaKind::Diamond) root = RootModality::Diamond;
  else if (body->kind == FormulaKind::Box) root = RootModality::Box;
  else throw std::runtime_error("input has no top-level modality to attribute");
  game = body->game;
  LabeledGame lg = label_subgames(game);
  PlayerMap pm = attribute_players(lg, root);
  std::cout << print_labeled_game(lg) << "\n\n";
  for (const auto& entry : lg.labels) {
    const char* kind = "";
    switch (entry.kind) {
      case GameKind::Repeat: kind = "loop"; break;
      case GameKind::Ode: kind = "ode"; break;
      case GameKind::AssignAny: kind = "assign-any"; break;
      case GameKind::Choice: kind = "choice"; break;
      case GameKind::Test: kind = "test"; break;
      default: break;
    }
    std::cout << "subgame_" << entry.id << "\t" << kind << "\t"
              << player_name(pm[entry.id]) << "\n";
  }
  return kExitSuccess;
}

int cmd_wp(const CommonArgs& args, const std::string& post_text) {
  GamePtr game = parse_game(resolve_input(args));
  FormulaPtr post = parse_formula(post_text);
  try {
    FormulaPtr pre = symbolic_wp(game, post);
    std::cout << print_formula(pre) << "\n";
    return kExitSuccess;
  } catch (const UnsupportedConstruct& e) {
    std::cerr << "error: " << e.what() << "\n"
              << "the wp command covers the loop-, ODE- and x:=*-free fragment\n";
    return kExitUsage;
  }
}

int cmd_check_vc(const CommonArgs& args, const RunConfig& cfg) {
  FormulaPtr vc = parse_formula(resolve_input(args));
  if (!is_modality_free(vc)) {
    if (cfg.prover_java.empty()) {
      std::cerr << "error: modal condition but no prover configured\n";
      return kExitTool;
    }
    ProverOutcome outcome = check_modal(vc, ProverMode::Auto, "", prover_from(cfg), "vc");
    std::cout << (outcome.proved ? "proved" : "not proved") << " in " << outcome.duration_s
              << "s\n";
    return outcome.proved ? kExitSuccess : kExitUnsolved;
  }
  if (cfg.solver_path.empty()) {
    std::cerr << "error: no SMT solver configured (set solver_path)\n";
    return kExitTool;
  }
  SolverConfig solver{cfg.solver_path, cfg.arith_timeout};
  CheckResult result = check_arith(vc, solver);
  std::cout << check_status_name(result.status);
  if (result.status == CheckStatus::Invalid && result.counterexample) {
    std::cout << " counterexample:";
    for (const auto& [var, value] : *result.counterexample)
      std::cout << " " << var << "=" << rational_to_string(value);
  }
  if (!result.reason.empty()) std::cout << " (" << result.reason << ")";
  std::cout << "\n";
  switch (result.status) {
    case CheckStatus::Valid: return kExitSuccess;
    case CheckStatus::Invalid:
    case CheckStatus::Unknown: return kExitUnsolved;
    case CheckStatus::Error: return kExitTool;
  }
  return kExitTool;
}

int cmd_corpus(const std::string& action, const std::string& id, const std::string& variant,
               const std::string& asset_dir) {
  if (action == "list") {
    for (const auto& k : corpus_ids()) std::cout << k << "\n";
    return kExitSuccess;
  }
  CorpusEntry entry = load_corpus(id, asset_dir);
  if (variant == "synth") std::cout << entry.synthesis_text << "\n";
  else if (variant == "guideline") std::cout << entry.guideline << "\n";
  else {
    std::cout << entry.verification_text << "\n\n";
    std::cout << "synthesis variant:\n" << entry.synthesis_text << "\n\n";
    std::cout << "guideline: " << entry.guideline << "\n";
  }
  return kExitSuccess;
}

int cmd_verify(const CommonArgs& args, RunConfig cfg) {
  cfg.validate();
  FormulaPtr problem = parse_formula(resolve_input(args));
  AtpConfig atp;
  atp.parallel_runs = cfg.parallel_runs;
  atp.sets = cfg.sets;
  atp.per_set_budget = cfg.per_set_budget;
  atp.max_iterations = cfg.max_iterations;
  atp.full_history = cfg.full_history;
  atp.prices = prices_from(cfg);
  atp.prover_timeout_s = cfg.prover_timeout;
  if (cfg.oracle_backend == "replay") {
    // deterministic replay is a single sequential run
    atp.parallel_runs = 1;
    atp.sets = 1;
  }
  static PromptLibrary library = PromptLibrary::load(
      args.asset_dir.empty() ? default_asset_dir() : args.asset_dir);
  AtpToolkit toolkit;
  toolkit.library = &library;
  toolkit.backend = backend_from(cfg);
  toolkit.prover = prover_from(cfg);
  toolkit.run_base_dir = cfg.out_dir;
  toolkit.stamp = utc_stamp();
  AtpResult result = run_verification(problem, atp, toolkit);
  std::cout << (result.proved ? "proved" : "exhausted") << "  calls=" << result.total_calls
            << " dollars=" << result.total_cost << " minutes=" << result.wall_seconds / 60.0
            << "\n";
  if (result.proved) {
    std::cout << "winning run: set " << result.winning_set << ", run " << result.winning_run
              << "\n";
    std::cout << "runs under: " << cfg.out_dir << "/" << toolkit.stamp << "\n";
  }
  return result.proved ? kExitSuccess : kExitUnsolved;
}

int cmd_synthesize(const CommonArgs& args, RunConfig cfg, const std::string& guideline_flag) {
  cfg.validate();
  if (cfg.prover_java.empty() && cfg.solver_path.empty())
    throw std::runtime_error("synthesis needs at least an SMT solver configured");
  CorpusEntry entry;
  std::string guideline = guideline_flag;
  FormulaPtr problem;
  if (!args.model.empty()) {
    entry = load_corpus(args.model, args.asset_dir);
    problem = entry.synthesis();
    if (guideline.empty()) guideline = entry.guideline;
  } else {
    problem = parse_formula(resolve_input(args));
  }
  SynthConfig synth;
  synth.parallel_runs = cfg.oracle_backend == "replay" ? 1 : cfg.parallel_runs;
  synth.total_budget = cfg.total_budget;
  synth.recovery = cfg.recovery == "dfs" ? RecoveryMode::DfsFallback : RecoveryMode::LlmGuided;
  synth.dfs_branching = cfg.dfs_branching;
  synth.guideline = guideline;
  synth.prices = prices_from(cfg);
  synth.arith_timeout_s = cfg.arith_timeout;
  synth.prover_timeout_s = cfg.prover_timeout;
  synth.pass.dri_order = cfg.dri_order;
  static PromptLibrary library = PromptLibrary::load(
      args.asset_dir.empty() ? default_asset_dir() : args.asset_dir);
  SynthToolkit toolkit;
  toolkit.library = &library;
  toolkit.backend = backend_from(cfg);
  toolkit.solver = SolverConfig{cfg.solver_path, cfg.arith_timeout};
  toolkit.prover = prover_from(cfg);
  toolkit.run_base_dir = cfg.out_dir;
  toolkit.stamp = utc_stamp();
  SynthResult result = run_synthesis(problem, synth, toolkit);
  std::cout << (result.solved ? "solved" : "exhausted") << "  calls=" << result.total_calls
            << " dollars=" << result.total_cost << " minutes=" << result.wall_seconds / 60.0
            << "\n";
  if (result.solved) {
    std::cout << "\n" << subvalue_report(result.map) << "\n" << result.policy_text;
    std::cout << "runs under: " << cfg.out_dir << "/" << toolkit.stamp << "\n";
  }
  return result.solved ? kExitSuccess : kExitUnsolved;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dGL verification and synthesis toolkit"};
  app.require_subcommand(1);

  CommonArgs args;
  app.add_option("--config", args.config_path, "flat key=value configuration file");
  app.add_option("--asset-dir", args.asset_dir, "prompt/corpus asset directory");

  auto add_input = [&args](CLI::App* cmd) {
    cmd->add_option("--model", args.model, "corpus model id");
    cmd->add_option("--variant", args.variant, "verify|synth")
        ->check(CLI::IsMember({"verify", "synth"}));
    cmd->add_option("--file", args.file, "read the input from a file");
    cmd->add_option("--text", args.text, "inline input text");
  };

  std::string parse_kind = "formula";
  CLI::App* parse_cmd = app.add_subcommand("parse", "parse and round-trip print");
  add_input(parse_cmd);
  parse_cmd->add_option("--kind", parse_kind, "formula|game")
      ->check(CLI::IsMember({"formula", "game"}));

  CLI::App* attribute_cmd =
      app.add_subcommand("attribute", "label subgames and report the player map");
  add_input(attribute_cmd);

  std::string wp_post;
  CLI::App* wp_cmd =
      app.add_subcommand("wp", "symbolic precondition on the decidable fragment");
  add_input(wp_cmd);
  wp_cmd->add_option("--post", wp_post, "postcondition formula")->required();

  CLI::App* check_cmd = app.add_subcommand("check-vc", "discharge one condition");
  add_input(check_cmd);

  CLI::App* verify_cmd = app.add_subcommand("verify", "run the proving pipeline");
  add_input(verify_cmd);
  std::string oracle_flag, transcript_flag, out_flag;
  verify_cmd->add_option("--oracle", oracle_flag, "live|replay");
  verify_cmd->add_option("--transcript", transcript_flag, "replay transcript path");
  verify_cmd->add_option("--out", out_flag, "run output directory");

  std::string guideline_flag;
  CLI::App* synth_cmd = app.add_subcommand("synthesize", "run the synthesis pipeline");
  add_input(synth_cmd);
  synth_cmd->add_option("--oracle", oracle_flag, "live|replay");
  synth_cmd->add_option("--transcript", transcript_flag, "replay transcript path");
  synth_cmd->add_option("--out", out_flag, "run output directory");
  synth_cmd->add_option("--guideline", guideline_flag, "informal solution description");
  std::string recovery_flag;
  synth_cmd->add_option("--recovery", recovery_flag, "llm|dfs")
      ->check(CLI::IsMember({"llm", "dfs"}));

  std::string corpus_action = "list", corpus_id, corpus_variant = "all";
  CLI::App* corpus_cmd = app.add_subcommand("corpus", "list or show the case studies");
  corpus_cmd->add_option("action", corpus_action, "list|show");
  corpus_cmd->add_option("id", corpus_id, "model id for show");
  corpus_cmd->add_option("--variant", corpus_variant, "verify|synth|guideline|all");

  CLI::App* replay_cmd = app.add_subcommand("replay", "re-run a pipeline from a transcript");
  add_input(replay_cmd);
  std::string replay_mode = "verify";
  replay_cmd->add_option("--mode", replay_mode, "verify|synthesize")
      ->check(CLI::IsMember({"verify", "synthesize"}));
  replay_cmd->add_option("--transcript", transcript_flag, "transcript path")->required();
  replay_cmd->add_option("--out", out_flag, "run output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitSuccess : kExitUsage;
  }

  try {
    RunConfig cfg = load_config(args.config_path);
    if (!oracle_flag.empty()) cfg.oracle_backend = oracle_flag;
    if (!transcript_flag.empty()) cfg.transcript = transcript_flag;
    if (!out_flag.empty()) cfg.out_dir = out_flag;
    if (!recovery_flag.empty()) cfg.recovery = recovery_flag;

    if (parse_cmd->parsed()) return cmd_parse(args, parse_kind);
    if (attribute_cmd->parsed()) return cmd_attribute(args);
    if (wp_cmd->parsed()) return cmd_wp(args, wp_post);
    if (check_cmd->parsed()) return cmd_check_vc(args, cfg);
    if (corpus_cmd->parsed())
      return cmd_corpus(corpus_action, corpus_id, corpus_variant,
                        args.asset_dir.empty() ? default_asset_dir() : args.asset_dir);
    if (verify_cmd->parsed()) return cmd_verify(args, cfg);
    if (synth_cmd->parsed()) return cmd_synthesize(args, cfg, guideline_flag);
    if (replay_cmd->parsed()) {
      cfg.oracle_backend = "replay";
      if (replay_mode == "verify") return cmd_verify(args, cfg);
      if (args.variant.empty()) args.variant = "synth";
      return cmd_synthesize(args, cfg, guideline_flag);
    }
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ToolUnavailable& e) {
    std::cerr << "tool error: " << e.what() << "\n";
    return kExitTool;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTool;
  }
}
