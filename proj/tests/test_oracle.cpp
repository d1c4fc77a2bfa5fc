#include "doctest.h"

#include <filesystem>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "dgl/oracle.hpp"
#include "dgl/runio.hpp"
#include "test_paths.hpp"

using namespace dgl;

namespace {

const PromptLibrary& library() {
  static PromptLibrary lib = PromptLibrary::load(std::string(DGL_SOURCE_DIR) + "/assets");
  return lib;
}

std::string temp_file(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "dgl_oracle_test";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace

TEST_CASE("prompt library loads all eight templates") {
  const PromptLibrary& lib = library();
  CHECK(lib.get(TemplateId::AnalyzeGame).few_shot.size() == 2);
  CHECK(lib.get(TemplateId::GetTactic).few_shot.size() == 4);
  CHECK(lib.get(TemplateId::Summarize).few_shot.empty());
  CHECK(lib.get(TemplateId::NextAction).user.find("{{options}}") != std::string::npos);
}

TEST_CASE("rendered analyze prompt embeds the game text") {
  auto messages = render_prompt(library().get(TemplateId::AnalyzeGame),
                                {{"game", "<{x := 1;}> x >= 1"}});
  REQUIRE(messages.size() == 4);  // system, few-shot pair, user
  CHECK(messages[0].role == "system");
  CHECK(messages[3].role == "user");
  CHECK(messages[3].content.find("Game to analyze:\n<{x := 1;}> x >= 1") != std::string::npos);
}

TEST_CASE("next_action prompt embeds the options list") {
  auto messages = render_prompt(
      library().get(TemplateId::NextAction),
      {{"subgame", "subgame_p: {x' = 1}^@"},
       {"game", "the game"},
       {"analysis", "a"},
       {"strategy", "s"},
       {"log", "l"},
       {"options", "['try-proof', 'backtrack-to:p', 'backtrack-to:c']"}});
  CHECK(messages.back().content.find("['try-proof', 'backtrack-to:p', 'backtrack-to:c']") !=
        std::string::npos);
}

TEST_CASE("missing slot is an error") {
  CHECK_THROWS_AS(render_prompt(library().get(TemplateId::AnalyzeGame), {}),
                  std::invalid_argument);
}

TEST_CASE("non-ASCII slot content is rejected") {
  CHECK_THROWS_AS(render_prompt(library().get(TemplateId::AnalyzeGame),
                                {{"game", "x \xcf\x86 y"}}),
                  std::domain_error);
}

TEST_CASE("get_tactic renders with and without a history block") {
  auto first = render_prompt(library().get(TemplateId::GetTactic),
                             {{"formula", "x >= 0"}, {"history_block", ""}});
  CHECK(first.back().content.find("you have been trying") == std::string::npos);
  std::string block =
      "\nThis is what you have been trying so far and the results.\n"
      "Pay careful attention to not repeat past mistakes and make\n"
      "progress based on what you have learned.\n\n<summary>\n";
  auto later = render_prompt(library().get(TemplateId::GetTactic),
                             {{"formula", "x >= 0"}, {"history_block", block}});
  CHECK(later.back().content.find("Pay careful attention to not repeat past mistakes") !=
        std::string::npos);
}

TEST_CASE("context digest is stable and slot-sensitive") {
  SlotMap slots{{"formula", "x >= 0"}, {"history_block", ""}};
  CHECK(context_digest(TemplateId::GetTactic, slots) ==
        context_digest(TemplateId::GetTactic, slots));
  SlotMap other{{"formula", "x >= 1"}, {"history_block", ""}};
  CHECK(context_digest(TemplateId::GetTactic, slots) !=
        context_digest(TemplateId::GetTactic, other));
  CHECK(context_digest(TemplateId::GetTactic, slots) !=
        context_digest(TemplateId::Summarize, slots));
}

TEST_CASE("scripted oracle commits cost to the ledger") {
  BudgetLedger ledger(1.0);
  auto backend = make_scripted_backend(
      [](TemplateId, const std::vector<Message>&, int) { return std::string(400, 'a'); });
  PriceTable prices;
  prices.per_prompt_token = 0.0;
  prices.per_completion_token = 0.001;  // 400/4 tokens * 0.001 = $0.1
  prices.call_estimate = 0.1;
  Oracle oracle(&library(), std::move(backend), prices, &ledger);
  OracleExchange e = oracle.ask(TemplateId::AnalyzeGame, {{"game", "x := 1;"}});
  CHECK(e.cost == doctest::Approx(0.1));
  CHECK(ledger.committed() == doctest::Approx(0.1));
  CHECK(ledger.committed_calls() == 1);
  CHECK(oracle.total_cost() == doctest::Approx(0.1));
}

TEST_CASE("zero budget denies the call before it is made") {
  BudgetLedger ledger(0.0);
  int calls = 0;
  auto backend = make_scripted_backend(
      [&calls](TemplateId, const std::vector<Message>&, int) { ++calls; return std::string("x"); });
  Oracle oracle(&library(), std::move(backend), PriceTable{}, &ledger);
  CHECK_THROWS_AS(oracle.ask(TemplateId::AnalyzeGame, {{"game", "x := 1;"}}), BudgetExhausted);
  CHECK(calls == 0);
  CHECK(ledger.committed() == 0.0);
}

TEST_CASE("cost monotonicity over a sequence of calls") {
  BudgetLedger ledger(100.0);
  auto backend = make_scripted_backend(
      [](TemplateId, const std::vector<Message>&, int) { return std::string(100, 'b'); });
  PriceTable prices;
  prices.per_completion_token = 0.01;
  Oracle oracle(&library(), std::move(backend), prices, &ledger);
  double prev = 0.0;
  for (int i = 0; i < 5; ++i) {
    oracle.ask(TemplateId::AnalyzeGame, {{"game", "g" + std::to_string(i)}});
    double total = oracle.total_cost();
    CHECK(total >= prev);
    prev = total;
  }
  double sum = 0;
  for (const auto& e : oracle.exchanges()) sum += e.cost;
  CHECK(sum == doctest::Approx(oracle.total_cost()));
  CHECK(ledger.committed() == doctest::Approx(sum));
}

TEST_CASE("record and replay round-trips byte-identically") {
  std::string transcript = temp_file("roundtrip.jsonl");
  std::filesystem::remove(transcript);
  SlotMap slots{{"game", "<{x := 1;}> x >= 1"}};
  {
    TranscriptWriter writer(transcript);
    BudgetLedger ledger(10.0);
    auto backend = make_scripted_backend(
        [](TemplateId, const std::vector<Message>&, int occ) {
          return "analysis #" + std::to_string(occ);
        });
    Oracle oracle(&library(), std::move(backend), PriceTable{0.0001, 0.001, 0.05}, &ledger,
                  &writer);
    oracle.ask(TemplateId::AnalyzeGame, slots);
    oracle.ask(TemplateId::AnalyzeGame, slots);  // same context, occurrence 1
  }
  auto run_replay = [&](const std::string& ledger_path) {
    BudgetLedger ledger(10.0);
    RunLedger run_ledger(ledger_path);
    Oracle oracle(&library(), make_replay_backend(transcript), PriceTable{0.0001, 0.001, 0.05},
                  &ledger);
    OracleExchange a = oracle.ask(TemplateId::AnalyzeGame, slots);
    OracleExchange b = oracle.ask(TemplateId::AnalyzeGame, slots);
    run_ledger.record_exchange(a);
    run_ledger.record_exchange(b);
    return std::pair{a.response, b.response};
  };
  std::string l1 = temp_file("replay1.jsonl"), l2 = temp_file("replay2.jsonl");
  std::filesystem::remove(l1);
  std::filesystem::remove(l2);
  auto [a1, b1] = run_replay(l1);
  auto [a2, b2] = run_replay(l2);
  CHECK(a1 == "analysis #0");
  CHECK(b1 == "analysis #1");
  CHECK(a1 == a2);
  CHECK(b1 == b2);
  std::ifstream f1(l1), f2(l2);
  std::string c1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  std::string c2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(c1 == c2);
  CHECK(!c1.empty());
}

TEST_CASE("replay miss is a hard error") {
  std::string transcript = temp_file("miss.jsonl");
  std::filesystem::remove(transcript);
  {
    TranscriptWriter writer(transcript);
    OracleExchange e;
    e.template_name = "analyze_game";
    e.digest = "0000000000000000";
    e.response = "something";
    writer.append(e);
  }
  BudgetLedger ledger(10.0);
  Oracle oracle(&library(), make_replay_backend(transcript), PriceTable{}, &ledger);
  CHECK_THROWS_AS(oracle.ask(TemplateId::AnalyzeGame, {{"game", "different"}}), ReplayMiss);
  // the failed call released its reservation
  CHECK(ledger.committed() == 0.0);
}

TEST_CASE("live backend over HTTP against a stub server") {
  httplib::Server server;
  server.Post("/v1/chat/completions", [](const httplib::Request& req, httplib::Response& res) {
    auto body = nlohmann::json::parse(req.body);
    REQUIRE(body.contains("messages"));
    nlohmann::json reply = {
        {"choices", {{{"message", {{"role", "assistant"},
                                   {"content", "echo: " +
                                        body["messages"].back()["content"].get<std::string>().substr(0, 16)}}}}}},
        {"usage", {{"prompt_tokens", 42}, {"completion_tokens", 7}}}};
    res.set_content(reply.dump(), "application/json");
  });
  int port = 18731;
  std::thread server_thread([&] { server.listen("127.0.0.1", port); });
  server.wait_until_ready();

  HttpBackendConfig cfg;
  cfg.base_url = "http://127.0.0.1:" + std::to_string(port);
  cfg.model = "test-model";
  cfg.api_key = "k";
  auto backend = make_http_backend(cfg);
  BudgetLedger ledger(10.0);
  PriceTable prices{0.001, 0.002, 0.05};
  Oracle oracle(&library(), std::move(backend), prices, &ledger);
  OracleExchange e = oracle.ask(TemplateId::AnalyzeGame, {{"game", "<{x := 1;}> x >= 1"}});
  CHECK(e.response.rfind("echo: ", 0) == 0);
  CHECK(e.prompt_tokens == 42);
  CHECK(e.completion_tokens == 7);
  CHECK(e.cost == doctest::Approx(42 * 0.001 + 7 * 0.002));

  server.stop();
  server_thread.join();
}

TEST_CASE("extract_code_block picks the last fenced block") {
  ExtractedBlock one = extract_code_block("reasoning\n```\nunfold; auto\n```\n");
  CHECK(one.text == "unfold; auto");
  CHECK_FALSE(one.fallback);

  ExtractedBlock two =
      extract_code_block("first\n```\nA\n```\nmiddle\n```\nB\n```\ntail");
  CHECK(two.text == "B");

  ExtractedBlock fallback = extract_code_block("no fences at all");
  CHECK(fallback.text == "no fences at all");
  CHECK(fallback.fallback);
}

TEST_CASE("parse_next_action accepts the two protocol forms") {
  std::vector<std::string> known{"p", "c"};
  CHECK(std::holds_alternative<TryProof>(parse_next_action("try-proof", known)));
  NextAction a = parse_next_action("  backtrack-to:p\n", known);
  REQUIRE(std::holds_alternative<BacktrackTo>(a));
  CHECK(std::get<BacktrackTo>(a).id == "p");
  CHECK_THROWS_AS(parse_next_action("backtrack-to:zz", known), ProtocolViolation);
  CHECK_THROWS_AS(parse_next_action("give-up", known), ProtocolViolation);
}

TEST_CASE("run ledger aggregates calls and dollars") {
  std::string path = temp_file("agg.jsonl");
  std::filesystem::remove(path);
  RunLedger ledger(path);
  OracleExchange a;
  a.template_name = "get_tactic";
  a.cost = 0.5;
  ledger.record_exchange(a);
  ledger.record_exchange(a);
  auto totals = RunLedger::aggregate(path);
  CHECK(totals.llm_calls == 2);
  CHECK(totals.dollars == doctest::Approx(1.0));
}

TEST_CASE("empty run aggregates to zero") {
  std::string path = temp_file("empty.jsonl");
  std::filesystem::remove(path);
  write_text_file(path, "");
  auto totals = RunLedger::aggregate(path);
  CHECK(totals.llm_calls == 0);
  CHECK(totals.dollars == 0.0);
}

TEST_CASE("concurrent appends from four runs serialize without loss") {
  std::string path = temp_file("stress.jsonl");
  std::filesystem::remove(path);
  RunLedger ledger(path);
  std::vector<std::thread> threads;
  for (int k = 0; k < 4; ++k) {
    threads.emplace_back([&ledger, k] {
      for (int i = 0; i < 50; ++i) {
        OracleExchange e;
        e.template_name = "get_tactic";
        e.digest = std::to_string(k) + "-" + std::to_string(i);
        e.cost = 0.01;
        ledger.record_exchange(e);
      }
    });
  }
  for (auto& t : threads) t.join();
  auto totals = RunLedger::aggregate(path);
  CHECK(totals.llm_calls == 200);
  CHECK(totals.dollars == doctest::Approx(2.0));
}

TEST_CASE("budget ledger journal ordering supports the latch assertion") {
  BudgetLedger ledger(5.0);
  CHECK(ledger.try_reserve(1.0));
  ledger.commit(1.0, 1.0);
  ledger.latch_success();
  CHECK_FALSE(ledger.try_reserve(1.0));  // latched
  CHECK(ledger.no_reservation_after_latch());
}

TEST_CASE("budget cap allows at most one in-flight overshoot") {
  BudgetLedger ledger(1.0);
  CHECK(ledger.try_reserve(0.6));
  ledger.commit(0.6, 0.6);
  CHECK(ledger.try_reserve(0.6));  // 0.6 committed < 1.0, still allowed
  ledger.commit(0.6, 0.6);
  CHECK(ledger.committed() == doctest::Approx(1.2));  // <= budget + one call
  CHECK_FALSE(ledger.try_reserve(0.6));
}

TEST_CASE("call-count cap") {
  BudgetLedger ledger(100.0, 2);
  CHECK(ledger.try_reserve(0.1));
  ledger.commit(0.1, 0.1);
  CHECK(ledger.try_reserve(0.1));
  ledger.commit(0.1, 0.1);
  CHECK_FALSE(ledger.try_reserve(0.1));
}
