#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dgl/budget.hpp"

namespace dgl {

struct Message {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

enum class TemplateId {
  AnalyzeGame,
  GetTactic,
  Summarize,
  PlanControlStrategy,
  GuessLoopInvariant,
  GuessOdeSubvalue,
  GuessAssignSubvalue,
  NextAction,
};

const char* template_name(TemplateId id);
std::optional<TemplateId> template_from_name(const std::string& name);

struct PromptTemplate {
  TemplateId id;
  std::string system;
  std::vector<Message> few_shot;  // alternating user/assistant turns
  std::string user;               // {{slot}} placeholders
};

class PromptLibrary {
 public:
  // Loads <asset_dir>/prompts/<name>.txt for every template id.
  static PromptLibrary load(const std::string& asset_dir);
  const PromptTemplate& get(TemplateId id) const;

 private:
  std::map<TemplateId, PromptTemplate> templates_;
};

using SlotMap = std::map<std::string, std::string>;

// system + few-shot + user with every {{slot}} filled; throws
// std::invalid_argument on a missing slot and std::domain_error if any
// rendered message contains a non-ASCII byte.
std::vector<Message> render_prompt(const PromptTemplate& tpl, const SlotMap& slots);

// Stable 64-bit digest over the template id and the semantic slot values.
std::string context_digest(TemplateId id, const SlotMap& slots);

struct OracleExchange {
  std::string template_name;
  std::string digest;
  int occurrence = 0;
  std::string response;
  long prompt_tokens = 0;
  long completion_tokens = 0;
  double cost = 0.0;
  std::string timestamp;
  bool replayed = false;
};

struct PriceTable {
  double per_prompt_token = 0.0;      // dollars
  double per_completion_token = 0.0;  // dollars
  double call_estimate = 0.05;        // reservation size
};

struct BackendReply {
  std::string text;
  long prompt_tokens = 0;
  long completion_tokens = 0;
  std::string timestamp;  // empty means "now"
};

struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ReplayMiss : OracleError {
  using OracleError::OracleError;
};

class OracleBackend {
 public:
  virtual ~OracleBackend() = default;
  virtual BackendReply complete(const std::vector<Message>& messages, TemplateId id,
                                const std::string& digest, int occurrence) = 0;
};

// HTTP chat-completion backend (messages array in, choices out).
struct HttpBackendConfig {
  std::string base_url;          // e.g. http://host:port
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string api_key;           // resolved from the configured env var
  int max_retries = 2;           // on transport failure, exponential backoff
  double backoff_initial_s = 0.5;
};
std::unique_ptr<OracleBackend> make_http_backend(HttpBackendConfig cfg);

// Deterministic scripted backend for tests and fixture recording.
using ScriptedResponder = std::function<std::string(TemplateId, const std::vector<Message>&, int occurrence)>;
std::unique_ptr<OracleBackend> make_scripted_backend(ScriptedResponder responder);

// Replay backend over a recorded transcript; lookups are exact-match on
// (template, digest, occurrence) and a miss is a hard error.
std::unique_ptr<OracleBackend> make_replay_backend(const std::string& transcript_path);

// Append-only JSON-lines transcript writer.
class TranscriptWriter {
 public:
  explicit TranscriptWriter(std::string path);
  void append(const OracleExchange& exchange);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::mutex mutex_;
};

std::vector<OracleExchange> read_transcript(const std::string& path);

// Per-run front end: renders prompts, enforces the budget contract
// (reserve, call, commit; release on failure) and records exchanges.
class Oracle {
 public:
  Oracle(const PromptLibrary* library, std::shared_ptr<OracleBackend> backend,
         PriceTable prices, BudgetLedger* ledger, TranscriptWriter* recorder = nullptr);

  OracleExchange ask(TemplateId id, const SlotMap& slots);
  const std::vector<OracleExchange>& exchanges() const { return exchanges_; }
  double total_cost() const;

 private:
  const PromptLibrary* library_;
  std::shared_ptr<OracleBackend> backend_;
  PriceTable prices_;
  BudgetLedger* ledger_;
  TranscriptWriter* recorder_;
  std::map<std::pair<std::string, std::string>, int> occurrences_;
  std::vector<OracleExchange> exchanges_;
};

// Content of the last fenced code block; falls back to the whole response
// (with the flag set) when there is no fence.
struct ExtractedBlock {
  std::string text;
  bool fallback = false;
};
ExtractedBlock extract_code_block(const std::string& response);

struct TryProof {};
struct BacktrackTo {
  std::string id;
};
using NextAction = std::variant<TryProof, BacktrackTo>;

struct ProtocolViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Strict `try-proof` / `backtrack-to:<known id>` parse of an extracted block.
NextAction parse_next_action(const std::string& text, const std::vector<std::string>& known_ids);

}  // namespace dgl
