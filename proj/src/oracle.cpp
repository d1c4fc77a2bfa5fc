#include "dgl/oracle.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>
#include <tuple>

#include "httplib.h"
#include "json.hpp"

namespace dgl {

using nlohmann::json;

const char* template_name(TemplateId id) {
  switch (id) {
    case TemplateId::AnalyzeGame: return "analyze_game";
    case TemplateId::GetTactic: return "get_tactic";
    case TemplateId::Summarize: return "summarize";
    case TemplateId::PlanControlStrategy: return "plan_control_strategy";
    case TemplateId::GuessLoopInvariant: return "guess_loop_invariant";
    case TemplateId::GuessOdeSubvalue: return "guess_ode_subvalue";
    case TemplateId::GuessAssignSubvalue: return "guess_assign_subvalue";
    case TemplateId::NextAction: return "next_action";
  }
  return "analyze_game";
}

std::optional<TemplateId> template_from_name(const std::string& name) {
  static const TemplateId all[] = {
      TemplateId::AnalyzeGame, TemplateId::GetTactic, TemplateId::Summarize,
      TemplateId::PlanControlStrategy, TemplateId::GuessLoopInvariant,
      TemplateId::GuessOdeSubvalue, TemplateId::GuessAssignSubvalue, TemplateId::NextAction};
  for (TemplateId id : all)
    if (name == template_name(id)) return id;
  return std::nullopt;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string strip_trailing_newline(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

// Section headers are lines of exactly ===NAME=== with NAME in [A-Z_]+;
// anything else (including ===== rows inside prompt bodies) is content.
bool is_section_header(const std::string& line, std::string& name_out) {
  if (line.size() < 7) return false;
  if (line.compare(0, 3, "===") != 0) return false;
  if (line.compare(line.size() - 3, 3, "===") != 0) return false;
  std::string middle = line.substr(3, line.size() - 6);
  if (middle.empty()) return false;
  for (char c : middle)
    if (!((c >= 'A' && c <= 'Z') || c == '_')) return false;
  name_out = middle;
  return true;
}

PromptTemplate parse_template(TemplateId id, const std::string& text) {
  PromptTemplate tpl;
  tpl.id = id;
  std::vector<std::pair<std::string, std::string>> sections;
  std::istringstream lines(text);
  std::string line, current_name, current_body;
  bool in_section = false;
  auto flush = [&]() {
    if (in_section) sections.emplace_back(current_name, strip_trailing_newline(current_body));
  };
  while (std::getline(lines, line)) {
    std::string name;
    if (is_section_header(line, name)) {
      flush();
      current_name = name;
      current_body.clear();
      in_section = true;
    } else if (in_section) {
      current_body += line;
      current_body += '\n';
    } else if (!line.empty()) {
      throw std::runtime_error("template content before first section header");
    }
  }
  flush();
  for (size_t i = 0; i < sections.size(); ++i) {
    const auto& [name, body] = sections[i];
    if (name == "SYSTEM") tpl.system = body;
    else if (name == "FEWSHOT_USER") tpl.few_shot.push_back({"user", body});
    else if (name == "FEWSHOT_ASSISTANT") tpl.few_shot.push_back({"assistant", body});
    else if (name == "USER") tpl.user = body;
    else throw std::runtime_error("unknown template section " + name);
  }
  if (tpl.system.empty() || tpl.user.empty())
    throw std::runtime_error("template missing SYSTEM or USER section");
  return tpl;
}

void assert_ascii(const std::string& s, const char* what) {
  for (unsigned char c : s)
    if (c >= 128)
      throw std::domain_error(std::string("non-ASCII byte in rendered ") + what);
}

std::string now_iso8601() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

PromptLibrary PromptLibrary::load(const std::string& asset_dir) {
  PromptLibrary lib;
  static const TemplateId all[] = {
      TemplateId::AnalyzeGame, TemplateId::GetTactic, TemplateId::Summarize,
      TemplateId::PlanControlStrategy, TemplateId::GuessLoopInvariant,
      TemplateId::GuessOdeSubvalue, TemplateId::GuessAssignSubvalue, TemplateId::NextAction};
  for (TemplateId id : all) {
    std::string path = asset_dir + "/prompts/" + template_name(id) + ".txt";
    lib.templates_[id] = parse_template(id, read_file(path));
  }
  return lib;
}

const PromptTemplate& PromptLibrary::get(TemplateId id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) throw std::runtime_error("template not loaded");
  return it->second;
}

std::vector<Message> render_prompt(const PromptTemplate& tpl, const SlotMap& slots) {
  std::string user = tpl.user;
  size_t pos = 0;
  while ((pos = user.find("{{", pos)) != std::string::npos) {
    size_t end = user.find("}}", pos + 2);
    if (end == std::string::npos) throw std::invalid_argument("unterminated slot");
    std::string name = user.substr(pos + 2, end - pos - 2);
    auto it = slots.find(name);
    if (it == slots.end())
      throw std::invalid_argument("missing slot '" + name + "' for template " +
                                  template_name(tpl.id));
    user.replace(pos, end - pos + 2, it->second);
    pos += it->second.size();
  }
  std::vector<Message> messages;
  messages.push_back({"system", tpl.system});
  for (const auto& shot : tpl.few_shot) messages.push_back(shot);
  messages.push_back({"user", user});
  for (const auto& m : messages) assert_ascii(m.content, template_name(tpl.id));
  return messages;
}

std::string context_digest(TemplateId id, const SlotMap& slots) {
  // FNV-1a over the template name and sorted slot key/value pairs.
  uint64_t h = 1469598103934665603ULL;
  auto feed = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= 0xff;
    h *= 1099511628211ULL;
  };
  feed(template_name(id));
  for (const auto& [k, v] : slots) {
    feed(k);
    feed(v);
  }
  char buf[17];
  snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}

namespace {

class HttpBackend : public OracleBackend {
 public:
  explicit HttpBackend(HttpBackendConfig cfg) : cfg_(std::move(cfg)) {}

  BackendReply complete(const std::vector<Message>& messages, TemplateId, const std::string&,
                        int) override {
    json body;
    body["model"] = cfg_.model;
    body["messages"] = json::array();
    for (const auto& m : messages)
      body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    std::string payload = body.dump();

    double backoff = cfg_.backoff_initial_s;
    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
        backoff *= 2;
      }
      httplib::Client client(cfg_.base_url);
      client.set_read_timeout(600, 0);
      httplib::Headers headers;
      if (!cfg_.api_key.empty())
        headers.emplace("Authorization", "Bearer " + cfg_.api_key);
      auto res = client.Post(cfg_.path, headers, payload, "application/json");
      if (!res) {
        last_error = "transport failure: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status != 200) {
        last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500);
        continue;
      }
      try {
        json reply = json::parse(res->body);
        BackendReply out;
        out.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
        if (reply.contains("usage")) {
          out.prompt_tokens = reply["usage"].value("prompt_tokens", 0L);
          out.completion_tokens = reply["usage"].value("completion_tokens", 0L);
        }
        return out;
      } catch (const json::exception& e) {
        last_error = std::string("malformed response: ") + e.what();
      }
    }
    throw OracleError("oracle call failed after retries: " + last_error);
  }

 private:
  HttpBackendConfig cfg_;
};

class ScriptedBackend : public OracleBackend {
 public:
  explicit ScriptedBackend(ScriptedResponder responder) : responder_(std::move(responder)) {}

  BackendReply complete(const std::vector<Message>& messages, TemplateId id, const std::string&,
                        int occurrence) override {
    BackendReply out;
    out.text = responder_(id, messages, occurrence);
    long chars = 0;
    for (const auto& m : messages) chars += (long)m.content.size();
    out.prompt_tokens = chars / 4;  // deterministic size proxy
    out.completion_tokens = (long)out.text.size() / 4;
    out.timestamp = "1970-01-01T00:00:00Z";
    return out;
  }

 private:
  ScriptedResponder responder_;
};

class ReplayBackend : public OracleBackend {
 public:
  explicit ReplayBackend(const std::string& path) {
    for (auto& e : read_transcript(path))
      table_[{e.template_name, e.digest, e.occurrence}] = e;
  }

  BackendReply complete(const std::vector<Message>&, TemplateId id, const std::string& digest,
                        int occurrence) override {
    auto it = table_.find({template_name(id), digest, occurrence});
    if (it == table_.end())
      throw ReplayMiss(std::string("replay miss: no transcript entry for ") +
                       template_name(id) + "/" + digest + "#" + std::to_string(occurrence));
    BackendReply out;
    out.text = it->second.response;
    out.prompt_tokens = it->second.prompt_tokens;
    out.completion_tokens = it->second.completion_tokens;
    out.timestamp = it->second.timestamp;
    return out;
  }

 private:
  std::map<std::tuple<std::string, std::string, int>, OracleExchange> table_;
};

}  // namespace

std::unique_ptr<OracleBackend> make_http_backend(HttpBackendConfig cfg) {
  return std::make_unique<HttpBackend>(std::move(cfg));
}

std::unique_ptr<OracleBackend> make_scripted_backend(ScriptedResponder responder) {
  return std::make_unique<ScriptedBackend>(std::move(responder));
}

std::unique_ptr<OracleBackend> make_replay_backend(const std::string& transcript_path) {
  return std::make_unique<ReplayBackend>(transcript_path);
}

TranscriptWriter::TranscriptWriter(std::string path) : path_(std::move(path)) {}

void TranscriptWriter::append(const OracleExchange& e) {
  std::lock_guard lock(mutex_);
  json line = {{"template", e.template_name}, {"digest", e.digest},
               {"occurrence", e.occurrence},  {"response", e.response},
               {"prompt_tokens", e.prompt_tokens}, {"completion_tokens", e.completion_tokens},
               {"cost", e.cost},              {"timestamp", e.timestamp}};
  std::ofstream f(path_, std::ios::app);
  if (!f) throw std::runtime_error("cannot append to transcript " + path_);
  f << line.dump() << "\n";
}

std::vector<OracleExchange> read_transcript(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read transcript " + path);
  std::vector<OracleExchange> out;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    OracleExchange e;
    e.template_name = j.at("template").get<std::string>();
    e.digest = j.at("digest").get<std::string>();
    e.occurrence = j.value("occurrence", 0);
    e.response = j.at("response").get<std::string>();
    e.prompt_tokens = j.value("prompt_tokens", 0L);
    e.completion_tokens = j.value("completion_tokens", 0L);
    e.cost = j.value("cost", 0.0);
    e.timestamp = j.value("timestamp", "");
    out.push_back(std::move(e));
  }
  return out;
}

Oracle::Oracle(const PromptLibrary* library, std::shared_ptr<OracleBackend> backend,
               PriceTable prices, BudgetLedger* ledger, TranscriptWriter* recorder)
    : library_(library), backend_(std::move(backend)), prices_(prices), ledger_(ledger),
      recorder_(recorder) {}

OracleExchange Oracle::ask(TemplateId id, const SlotMap& slots) {
  const PromptTemplate& tpl = library_->get(id);
  std::vector<Message> messages = render_prompt(tpl, slots);
  std::string digest = context_digest(id, slots);
  int occurrence = occurrences_[{template_name(id), digest}]++;

  double estimate = prices_.call_estimate;
  if (ledger_ && !ledger_->try_reserve(estimate))
    throw BudgetExhausted("oracle budget exhausted before the call");
  try {
    BackendReply reply = backend_->complete(messages, id, digest, occurrence);
    OracleExchange e;
    e.template_name = template_name(id);
    e.digest = digest;
    e.occurrence = occurrence;
    e.response = reply.text;
    e.prompt_tokens = reply.prompt_tokens;
    e.completion_tokens = reply.completion_tokens;
    e.cost = reply.prompt_tokens * prices_.per_prompt_token +
             reply.completion_tokens * prices_.per_completion_token;
    e.timestamp = reply.timestamp.empty() ? now_iso8601() : reply.timestamp;
    if (ledger_) ledger_->commit(estimate, e.cost);
    if (recorder_) recorder_->append(e);
    exchanges_.push_back(e);
    return e;
  } catch (const BudgetExhausted&) {
    throw;
  } catch (...) {
    if (ledger_) ledger_->release(estimate);
    throw;
  }
}

double Oracle::total_cost() const {
  double total = 0;
  for (const auto& e : exchanges_) total += e.cost;
  return total;
}

ExtractedBlock extract_code_block(const std::string& response) {
  ExtractedBlock out;
  size_t pos = 0;
  std::string last;
  bool found = false;
  while ((pos = response.find("```", pos)) != std::string::npos) {
    size_t open_line_end = response.find('\n', pos + 3);
    if (open_line_end == std::string::npos) break;
    size_t close = response.find("```", open_line_end + 1);
    if (close == std::string::npos) break;
    last = response.substr(open_line_end + 1, close - open_line_end - 1);
    found = true;
    pos = close + 3;
  }
  if (found) {
    while (!last.empty() && (last.back() == '\n' || last.back() == '\r')) last.pop_back();
    out.text = last;
    return out;
  }
  out.text = response;
  out.fallback = true;
  return out;
}

NextAction parse_next_action(const std::string& text,
                             const std::vector<std::string>& known_ids) {
  std::string trimmed;
  {
    size_t begin = text.find_first_not_of(" \t\r\n");
    size_t end = text.find_last_not_of(" \t\r\n");
    if (begin != std::string::npos) trimmed = text.substr(begin, end - begin + 1);
  }
  if (trimmed == "try-proof") return TryProof{};
  const std::string prefix = "backtrack-to:";
  if (trimmed.rfind(prefix, 0) == 0) {
    std::string id = trimmed.substr(prefix.size());
    for (const auto& known : known_ids)
      if (id == known) return BacktrackTo{id};
    throw ProtocolViolation("backtrack to unknown subgame '" + id + "'");
  }
  throw ProtocolViolation("unrecognized next action '" + trimmed + "'");
}

}  // namespace dgl
