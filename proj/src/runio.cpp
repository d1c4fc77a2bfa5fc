#include "dgl/runio.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace dgl {

using nlohmann::json;

RunLedger::RunLedger(std::string path) : path_(std::move(path)) {}

void RunLedger::record_exchange(const OracleExchange& e) {
  std::lock_guard lock(mutex_);
  json line = {{"type", "exchange"},
               {"template", e.template_name},
               {"digest", e.digest},
               {"occurrence", e.occurrence},
               {"prompt_tokens", e.prompt_tokens},
               {"completion_tokens", e.completion_tokens},
               {"cost", e.cost},
               {"timestamp", e.timestamp}};
  std::ofstream f(path_, std::ios::app);
  f << line.dump() << "\n";
}

void RunLedger::record_event(const std::string& kind,
                             const std::map<std::string, std::string>& fields) {
  std::lock_guard lock(mutex_);
  json line = {{"type", kind}};
  for (const auto& [k, v] : fields) line[k] = v;
  std::ofstream f(path_, std::ios::app);
  f << line.dump() << "\n";
}

RunLedger::Totals RunLedger::aggregate(const std::string& path) {
  Totals totals;
  std::ifstream f(path);
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;
    if (j.value("type", "") == "exchange") {
      ++totals.llm_calls;
      totals.dollars += j.value("cost", 0.0);
    }
    if (j.value("type", "") == "wall_time")
      totals.minutes += std::stod(j.value("seconds", "0")) / 60.0;
  }
  return totals;
}

RunDirectory RunDirectory::create(const std::string& base, const std::string& stamp,
                                  int run_index) {
  namespace fs = std::filesystem;
  RunDirectory dir;
  dir.root = base + "/" + stamp + "/run-" + std::to_string(run_index);
  fs::create_directories(dir.prompts_dir());
  fs::create_directories(dir.responses_dir());
  fs::create_directories(dir.tactics_dir());
  fs::create_directories(dir.prover_dir());
  return dir;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
}

std::string utc_stamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", std::gmtime(&t));
  return buf;
}

}  // namespace dgl
