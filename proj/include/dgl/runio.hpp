#pragma once

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "dgl/oracle.hpp"

namespace dgl {

// Append-only JSON-lines run ledger; one writer per run directory, safe for
// concurrent appends.
class RunLedger {
 public:
  explicit RunLedger(std::string path);

  void record_exchange(const OracleExchange& e);
  void record_event(const std::string& kind, const std::map<std::string, std::string>& fields);

  const std::string& path() const { return path_; }

  struct Totals {
    long llm_calls = 0;
    double dollars = 0.0;
    double minutes = 0.0;
  };
  static Totals aggregate(const std::string& path);

 private:
  std::string path_;
  std::mutex mutex_;
};

// runs/<stamp>/run-<k>/{prompts,responses,tactics,prover}
struct RunDirectory {
  std::string root;

  static RunDirectory create(const std::string& base, const std::string& stamp, int run_index);
  std::string prompts_dir() const { return root + "/prompts"; }
  std::string responses_dir() const { return root + "/responses"; }
  std::string tactics_dir() const { return root + "/tactics"; }
  std::string prover_dir() const { return root + "/prover"; }
  std::string ledger_path() const { return root + "/ledger.jsonl"; }
  std::string transcript_path() const { return root + "/transcript.jsonl"; }
  std::string result_path() const { return root + "/result.json"; }
};

void write_text_file(const std::string& path, const std::string& content);
std::string utc_stamp();

}  // namespace dgl
