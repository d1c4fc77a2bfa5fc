#pragma once

#include <map>
#include <string>

namespace dgl {

// Flat key=value configuration; environment variables DGL_<UPPERCASE_KEY>
// override file values.
struct RunConfig {
  // tool paths
  std::string solver_path;
  std::string prover_java;
  std::string prover_jar;
  // oracle
  std::string oracle_backend = "live";  // live | replay
  std::string oracle_base_url;
  std::string oracle_model;
  std::string oracle_key_env = "ORACLE_API_KEY";
  std::string transcript;  // replay input
  double price_prompt = 0.0;      // dollars per prompt token
  double price_completion = 0.0;  // dollars per completion token
  double call_estimate = 0.05;    // reservation per call
  // budgets and limits
  int parallel_runs = 4;
  int sets = 2;
  double per_set_budget = 12.0;
  double total_budget = 10.0;
  int max_iterations = 20;
  bool full_history = false;
  std::string recovery = "llm";  // llm | dfs
  int dfs_branching = 3;
  double arith_timeout = 30.0;
  double prover_timeout = 300.0;
  unsigned dri_order = 1;
  // output
  std::string out_dir = "runs";

  // Replay mode requires a transcript and runs one sequential pipeline run.
  void validate() const;
};

RunConfig load_config(const std::string& path);      // missing file -> defaults
RunConfig config_from_map(const std::map<std::string, std::string>& kv);

}  // namespace dgl
