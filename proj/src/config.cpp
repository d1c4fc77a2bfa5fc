#include "dgl/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace dgl {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

void apply(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "solver_path") cfg.solver_path = value;
  else if (key == "prover_java") cfg.prover_java = value;
  else if (key == "prover_jar") cfg.prover_jar = value;
  else if (key == "oracle_backend") cfg.oracle_backend = value;
  else if (key == "oracle_base_url") cfg.oracle_base_url = value;
  else if (key == "oracle_model") cfg.oracle_model = value;
  else if (key == "oracle_key_env") cfg.oracle_key_env = value;
  else if (key == "transcript") cfg.transcript = value;
  else if (key == "price_prompt") cfg.price_prompt = std::stod(value);
  else if (key == "price_completion") cfg.price_completion = std::stod(value);
  else if (key == "call_estimate") cfg.call_estimate = std::stod(value);
  else if (key == "parallel_runs") cfg.parallel_runs = std::stoi(value);
  else if (key == "sets") cfg.sets = std::stoi(value);
  else if (key == "per_set_budget") cfg.per_set_budget = std::stod(value);
  else if (key == "total_budget") cfg.total_budget = std::stod(value);
  else if (key == "max_iterations") cfg.max_iterations = std::stoi(value);
  else if (key == "full_history") cfg.full_history = value == "1" || value == "true";
  else if (key == "recovery") cfg.recovery = value;
  else if (key == "dfs_branching") cfg.dfs_branching = std::stoi(value);
  else if (key == "arith_timeout") cfg.arith_timeout = std::stod(value);
  else if (key == "prover_timeout") cfg.prover_timeout = std::stod(value);
  else if (key == "dri_order") cfg.dri_order = (unsigned)std::stoul(value);
  else if (key == "out_dir") cfg.out_dir = value;
  else throw std::invalid_argument("unknown configuration key '" + key + "'");
}

const char* kKeys[] = {
    "solver_path", "prover_java", "prover_jar", "oracle_backend", "oracle_base_url",
    "oracle_model", "oracle_key_env", "transcript", "price_prompt", "price_completion",
    "call_estimate", "parallel_runs", "sets", "per_set_budget", "total_budget",
    "max_iterations", "full_history", "recovery", "dfs_branching", "arith_timeout",
    "prover_timeout", "dri_order", "out_dir"};

void apply_env(RunConfig& cfg) {
  for (const char* key : kKeys) {
    std::string env_name = "DGL_";
    for (const char* p = key; *p; ++p) env_name += (char)std::toupper(*p);
    if (const char* value = std::getenv(env_name.c_str())) apply(cfg, key, value);
  }
}

}  // namespace

void RunConfig::validate() const {
  if (oracle_backend == "replay") {
    if (transcript.empty())
      throw std::invalid_argument("replay mode requires a transcript path");
    if (!oracle_base_url.empty())
      throw std::invalid_argument("replay mode forbids a live oracle endpoint");
  } else if (oracle_backend != "live") {
    throw std::invalid_argument("oracle_backend must be 'live' or 'replay'");
  }
  if (recovery != "llm" && recovery != "dfs")
    throw std::invalid_argument("recovery must be 'llm' or 'dfs'");
}

RunConfig config_from_map(const std::map<std::string, std::string>& kv) {
  RunConfig cfg;
  for (const auto& [key, value] : kv) apply(cfg, key, value);
  apply_env(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  if (!path.empty()) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read configuration file " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
      ++lineno;
      std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      size_t eq = t.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("configuration line " + std::to_string(lineno) +
                                    " is not key=value");
      apply(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
  }
  apply_env(cfg);
  return cfg;
}

}  // namespace dgl
