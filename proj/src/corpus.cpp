#include "dgl/corpus.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dgl/parser.hpp"

#ifndef DGL_DEFAULT_ASSET_DIR
#define DGL_DEFAULT_ASSET_DIR "assets"
#endif

namespace dgl {

FormulaPtr CorpusEntry::verification() const { return parse_formula(verification_text); }
FormulaPtr CorpusEntry::synthesis() const { return parse_formula(synthesis_text); }

const std::vector<std::string>& corpus_ids() {
  static const std::vector<std::string> ids = {
      "lotka_volterra", "coolant", "train", "vanderpol", "chemical_reaction"};
  return ids;
}

std::string default_asset_dir() {
  if (const char* env = std::getenv("DGL_ASSET_DIR")) return env;
  return DGL_DEFAULT_ASSET_DIR;
}

namespace {

std::string read_trimmed(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read corpus file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  std::string text = ss.str();
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  return text;
}

}  // namespace

CorpusEntry load_corpus(const std::string& id, const std::string& asset_dir) {
  bool known = false;
  for (const auto& k : corpus_ids())
    if (k == id) known = true;
  if (!known) throw std::invalid_argument("unknown corpus model '" + id + "'");
  std::string root = (asset_dir.empty() ? default_asset_dir() : asset_dir) + "/corpus/" + id;
  CorpusEntry entry;
  entry.id = id;
  entry.verification_text = read_trimmed(root + "/verify.dgl");
  entry.synthesis_text = read_trimmed(root + "/synth.dgl");
  entry.guideline = read_trimmed(root + "/guideline.txt");
  return entry;
}

}  // namespace dgl
