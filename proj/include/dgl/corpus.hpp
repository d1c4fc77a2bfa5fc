#pragma once

#include <string>
#include <vector>

#include "dgl/ast.hpp"

namespace dgl {

struct CorpusEntry {
  std::string id;
  std::string verification_text;  // assumptions -> <game> post
  std::string synthesis_text;     // <?assumptions;^@ ; game> post
  std::string guideline;

  FormulaPtr verification() const;
  FormulaPtr synthesis() const;
};

// lotka_volterra, coolant, train, vanderpol, chemical_reaction
const std::vector<std::string>& corpus_ids();

// Resolution order: explicit argument, DGL_ASSET_DIR, build-time default.
std::string default_asset_dir();

CorpusEntry load_corpus(const std::string& id, const std::string& asset_dir = "");

}  // namespace dgl
