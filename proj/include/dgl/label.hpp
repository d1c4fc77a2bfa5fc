#pragma once

#include <map>
#include <string>
#include <vector>

#include "dgl/ast.hpp"

namespace dgl {

using SubgameId = std::string;

enum class Player { Angel, Demon };

const char* player_name(Player p);
Player flip(Player p);

struct LabelEntry {
  SubgameId id;            // short id, e.g. "c", "j", "p"
  std::vector<int> path;   // child indices from the root, dual steps included
  const Game* node;        // the dual-stripped core node
  GameKind kind;
  int dual_depth;          // number of enclosing duals, own wrappers included
};

// A game with stable short identifiers on every loop, ODE, nondeterministic
// assignment, choice and test node. Ids come from a pre-order walk that
// counts every node but passes through dual wrappers, so the same game always
// gets the same labels.
struct LabeledGame {
  GamePtr game;
  std::vector<LabelEntry> labels;  // in pre-order

  const LabelEntry* find(const SubgameId& id) const;
  const LabelEntry* find(const Game* node) const;
};

LabeledGame label_subgames(const GamePtr& game);

// Renders the game with `{subgame_<id>: ...}` markers. By default only the
// guessable nodes (loops, ODEs, nondeterministic assignments) are shown.
std::string print_labeled_game(const LabeledGame& lg);
std::string print_labeled_game(const LabeledGame& lg, const std::vector<GameKind>& shown_kinds);

using PlayerMap = std::map<SubgameId, Player>;

enum class RootModality { Diamond, Box };

// Attribution by dual parity relative to the root modality's controller:
// under a diamond, an even number of enclosing `^@` means Angel.
PlayerMap attribute_players(const LabeledGame& lg, RootModality root);

}  // namespace dgl
