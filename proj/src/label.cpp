#include "dgl/label.hpp"

#include "dgl/printer.hpp"

namespace dgl {

const char* player_name(Player p) { return p == Player::Angel ? "angel" : "demon"; }
Player flip(Player p) { return p == Player::Angel ? Player::Demon : Player::Angel; }

namespace {

std::string letters(int n) {
  // 0 -> a, 25 -> z, 26 -> aa, ...
  std::string s;
  ++n;
  while (n > 0) {
    --n;
    s.insert(s.begin(), char('a' + n % 26));
    n /= 26;
  }
  return s;
}

bool labelable(GameKind k) {
  switch (k) {
    case GameKind::Repeat:
    case GameKind::Ode:
    case GameKind::AssignAny:
    case GameKind::Choice:
    case GameKind::Test:
      return true;
    default:
      return false;
  }
}

struct Walker {
  std::vector<LabelEntry> labels;
  int counter = 0;

  void walk(const GamePtr& g, std::vector<int> path, int dual_depth) {
    if (g->kind == GameKind::Dual) {
      path.push_back(0);
      walk(g->left, std::move(path), dual_depth + 1);
      return;
    }
    int letter = counter++;
    if (labelable(g->kind))
      labels.push_back(LabelEntry{letters(letter), path, g.get(), g->kind, dual_depth});
    switch (g->kind) {
      case GameKind::Seq:
      case GameKind::Choice: {
        std::vector<int> left = path, right = path;
        left.push_back(0);
        right.push_back(1);
        walk(g->left, std::move(left), dual_depth);
        walk(g->right, std::move(right), dual_depth);
        return;
      }
      case GameKind::Repeat: {
        path.push_back(0);
        walk(g->left, std::move(path), dual_depth);
        return;
      }
      default:
        return;
    }
  }
};

}  // namespace

const LabelEntry* LabeledGame::find(const SubgameId& id) const {
  for (const auto& e : labels)
    if (e.id == id) return &e;
  return nullptr;
}

const LabelEntry* LabeledGame::find(const Game* node) const {
  for (const auto& e : labels)
    if (e.node == node) return &e;
  return nullptr;
}

LabeledGame label_subgames(const GamePtr& game) {
  Walker w;
  w.walk(game, {}, 0);
  return LabeledGame{game, std::move(w.labels)};
}

std::string print_labeled_game(const LabeledGame& lg) {
  return print_labeled_game(lg, {GameKind::Repeat, GameKind::Ode, GameKind::AssignAny});
}

std::string print_labeled_game(const LabeledGame& lg, const std::vector<GameKind>& shown_kinds) {
  return print_game(lg.game, [&](const Game* core, const std::string& rendered) {
    const LabelEntry* entry = lg.find(core);
    if (!entry) return rendered;
    bool shown = false;
    for (GameKind k : shown_kinds)
      if (k == entry->kind) { shown = true; break; }
    if (!shown) return rendered;
    return "{subgame_" + entry->id + ": " + rendered + "}";
  });
}

PlayerMap attribute_players(const LabeledGame& lg, RootModality root) {
  PlayerMap out;
  Player base = root == RootModality::Diamond ? Player::Angel : Player::Demon;
  for (const auto& e : lg.labels)
    out[e.id] = e.dual_depth % 2 == 0 ? base : flip(base);
  return out;
}

}  // namespace dgl
