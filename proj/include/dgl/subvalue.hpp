#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dgl/ast.hpp"
#include "dgl/label.hpp"

namespace dgl {

enum class Provenance { Symbolic, Guessed, CheckedValid, CheckedFailed };
const char* provenance_name(Provenance p);

struct SubvalueEntry {
  SubgameId subgame;  // "end" is the special node for the end of the game
  FormulaPtr formula;
  Provenance provenance = Provenance::Symbolic;
  int guess_round = 0;
};

struct SubvalueMap {
  std::vector<SubvalueEntry> entries;  // backwards, end of game first
  FormulaPtr postcondition;
  FormulaPtr precondition;  // whole-game weakest precondition once complete

  const SubvalueEntry* find(const SubgameId& id) const;
};

enum class VcKind { Arithmetic, Modal };
enum class VcPurpose { GuessJustification, LoopInductive, LoopExit };

struct Vc {
  FormulaPtr formula;
  VcKind kind = VcKind::Arithmetic;
  SubgameId origin;
  VcPurpose purpose = VcPurpose::GuessJustification;
  std::string note;  // which leg of a compiled check this is
  int guess_round = 0;
};

struct GuessRequest {
  SubgameId subgame;
  GameKind kind = GameKind::AssignAny;  // Repeat, Ode or AssignAny
  Player player = Player::Angel;
  std::string subgame_text;        // rendered with the controller made visible
  std::string loop_body_text;      // loops only
  FormulaPtr successor_post;
  int round = 0;
};

struct PolicyRule {
  SubgameId subgame;
  GameKind kind;           // AssignAny or Choice
  std::string var;         // AssignAny
  FormulaPtr condition;    // state after the action must satisfy this
  FormulaPtr right_condition;  // Choice: condition for the right branch
};

struct PassConfig {
  unsigned dri_order = 1;  // derivative order for the compiled ODE check, <= 4
  int max_loop_depth = 4;
};

struct UnsupportedConstruct : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Backward precondition pass over a labeled game: symbolic steps where the
// construct admits them, suspension at loops, ODEs and nondeterministic
// assignments until a guess is attached. Deterministic in the guess sequence;
// backtracking rewinds to a guess point and replays the retained prefix.
class PassState {
 public:
  static PassState start_pass(LabeledGame game, PlayerMap players, FormulaPtr post,
                              RootModality root = RootModality::Diamond,
                              PassConfig cfg = {});

  enum class Status { Complete, NeedsGuess };

  // Runs every symbolic step possible; stops at the next guess point.
  Status step_symbolic();
  const GuessRequest& pending() const;

  // Records the guess for the pending request and re-evaluates.
  Status attach_guess(const SubgameId& id, FormulaPtr formula);

  void mark_checked(const SubgameId& id, bool valid);

  // Discards every entry produced after the named guess and re-asks it.
  // Loop invariants count as earlier than their body contents.
  Status backtrack_to(const SubgameId& id);

  const SubvalueMap& map() const { return map_; }
  const std::vector<Vc>& vcs() const { return vcs_; }
  const std::vector<PolicyRule>& policy_rules() const { return policy_rules_; }
  const LabeledGame& game() const { return game_; }
  const PlayerMap& players() const { return players_; }

  // Guessed subgames so far, most recent first (the backtrack option list).
  std::vector<SubgameId> guessed_ids_reverse_chronological() const;
  int guess_round(const SubgameId& id) const;
  std::optional<FormulaPtr> guess_for(const SubgameId& id) const;

 private:
  PassState() = default;
  Status evaluate();

  LabeledGame game_;
  PlayerMap players_;
  FormulaPtr post_;
  PassConfig cfg_;

  struct GuessRecord {
    SubgameId id;
    FormulaPtr formula;
    int round = 0;
    std::optional<bool> checked;
  };
  std::vector<GuessRecord> guesses_;  // chronological
  std::map<SubgameId, int> rounds_;

  SubvalueMap map_;
  std::vector<Vc> vcs_;
  std::vector<PolicyRule> policy_rules_;
  std::optional<GuessRequest> pending_;
};

// Pure symbolic weakest precondition on the loop-, ODE- and assign_any-free
// fragment; throws UnsupportedConstruct if a guess point is reached.
FormulaPtr symbolic_wp(const GamePtr& game, const FormulaPtr& post,
                       RootModality root = RootModality::Diamond);

// Re-renders a subtree so that each player-sensitive construct carries its
// controller visibly (an odd number of `^@` wrappers for Demon).
GamePtr materialize_player_view(const GamePtr& g, int base_parity);

std::string render_policy(const SubvalueMap& map, const LabeledGame& lg,
                          const std::vector<PolicyRule>& rules);

// Human-readable report and machine-readable lines (id, provenance, formula).
std::string subvalue_report(const SubvalueMap& map);
std::string subvalue_machine(const SubvalueMap& map);

const char* vc_purpose_name(VcPurpose p);

}  // namespace dgl
