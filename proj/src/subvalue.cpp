#include "dgl/subvalue.hpp"

#include <functional>
#include <sstream>

#include "dgl/lie.hpp"
#include "dgl/polynomial.hpp"
#include "dgl/printer.hpp"
#include "dgl/smt.hpp"
#include "dgl/vars.hpp"

namespace dgl {

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Symbolic: return "symbolic";
    case Provenance::Guessed: return "guessed";
    case Provenance::CheckedValid: return "checked-valid";
    case Provenance::CheckedFailed: return "checked-failed";
  }
  return "symbolic";
}

const char* vc_purpose_name(VcPurpose p) {
  switch (p) {
    case VcPurpose::GuessJustification: return "guess-justification";
    case VcPurpose::LoopInductive: return "loop-inductive";
    case VcPurpose::LoopExit: return "loop-exit";
  }
  return "guess-justification";
}

const SubvalueEntry* SubvalueMap::find(const SubgameId& id) const {
  for (const auto& e : entries)
    if (e.subgame == id) return &e;
  return nullptr;
}

GamePtr materialize_player_view(const GamePtr& g, int base_parity) {
  // view(g, actual, view): rebuild so that parity counting over the output
  // equals the actual parity for every player-sensitive construct.
  std::function<GamePtr(const GamePtr&, int, int)> view =
      [&](const GamePtr& node, int actual, int shown) -> GamePtr {
    switch (node->kind) {
      case GameKind::Dual:
        return view(node->left, actual + 1, shown);
      case GameKind::Assign:
        return node;
      case GameKind::Seq:
        return g_seq(view(node->left, actual, shown), view(node->right, actual, shown));
      case GameKind::Test:
      case GameKind::AssignAny:
      case GameKind::Ode: {
        bool wrap = ((actual - shown) % 2 + 2) % 2 == 1;
        return wrap ? g_dual(node) : node;
      }
      case GameKind::Choice: {
        bool wrap = ((actual - shown) % 2 + 2) % 2 == 1;
        int inner_shown = shown + (wrap ? 1 : 0);
        GamePtr body = g_choice(view(node->left, actual, inner_shown),
                                view(node->right, actual, inner_shown));
        return wrap ? g_dual(body) : body;
      }
      case GameKind::Repeat: {
        bool wrap = ((actual - shown) % 2 + 2) % 2 == 1;
        int inner_shown = shown + (wrap ? 1 : 0);
        GamePtr body = g_repeat(view(node->left, actual, inner_shown));
        return wrap ? g_dual(body) : body;
      }
    }
    return node;
  };
  return view(g, base_parity, 0);
}

namespace {

struct NeedGuessSignal {
  GuessRequest request;
};

// One full backward evaluation over the game for a fixed guess log.
struct Evaluator {
  const LabeledGame& lg;
  const PlayerMap& players;
  const PassConfig& cfg;
  const std::map<SubgameId, FormulaPtr>& guesses;
  const std::map<SubgameId, int>& rounds;
  const std::map<SubgameId, std::optional<bool>>& checked;

  std::vector<SubvalueEntry> entries;
  std::vector<Vc> vcs;
  std::vector<PolicyRule> policy_rules;
  int loop_depth = 0;

  Player player_at(int parity) const {
    return parity % 2 == 0 ? Player::Angel : Player::Demon;
  }

  const LabelEntry* label_of(const Game* node) const { return lg.find(node); }

  int round_of(const SubgameId& id) const {
    auto it = rounds.find(id);
    return it == rounds.end() ? 0 : it->second;
  }

  void record(const Game* node, const FormulaPtr& f, Provenance prov, int round = 0) {
    const LabelEntry* lab = label_of(node);
    if (!lab) return;
    entries.push_back(SubvalueEntry{lab->id, f, prov, round});
  }

  Provenance guessed_provenance(const SubgameId& id) const {
    auto it = checked.find(id);
    if (it == checked.end() || !it->second.has_value()) return Provenance::Guessed;
    return *it->second ? Provenance::CheckedValid : Provenance::CheckedFailed;
  }

  [[noreturn]] void suspend(const Game* node, GameKind kind, int parity,
                            const FormulaPtr& post) {
    const LabelEntry* lab = label_of(node);
    if (!lab) throw std::logic_error("guess point without a label");
    GuessRequest req;
    req.subgame = lab->id;
    req.kind = kind;
    req.player = player_at(parity);
    GamePtr node_ptr;  // rebuild a shared view of this node for printing
    switch (kind) {
      case GameKind::Ode: {
        std::vector<OdeEquation> eqs = node->equations;
        node_ptr = g_ode(std::move(eqs), node->formula);
        break;
      }
      case GameKind::AssignAny:
        node_ptr = g_assign_any(node->var);
        break;
      case GameKind::Repeat:
        node_ptr = g_repeat(node->left);
        break;
      default:
        throw std::logic_error("unexpected guess kind");
    }
    req.subgame_text = print_game(materialize_player_view(node_ptr, parity));
    if (kind == GameKind::Repeat)
      req.loop_body_text = print_game(materialize_player_view(node->left, parity + 1));
    req.successor_post = post;
    req.round = round_of(req.subgame);
    throw NeedGuessSignal{std::move(req)};
  }

  FormulaPtr guess_or_suspend(const Game* node, GameKind kind, int parity,
                              const FormulaPtr& post) {
    const LabelEntry* lab = label_of(node);
    if (!lab) throw std::logic_error("guess point without a label");
    auto it = guesses.find(lab->id);
    if (it == guesses.end()) suspend(node, kind, parity, post);
    return it->second;
  }

  // Split a guess into its polynomial equational core (over the ODE's bound
  // variables) and its constant part (no bound variables at all).
  void split_ode_guess(const FormulaPtr& guess, const OdeSystem& sys,
                       std::vector<Polynomial>& core, std::vector<FormulaPtr>& core_eqs,
                       std::vector<FormulaPtr>& constant_part) const {
    for (const auto& c : conjuncts(guess)) {
      std::set<std::string> fv = free_vars(c);
      bool touches_flow = false;
      for (const auto& v : fv)
        if (sys.binds(v)) { touches_flow = true; break; }
      if (!touches_flow) {
        constant_part.push_back(c);
        continue;
      }
      if (c->kind == FormulaKind::Cmp && c->op == CmpOp::Eq) {
        try {
          core.push_back(to_polynomial(t_sub(c->term_left, c->term_right)));
          core_eqs.push_back(c);
        } catch (const NonPolynomialError&) {
        }
      }
    }
  }

  void emit_ode_vcs(const Game* node, const FormulaPtr& guess, const FormulaPtr& post,
                    int parity, const SubgameId& id) {
    int round = round_of(id);
    OdeSystem sys;
    bool polynomial_rhs = true;
    try {
      sys = ode_system_from(*node);
    } catch (const NonPolynomialError&) {
      polynomial_rhs = false;
    }
    GamePtr ode_copy = g_ode(std::vector<OdeEquation>(node->equations), node->formula);
    if (player_at(parity) == Player::Angel) {
      // Angel controls the duration: existential reach, prover territory.
      vcs.push_back(Vc{f_imply(guess, f_diamond(ode_copy, post)), VcKind::Modal, id,
                       VcPurpose::GuessJustification, "angel-ode", round});
      return;
    }
    // Demon ODE: compile to arithmetic via the equational core when possible.
    std::vector<Polynomial> core;
    std::vector<FormulaPtr> core_eqs, constant_part;
    if (polynomial_rhs) split_ode_guess(guess, sys, core, core_eqs, constant_part);
    if (!core.empty()) {
      FormulaPtr core_formula = conjoin(core_eqs);
      vcs.push_back(Vc{f_imply(guess, core_formula), VcKind::Arithmetic, id,
                       VcPurpose::GuessJustification, "ode-core-entry", round});
      vcs.push_back(Vc{dri_vc(core, sys, cfg.dri_order, core_formula), VcKind::Arithmetic, id,
                       VcPurpose::GuessJustification, "ode-core-invariance", round});
      FormulaPtr ctx = f_and(sys.domain_or_true(), core_formula);
      if (!constant_part.empty()) ctx = f_and(ctx, conjoin(constant_part));
      vcs.push_back(Vc{f_imply(ctx, post), VcKind::Arithmetic, id,
                       VcPurpose::GuessJustification, "ode-core-post", round});
      return;
    }
    vcs.push_back(Vc{f_imply(guess, f_box(ode_copy, post)), VcKind::Modal, id,
                     VcPurpose::GuessJustification, "demon-ode", round});
  }

  FormulaPtr wp(const GamePtr& g, FormulaPtr post, int parity) {
    switch (g->kind) {
      case GameKind::Dual:
        return wp(g->left, std::move(post), parity + 1);
      case GameKind::Assign: {
        FormulaPtr out = simplify(substitute(post, g->var, g->term));
        record(g.get(), out, Provenance::Symbolic);
        return out;
      }
      case GameKind::Test: {
        FormulaPtr out = player_at(parity) == Player::Angel
                             ? simplify(f_and(g->formula, post))
                             : simplify(f_imply(g->formula, post));
        record(g.get(), out, Provenance::Symbolic);
        return out;
      }
      case GameKind::Seq: {
        FormulaPtr mid = wp(g->right, std::move(post), parity);
        return wp(g->left, std::move(mid), parity);
      }
      case GameKind::Choice: {
        FormulaPtr right = wp(g->right, post, parity);
        FormulaPtr left = wp(g->left, post, parity);
        FormulaPtr out = player_at(parity) == Player::Angel
                             ? simplify(f_or(left, right))
                             : simplify(f_and(left, right));
        record(g.get(), out, Provenance::Symbolic);
        if (player_at(parity) == Player::Angel) {
          const LabelEntry* lab = label_of(g.get());
          if (lab)
            policy_rules.push_back(PolicyRule{lab->id, GameKind::Choice, "", left, right});
        }
        return out;
      }
      case GameKind::AssignAny: {
        FormulaPtr guess = guess_or_suspend(g.get(), GameKind::AssignAny, parity, post);
        const SubgameId id = label_of(g.get())->id;
        FormulaPtr closure = player_at(parity) == Player::Angel
                                 ? f_exists(g->var, post)
                                 : f_forall(g->var, post);
        vcs.push_back(Vc{f_imply(guess, closure), VcKind::Arithmetic, id,
                         VcPurpose::GuessJustification,
                         player_at(parity) == Player::Angel ? "angel-assign-any"
                                                            : "demon-assign-any",
                         round_of(id)});
        record(g.get(), guess, guessed_provenance(id), round_of(id));
        if (player_at(parity) == Player::Angel)
          policy_rules.push_back(PolicyRule{id, GameKind::AssignAny, g->var, post, nullptr});
        return guess;
      }
      case GameKind::Ode: {
        FormulaPtr guess = guess_or_suspend(g.get(), GameKind::Ode, parity, post);
        const SubgameId id = label_of(g.get())->id;
        emit_ode_vcs(g.get(), guess, post, parity, id);
        record(g.get(), guess, guessed_provenance(id), round_of(id));
        return guess;
      }
      case GameKind::Repeat: {
        if (player_at(parity) != Player::Demon)
          throw UnsupportedConstruct(
              "Angel-controlled loops need convergence arguments and are not supported");
        FormulaPtr invariant = guess_or_suspend(g.get(), GameKind::Repeat, parity, post);
        const SubgameId id = label_of(g.get())->id;
        if (loop_depth + 1 > cfg.max_loop_depth)
          throw UnsupportedConstruct("loop nesting exceeds the configured depth");
        // Invariant first, then the body assuming it holds at the body's end,
        // then the retrospective inductiveness check.
        record(g.get(), invariant, guessed_provenance(id), round_of(id));
        ++loop_depth;
        FormulaPtr body_entry = wp(g->left, invariant, parity);
        --loop_depth;
        vcs.push_back(Vc{simplify(f_imply(invariant, post)), VcKind::Arithmetic, id,
                         VcPurpose::LoopExit, "loop-exit", round_of(id)});
        vcs.push_back(Vc{simplify(f_imply(invariant, body_entry)), VcKind::Arithmetic, id,
                         VcPurpose::LoopInductive, "loop-inductive", round_of(id)});
        return invariant;
      }
    }
    throw std::logic_error("unreachable game kind");
  }
};

}  // namespace

PassState PassState::start_pass(LabeledGame game, PlayerMap players, FormulaPtr post,
                                RootModality root, PassConfig cfg) {
  if (root == RootModality::Box)
    throw UnsupportedConstruct(
        "box-rooted problems (Demon objective) are outside the supported fragment");
  PassState st;
  st.game_ = std::move(game);
  st.players_ = std::move(players);
  st.post_ = std::move(post);
  st.cfg_ = cfg;
  return st;
}

PassState::Status PassState::evaluate() {
  std::map<SubgameId, FormulaPtr> guesses;
  std::map<SubgameId, std::optional<bool>> checked;
  for (const auto& g : guesses_) {
    guesses[g.id] = g.formula;
    checked[g.id] = g.checked;
  }
  Evaluator ev{game_, players_, cfg_, guesses, rounds_, checked, {}, {}, {}, 0};

  map_ = SubvalueMap{};
  map_.postcondition = post_;
  vcs_.clear();
  policy_rules_.clear();
  pending_.reset();

  try {
    FormulaPtr pre = ev.wp(game_.game, post_, 0);
    map_.entries.push_back(SubvalueEntry{"end", post_, Provenance::Symbolic, 0});
    map_.entries.insert(map_.entries.end(), ev.entries.begin(), ev.entries.end());
    // Evaluation appends in resolution order (end first); keep that order.
    map_.precondition = pre;
    vcs_ = std::move(ev.vcs);
    policy_rules_ = std::move(ev.policy_rules);
    return Status::Complete;
  } catch (NeedGuessSignal& signal) {
    map_.entries.push_back(SubvalueEntry{"end", post_, Provenance::Symbolic, 0});
    map_.entries.insert(map_.entries.end(), ev.entries.begin(), ev.entries.end());
    vcs_ = std::move(ev.vcs);
    policy_rules_ = std::move(ev.policy_rules);
    pending_ = std::move(signal.request);
    return Status::NeedsGuess;
  }
}

PassState::Status PassState::step_symbolic() { return evaluate(); }

const GuessRequest& PassState::pending() const {
  if (!pending_) throw std::logic_error("no pending guess request");
  return *pending_;
}

PassState::Status PassState::attach_guess(const SubgameId& id, FormulaPtr formula) {
  if (!pending_ || pending_->subgame != id)
    throw std::invalid_argument("attach_guess id does not match the pending request");
  guesses_.push_back(GuessRecord{id, std::move(formula), rounds_[id], std::nullopt});
  return evaluate();
}

void PassState::mark_checked(const SubgameId& id, bool valid) {
  for (auto it = guesses_.rbegin(); it != guesses_.rend(); ++it) {
    if (it->id == id) {
      it->checked = valid;
      evaluate();
      return;
    }
  }
  throw std::invalid_argument("mark_checked: no guess recorded for " + id);
}

PassState::Status PassState::backtrack_to(const SubgameId& id) {
  for (size_t i = guesses_.size(); i-- > 0;) {
    if (guesses_[i].id == id) {
      guesses_.resize(i);
      rounds_[id] += 1;
      return evaluate();
    }
  }
  const LabelEntry* lab = game_.find(id);
  if (!lab) throw std::invalid_argument("backtrack_to: unknown subgame " + id);
  throw std::invalid_argument("backtrack_to: subgame " + id + " holds no guess");
}

std::vector<SubgameId> PassState::guessed_ids_reverse_chronological() const {
  std::vector<SubgameId> out;
  for (auto it = guesses_.rbegin(); it != guesses_.rend(); ++it) out.push_back(it->id);
  return out;
}

int PassState::guess_round(const SubgameId& id) const {
  auto it = rounds_.find(id);
  return it == rounds_.end() ? 0 : it->second;
}

std::optional<FormulaPtr> PassState::guess_for(const SubgameId& id) const {
  for (auto it = guesses_.rbegin(); it != guesses_.rend(); ++it)
    if (it->id == id) return it->formula;
  return std::nullopt;
}

FormulaPtr symbolic_wp(const GamePtr& game, const FormulaPtr& post, RootModality root) {
  LabeledGame lg = label_subgames(game);
  PlayerMap pm = attribute_players(lg, root);
  PassState st = PassState::start_pass(lg, pm, post, root);
  if (st.step_symbolic() != PassState::Status::Complete)
    throw UnsupportedConstruct("game contains a guess point (loop, ODE or x := *): " +
                               st.pending().subgame);
  return st.map().precondition;
}

std::string render_policy(const SubvalueMap& map, const LabeledGame& lg,
                          const std::vector<PolicyRule>& rules) {
  (void)lg;
  std::ostringstream os;
  os << "Control policy (in state sigma):\n";
  if (rules.empty()) {
    os << "  No Angel choice points in this game; the synthesized precondition\n"
       << "  is the whole policy: any run that starts inside it stays winning.\n";
    return os.str();
  }
  // Rules are collected backwards; list them in game order.
  std::vector<PolicyRule> ordered(rules.rbegin(), rules.rend());
  int n = 0;
  for (const auto& r : ordered) {
    if (r.kind == GameKind::AssignAny) {
      os << "  " << ++n << ". At subgame_" << r.subgame << " (" << r.var << " := *): "
         << r.var << " := e permitted iff sigma(" << r.var << " -> e) |= "
         << print_formula(r.condition) << "\n";
    } else {
      os << "  " << ++n << ". At subgame_" << r.subgame
         << " (choice): left branch permitted iff sigma |= " << print_formula(r.condition)
         << "; right branch permitted iff sigma |= " << print_formula(r.right_condition)
         << "\n";
    }
  }
  return os.str();
}

std::string subvalue_report(const SubvalueMap& map) {
  std::ostringstream os;
  os << "# Subvalue map\n\n";
  os << "Postcondition: `" << print_formula(map.postcondition) << "`\n\n";
  for (const auto& e : map.entries) {
    os << "- `" << (e.subgame == "end" ? "end" : "subgame_" + e.subgame) << "` ["
       << provenance_name(e.provenance);
    if (e.guess_round > 0) os << ", round " << e.guess_round + 1;
    os << "]: `" << print_formula(e.formula) << "`\n";
  }
  if (map.precondition)
    os << "\nOverall precondition: `" << print_formula(map.precondition) << "`\n";
  return os.str();
}

std::string subvalue_machine(const SubvalueMap& map) {
  std::ostringstream os;
  for (const auto& e : map.entries)
    os << e.subgame << "\t" << provenance_name(e.provenance) << "\t"
       << print_formula(e.formula) << "\n";
  return os.str();
}

}  // namespace dgl
