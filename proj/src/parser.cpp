#include "dgl/parser.hpp"

#include <cctype>
#include <optional>
#include <sstream>

namespace dgl {

ParseError::ParseError(std::string msg, int line_, int column_, std::vector<std::string> expected_)
    : std::runtime_error(std::move(msg)), line(line_), column(column_), expected(std::move(expected_)) {}

namespace {

enum class Tok {
  Ident, Number, End,
  LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  Semi, Comma, Quest, Prime,
  Assign,       // :=
  Plus, Minus, Star, Slash, Caret, DualAt,  // ^@
  ChoicePlus,   // ++
  Amp, Bar, Bang,
  Lt, Le, EqTok, Ge, Gt, Arrow, Equiv,
  KwTrue, KwFalse, KwForall, KwExists,
};

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::End: return "end of input";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Semi: return "';'";
    case Tok::Comma: return "','";
    case Tok::Quest: return "'?'";
    case Tok::Prime: return "'''";
    case Tok::Assign: return "':='";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Caret: return "'^'";
    case Tok::DualAt: return "'^@'";
    case Tok::ChoicePlus: return "'++'";
    case Tok::Amp: return "'&'";
    case Tok::Bar: return "'|'";
    case Tok::Bang: return "'!'";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::EqTok: return "'='";
    case Tok::Ge: return "'>='";
    case Tok::Gt: return "'>'";
    case Tok::Arrow: return "'->'";
    case Tok::Equiv: return "'<->'";
    case Tok::KwTrue: return "'true'";
    case Tok::KwFalse: return "'false'";
    case Tok::KwForall: return "'\\forall'";
    case Tok::KwExists: return "'\\exists'";
  }
  return "?";
}

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { run(); }
  std::vector<Token> tokens;

 private:
  const std::string& text_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg + " at line " + std::to_string(line_) + ":" + std::to_string(col_),
                     line_, col_, {});
  }

  char peek(size_t off = 0) const {
    return pos_ + off < text_.size() ? text_[pos_ + off] : '\0';
  }

  void advance() {
    if (pos_ < text_.size()) {
      if (text_[pos_] == '\n') { ++line_; col_ = 1; } else { ++col_; }
      ++pos_;
    }
  }

  void push(Tok kind, std::string text, int line, int col) {
    tokens.push_back(Token{kind, std::move(text), line, col});
  }

  void run() {
    while (pos_ < text_.size()) {
      char c = peek();
      if ((unsigned char)c >= 128) fail("non-ASCII input");
      if (std::isspace((unsigned char)c)) { advance(); continue; }
      int line = line_, col = col_;
      if (std::isalpha((unsigned char)c) || c == '_') {
        std::string id;
        while (std::isalnum((unsigned char)peek()) || peek() == '_') { id += peek(); advance(); }
        if (id == "true") push(Tok::KwTrue, id, line, col);
        else if (id == "false") push(Tok::KwFalse, id, line, col);
        else push(Tok::Ident, id, line, col);
        continue;
      }
      if (std::isdigit((unsigned char)c)) {
        std::string num;
        while (std::isdigit((unsigned char)peek())) { num += peek(); advance(); }
        if (peek() == '.' && std::isdigit((unsigned char)peek(1))) {
          num += '.'; advance();
          while (std::isdigit((unsigned char)peek())) { num += peek(); advance(); }
        }
        push(Tok::Number, num, line, col);
        continue;
      }
      switch (c) {
        case '\\': {
          advance();
          std::string id;
          while (std::isalpha((unsigned char)peek())) { id += peek(); advance(); }
          if (id == "forall") push(Tok::KwForall, id, line, col);
          else if (id == "exists") push(Tok::KwExists, id, line, col);
          else fail("unknown escape '\\" + id + "'");
          continue;
        }
        case '(': advance(); push(Tok::LParen, "(", line, col); continue;
        case ')': advance(); push(Tok::RParen, ")", line, col); continue;
        case '{': advance(); push(Tok::LBrace, "{", line, col); continue;
        case '}': advance(); push(Tok::RBrace, "}", line, col); continue;
        case '[': advance(); push(Tok::LBracket, "[", line, col); continue;
        case ']': advance(); push(Tok::RBracket, "]", line, col); continue;
        case ';': advance(); push(Tok::Semi, ";", line, col); continue;
        case ',': advance(); push(Tok::Comma, ",", line, col); continue;
        case '?': advance(); push(Tok::Quest, "?", line, col); continue;
        case '\'': advance(); push(Tok::Prime, "'", line, col); continue;
        case ':':
          advance();
          if (peek() == '=') { advance(); push(Tok::Assign, ":=", line, col); continue; }
          fail("':' is only valid in ':='");
        case '+':
          advance();
          if (peek() == '+') { advance(); push(Tok::ChoicePlus, "++", line, col); continue; }
          push(Tok::Plus, "+", line, col); continue;
        case '-':
          advance();
          if (peek() == '>') { advance(); push(Tok::Arrow, "->", line, col); continue; }
          push(Tok::Minus, "-", line, col); continue;
        case '*': advance(); push(Tok::Star, "*", line, col); continue;
        case '/': advance(); push(Tok::Slash, "/", line, col); continue;
        case '^':
          advance();
          if (peek() == '@') { advance(); push(Tok::DualAt, "^@", line, col); continue; }
          push(Tok::Caret, "^", line, col); continue;
        case '&': advance(); push(Tok::Amp, "&", line, col); continue;
        case '|': advance(); push(Tok::Bar, "|", line, col); continue;
        case '!': advance(); push(Tok::Bang, "!", line, col); continue;
        case '=': advance(); push(Tok::EqTok, "=", line, col); continue;
        case '<':
          advance();
          if (peek() == '-' && peek(1) == '>') { advance(); advance(); push(Tok::Equiv, "<->", line, col); continue; }
          if (peek() == '=') { advance(); push(Tok::Le, "<=", line, col); continue; }
          push(Tok::Lt, "<", line, col); continue;
        case '>':
          advance();
          if (peek() == '=') { advance(); push(Tok::Ge, ">=", line, col); continue; }
          push(Tok::Gt, ">", line, col); continue;
        default:
          fail(std::string("unexpected character '") + c + "'");
      }
    }
    push(Tok::End, "", line_, col_);
  }
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lexer_(text) {}

  FormulaPtr formula_all() {
    FormulaPtr f = formula();
    expect(Tok::End);
    return f;
  }
  GamePtr game_all() {
    GamePtr g = game();
    expect(Tok::End);
    return g;
  }
  TermPtr term_all() {
    TermPtr t = term();
    expect(Tok::End);
    return t;
  }

 private:
  Lexer lexer_;
  size_t idx_ = 0;

  const Token& cur() const { return lexer_.tokens[idx_]; }
  const Token& ahead(size_t n) const {
    size_t i = idx_ + n;
    if (i >= lexer_.tokens.size()) i = lexer_.tokens.size() - 1;
    return lexer_.tokens[i];
  }
  bool at(Tok k) const { return cur().kind == k; }
  bool accept(Tok k) {
    if (at(k)) { ++idx_; return true; }
    return false;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) {
    const Token& t = cur();
    std::ostringstream msg;
    msg << "syntax error at line " << t.line << ":" << t.col << ": unexpected "
        << tok_name(t.kind);
    if (!t.text.empty() && t.kind != Tok::End) msg << " '" << t.text << "'";
    if (!expected.empty()) {
      msg << "; expected ";
      for (size_t i = 0; i < expected.size(); ++i) {
        if (i) msg << (i + 1 == expected.size() ? " or " : ", ");
        msg << expected[i];
      }
    }
    throw ParseError(msg.str(), t.line, t.col, std::move(expected));
  }

  void expect(Tok k) {
    if (!accept(k)) fail({tok_name(k)});
  }

  std::string expect_ident() {
    if (!at(Tok::Ident)) fail({"identifier"});
    std::string name = cur().text;
    ++idx_;
    return name;
  }

  // ---- terms ----

  TermPtr term() { return add_sub(); }

  TermPtr add_sub() {
    TermPtr t = mul_div();
    for (;;) {
      if (accept(Tok::Plus)) t = t_add(t, mul_div());
      else if (accept(Tok::Minus)) t = t_sub(t, mul_div());
      else return t;
    }
  }

  TermPtr mul_div() {
    TermPtr t = unary();
    for (;;) {
      if (accept(Tok::Star)) t = t_mul(t, unary());
      else if (accept(Tok::Slash)) t = t_div(t, unary());
      else return t;
    }
  }

  TermPtr unary() {
    if (accept(Tok::Minus)) return t_neg(unary());
    return power();
  }

  TermPtr power() {
    TermPtr base = primary_term();
    if (accept(Tok::Caret)) {
      if (!at(Tok::Number) || cur().text.find('.') != std::string::npos)
        fail({"natural-number exponent"});
      unsigned long e = std::stoul(cur().text);
      ++idx_;
      return t_power(base, (unsigned)e);
    }
    return base;
  }

  TermPtr primary_term() {
    if (at(Tok::Number)) {
      Rational v = rational_from_decimal(cur().text);
      ++idx_;
      return t_const(std::move(v));
    }
    if (at(Tok::Ident)) {
      std::string name = cur().text;
      ++idx_;
      return t_var(std::move(name));
    }
    if (accept(Tok::LParen)) {
      TermPtr t = term();
      expect(Tok::RParen);
      return t;
    }
    fail({"number", "identifier", "'('"});
  }

  // ---- formulas ----

  FormulaPtr formula() { return equiv_level(); }

  FormulaPtr equiv_level() {
    FormulaPtr f = imply_level();
    while (accept(Tok::Equiv)) f = f_equiv(f, imply_level());
    return f;
  }

  FormulaPtr imply_level() {
    FormulaPtr f = or_level();
    if (accept(Tok::Arrow)) return f_imply(f, imply_level());  // right assoc
    return f;
  }

  FormulaPtr or_level() {
    FormulaPtr f = and_level();
    while (accept(Tok::Bar)) f = f_or(f, and_level());
    return f;
  }

  FormulaPtr and_level() {
    FormulaPtr f = not_level();
    while (accept(Tok::Amp)) f = f_and(f, not_level());
    return f;
  }

  FormulaPtr not_level() {
    if (accept(Tok::Bang)) return f_not(not_level());
    if (accept(Tok::KwForall)) {
      std::string v = expect_ident();
      return f_forall(std::move(v), not_level());
    }
    if (accept(Tok::KwExists)) {
      std::string v = expect_ident();
      return f_exists(std::move(v), not_level());
    }
    if (at(Tok::Lt)) {
      ++idx_;
      GamePtr g = game();
      expect(Tok::Gt);
      return f_diamond(std::move(g), not_level());
    }
    if (at(Tok::LBracket)) {
      ++idx_;
      GamePtr g = game();
      expect(Tok::RBracket);
      return f_box(std::move(g), not_level());
    }
    return atom_formula();
  }

  FormulaPtr atom_formula() {
    if (accept(Tok::KwTrue)) return f_true();
    if (accept(Tok::KwFalse)) return f_false();
    if (at(Tok::LParen)) {
      // Either a parenthesized formula or a parenthesized term starting a
      // comparison; try the formula reading first and roll back on failure.
      size_t mark = idx_;
      ++idx_;
      try {
        FormulaPtr f = formula();
        expect(Tok::RParen);
        return f;
      } catch (const ParseError&) {
        idx_ = mark;
      }
    }
    TermPtr lhs = term();
    CmpOp op;
    if (accept(Tok::Lt)) op = CmpOp::Lt;
    else if (accept(Tok::Le)) op = CmpOp::Le;
    else if (accept(Tok::EqTok)) op = CmpOp::Eq;
    else if (accept(Tok::Ge)) op = CmpOp::Ge;
    else if (accept(Tok::Gt)) op = CmpOp::Gt;
    else fail({"'<'", "'<='", "'='", "'>='", "'>'"});
    TermPtr rhs = term();
    return f_cmp(op, std::move(lhs), std::move(rhs));
  }

  // ---- games ----

  GamePtr game() { return choice_level(); }

  GamePtr choice_level() {
    GamePtr g = seq_level();
    while (accept(Tok::ChoicePlus)) g = g_choice(g, seq_level());
    return g;
  }

  bool starts_primary_game() const {
    return at(Tok::Ident) || at(Tok::Quest) || at(Tok::LBrace);
  }

  GamePtr seq_level() {
    GamePtr g = postfix_game();
    for (;;) {
      while (accept(Tok::Semi)) {}
      if (!starts_primary_game()) return g;
      g = g_seq(g, postfix_game());
    }
  }

  GamePtr postfix_game() {
    GamePtr g = primary_game();
    for (;;) {
      // Postfix operators may follow the statement's terminating semicolon,
      // as in `x := *;^@`.
      size_t mark = idx_;
      while (accept(Tok::Semi)) {}
      if (accept(Tok::Star)) { g = g_repeat(g); continue; }
      if (accept(Tok::DualAt)) { g = g_dual(g); continue; }
      idx_ = mark;
      return g;
    }
  }

  GamePtr primary_game() {
    if (at(Tok::Ident)) {
      std::string var = cur().text;
      ++idx_;
      expect(Tok::Assign);
      if (accept(Tok::Star)) {
        expect(Tok::Semi);
        return g_assign_any(std::move(var));
      }
      TermPtr rhs = term();
      expect(Tok::Semi);
      return g_assign(std::move(var), std::move(rhs));
    }
    if (accept(Tok::Quest)) {
      FormulaPtr cond = formula();
      expect(Tok::Semi);
      return g_test(std::move(cond));
    }
    if (accept(Tok::LBrace)) {
      if (at(Tok::Ident) && ahead(1).kind == Tok::Prime) return ode_rest();
      GamePtr g = game();
      expect(Tok::RBrace);
      return g;
    }
    fail({"assignment", "'?'", "'{'"});
  }

  // Called just after consuming '{' when the contents are an ODE.
  GamePtr ode_rest() {
    std::vector<OdeEquation> eqs;
    for (;;) {
      std::string var = expect_ident();
      expect(Tok::Prime);
      expect(Tok::EqTok);
      eqs.push_back(OdeEquation{std::move(var), term()});
      if (accept(Tok::Comma)) continue;
      break;
    }
    FormulaPtr domain;
    if (accept(Tok::Amp)) domain = formula();
    expect(Tok::RBrace);
    return g_ode(std::move(eqs), std::move(domain));
  }
};

}  // namespace

GamePtr parse_game(const std::string& text) { return Parser(text).game_all(); }
FormulaPtr parse_formula(const std::string& text) { return Parser(text).formula_all(); }
TermPtr parse_term(const std::string& text) { return Parser(text).term_all(); }

}  // namespace dgl
