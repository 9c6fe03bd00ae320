#pragma once

// Concrete syntax. One lexer and recursive-descent parser covers program
// files, standalone tests/expressions, system files, solution maps and proof
// scripts. All errors carry a line:column position.
//
// Programs:   [tests a,b;] [actions p,q;] [outputs v;] <expr>
// Expressions (loosest to tightest, choices and ';' associate right):
//   e +{r} e  |  e +[t] e  |  e ; e  |  e*[t]  e*{r}  |
//   ident | ret ident | 0 | 1 | ( e ) | [ t ]
// Tests: 0 | 1 | ident | ~t | t & t | t | t | ( t )   (~ over & over |)
// Rationals: 7 | 3/4 | 0.25
// Systems:   system Name { x1 = rhs x2 = rhs ... } with rhs additionally
//            allowing "g . x" prefixes of indeterminates.
// Solutions: x1 = expr   x2 = expr ...
// Proofs:    system blocks and lines "N: e1 == e2 by <justification>".

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "probgkat/axioms.hpp"
#include "probgkat/proof.hpp"
#include "probgkat/syntax.hpp"
#include "probgkat/systems.hpp"

namespace probgkat {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) +
                           ": " + msg),
        line_(line),
        col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_, col_;
};

namespace detail {

enum class Tok : std::uint8_t {
  End, Ident, Number,
  KwTests, KwActions, KwOutputs, KwRet, KwSystem, KwBy,
  Semi, Comma, LParen, RParen, LBrace, RBrace, LBrack, RBrack,
  PlusBrace, PlusBrack, StarBrace, StarBrack,
  Tilde, Amp, Pipe, Dot, Colon, Eq, EqEq, Underscore, Slash,
};

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto error = [&](const std::string& msg) {
    throw ParseError(msg, line, col);
  };
  auto push = [&](Tok k, std::string text, int l, int c) {
    out.push_back({k, std::move(text), l, c});
  };
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };
  auto alpha = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    int tl = line, tc = col;
    if (alpha(c)) {
      std::size_t j = i;
      while (j < src.size() && (alpha(src[j]) || digit(src[j]))) ++j;
      std::string word(src.substr(i, j - i));
      advance(j - i);
      if (word == "_") push(Tok::Underscore, word, tl, tc);
      else if (word == "tests") push(Tok::KwTests, word, tl, tc);
      else if (word == "actions") push(Tok::KwActions, word, tl, tc);
      else if (word == "outputs") push(Tok::KwOutputs, word, tl, tc);
      else if (word == "ret") push(Tok::KwRet, word, tl, tc);
      else if (word == "system") push(Tok::KwSystem, word, tl, tc);
      else if (word == "by") push(Tok::KwBy, word, tl, tc);
      else push(Tok::Ident, word, tl, tc);
      continue;
    }
    if (digit(c)) {
      std::size_t j = i;
      while (j < src.size() && digit(src[j])) ++j;
      // A dot continues the number only when a digit follows ("0.25");
      // otherwise it is the prefixing operator.
      if (j + 1 < src.size() && src[j] == '.' && digit(src[j + 1])) {
        ++j;
        while (j < src.size() && digit(src[j])) ++j;
      }
      std::string text(src.substr(i, j - i));
      advance(j - i);
      push(Tok::Number, text, tl, tc);
      continue;
    }
    auto two = [&](Tok k) {
      push(k, std::string(src.substr(i, 2)), tl, tc);
      advance(2);
    };
    auto one = [&](Tok k) {
      push(k, std::string(1, c), tl, tc);
      advance(1);
    };
    switch (c) {
      case ';': one(Tok::Semi); break;
      case ',': one(Tok::Comma); break;
      case '(': one(Tok::LParen); break;
      case ')': one(Tok::RParen); break;
      case '{': one(Tok::LBrace); break;
      case '}': one(Tok::RBrace); break;
      case '[': one(Tok::LBrack); break;
      case ']': one(Tok::RBrack); break;
      case '~': one(Tok::Tilde); break;
      case '&': one(Tok::Amp); break;
      case '|': one(Tok::Pipe); break;
      case '.': one(Tok::Dot); break;
      case ':': one(Tok::Colon); break;
      case '/': one(Tok::Slash); break;
      case '=':
        if (i + 1 < src.size() && src[i + 1] == '=') two(Tok::EqEq);
        else one(Tok::Eq);
        break;
      case '+':
        if (i + 1 < src.size() && src[i + 1] == '{') two(Tok::PlusBrace);
        else if (i + 1 < src.size() && src[i + 1] == '[') two(Tok::PlusBrack);
        else error("expected '{' or '[' after '+'");
        break;
      case '*':
        if (i + 1 < src.size() && src[i + 1] == '{') two(Tok::StarBrace);
        else if (i + 1 < src.size() && src[i + 1] == '[') two(Tok::StarBrack);
        else error("expected '{' or '[' after '*'");
        break;
      default:
        error(std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

}  // namespace detail

// A named solution candidate, one closed expression per indeterminate.
struct SolutionMap {
  Alphabet alphabet;
  std::vector<std::string> names;
  std::vector<ExprPtr> exprs;

  int find(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return static_cast<int>(i);
    return -1;
  }
};

class Parser {
 public:
  explicit Parser(std::string_view text, unsigned max_tests = kDefaultMaxTests)
      : tokens_(detail::lex(text)), max_tests_(max_tests) {}

  // decls expr EOF
  Program parse_program() {
    parse_decls();
    ExprPtr e = parse_expr(false);
    expect_end();
    return {alphabet_, e};
  }

  // decls ("system" name? "{" assignments "}") EOF
  SalomaaSystem parse_system_file() {
    parse_decls();
    if (peek().kind != detail::Tok::KwSystem)
      fail("expected a 'system' block");
    advance();
    if (peek().kind == detail::Tok::Ident) advance();  // optional name
    SalomaaSystem sys = parse_system_block();
    expect_end();
    return sys;
  }

  // decls (name "=" expr)* EOF
  SolutionMap parse_solution_file() {
    parse_decls();
    SolutionMap map;
    map.alphabet = alphabet_;
    while (peek().kind != detail::Tok::End) {
      const detail::Token& t = expect(detail::Tok::Ident, "a name");
      if (map.find(t.text) >= 0)
        throw ParseError("'" + t.text + "' defined twice", t.line, t.col);
      expect(detail::Tok::Eq, "'='");
      map.names.push_back(t.text);
      map.exprs.push_back(parse_expr(false));
    }
    return map;
  }

  // decls (system block | proof line)* EOF
  ProofScript parse_proof_script() {
    parse_decls();
    ProofScript script;
    script.alphabet = alphabet_;
    while (peek().kind != detail::Tok::End) {
      if (peek().kind == detail::Tok::KwSystem) {
        advance();
        const detail::Token& name = expect(detail::Tok::Ident, "a system name");
        if (script.systems.count(name.text))
          throw ParseError("system '" + name.text + "' defined twice",
                           name.line, name.col);
        script.systems.emplace(name.text, parse_system_block());
      } else {
        script.lines.push_back(parse_proof_line());
      }
    }
    return script;
  }

  // Entry points for fragments over an existing alphabet.
  static TestPtr parse_test_text(const Alphabet& alph, std::string_view text,
                                 unsigned max_tests = kDefaultMaxTests) {
    Parser p(text, max_tests);
    p.alphabet_ = alph;
    TestPtr t = p.parse_test();
    p.expect_end();
    return t;
  }
  static ExprPtr parse_expr_text(const Alphabet& alph, std::string_view text,
                                 bool allow_hole = false,
                                 unsigned max_tests = kDefaultMaxTests) {
    Parser p(text, max_tests);
    p.alphabet_ = alph;
    ExprPtr e = p.parse_expr(allow_hole);
    p.expect_end();
    return e;
  }

 private:
  std::vector<detail::Token> tokens_;
  std::size_t pos_ = 0;
  Alphabet alphabet_;
  unsigned max_tests_;
  const std::vector<std::string>* sys_vars_ = nullptr;

  const detail::Token& peek(int ahead = 0) const {
    std::size_t j = pos_ + ahead;
    return j < tokens_.size() ? tokens_[j] : tokens_.back();
  }
  const detail::Token& advance() { return tokens_[pos_++]; }
  [[noreturn]] void fail(const std::string& msg) const {
    const detail::Token& t = peek();
    throw ParseError(msg + (t.kind == detail::Tok::End
                                ? " (found end of input)"
                                : " (found '" + t.text + "')"),
                     t.line, t.col);
  }
  const detail::Token& expect(detail::Tok k, const std::string& what) {
    if (peek().kind != k) fail("expected " + what);
    return advance();
  }
  void expect_end() {
    if (peek().kind != detail::Tok::End) fail("expected end of input");
  }

  // ---- declarations ----

  void parse_decls() {
    auto idlist = [&](std::vector<std::string>& into) {
      while (true) {
        const detail::Token& t = expect(detail::Tok::Ident, "an identifier");
        into.push_back(t.text);
        if (peek().kind != detail::Tok::Comma) break;
        advance();
      }
      expect(detail::Tok::Semi, "';'");
    };
    if (peek().kind == detail::Tok::KwTests) {
      advance();
      idlist(alphabet_.tests);
    }
    if (peek().kind == detail::Tok::KwActions) {
      advance();
      idlist(alphabet_.actions);
    }
    if (peek().kind == detail::Tok::KwOutputs) {
      advance();
      idlist(alphabet_.outputs);
    }
    if (peek().kind == detail::Tok::KwTests ||
        peek().kind == detail::Tok::KwActions ||
        peek().kind == detail::Tok::KwOutputs)
      fail("declarations must appear in the order tests, actions, outputs");
    const detail::Token& here = peek();
    try {
      alphabet_.validate();
      atom_count(alphabet_, max_tests_);  // enforce the atom limit
    } catch (const std::exception& ex) {
      throw ParseError(ex.what(), here.line, here.col);
    }
  }

  // ---- tests ----

  TestPtr parse_test() { return parse_test_or(); }

  TestPtr parse_test_or() {
    TestPtr t = parse_test_and();
    while (peek().kind == detail::Tok::Pipe) {
      advance();
      t = t_or(t, parse_test_and());
    }
    return t;
  }
  TestPtr parse_test_and() {
    TestPtr t = parse_test_unary();
    while (peek().kind == detail::Tok::Amp) {
      advance();
      t = t_and(t, parse_test_unary());
    }
    return t;
  }
  TestPtr parse_test_unary() {
    if (peek().kind == detail::Tok::Tilde) {
      advance();
      return t_not(parse_test_unary());
    }
    return parse_test_primary();
  }
  TestPtr parse_test_primary() {
    const detail::Token& t = peek();
    switch (t.kind) {
      case detail::Tok::Number:
        if (t.text == "0") return advance(), t_zero();
        if (t.text == "1") return advance(), t_one();
        fail("a test may only use the constants 0 and 1");
      case detail::Tok::Ident: {
        int j = alphabet_.find_test(t.text);
        if (j < 0) fail("'" + t.text + "' is not a declared test");
        advance();
        return t_var(j);
      }
      case detail::Tok::LParen: {
        advance();
        TestPtr inner = parse_test_or();
        expect(detail::Tok::RParen, "')'");
        return inner;
      }
      default:
        fail("expected a test");
    }
  }

  // ---- rationals ----

  Rat parse_rat() {
    const detail::Token& n = expect(detail::Tok::Number, "a rational");
    std::string text = n.text;
    if (peek().kind == detail::Tok::Slash) {
      advance();
      const detail::Token& d = expect(detail::Tok::Number, "a denominator");
      if (d.text.find('.') != std::string::npos)
        throw ParseError("denominator must be an integer", d.line, d.col);
      text += "/" + d.text;
    }
    try {
      return rat_from_string(text);
    } catch (const std::invalid_argument& ex) {
      throw ParseError(ex.what(), n.line, n.col);
    }
  }

  Rat parse_probability() {
    const detail::Token& here = peek();
    Rat r = parse_rat();
    if (!is_probability(r))
      throw ParseError("probability " + rat_to_string(r) + " is not in [0,1]",
                       here.line, here.col);
    return r;
  }

  // ---- expressions ----

  ExprPtr parse_expr(bool allow_hole) { return parse_pexpr(allow_hole); }

  ExprPtr parse_pexpr(bool allow_hole) {
    ExprPtr a = parse_gexpr(allow_hole);
    if (peek().kind == detail::Tok::PlusBrace) {
      advance();
      Rat r = parse_probability();
      expect(detail::Tok::RBrace, "'}'");
      return e_pch(a, r, parse_pexpr(allow_hole));
    }
    return a;
  }
  ExprPtr parse_gexpr(bool allow_hole) {
    ExprPtr a = parse_sexpr(allow_hole);
    if (peek().kind == detail::Tok::PlusBrack) {
      advance();
      TestPtr guard = parse_test();
      expect(detail::Tok::RBrack, "']'");
      return e_gch(a, guard, parse_gexpr(allow_hole));
    }
    return a;
  }
  ExprPtr parse_sexpr(bool allow_hole) {
    ExprPtr a = parse_postfix(allow_hole);
    if (peek().kind == detail::Tok::Semi) {
      advance();
      return e_seq(a, parse_sexpr(allow_hole));
    }
    return a;
  }
  ExprPtr parse_postfix(bool allow_hole) {
    ExprPtr a = parse_primary(allow_hole);
    while (true) {
      if (peek().kind == detail::Tok::StarBrack) {
        advance();
        TestPtr guard = parse_test();
        expect(detail::Tok::RBrack, "']'");
        a = e_gloop(a, guard);
      } else if (peek().kind == detail::Tok::StarBrace) {
        advance();
        Rat r = parse_probability();
        expect(detail::Tok::RBrace, "'}'");
        a = e_ploop(a, r);
      } else {
        return a;
      }
    }
  }
  ExprPtr parse_primary(bool allow_hole) {
    const detail::Token& t = peek();
    switch (t.kind) {
      case detail::Tok::Number:
        if (t.text == "0") return advance(), e_zero();
        if (t.text == "1") return advance(), e_one();
        fail("only 0 and 1 may appear as expressions");
      case detail::Tok::KwRet: {
        advance();
        const detail::Token& v = expect(detail::Tok::Ident, "an output name");
        int j = alphabet_.find_output(v.text);
        if (j < 0)
          throw ParseError("'" + v.text + "' is not a declared output", v.line,
                           v.col);
        return e_ret(j);
      }
      case detail::Tok::Ident: {
        if (int j = alphabet_.find_test(t.text); j >= 0)
          return advance(), e_test(t_var(j));
        if (int j = alphabet_.find_action(t.text); j >= 0)
          return advance(), e_act(j);
        if (alphabet_.find_output(t.text) >= 0)
          fail("output '" + t.text + "' must be written 'ret " + t.text + "'");
        if (sys_vars_)
          for (const auto& v : *sys_vars_)
            if (v == t.text)
              fail("indeterminate '" + t.text +
                   "' must be prefixed ('g . " + t.text + "')");
        fail("undeclared identifier '" + t.text + "'");
      }
      case detail::Tok::LParen: {
        advance();
        ExprPtr inner = parse_pexpr(allow_hole);
        expect(detail::Tok::RParen, "')'");
        return inner;
      }
      case detail::Tok::LBrack: {
        advance();
        TestPtr inner = parse_test();
        expect(detail::Tok::RBrack, "']'");
        return e_test(inner);
      }
      case detail::Tok::Underscore:
        if (allow_hole) return advance(), e_hole();
        fail("'_' is only allowed in congruence contexts");
      default:
        fail("expected an expression");
    }
  }

  // ---- system right-hand sides ----
  //
  // Parsed like expressions, but each fragment carries up to two readings:
  // a closed expression (available when no indeterminate occurs) and a
  // systerm (available once a choice operator was seen).  Sequencing, loops
  // and prefixes require the closed reading; choice operators keep the
  // systerm structure, so printed right-hand sides parse back unchanged.

  struct SysFrag {
    ExprPtr closed;  // at least one of the two is set
    SysPtr open;
  };

  static SysPtr as_open(const SysFrag& f) {
    return f.open ? f.open : s_closed(f.closed);
  }

  // Convex-sum children may not be guarded choices at the systerm level; an
  // all-closed guarded choice is admitted as an opaque closed leaf instead.
  static SysPtr as_pch_child(const SysFrag& f) {
    if (f.open && f.open->k == SKind::GChoice && f.closed)
      return s_closed(f.closed);
    return as_open(f);
  }

  SysPtr parse_system_rhs() { return as_open(parse_sys_pexpr()); }

  SysFrag parse_sys_pexpr() {
    SysFrag a = parse_sys_gexpr();
    if (peek().kind == detail::Tok::PlusBrace) {
      const detail::Token& at = peek();
      advance();
      Rat r = parse_probability();
      expect(detail::Tok::RBrace, "'}'");
      SysFrag b = parse_sys_pexpr();
      SysFrag out;
      try {
        out.open = s_pch(as_pch_child(a), r, as_pch_child(b));
      } catch (const std::invalid_argument& ex) {
        throw ParseError(ex.what(), at.line, at.col);
      }
      if (a.closed && b.closed) out.closed = e_pch(a.closed, r, b.closed);
      return out;
    }
    return a;
  }
  SysFrag parse_sys_gexpr() {
    SysFrag a = parse_sys_sexpr();
    if (peek().kind == detail::Tok::PlusBrack) {
      advance();
      TestPtr guard = parse_test();
      expect(detail::Tok::RBrack, "']'");
      SysFrag b = parse_sys_gexpr();
      SysFrag out;
      out.open = s_gch(as_open(a), guard, as_open(b));
      if (a.closed && b.closed) out.closed = e_gch(a.closed, guard, b.closed);
      return out;
    }
    return a;
  }
  SysFrag parse_sys_sexpr() {
    SysFrag a = parse_sys_postfix();
    if (peek().kind == detail::Tok::Semi) {
      const detail::Token& at = peek();
      advance();
      SysFrag b = parse_sys_sexpr();
      if (!a.closed || !b.closed)
        throw ParseError(
            "sequencing may not involve indeterminates in a system", at.line,
            at.col);
      return {e_seq(a.closed, b.closed), nullptr};
    }
    return a;
  }
  SysFrag parse_sys_postfix() {
    const detail::Token& start = peek();
    SysFrag a = parse_sys_primary();
    while (peek().kind == detail::Tok::StarBrack ||
           peek().kind == detail::Tok::StarBrace) {
      if (!a.closed)
        throw ParseError("loops may not involve indeterminates in a system",
                         peek().line, peek().col);
      if (advance().kind == detail::Tok::StarBrack) {
        TestPtr guard = parse_test();
        expect(detail::Tok::RBrack, "']'");
        a = {e_gloop(a.closed, guard), nullptr};
      } else {
        Rat r = parse_probability();
        expect(detail::Tok::RBrace, "'}'");
        a = {e_ploop(a.closed, r), nullptr};
      }
    }
    if (peek().kind == detail::Tok::Dot) {
      advance();
      if (!a.closed)
        throw ParseError("the prefix of an indeterminate must be closed",
                         start.line, start.col);
      const detail::Token& v = expect(detail::Tok::Ident, "an indeterminate");
      int j = -1;
      if (sys_vars_)
        for (std::size_t k = 0; k < sys_vars_->size(); ++k)
          if ((*sys_vars_)[k] == v.text) j = static_cast<int>(k);
      if (j < 0)
        throw ParseError("'" + v.text + "' is not an indeterminate", v.line,
                         v.col);
      return {nullptr, s_prefixed(a.closed, j)};
    }
    return a;
  }
  SysFrag parse_sys_primary() {
    if (peek().kind == detail::Tok::LParen) {
      advance();
      SysFrag inner = parse_sys_pexpr();
      expect(detail::Tok::RParen, "')'");
      return inner;
    }
    return {parse_primary(false), nullptr};
  }

  // "{ x1 = rhs x2 = rhs ... }" after the keyword and optional name.
  // Definitions need no separators, and right-hand sides may refer to
  // indeterminates defined later, so names are collected up front ('='
  // cannot occur inside a right-hand side).
  SalomaaSystem parse_system_block() {
    expect(detail::Tok::LBrace, "'{'");
    SalomaaSystem sys;
    sys.alphabet = alphabet_;
    int depth = 1;
    for (std::size_t j = pos_; j < tokens_.size(); ++j) {
      // "+{" and "*{" open a probability brace closed by a plain "}".
      if (tokens_[j].kind == detail::Tok::LBrace ||
          tokens_[j].kind == detail::Tok::PlusBrace ||
          tokens_[j].kind == detail::Tok::StarBrace)
        ++depth;
      if (tokens_[j].kind == detail::Tok::RBrace && --depth == 0) break;
      if (tokens_[j].kind == detail::Tok::Eq && depth == 1) {
        const detail::Token& name = tokens_[j - 1];
        if (name.kind != detail::Tok::Ident)
          throw ParseError("expected an indeterminate name before '='",
                           name.line, name.col);
        if (alphabet_.find_test(name.text) >= 0 ||
            alphabet_.find_action(name.text) >= 0 ||
            alphabet_.find_output(name.text) >= 0)
          throw ParseError("indeterminate '" + name.text +
                               "' collides with a declared symbol",
                           name.line, name.col);
        if (sys.find_var(name.text) >= 0)
          throw ParseError("indeterminate '" + name.text + "' defined twice",
                           name.line, name.col);
        sys.vars.push_back(name.text);
      }
    }
    if (sys.vars.empty()) {
      const detail::Token& here = peek();
      throw ParseError("a system needs at least one definition", here.line,
                       here.col);
    }
    const std::vector<std::string>* saved = sys_vars_;
    sys_vars_ = &sys.vars;
    sys.rhs.resize(sys.vars.size());
    for (std::size_t k = 0; k < sys.vars.size(); ++k) {
      const detail::Token& name = expect(detail::Tok::Ident, "an indeterminate");
      if (name.text != sys.vars[k])
        throw ParseError("definitions out of order: expected '" + sys.vars[k] +
                             "'",
                         name.line, name.col);
      expect(detail::Tok::Eq, "'='");
      sys.rhs[k] = parse_system_rhs();
    }
    sys_vars_ = saved;
    expect(detail::Tok::RBrace, "'}'");
    return sys;
  }

  // ---- proof lines ----

  int parse_line_ref() {
    const detail::Token& n = expect(detail::Tok::Number, "a line number");
    try {
      std::size_t used = 0;
      int v = std::stoi(n.text, &used);
      if (used != n.text.size() || v < 1) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw ParseError("bad line number '" + n.text + "'", n.line, n.col);
    }
  }

  std::vector<int> parse_ref_list() {
    expect(detail::Tok::LBrack, "'['");
    std::vector<int> refs;
    refs.push_back(parse_line_ref());
    while (peek().kind == detail::Tok::Comma) {
      advance();
      refs.push_back(parse_line_ref());
    }
    expect(detail::Tok::RBrack, "']'");
    return refs;
  }

  // "{ e = ..., b = ..., r = ... }"; the metavariable name fixes the sort.
  Bindings parse_bindings() {
    Bindings bs;
    expect(detail::Tok::LBrace, "'{'");
    while (peek().kind != detail::Tok::RBrace) {
      const detail::Token& name = expect(detail::Tok::Ident, "a metavariable");
      expect(detail::Tok::Eq, "'='");
      if (name.text == "e" || name.text == "f" || name.text == "g" ||
          name.text == "h") {
        if (bs.exprs.count(name.text))
          throw ParseError("metavariable '" + name.text + "' bound twice",
                           name.line, name.col);
        bs.exprs[name.text] = parse_expr(false);
      } else if (name.text == "b" || name.text == "c") {
        if (bs.tests.count(name.text))
          throw ParseError("metavariable '" + name.text + "' bound twice",
                           name.line, name.col);
        bs.tests[name.text] = parse_test();
      } else if (name.text == "r" || name.text == "s") {
        if (bs.rats.count(name.text))
          throw ParseError("metavariable '" + name.text + "' bound twice",
                           name.line, name.col);
        bs.rats[name.text] = parse_rat();
      } else if (name.text == "v") {
        const detail::Token& v = expect(detail::Tok::Ident, "an output name");
        int j = alphabet_.find_output(v.text);
        if (j < 0)
          throw ParseError("'" + v.text + "' is not a declared output", v.line,
                           v.col);
        bs.outputs[name.text] = j;
      } else {
        throw ParseError(
            "unknown metavariable '" + name.text +
                "' (expressions: e f g h, tests: b c, probabilities: r s, "
                "outputs: v)",
            name.line, name.col);
      }
      if (peek().kind == detail::Tok::Comma) advance();
    }
    advance();  // '}'
    return bs;
  }

  ProofLine parse_proof_line() {
    ProofLine ln;
    ln.number = parse_line_ref();
    expect(detail::Tok::Colon, "':'");
    ln.lhs = parse_expr(false);
    expect(detail::Tok::EqEq, "'=='");
    ln.rhs = parse_expr(false);
    expect(detail::Tok::KwBy, "'by'");
    const detail::Token& j = expect(detail::Tok::Ident, "a justification");
    if (j.text == "refl") {
      ln.just.kind = Justification::Kind::Refl;
    } else if (j.text == "sym") {
      ln.just.kind = Justification::Kind::Sym;
      ln.just.refs.push_back(parse_line_ref());
    } else if (j.text == "trans") {
      ln.just.kind = Justification::Kind::Trans;
      ln.just.refs.push_back(parse_line_ref());
      ln.just.refs.push_back(parse_line_ref());
    } else if (j.text == "cong") {
      ln.just.kind = Justification::Kind::Cong;
      ln.just.context = parse_expr(true);
      ln.just.refs.push_back(parse_line_ref());
    } else if (j.text == "ba") {
      ln.just.kind = Justification::Kind::Ba;
    } else if (j.text == "ua") {
      ln.just.kind = Justification::Kind::Ua;
      const detail::Token& s = expect(detail::Tok::Ident, "a system name");
      ln.just.system = s.text;
      ln.just.refs = parse_ref_list();
    } else if (auto id = axiom_from_name(j.text)) {
      ln.just.kind = Justification::Kind::Axiom;
      ln.just.axiom = *id;
      if (peek().kind == detail::Tok::LBrack) ln.just.refs = parse_ref_list();
      if (peek().kind == detail::Tok::LBrace)
        ln.just.bindings = parse_bindings();
    } else {
      throw ParseError("unknown justification '" + j.text + "'", j.line,
                       j.col);
    }
    return ln;
  }
};

// Convenience wrappers.
inline Program parse_program(std::string_view text,
                             unsigned max_tests = kDefaultMaxTests) {
  return Parser(text, max_tests).parse_program();
}
inline SalomaaSystem parse_system_file(std::string_view text,
                                       unsigned max_tests = kDefaultMaxTests) {
  return Parser(text, max_tests).parse_system_file();
}
inline SolutionMap parse_solution_file(std::string_view text,
                                       unsigned max_tests = kDefaultMaxTests) {
  return Parser(text, max_tests).parse_solution_file();
}
inline ProofScript parse_proof_script(std::string_view text,
                                      unsigned max_tests = kDefaultMaxTests) {
  return Parser(text, max_tests).parse_proof_script();
}
inline TestPtr parse_test_text(const Alphabet& alph, std::string_view text,
                               unsigned max_tests = kDefaultMaxTests) {
  return Parser::parse_test_text(alph, text, max_tests);
}
inline ExprPtr parse_expr_text(const Alphabet& alph, std::string_view text,
                               bool allow_hole = false,
                               unsigned max_tests = kDefaultMaxTests) {
  return Parser::parse_expr_text(alph, text, allow_hole, max_tests);
}

}  // namespace probgkat
