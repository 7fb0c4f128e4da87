#pragma once

// First-order formulas over {<=, P_i}: AST, prefix text form, finite model
// checking, quantifier-alternation levels and the Scott sentence emitters.
//
// Text form:
//   phi := "true" | "false" | "(le xI xJ)" | "(eq xI xJ)" | "(P<c> xI)"
//        | "(not phi)" | "(and phi*)" | "(or phi*)"
//        | "(forall xI phi)" | "(exists xI phi)"

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "finite_oracle.hpp"
#include "order_algebra.hpp"

namespace bfscott {

struct Formula {
  enum class Kind { True, False, Le, Eq, Color, Not, And, Or, Forall, Exists };

  Kind kind = Kind::True;
  unsigned x = 0;  // Le/Eq/Color first variable; bound variable of a quantifier
  unsigned y = 0;  // Le/Eq second variable
  Color color = 0;
  std::vector<Formula> kids;

  bool operator==(const Formula&) const = default;
};

// ---------------------------------------------------------------- builders

inline Formula node(Formula::Kind k, unsigned x = 0, unsigned y = 0, Color c = 0, std::vector<Formula> kids = {}) {
  Formula f;
  f.kind = k;
  f.x = x;
  f.y = y;
  f.color = c;
  f.kids = std::move(kids);
  return f;
}

inline Formula f_true() { return node(Formula::Kind::True); }
inline Formula f_false() { return node(Formula::Kind::False); }
inline Formula le(unsigned a, unsigned b) { return node(Formula::Kind::Le, a, b); }
inline Formula eq(unsigned a, unsigned b) { return node(Formula::Kind::Eq, a, b); }
inline Formula has_color(Color c, unsigned a) { return node(Formula::Kind::Color, a, 0, c); }
inline Formula f_not(Formula f) { return node(Formula::Kind::Not, 0, 0, 0, {std::move(f)}); }
inline Formula f_and(std::vector<Formula> fs) { return node(Formula::Kind::And, 0, 0, 0, std::move(fs)); }
inline Formula f_or(std::vector<Formula> fs) { return node(Formula::Kind::Or, 0, 0, 0, std::move(fs)); }
inline Formula forall(unsigned v, Formula f) { return node(Formula::Kind::Forall, v, 0, 0, {std::move(f)}); }
inline Formula exists(unsigned v, Formula f) { return node(Formula::Kind::Exists, v, 0, 0, {std::move(f)}); }
inline Formula implies(Formula a, Formula b) { return f_or({f_not(std::move(a)), std::move(b)}); }
inline Formula lt(unsigned a, unsigned b) { return f_and({le(a, b), f_not(eq(a, b))}); }

inline Formula forall(const std::vector<unsigned>& vs, Formula f) {
  for (auto it = vs.rbegin(); it != vs.rend(); ++it) f = forall(*it, std::move(f));
  return f;
}

inline Formula exists(const std::vector<unsigned>& vs, Formula f) {
  for (auto it = vs.rbegin(); it != vs.rend(); ++it) f = exists(*it, std::move(f));
  return f;
}

// ------------------------------------------------------------ text form

inline std::string to_string(const Formula& f) {
  using K = Formula::Kind;
  auto var = [](unsigned v) { return "x" + std::to_string(v); };
  switch (f.kind) {
    case K::True:
      return "true";
    case K::False:
      return "false";
    case K::Le:
      return "(le " + var(f.x) + " " + var(f.y) + ")";
    case K::Eq:
      return "(eq " + var(f.x) + " " + var(f.y) + ")";
    case K::Color:
      return "(P" + std::to_string(f.color) + " " + var(f.x) + ")";
    case K::Forall:
    case K::Exists:
      return std::string("(") + (f.kind == K::Forall ? "forall " : "exists ") + var(f.x) + " " +
             to_string(f.kids.front()) + ")";
    case K::Not:
    case K::And:
    case K::Or: {
      std::string out = f.kind == K::Not ? "(not" : f.kind == K::And ? "(and" : "(or";
      for (const auto& k : f.kids) out += " " + to_string(k);
      return out + ")";
    }
  }
  return "?";
}

class FormulaParseError : public std::runtime_error {
 public:
  FormulaParseError(const std::string& what, std::size_t offset)
      : std::runtime_error("formula parse error at byte " + std::to_string(offset) + ": " + what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

namespace detail {

class FormulaReader {
 public:
  explicit FormulaReader(std::string_view s) : s_(s) {}

  Formula top() {
    Formula f = formula();
    skip();
    if (i_ != s_.size()) throw FormulaParseError("trailing input", i_);
    return f;
  }

 private:
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }

  std::string word() {
    skip();
    const std::size_t b = i_;
    while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
    if (b == i_) throw FormulaParseError("expected a word", b);
    return std::string(s_.substr(b, i_ - b));
  }

  static bool number(std::string_view w, unsigned& out) {
    if (w.empty() || w.size() > 9 || !std::all_of(w.begin(), w.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      return false;
    out = static_cast<unsigned>(std::stoul(std::string(w)));
    return true;
  }

  unsigned variable() {
    skip();
    const std::size_t at = i_;
    const std::string w = word();
    unsigned v = 0;
    if (w.size() < 2 || w[0] != 'x' || !number(std::string_view(w).substr(1), v))
      throw FormulaParseError("expected a variable xN", at);
    return v;
  }

  void expect(char c) {
    skip();
    if (i_ >= s_.size() || s_[i_] != c) throw FormulaParseError(std::string("expected '") + c + "'", i_);
    ++i_;
  }

  Formula formula() {
    skip();
    if (i_ < s_.size() && s_[i_] != '(') {
      const std::size_t at = i_;
      const std::string w = word();
      if (w == "true") return f_true();
      if (w == "false") return f_false();
      throw FormulaParseError("unknown constant '" + w + "'", at);
    }
    expect('(');
    const std::size_t at = i_;
    const std::string head = word();
    Formula f;
    unsigned c = 0;
    if (head == "le" || head == "eq") {
      const unsigned a = variable(), b = variable();
      f = head == "le" ? le(a, b) : eq(a, b);
    } else if (head.size() > 1 && head[0] == 'P' && number(std::string_view(head).substr(1), c)) {
      f = has_color(c, variable());
    } else if (head == "forall" || head == "exists") {
      const unsigned v = variable();
      Formula body = formula();
      f = head == "forall" ? forall(v, std::move(body)) : exists(v, std::move(body));
    } else if (head == "not") {
      f = f_not(formula());
    } else if (head == "and" || head == "or") {
      std::vector<Formula> kids;
      skip();
      while (i_ < s_.size() && s_[i_] != ')') {
        kids.push_back(formula());
        skip();
      }
      f = head == "and" ? f_and(std::move(kids)) : f_or(std::move(kids));
    } else {
      throw FormulaParseError("unknown connective '" + head + "'", at);
    }
    expect(')');
    return f;
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

}  // namespace detail

inline Formula parse_formula(std::string_view text) { return detail::FormulaReader(text).top(); }

// ------------------------------------------------------------- inspection

inline std::set<unsigned> free_variables(const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind) {
    case K::True:
    case K::False:
      return {};
    case K::Le:
    case K::Eq:
      return {f.x, f.y};
    case K::Color:
      return {f.x};
    case K::Forall:
    case K::Exists: {
      auto s = free_variables(f.kids.front());
      s.erase(f.x);
      return s;
    }
    default: {
      std::set<unsigned> s;
      for (const auto& k : f.kids) s.merge(free_variables(k));
      return s;
    }
  }
}

inline bool is_sentence(const Formula& f) { return free_variables(f).empty(); }

inline unsigned quantifier_rank(const Formula& f) {
  unsigned r = 0;
  for (const auto& k : f.kids) r = std::max(r, quantifier_rank(k));
  if (f.kind == Formula::Kind::Forall || f.kind == Formula::Kind::Exists) ++r;
  return r;
}

// Least (sigma, pi) such that f is Sigma_sigma and Pi_pi; quantifier-free is (0, 0).
inline std::pair<unsigned, unsigned> levels(const Formula& f) {
  using K = Formula::Kind;
  unsigned s = 0, p = 0;
  switch (f.kind) {
    case K::True:
    case K::False:
    case K::Le:
    case K::Eq:
    case K::Color:
      return {0, 0};
    case K::Not: {
      auto [ks, kp] = levels(f.kids.front());
      return {kp, ks};
    }
    case K::And:
    case K::Or:
      for (const auto& k : f.kids) {
        auto [ks, kp] = levels(k);
        s = std::max(s, ks);
        p = std::max(p, kp);
      }
      break;
    case K::Exists: {
      auto [ks, kp] = levels(f.kids.front());
      s = std::max(1u, std::min(ks, kp + 1));
      p = s + 1;
      break;
    }
    case K::Forall: {
      auto [ks, kp] = levels(f.kids.front());
      p = std::max(1u, std::min(kp, ks + 1));
      s = p + 1;
      break;
    }
  }
  s = std::min(s, p + 1);
  p = std::min(p, s + 1);
  return {s, p};
}

inline unsigned sigma_level(const Formula& f) { return levels(f).first; }
inline unsigned pi_level(const Formula& f) { return levels(f).second; }

// A conjunction of a Sigma_n and a Pi_n formula.
inline bool is_d_sigma(const Formula& f, unsigned n) {
  auto in_n = [n](const Formula& g) { return sigma_level(g) <= n || pi_level(g) <= n; };
  if (in_n(f)) return true;
  if (f.kind != Formula::Kind::And) return false;
  return std::all_of(f.kids.begin(), f.kids.end(), in_n);
}

// ---------------------------------------------------------- model checking

namespace detail {

inline bool eval(const Formula& f, const FiniteOrder& m, std::map<unsigned, std::size_t>& env) {
  using K = Formula::Kind;
  auto at = [&](unsigned v) {
    auto it = env.find(v);
    if (it == env.end()) throw std::invalid_argument("unbound variable x" + std::to_string(v));
    return it->second;
  };
  switch (f.kind) {
    case K::True:
      return true;
    case K::False:
      return false;
    case K::Le:
      return at(f.x) <= at(f.y);
    case K::Eq:
      return at(f.x) == at(f.y);
    case K::Color:
      return m.colors[at(f.x)] == f.color;
    case K::Not:
      return !eval(f.kids.front(), m, env);
    case K::And:
      return std::all_of(f.kids.begin(), f.kids.end(), [&](const Formula& k) { return eval(k, m, env); });
    case K::Or:
      return std::any_of(f.kids.begin(), f.kids.end(), [&](const Formula& k) { return eval(k, m, env); });
    case K::Forall:
    case K::Exists: {
      const bool want = f.kind == K::Exists;
      auto saved = env.find(f.x) == env.end() ? std::nullopt : std::optional<std::size_t>(env[f.x]);
      bool result = !want;
      for (std::size_t i = 0; i < m.size(); ++i) {
        env[f.x] = i;
        if (eval(f.kids.front(), m, env) == want) {
          result = want;
          break;
        }
      }
      if (saved)
        env[f.x] = *saved;
      else
        env.erase(f.x);
      return result;
    }
  }
  return false;
}

}  // namespace detail

inline bool eval(const Formula& f, const FiniteOrder& m) {
  std::map<unsigned, std::size_t> env;
  return detail::eval(f, m, env);
}

// --------------------------------------------------------------- emitters

// d-Sigma_1: the existential diagram of F and a cap of |F| elements.
// The empty order gets the Pi_1 sentence forall x (x != x).
inline Formula emit_scott_sentence_finite(const FiniteOrder& f) {
  const unsigned n = static_cast<unsigned>(f.size());
  if (n == 0) return forall(0, f_not(eq(0, 0)));
  std::vector<unsigned> xs, ys;
  std::vector<Formula> diagram, pairs;
  for (unsigned i = 0; i < n; ++i) {
    xs.push_back(i);
    diagram.push_back(has_color(f.colors[i], i));
    if (i + 1 < n) diagram.push_back(lt(i, i + 1));
  }
  for (unsigned i = 0; i <= n; ++i) ys.push_back(n + i);
  for (unsigned i = 0; i <= n; ++i)
    for (unsigned j = i + 1; j <= n; ++j) pairs.push_back(eq(n + i, n + j));
  return f_and({exists(xs, f_and(std::move(diagram))), forall(ys, f_or(std::move(pairs)))});
}

// Pi_2 axioms whose countable models are the color shuffle Sh(S).
inline std::vector<Formula> emit_shuffle_axioms(const std::set<Color>& s) {
  if (s.empty()) throw std::invalid_argument("shuffle axioms need a nonempty color set");
  std::vector<Formula> out;
  out.push_back(forall({0, 1, 2}, f_and({
                                      le(0, 0),
                                      implies(f_and({le(0, 1), le(1, 0)}), eq(0, 1)),
                                      implies(f_and({le(0, 1), le(1, 2)}), le(0, 2)),
                                      f_or({le(0, 1), le(1, 0)}),
                                  })));
  out.push_back(forall({0, 1}, implies(lt(0, 1), exists(2, f_and({lt(0, 2), lt(2, 1)})))));
  out.push_back(f_and({exists(3, eq(3, 3)), forall(0, exists({1, 2}, f_and({lt(1, 0), lt(0, 2)})))}));
  std::vector<Formula> some;
  for (Color c : s) some.push_back(has_color(c, 0));
  out.push_back(forall(0, f_or(std::move(some))));
  for (Color c : s)
    out.push_back(forall({0, 1}, implies(lt(0, 1), exists(2, f_and({lt(0, 2), lt(2, 1), has_color(c, 2)})))));
  return out;
}

}  // namespace bfscott
