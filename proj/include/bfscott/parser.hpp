#pragma once

// Recursive-descent reader for the expression grammar
//
//   expr     := term ("+" term)* | ""
//   term     := block | block "*" NAT | "(" expr ")" ("*" NAT)?
//   block    := "1_" NAT | "eta_" NAT | "sh(" NAT ("," NAT)* ")"
//             | "omega[" colorseq ";" colorseq "]"
//   colorseq := "" | NAT ("," NAT)*
//
// plus the bracketed finite orders "[0,1,0]" and the cut descriptor text of
// to_string(CutDescriptor).

#include <cctype>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "finite_oracle.hpp"
#include "order_algebra.hpp"

namespace bfscott {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error("parse error at byte " + std::to_string(offset) + ": " + what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

inline constexpr Color kMaxColor = 127;
inline constexpr std::size_t kMaxBlocks = 100000;

namespace detail {

class ExprReader {
 public:
  explicit ExprReader(std::string_view s) : s_(s) {}

  OrderExpr top() {
    skip();
    if (i_ == s_.size()) return {};
    OrderExpr e = sum();
    skip();
    if (i_ != s_.size()) {
      if (s_[i_] == '*' || s_[i_] == '.') throw ParseError("outside supported block algebra: order product", i_);
      throw ParseError(std::string("unexpected '") + s_[i_] + "'", i_);
    }
    return e;
  }

 private:
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }

  bool peek(char c) {
    skip();
    return i_ < s_.size() && s_[i_] == c;
  }

  void expect(char c) {
    if (!peek(c)) throw ParseError(std::string("expected '") + c + "'", i_);
    ++i_;
  }

  bool keyword(std::string_view k) {
    skip();
    if (s_.substr(i_, k.size()) != k) return false;
    i_ += k.size();
    return true;
  }

  std::size_t nat() {
    skip();
    const std::size_t b = i_;
    std::size_t v = 0;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
      v = v * 10 + static_cast<std::size_t>(s_[i_] - '0');
      if (v > 1000000000) throw ParseError("number too large", b);
      ++i_;
    }
    if (b == i_) throw ParseError("expected a number", b);
    return v;
  }

  Color color() {
    skip();
    const std::size_t at = i_;
    const std::size_t v = nat();
    if (v > kMaxColor) throw ParseError("color index above " + std::to_string(kMaxColor), at);
    return static_cast<Color>(v);
  }

  ColorSeq colorseq(char stop) {
    ColorSeq out;
    if (peek(stop)) return out;
    out.push_back(color());
    while (peek(',')) {
      ++i_;
      out.push_back(color());
    }
    return out;
  }

  OrderExpr sum() {
    OrderExpr e = term();
    while (peek('+')) {
      ++i_;
      e = e + term();
      if (e.size() > kMaxBlocks) throw ParseError("expression too large", i_);
    }
    return e;
  }

  // "*" NAT, if present
  std::size_t repetition() {
    if (!peek('*')) return 1;
    ++i_;
    skip();
    const std::size_t at = i_;
    if (i_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[i_])))
      throw ParseError("outside supported block algebra: order product", at - 1);
    const std::size_t n = nat();
    if (n == 0) throw ParseError("repetition count must be at least 1", at);
    if (n > kMaxBlocks) throw ParseError("expression too large", at);
    return n;
  }

  OrderExpr term() {
    skip();
    OrderExpr e;
    if (peek('(')) {
      ++i_;
      skip();
      if (peek(')')) throw ParseError("empty parenthesized expression", i_);
      e = sum();
      expect(')');
    } else {
      e = expr({block()});
    }
    const std::size_t n = repetition();
    if (e.size() * n > kMaxBlocks) throw ParseError("expression too large", i_);
    return repeat(e, n);
  }

  Block block() {
    skip();
    const std::size_t at = i_;
    if (keyword("1_")) return point(color());
    if (keyword("eta_")) return eta(color());
    if (keyword("sh(")) {
      ColorSeq cs{color()};
      while (peek(',')) {
        ++i_;
        cs.push_back(color());
      }
      expect(')');
      return shuffle(cs);
    }
    if (keyword("omega[")) {
      ColorSeq prefix = colorseq(';');
      expect(';');
      const std::size_t pat = i_;
      ColorSeq period = colorseq(']');
      expect(']');
      if (period.empty()) throw ParseError("omega block needs a nonempty period", pat);
      return omega(std::move(prefix), std::move(period));
    }
    if (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_])))
      throw ParseError("outside supported block algebra: order product", at);
    if (i_ == s_.size()) throw ParseError("expected a block", at);
    throw ParseError("expected a block", at);
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

inline std::vector<std::size_t> number_list(std::string_view text, std::size_t base) {
  std::vector<std::size_t> out;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip();
  if (i == text.size()) return out;
  while (true) {
    skip();
    const std::size_t b = i;
    std::size_t v = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      v = v * 10 + static_cast<std::size_t>(text[i] - '0');
      if (v > 1000000000) throw ParseError("number too large", base + b);
      ++i;
    }
    if (b == i) throw ParseError("expected a number", base + b);
    out.push_back(v);
    skip();
    if (i == text.size()) return out;
    if (text[i] != ',') throw ParseError("expected ','", base + i);
    ++i;
  }
}

// "[a,b,...]" with optional brackets
inline std::vector<std::size_t> bracketed(std::string_view text) {
  std::size_t b = 0, e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  if (b < e && text[b] == '[') {
    if (text[e - 1] != ']') throw ParseError("expected ']'", e);
    return number_list(text.substr(b + 1, e - b - 2), b + 1);
  }
  return number_list(text.substr(b, e - b), b);
}

}  // namespace detail

inline OrderExpr parse_expr(std::string_view text) { return detail::ExprReader(text).top(); }

inline FiniteOrder parse_finite_order(std::string_view text) {
  FiniteOrder out;
  for (auto v : detail::bracketed(text)) {
    if (v > kMaxColor) throw ParseError("color index above " + std::to_string(kMaxColor), 0);
    out.colors.push_back(static_cast<Color>(v));
  }
  return out;
}

inline std::vector<Color> parse_colors(std::string_view text) { return parse_finite_order(text).colors; }

// Ascending positions, e.g. "[0,2]".
inline Tuple parse_tuple(std::string_view text) { return detail::bracketed(text); }

// One field per block separated by '|': "*" or "" for a point, colors for a
// shuffle, indices for an omega-word.
inline CutDescriptor parse_descriptor(std::string_view text, const OrderExpr& e) {
  std::vector<std::pair<std::string_view, std::size_t>> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '|') {
      fields.push_back({text.substr(start, i - start), start});
      start = i + 1;
    }
  }
  if (e.empty() && text.find_first_not_of(" \t") == std::string_view::npos) return {};
  if (fields.size() != e.size())
    throw ParseError("descriptor/expression mismatch: " + std::to_string(fields.size()) + " fields for " +
                         std::to_string(e.size()) + " blocks",
                     0);
  CutDescriptor d;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    auto [f, at] = fields[i];
    std::visit(overloaded{
                   [&](const PointBlock&) {
                     const auto b = f.find_first_not_of(" \t");
                     if (b == std::string_view::npos) {
                       d.specs.push_back(PointCut{false});
                     } else {
                       const auto e2 = f.find_last_not_of(" \t");
                       if (f.substr(b, e2 - b + 1) != "*") throw ParseError("point field must be '*' or empty", at + b);
                       d.specs.push_back(PointCut{true});
                     }
                   },
                   [&](const ShuffleBlock&) {
                     ColorSeq cs;
                     for (auto v : detail::number_list(f, at)) cs.push_back(static_cast<Color>(v));
                     d.specs.push_back(ShuffleCut{cs});
                   },
                   [&](const OmegaBlock&) { d.specs.push_back(OmegaCut{detail::number_list(f, at)}); },
               },
               e.blocks[i]);
  }
  require_cut(e, d);
  return d;
}

}  // namespace bfscott
