#pragma once

// Block term algebra for finitely colored linear orderings: points 1_c,
// color shuffles Sh(S) (eta_c is Sh({c})) and eventually periodic omega-words.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace bfscott {

using Color = std::uint32_t;
using ColorSeq = std::vector<Color>;

struct PointBlock {
  Color color = 0;
  auto operator<=>(const PointBlock&) const = default;
};

struct ShuffleBlock {
  std::vector<Color> colors;  // sorted, unique, nonempty
  bool contains(Color c) const { return std::binary_search(colors.begin(), colors.end(), c); }
  auto operator<=>(const ShuffleBlock&) const = default;
};

// The order type omega colored by prefix . period^omega.
struct OmegaBlock {
  ColorSeq prefix;
  ColorSeq period;  // nonempty

  Color at(std::size_t i) const {
    return i < prefix.size() ? prefix[i] : period[(i - prefix.size()) % period.size()];
  }
  auto operator<=>(const OmegaBlock&) const = default;
};

using Block = std::variant<PointBlock, ShuffleBlock, OmegaBlock>;

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

struct OrderExpr {
  std::vector<Block> blocks;

  bool empty() const { return blocks.empty(); }
  std::size_t size() const { return blocks.size(); }
  auto operator<=>(const OrderExpr&) const = default;
  bool operator==(const OrderExpr&) const = default;
};

// ---------------------------------------------------------------------------
// construction

inline Block point(Color c) { return PointBlock{c}; }

inline Block shuffle(std::vector<Color> colors) {
  std::sort(colors.begin(), colors.end());
  colors.erase(std::unique(colors.begin(), colors.end()), colors.end());
  if (colors.empty()) throw std::invalid_argument("shuffle block needs at least one color");
  return ShuffleBlock{std::move(colors)};
}

inline Block eta(Color c) { return ShuffleBlock{{c}}; }

inline Block omega(ColorSeq prefix, ColorSeq period) {
  if (period.empty()) throw std::invalid_argument("omega block needs a nonempty period");
  return OmegaBlock{std::move(prefix), std::move(period)};
}

inline OrderExpr expr(std::initializer_list<Block> blocks) { return OrderExpr{std::vector<Block>(blocks)}; }

inline OrderExpr operator+(OrderExpr a, const OrderExpr& b) {
  a.blocks.insert(a.blocks.end(), b.blocks.begin(), b.blocks.end());
  return a;
}

// n-fold concatenation, n >= 1
inline OrderExpr repeat(const OrderExpr& e, std::size_t n) {
  if (n == 0) throw std::invalid_argument("repetition count must be at least 1");
  OrderExpr out;
  for (std::size_t i = 0; i < n; ++i) out = out + e;
  return out;
}

// Point-block encoding of an explicit finite colored order.
inline OrderExpr from_colors(const ColorSeq& colors) {
  OrderExpr e;
  for (Color c : colors) e.blocks.push_back(PointBlock{c});
  return e;
}

inline bool is_finite(const OrderExpr& e) {
  return std::all_of(e.blocks.begin(), e.blocks.end(),
                     [](const Block& b) { return std::holds_alternative<PointBlock>(b); });
}

inline bool has_omega(const OrderExpr& e) {
  return std::any_of(e.blocks.begin(), e.blocks.end(),
                     [](const Block& b) { return std::holds_alternative<OmegaBlock>(b); });
}

// Colors of a Point-only expression; throws on shuffles or omega-words.
inline ColorSeq finite_colors(const OrderExpr& e) {
  ColorSeq out;
  for (const auto& b : e.blocks) {
    const auto* p = std::get_if<PointBlock>(&b);
    if (!p) throw std::invalid_argument("expression is not finite");
    out.push_back(p->color);
  }
  return out;
}

inline std::set<Color> block_colors(const Block& b) {
  return std::visit(overloaded{
                        [](const PointBlock& p) { return std::set<Color>{p.color}; },
                        [](const ShuffleBlock& s) { return std::set<Color>(s.colors.begin(), s.colors.end()); },
                        [](const OmegaBlock& w) {
                          std::set<Color> out(w.prefix.begin(), w.prefix.end());
                          out.insert(w.period.begin(), w.period.end());
                          return out;
                        },
                    },
                    b);
}

inline std::set<Color> colors_used(const OrderExpr& e) {
  std::set<Color> out;
  for (const auto& b : e.blocks) out.merge(block_colors(b));
  return out;
}

// ---------------------------------------------------------------------------
// normalization

namespace detail {

inline void make_primitive(ColorSeq& period) {
  const std::size_t n = period.size();
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p != 0) continue;
    bool periodic = true;
    for (std::size_t i = p; i < n && periodic; ++i) periodic = period[i] == period[i % p];
    if (periodic) {
      period.resize(p);
      return;
    }
  }
}

inline OmegaBlock canonical_omega(OmegaBlock w) {
  make_primitive(w.period);
  while (!w.prefix.empty() && w.prefix.back() == w.period.back()) {
    w.prefix.pop_back();
    std::rotate(w.period.rbegin(), w.period.rbegin() + 1, w.period.rend());
  }
  return w;
}

inline bool equal_shuffles(const Block& a, const Block& b) {
  const auto* x = std::get_if<ShuffleBlock>(&a);
  const auto* y = std::get_if<ShuffleBlock>(&b);
  return x && y && *x == *y;
}

// One rewrite at the top of the stack; returns false at a local fixpoint.
inline bool reduce_tail(std::vector<Block>& st) {
  const std::size_t n = st.size();
  if (n >= 2) {
    if (auto* w = std::get_if<OmegaBlock>(&st[n - 1])) {
      if (const auto* p = std::get_if<PointBlock>(&st[n - 2])) {
        OmegaBlock merged = *w;
        merged.prefix.insert(merged.prefix.begin(), p->color);
        st.pop_back();
        st.back() = canonical_omega(std::move(merged));
        return true;
      }
    }
    if (equal_shuffles(st[n - 1], st[n - 2])) {
      st.pop_back();
      return true;
    }
  }
  if (n >= 3 && equal_shuffles(st[n - 1], st[n - 3])) {
    if (const auto* p = std::get_if<PointBlock>(&st[n - 2])) {
      if (std::get<ShuffleBlock>(st[n - 1]).contains(p->color)) {
        st.resize(n - 2);
        return true;
      }
    }
  }
  return false;
}

}  // namespace detail

// Rewrites to fixpoint:
//   Sh(S) + Sh(S)         -> Sh(S)
//   Sh(S) + 1_c + Sh(S)   -> Sh(S)            (c in S; the sum is again dense with every color of S dense)
//   1_c + omega[p;q]      -> omega[c,p;q]
//   omega[p;q]            -> primitive period, shortest prefix
inline OrderExpr normalize(const OrderExpr& e) {
  std::vector<Block> st;
  st.reserve(e.blocks.size());
  for (const auto& b : e.blocks) {
    if (const auto* w = std::get_if<OmegaBlock>(&b)) {
      if (w->period.empty()) throw std::invalid_argument("omega block needs a nonempty period");
      st.push_back(detail::canonical_omega(*w));
    } else if (const auto* s = std::get_if<ShuffleBlock>(&b)) {
      if (s->colors.empty()) throw std::invalid_argument("shuffle block needs at least one color");
      st.push_back(b);
    } else {
      st.push_back(b);
    }
    while (detail::reduce_tail(st)) {
    }
  }
  return OrderExpr{std::move(st)};
}

// ---------------------------------------------------------------------------
// cut descriptors

struct PointCut {
  bool selected = false;
  auto operator<=>(const PointCut&) const = default;
};

// colors of the selected elements, in ascending order position
struct ShuffleCut {
  ColorSeq colors;
  auto operator<=>(const ShuffleCut&) const = default;
};

// positions of the selected elements, ascending
struct OmegaCut {
  std::vector<std::size_t> indices;
  auto operator<=>(const OmegaCut&) const = default;
};

using CutSpec = std::variant<PointCut, ShuffleCut, OmegaCut>;

struct CutDescriptor {
  std::vector<CutSpec> specs;

  std::size_t selected_count() const {
    std::size_t n = 0;
    for (const auto& s : specs) {
      n += std::visit(overloaded{
                          [](const PointCut& p) -> std::size_t { return p.selected ? 1 : 0; },
                          [](const ShuffleCut& c) -> std::size_t { return c.colors.size(); },
                          [](const OmegaCut& c) -> std::size_t { return c.indices.size(); },
                      },
                      s);
    }
    return n;
  }
  auto operator<=>(const CutDescriptor&) const = default;
  bool operator==(const CutDescriptor&) const = default;
};

inline CutDescriptor empty_cut(const OrderExpr& e) {
  CutDescriptor d;
  for (const auto& b : e.blocks) {
    d.specs.push_back(std::visit(overloaded{
                                     [](const PointBlock&) -> CutSpec { return PointCut{}; },
                                     [](const ShuffleBlock&) -> CutSpec { return ShuffleCut{}; },
                                     [](const OmegaBlock&) -> CutSpec { return OmegaCut{}; },
                                 },
                                 b));
  }
  return d;
}

inline bool cuts(const OrderExpr& e, const CutDescriptor& d) {
  if (d.specs.size() != e.blocks.size()) return false;
  for (std::size_t i = 0; i < d.specs.size(); ++i) {
    const Block& b = e.blocks[i];
    const CutSpec& s = d.specs[i];
    bool ok = std::visit(overloaded{
                             [&](const PointBlock&) { return std::holds_alternative<PointCut>(s); },
                             [&](const ShuffleBlock& sh) {
                               const auto* c = std::get_if<ShuffleCut>(&s);
                               return c && std::all_of(c->colors.begin(), c->colors.end(),
                                                       [&](Color x) { return sh.contains(x); });
                             },
                             [&](const OmegaBlock&) {
                               const auto* c = std::get_if<OmegaCut>(&s);
                               return c && std::adjacent_find(c->indices.begin(), c->indices.end(),
                                                              std::greater_equal<>()) == c->indices.end();
                             },
                         },
                         b);
    if (!ok) return false;
  }
  return true;
}

inline void require_cut(const OrderExpr& e, const CutDescriptor& d) {
  if (!cuts(e, d)) throw std::invalid_argument("descriptor/expression mismatch");
}

inline ColorSeq selected_colors(const OrderExpr& e, const CutDescriptor& d) {
  require_cut(e, d);
  ColorSeq out;
  for (std::size_t i = 0; i < d.specs.size(); ++i) {
    std::visit(overloaded{
                   [&](const PointCut& p) {
                     if (p.selected) out.push_back(std::get<PointBlock>(e.blocks[i]).color);
                   },
                   [&](const ShuffleCut& c) { out.insert(out.end(), c.colors.begin(), c.colors.end()); },
                   [&](const OmegaCut& c) {
                     const auto& w = std::get<OmegaBlock>(e.blocks[i]);
                     for (auto j : c.indices) out.push_back(w.at(j));
                   },
               },
               d.specs[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// intervals

// Positions after `index` of an omega-word, as an omega-word.
inline OmegaBlock omega_suffix(const OmegaBlock& w, std::size_t index) {
  const std::size_t from = index + 1;
  OmegaBlock out;
  if (from < w.prefix.size()) {
    out.prefix.assign(w.prefix.begin() + static_cast<std::ptrdiff_t>(from), w.prefix.end());
    out.period = w.period;
  } else {
    const std::size_t shift = (from - w.prefix.size()) % w.period.size();
    out.period = w.period;
    std::rotate(out.period.begin(), out.period.begin() + static_cast<std::ptrdiff_t>(shift), out.period.end());
  }
  return out;
}

// Points for positions [from, to) of an omega-word.
inline void append_window(OrderExpr& out, const OmegaBlock& w, std::size_t from, std::size_t to) {
  for (std::size_t i = from; i < to; ++i) out.blocks.push_back(PointBlock{w.at(i)});
}

// Interval decomposition (I_0, c_1, I_1, ..., c_m, I_m).
struct Decomposition {
  std::vector<OrderExpr> intervals;  // size() == colors.size() + 1
  ColorSeq colors;
};

inline Decomposition split(const OrderExpr& e, const CutDescriptor& d) {
  require_cut(e, d);
  Decomposition out;
  OrderExpr current;
  auto close = [&](Color c) {
    out.intervals.push_back(normalize(current));
    out.colors.push_back(c);
    current = OrderExpr{};
  };
  for (std::size_t i = 0; i < e.blocks.size(); ++i) {
    const Block& b = e.blocks[i];
    std::visit(overloaded{
                   [&](const PointCut& p) {
                     const Color c = std::get<PointBlock>(b).color;
                     if (p.selected)
                       close(c);
                     else
                       current.blocks.push_back(b);
                   },
                   [&](const ShuffleCut& s) {
                     // every nonempty open interval of Sh(S) is again Sh(S)
                     current.blocks.push_back(b);
                     for (Color c : s.colors) {
                       close(c);
                       current.blocks.push_back(b);
                     }
                   },
                   [&](const OmegaCut& s) {
                     const auto& w = std::get<OmegaBlock>(b);
                     std::size_t from = 0;
                     for (std::size_t j : s.indices) {
                       append_window(current, w, from, j);
                       close(w.at(j));
                       from = j + 1;
                     }
                     if (s.indices.empty())
                       current.blocks.push_back(b);
                     else
                       current.blocks.push_back(omega_suffix(w, s.indices.back()));
                   },
               },
               d.specs[i]);
  }
  out.intervals.push_back(normalize(current));
  return out;
}

// Suborder of elements strictly above some element of color c.
inline OrderExpr suffix_after_color(const OrderExpr& e, Color c) {
  for (std::size_t i = 0; i < e.blocks.size(); ++i) {
    const Block& b = e.blocks[i];
    OrderExpr out;
    bool found = false;
    std::visit(overloaded{
                   [&](const PointBlock& p) { found = p.color == c; },
                   [&](const ShuffleBlock& s) {
                     // no least c-element, and every element has one below it
                     if (s.contains(c)) {
                       found = true;
                       out.blocks.push_back(b);
                     }
                   },
                   [&](const OmegaBlock& w) {
                     for (std::size_t j = 0; j < w.prefix.size() + w.period.size(); ++j) {
                       if (w.at(j) == c) {
                         found = true;
                         out.blocks.push_back(omega_suffix(w, j));
                         return;
                       }
                     }
                   },
               },
               b);
    if (found) {
      out.blocks.insert(out.blocks.end(), e.blocks.begin() + static_cast<std::ptrdiff_t>(i) + 1, e.blocks.end());
      return normalize(out);
    }
  }
  return OrderExpr{};
}

// Complement of suffix_after_color: the initial segment of elements not above any c-element.
inline OrderExpr prefix_through_color(const OrderExpr& e, Color c) {
  OrderExpr out;
  for (const auto& b : e.blocks) {
    bool stop = false;
    std::visit(overloaded{
                   [&](const PointBlock& p) {
                     out.blocks.push_back(b);
                     stop = p.color == c;
                   },
                   [&](const ShuffleBlock& s) {
                     if (s.contains(c))
                       stop = true;
                     else
                       out.blocks.push_back(b);
                   },
                   [&](const OmegaBlock& w) {
                     for (std::size_t j = 0; j < w.prefix.size() + w.period.size(); ++j) {
                       if (w.at(j) == c) {
                         append_window(out, w, 0, j + 1);
                         stop = true;
                         return;
                       }
                     }
                     out.blocks.push_back(b);
                   },
               },
               b);
    if (stop) break;
  }
  return normalize(out);
}

// ---------------------------------------------------------------------------
// rendering (inverse of the expression grammar)

namespace detail {

inline void join(std::ostream& os, const ColorSeq& s, const char* sep = ",") {
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? sep : "") << s[i];
}

}  // namespace detail

inline std::string to_string(const Block& b) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const PointBlock& p) { os << "1_" << p.color; },
                 [&](const ShuffleBlock& s) {
                   if (s.colors.size() == 1) {
                     os << "eta_" << s.colors[0];
                   } else {
                     os << "sh(";
                     detail::join(os, s.colors);
                     os << ")";
                   }
                 },
                 [&](const OmegaBlock& w) {
                   os << "omega[";
                   detail::join(os, w.prefix);
                   os << ";";
                   detail::join(os, w.period);
                   os << "]";
                 },
             },
             b);
  return os.str();
}

inline std::string to_string(const OrderExpr& e) {
  std::string out;
  for (std::size_t i = 0; i < e.blocks.size(); ++i) {
    if (i) out += " + ";
    out += to_string(e.blocks[i]);
  }
  return out;
}

inline std::string to_string(const ColorSeq& s) {
  std::ostringstream os;
  os << "[";
  detail::join(os, s);
  os << "]";
  return os.str();
}

// Descriptor text: one field per block separated by '|'; a point is "*" when
// selected, a shuffle lists colors, an omega-word lists indices.
inline std::string to_string(const CutDescriptor& d) {
  std::ostringstream os;
  for (std::size_t i = 0; i < d.specs.size(); ++i) {
    if (i) os << "|";
    std::visit(overloaded{
                   [&](const PointCut& p) { os << (p.selected ? "*" : ""); },
                   [&](const ShuffleCut& c) { detail::join(os, c.colors); },
                   [&](const OmegaCut& c) {
                     for (std::size_t k = 0; k < c.indices.size(); ++k) os << (k ? "," : "") << c.indices[k];
                   },
               },
               d.specs[i]);
  }
  return os.str();
}

}  // namespace bfscott

template <>
struct std::hash<bfscott::OrderExpr> {
  std::size_t operator()(const bfscott::OrderExpr& e) const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    for (const auto& b : e.blocks) {
      mix(b.index());
      std::visit(bfscott::overloaded{
                     [&](const bfscott::PointBlock& p) { mix(p.color); },
                     [&](const bfscott::ShuffleBlock& s) {
                       for (auto c : s.colors) mix(c);
                     },
                     [&](const bfscott::OmegaBlock& w) {
                       for (auto c : w.prefix) mix(c);
                       mix(0xffff);
                       for (auto c : w.period) mix(c);
                     },
                 },
                 b);
    }
    return h;
  }
};
