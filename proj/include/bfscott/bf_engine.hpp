#pragma once

// Symbolic decision procedure for the asymmetric back-and-forth relations
// between OrderExprs.
//
// With the interval decomposition, (L, a) <=_n (K, b) reduces to color
// agreement plus I_j <=_n J_j on corresponding open intervals, so the core
// question is L <=_n K for cut-free expressions:
//
//   L <=_0 K      always
//   L <=_{m+1} K  iff for every ascending selection d_1 < ... < d_k in K
//                 (k = 0 included) there is c_1 < ... < c_k in L with the same
//                 colors and (d_j, d_{j+1})_K <=_m (c_j, c_{j+1})_L for all j.
//
// A selection is read left to right as a word over cut positions; the
// exists-player's options form a set of positions in L, so the quantifier
// alternation is a subset construction over (position in K, set of
// positions in L). All elements of one shuffle block are a single position
// (every interval between them is the same shuffle), which makes shuffle
// selections of any length exact. Omega-word positions are explored up to a
// horizon; at rank 1 they are folded modulo the period, which is exact since
// only colors matter there.

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "certificate.hpp"
#include "order_algebra.hpp"

namespace bfscott {

enum class Verdict { True, False, Inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::True:
      return "true";
    case Verdict::False:
      return "false";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

struct Outcome {
  Verdict verdict = Verdict::False;
  std::string note;  // names the bound when inconclusive

  static Outcome of(bool b) { return {b ? Verdict::True : Verdict::False, {}}; }
  static Outcome inconclusive(std::string why) { return {Verdict::Inconclusive, std::move(why)}; }

  bool is_true() const { return verdict == Verdict::True; }
  bool is_false() const { return verdict == Verdict::False; }
  bool is_inconclusive() const { return verdict == Verdict::Inconclusive; }
};

// false dominates, then inconclusive
inline Outcome both(const Outcome& x, const Outcome& y) {
  if (x.is_false()) return x;
  if (y.is_false()) return y;
  if (x.is_inconclusive()) return x;
  return y;
}

struct EngineOptions {
  unsigned block_factor = 2;      // B(n) = block_factor * |colors of block| * n
  unsigned horizon_mult = 1;      // H(n) = |prefix| + |period| * horizon_mult * 2^n
  bool shortcuts = true;          // identical sides; finite sides at rank >= 2
  bool identity_shortcut = true;  // with shortcuts, skip the game on identical infinite sides
  bool verify_horizon = true;     // recheck omega verdicts at twice the horizon
  std::size_t cert_pick_cap = 2;  // per-block picks in certificate forall-moves
  std::size_t cert_max_total = 3; // total picks in certificate forall-moves
  std::size_t cert_max_replies = 20000;
};

struct EngineStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::size_t max_depth = 0;
  std::size_t interned = 0;
};

struct GameQuery {
  OrderExpr left;
  std::optional<CutDescriptor> left_cut;
  OrderExpr right;
  std::optional<CutDescriptor> right_cut;
  unsigned rank = 0;
};

struct SymbolicQuery {
  OrderExpr left;
  OrderExpr right;
  unsigned rank = 0;
  bool operator==(const SymbolicQuery&) const = default;
};

using SymbolicCertificate = Certificate<SymbolicQuery, CutDescriptor>;

// Certificate for a pebbled query: rank-0 color agreement, then one
// certificate per interval pair (a single one when there are no cuts).
struct GameCertificate {
  bool colors_agree = true;
  std::vector<SymbolicCertificate> intervals;
};

struct ElementClasses {
  std::vector<std::vector<CutDescriptor>> classes;
  Outcome status = Outcome::of(true);
};

class Engine {
 public:
  using ExprId = std::uint32_t;

  explicit Engine(EngineOptions opts = {}) : opts_(opts) {}

  const EngineOptions& options() const { return opts_; }

  EngineStats stats() const {
    std::lock_guard lock(mutex_);
    return {hits_.load(), misses_.load(), max_depth_.load(), exprs_.size()};
  }

  // B(n)
  std::size_t block_bound(const Block& b, unsigned n) const {
    return std::size_t{opts_.block_factor} * block_colors(b).size() * std::max(n, 1u);
  }

  // H(n): forall-player omega positions explored below this index
  std::size_t horizon(const OmegaBlock& w, unsigned n) const {
    return w.prefix.size() + w.period.size() * opts_.horizon_mult * (std::size_t{1} << std::min(n, 20u));
  }

  std::size_t exists_horizon(const OmegaBlock& w, unsigned n) const { return 2 * horizon(w, n) + w.period.size(); }

  // ------------------------------------------------------------------ queries

  Outcome leq(const OrderExpr& left, const OrderExpr& right, unsigned n) {
    return leq_ids(intern(normalize(left)), intern(normalize(right)), n);
  }

  // A pebbled expression with its intervals interned, for repeated comparisons.
  struct Pebbled {
    ColorSeq colors;
    std::vector<ExprId> intervals;
  };

  Pebbled pebble(const OrderExpr& e, const CutDescriptor& d) {
    Decomposition dec = split(e, d);
    Pebbled out{std::move(dec.colors), {}};
    for (const auto& i : dec.intervals) out.intervals.push_back(intern(i));
    return out;
  }

  Outcome leq_pebbled(const Pebbled& a, const Pebbled& b, unsigned n) {
    if (a.colors.size() != b.colors.size()) throw std::invalid_argument("color-sequence length mismatch");
    if (a.colors != b.colors) return Outcome::of(false);
    Outcome out = Outcome::of(true);
    if (n == 0) return out;
    for (std::size_t j = 0; j < a.intervals.size() && !out.is_false(); ++j)
      out = both(out, leq_ids(a.intervals[j], b.intervals[j], n));
    return out;
  }

  Outcome leq(const GameQuery& q) {
    if (q.left_cut.has_value() != q.right_cut.has_value())
      throw std::invalid_argument("game query needs both cuts or neither");
    if (q.left_cut) return leq_tuples(q.left, *q.left_cut, q.right, *q.right_cut, q.rank);
    return leq(q.left, q.right, q.rank);
  }

  Outcome leq_tuples(const OrderExpr& l, const CutDescriptor& a, const OrderExpr& k, const CutDescriptor& b, unsigned n) {
    return leq_pebbled(pebble(l, a), pebble(k, b), n);
  }

  Outcome equiv(const OrderExpr& l, const OrderExpr& k, unsigned n) {
    Outcome x = leq(l, k, n);
    if (x.is_false()) return x;
    return both(x, leq(k, l, n));
  }

  Outcome equiv_tuples(const OrderExpr& l, const CutDescriptor& a, const OrderExpr& k, const CutDescriptor& b, unsigned n) {
    Outcome x = leq_tuples(l, a, k, b, n);
    if (x.is_false()) return x;
    return both(x, leq_tuples(k, b, l, a, n));
  }

  // Verdict at the configured horizon only.
  bool decide(const OrderExpr& left, const OrderExpr& right, unsigned n) {
    return leq_rec(n, intern(normalize(left)), intern(normalize(right)));
  }

  // --------------------------------------------------------- canonical cuts

  // Canonical descriptors on e with at most max_total selected elements and at
  // most min(B(n), per_block) per block; omega indices stay below H(n).
  std::vector<CutDescriptor> canonical_cuts(const OrderExpr& e, unsigned n, std::size_t max_total,
                                            std::size_t per_block = std::numeric_limits<std::size_t>::max()) const {
    std::vector<std::vector<std::pair<CutSpec, std::size_t>>> options;
    for (const auto& b : e.blocks) {
      const std::size_t cap = std::min({block_bound(b, n), per_block, max_total});
      std::vector<std::pair<CutSpec, std::size_t>> opts;
      std::visit(overloaded{
                     [&](const PointBlock&) {
                       opts.push_back({PointCut{false}, 0});
                       if (cap >= 1) opts.push_back({PointCut{true}, 1});
                     },
                     [&](const ShuffleBlock& s) {
                       std::vector<ColorSeq> layer{{}};
                       opts.push_back({ShuffleCut{}, 0});
                       for (std::size_t len = 1; len <= cap; ++len) {
                         std::vector<ColorSeq> next;
                         for (const auto& w : layer)
                           for (Color c : s.colors) {
                             next.push_back(w);
                             next.back().push_back(c);
                             opts.push_back({ShuffleCut{next.back()}, len});
                           }
                         layer = std::move(next);
                       }
                     },
                     [&](const OmegaBlock& w) {
                       const std::size_t h = horizon(w, n);
                       std::vector<std::size_t> cur;
                       std::function<void(std::size_t)> rec = [&](std::size_t from) {
                         opts.push_back({OmegaCut{cur}, cur.size()});
                         if (cur.size() == cap) return;
                         for (std::size_t i = from; i < h; ++i) {
                           cur.push_back(i);
                           rec(i + 1);
                           cur.pop_back();
                         }
                       };
                       rec(0);
                     },
                 },
                 b);
      options.push_back(std::move(opts));
    }
    std::vector<CutDescriptor> out;
    CutDescriptor cur;
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t used) {
      if (i == options.size()) {
        out.push_back(cur);
        return;
      }
      for (const auto& [spec, k] : options[i]) {
        if (used + k > max_total) continue;
        cur.specs.push_back(spec);
        rec(i + 1, used + k);
        cur.specs.pop_back();
      }
    };
    rec(0, 0);
    std::sort(out.begin(), out.end());
    return out;
  }

  ElementClasses element_classes(const OrderExpr& e, unsigned n) {
    const OrderExpr ne = normalize(e);
    ElementClasses out;
    for (const auto& s : canonical_cuts(ne, n, 1, 1)) {
      if (s.selected_count() != 1) continue;
      bool placed = false;
      for (auto& cls : out.classes) {
        Outcome eq = equiv_tuples(ne, s, ne, cls.front(), n);
        if (eq.is_inconclusive()) out.status = eq;
        if (eq.is_true()) {
          cls.push_back(s);
          placed = true;
          break;
        }
      }
      if (!placed) out.classes.push_back({s});
    }
    return out;
  }

  // ------------------------------------------------------------ certificates

  // Certificate for left <=_n right; none when the verdict is inconclusive.
  std::optional<SymbolicCertificate> certificate(const OrderExpr& left, const OrderExpr& right, unsigned n) {
    if (leq(left, right, n).is_inconclusive()) return std::nullopt;
    return build_certificate(normalize(left), normalize(right), n);
  }

  std::optional<GameCertificate> certificate(const GameQuery& q) {
    if (leq(q).is_inconclusive()) return std::nullopt;
    GameCertificate out;
    if (!q.left_cut) {
      out.intervals.push_back(build_certificate(normalize(q.left), normalize(q.right), q.rank));
      return out;
    }
    const Decomposition dl = split(q.left, *q.left_cut), dk = split(q.right, *q.right_cut);
    out.colors_agree = dl.colors == dk.colors;
    if (!out.colors_agree) return out;
    for (std::size_t j = 0; j < dl.intervals.size(); ++j)
      out.intervals.push_back(build_certificate(dl.intervals[j], dk.intervals[j], q.rank));
    return out;
  }

  // A forall-move on `right` that no exists-response answers, if left <=_n right fails.
  std::optional<CutDescriptor> refutation(const OrderExpr& left, const OrderExpr& right, unsigned n) {
    if (n == 0) return std::nullopt;
    const ExprId a = intern(normalize(left)), b = intern(normalize(right));
    std::vector<Pick> picks;
    if (search(n, a, b, &picks)) return std::nullopt;
    return to_descriptor(info(b).expr, picks);
  }

  // Least winning exists-response on `left` to forall_move on `right` (both normalized).
  std::optional<CutDescriptor> response(const OrderExpr& left, const OrderExpr& right, const CutDescriptor& forall_move,
                                        unsigned n) {
    const ExprId a = intern(normalize(left)), b = intern(normalize(right));
    const OrderExpr& A = info(a).expr;
    const OrderExpr& B = info(b).expr;
    require_cut(B, forall_move);
    const auto picks = to_picks(B, forall_move);
    const auto posA = positions(A, n, true, false);
    const std::size_t m = picks.size();
    // feasible[(k, s)]: picks k.. can be answered after exists-position s
    std::unordered_map<std::uint64_t, bool> memo;
    std::function<bool(std::size_t, std::size_t)> feasible = [&](std::size_t k, std::size_t s) -> bool {
      const std::uint64_t key = (std::uint64_t{k} << 32) | s;
      if (auto it = memo.find(key); it != memo.end()) return it->second;
      bool ok = false;
      const std::uint64_t prev_b = k == 0 ? kStart : picks[k - 1].code;
      if (k == m) {
        ok = sub_leq(n, interval(b, prev_b, kEnd), interval(a, posA[s], kEnd));
      } else {
        const ExprId ib = interval(b, prev_b, picks[k].code);
        for (std::size_t t = 1; t < posA.size() && !ok; ++t) {
          if (!color_at(A, posA[t], picks[k].color) || !after(A, posA[s], posA[t], false, n)) continue;
          ok = sub_leq(n, ib, interval(a, posA[s], posA[t])) && feasible(k + 1, t);
        }
      }
      memo[key] = ok;
      return ok;
    };
    if (!feasible(0, 0)) return std::nullopt;
    std::vector<Pick> chosen;
    std::size_t s = 0;
    for (std::size_t k = 0; k < m; ++k) {
      const std::uint64_t prev_b = k == 0 ? kStart : picks[k - 1].code;
      const ExprId ib = interval(b, prev_b, picks[k].code);
      for (std::size_t t = 1; t < posA.size(); ++t) {
        if (!color_at(A, posA[t], picks[k].color) || !after(A, posA[s], posA[t], false, n)) continue;
        if (sub_leq(n, ib, interval(a, posA[s], posA[t])) && feasible(k + 1, t)) {
          chosen.push_back({posA[t], picks[k].color});
          s = t;
          break;
        }
      }
    }
    return to_descriptor(A, chosen);
  }

  // Every exists-response on `left` agreeing with forall_move at rank 0, in canonical order.
  std::vector<CutDescriptor> all_responses(const OrderExpr& left, const OrderExpr& right, const CutDescriptor& forall_move,
                                           unsigned n) {
    const OrderExpr A = normalize(left);
    const OrderExpr B = normalize(right);
    const ColorSeq colors = selected_colors(B, forall_move);
    const auto posA = positions(A, n, true, false);
    std::vector<CutDescriptor> out;
    std::vector<Pick> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t s) {
      if (cur.size() == colors.size()) {
        if (out.size() >= opts_.cert_max_replies) throw std::length_error("certificate: too many exists-responses");
        out.push_back(to_descriptor(A, cur));
        return;
      }
      const Color c = colors[cur.size()];
      for (std::size_t t = 1; t < posA.size(); ++t) {
        if (!color_at(A, posA[t], c) || !after(A, posA[s], posA[t], false)) continue;
        cur.push_back({posA[t], c});
        rec(t);
        cur.pop_back();
      }
    };
    rec(0);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  // Re-derives every node of a certificate; true iff all verdicts and moves check out.
  bool replay(const SymbolicCertificate& cert) {
    const auto& q = cert.query;
    if (q.left != normalize(q.left) || q.right != normalize(q.right)) return false;
    if (decide(q.left, q.right, q.rank) != cert.holds) return false;
    if (q.rank == 0) return cert.replies.empty();
    auto check_reply = [&](const SymbolicCertificate::Reply& r, bool expect) {
      if (!cuts(q.right, r.forall_move) || !cuts(q.left, r.exists_move)) return false;
      const Decomposition dr = split(q.right, r.forall_move), dl = split(q.left, r.exists_move);
      if (dr.colors != dl.colors) return false;
      if (expect) {
        if (r.children.size() != dr.intervals.size()) return false;
        for (std::size_t j = 0; j < dr.intervals.size(); ++j) {
          const auto& c = r.children[j];
          if (!(c.query == SymbolicQuery{dr.intervals[j], dl.intervals[j], q.rank - 1}) || !c.holds || !replay(c))
            return false;
        }
        return true;
      }
      if (r.children.size() != 1) return false;
      const auto& c = r.children.front();
      bool matches = false;
      for (std::size_t j = 0; j < dr.intervals.size(); ++j)
        matches = matches || c.query == SymbolicQuery{dr.intervals[j], dl.intervals[j], q.rank - 1};
      return matches && !c.holds && replay(c);
    };
    if (cert.holds) {
      const auto moves = canonical_cuts(q.right, q.rank, opts_.cert_max_total, opts_.cert_pick_cap);
      if (moves.size() != cert.replies.size()) return false;
      for (std::size_t i = 0; i < moves.size(); ++i) {
        if (cert.replies[i].forall_move != moves[i]) return false;
        if (!check_reply(cert.replies[i], true)) return false;
      }
      return true;
    }
    if (!cert.refutation) return false;
    const auto responses = all_responses(q.left, q.right, *cert.refutation, q.rank);
    if (responses.size() != cert.replies.size()) return false;
    for (std::size_t i = 0; i < responses.size(); ++i) {
      const auto& r = cert.replies[i];
      if (r.forall_move != *cert.refutation || r.exists_move != responses[i]) return false;
      if (!check_reply(r, false)) return false;
    }
    return true;
  }

 private:
  static constexpr std::uint64_t kStart = 0;
  static constexpr std::uint64_t kEnd = std::numeric_limits<std::uint64_t>::max();
  static constexpr std::uint64_t kIndexMask = (std::uint64_t{1} << 40) - 1;

  static std::uint64_t code(std::size_t block, std::size_t index) {
    return ((std::uint64_t{block} + 1) << 40) | std::uint64_t{index};
  }
  static std::size_t block_of(std::uint64_t c) { return static_cast<std::size_t>((c >> 40) - 1); }
  static std::size_t index_of(std::uint64_t c) { return static_cast<std::size_t>(c & kIndexMask); }

  struct Pick {
    std::uint64_t code;
    Color color;
  };

  struct Info {
    OrderExpr expr;
    bool finite = false;
    bool omega = false;
  };

  Outcome leq_ids(ExprId a, ExprId b, unsigned n) {
    const bool v = leq_rec(n, a, b);
    if (n >= 2 && opts_.verify_horizon && (info(a).omega || info(b).omega)) {
      Engine& ver = verifier();
      const bool w = ver.leq_rec(n, ver.intern(info(a).expr), ver.intern(info(b).expr));
      if (v != w)
        return Outcome::inconclusive("bounds exceeded: verdict changed between omega horizons H(n) = |prefix| + |period|*" +
                                     std::to_string(opts_.horizon_mult) + "*2^n and twice that (n = " +
                                     std::to_string(n) + ")");
    }
    return Outcome::of(v);
  }

  Engine& verifier() {
    std::lock_guard lock(mutex_);
    if (!verifier_) {
      EngineOptions o = opts_;
      o.horizon_mult *= 2;
      o.verify_horizon = false;
      verifier_ = std::make_unique<Engine>(o);
    }
    return *verifier_;
  }

  ExprId intern(const OrderExpr& normalized) {
    std::lock_guard lock(mutex_);
    auto [it, fresh] = ids_.try_emplace(normalized, static_cast<ExprId>(exprs_.size()));
    if (fresh) exprs_.push_back({normalized, is_finite(normalized), has_omega(normalized)});
    return it->second;
  }

  const Info& info(ExprId id) const {
    std::lock_guard lock(mutex_);
    return exprs_[id];
  }

  // Element positions (after the Start sentinel at index 0).
  std::vector<std::uint64_t> positions(const OrderExpr& e, unsigned n, bool exists_side, bool folded) const {
    std::vector<std::uint64_t> out{kStart};
    for (std::size_t b = 0; b < e.blocks.size(); ++b) {
      if (const auto* w = std::get_if<OmegaBlock>(&e.blocks[b])) {
        const std::size_t lim = folded        ? w->prefix.size() + w->period.size()
                                : exists_side ? exists_horizon(*w, n) + w->period.size()
                                              : horizon(*w, n);
        for (std::size_t i = 0; i < lim; ++i) out.push_back(code(b, i));
      } else {
        out.push_back(code(b, 0));
      }
    }
    return out;
  }

  // q is a possible next selected element after p. With band = n, the last
  // period window of exists-positions is cyclic: q at or below p there stands
  // for the next position with q's residue, so repeated picks never run out.
  bool after(const OrderExpr& e, std::uint64_t p, std::uint64_t q, bool folded, unsigned band = 0) const {
    if (q == kStart) return false;
    if (p == kStart || q == kEnd) return true;
    const std::size_t bp = block_of(p), bq = block_of(q);
    if (bq != bp) return bq > bp;
    const Block& blk = e.blocks[bp];
    if (std::holds_alternative<ShuffleBlock>(blk)) return true;
    if (const auto* w = std::get_if<OmegaBlock>(&blk)) {
      const std::size_t ip = index_of(p), iq = index_of(q);
      if (iq > ip || (folded && ip >= w->prefix.size() && iq >= w->prefix.size())) return true;
      if (band == 0) return false;
      const std::size_t e0 = exists_horizon(*w, band);
      return ip >= e0 && iq >= e0;
    }
    return false;
  }

  static bool color_at(const OrderExpr& e, std::uint64_t q, Color c) {
    return std::visit(overloaded{
                          [&](const PointBlock& p) { return p.color == c; },
                          [&](const ShuffleBlock& s) { return s.contains(c); },
                          [&](const OmegaBlock& w) { return w.at(index_of(q)) == c; },
                      },
                      e.blocks[block_of(q)]);
  }

  static ColorSeq colors_at(const OrderExpr& e, std::uint64_t q) {
    return std::visit(overloaded{
                          [&](const PointBlock& p) { return ColorSeq{p.color}; },
                          [&](const ShuffleBlock& s) { return s.colors; },
                          [&](const OmegaBlock& w) { return ColorSeq{w.at(index_of(q))}; },
                      },
                      e.blocks[block_of(q)]);
  }

  // least index above p with q's residue, for band moves
  static std::size_t wrapped_index(const OmegaBlock& w, std::size_t p, std::size_t q) {
    while (q <= p) q += w.period.size();
    return q;
  }

  static OrderExpr build_interval(const OrderExpr& e, std::uint64_t p, std::uint64_t q) {
    OrderExpr out;
    if (p != kStart && q != kEnd && block_of(p) == block_of(q)) {
      const Block& blk = e.blocks[block_of(p)];
      if (std::holds_alternative<ShuffleBlock>(blk))
        out.blocks.push_back(blk);
      else if (const auto* w = std::get_if<OmegaBlock>(&blk))
        append_window(out, *w, index_of(p) + 1, wrapped_index(*w, index_of(p), index_of(q)));
      return normalize(out);
    }
    std::size_t first = 0;
    if (p != kStart) {
      const Block& blk = e.blocks[block_of(p)];
      if (std::holds_alternative<ShuffleBlock>(blk))
        out.blocks.push_back(blk);
      else if (const auto* w = std::get_if<OmegaBlock>(&blk))
        out.blocks.push_back(omega_suffix(*w, index_of(p)));
      first = block_of(p) + 1;
    }
    const std::size_t last = q == kEnd ? e.blocks.size() : block_of(q);
    for (std::size_t b = first; b < last; ++b) out.blocks.push_back(e.blocks[b]);
    if (q != kEnd) {
      const Block& blk = e.blocks[block_of(q)];
      if (std::holds_alternative<ShuffleBlock>(blk))
        out.blocks.push_back(blk);
      else if (const auto* w = std::get_if<OmegaBlock>(&blk))
        append_window(out, *w, 0, index_of(q));
    }
    return normalize(out);
  }

  struct IntervalKey {
    ExprId id;
    std::uint64_t from, to;
    bool operator==(const IntervalKey&) const = default;
  };
  struct IntervalKeyHash {
    std::size_t operator()(const IntervalKey& k) const noexcept {
      std::size_t h = std::hash<std::uint64_t>{}(k.from) * 31 + std::hash<std::uint64_t>{}(k.to);
      return h * 1000003u ^ k.id;
    }
  };

  ExprId interval(ExprId id, std::uint64_t from, std::uint64_t to) {
    {
      std::lock_guard lock(mutex_);
      if (auto it = intervals_.find({id, from, to}); it != intervals_.end()) return it->second;
    }
    const ExprId r = intern(build_interval(info(id).expr, from, to));
    std::lock_guard lock(mutex_);
    intervals_.emplace(IntervalKey{id, from, to}, r);
    return r;
  }

  bool sub_leq(unsigned n, ExprId l, ExprId r) { return n <= 1 ? true : leq_rec(n - 1, l, r); }

  bool leq_rec(unsigned n, ExprId a, ExprId b) {
    if (n == 0) return true;
    if (opts_.shortcuts) {
      // a finite side at rank >= 2 forces isomorphism
      if (n >= 2 && (info(a).finite || info(b).finite)) return a == b;
      if (a == b && (opts_.identity_shortcut || info(a).finite)) return true;
    }
    const std::uint64_t key = (std::uint64_t{n} << 56) | (std::uint64_t{a} << 28) | std::uint64_t{b};
    {
      std::lock_guard lock(mutex_);
      if (auto it = memo_.find(key); it != memo_.end()) {
        ++hits_;
        return it->second;
      }
    }
    ++misses_;
    const bool r = search(n, a, b, nullptr);
    std::lock_guard lock(mutex_);
    memo_.emplace(key, r);
    return r;
  }

  // Subset construction for a <=_n b; on failure `refutation` receives the forall-move.
  bool search(unsigned n, ExprId a, ExprId b, std::vector<Pick>* refutation) {
    struct DepthGuard {
      std::atomic<std::size_t>& max;
      static std::size_t& depth() {
        thread_local std::size_t d = 0;
        return d;
      }
      explicit DepthGuard(std::atomic<std::size_t>& m) : max(m) {
        const std::size_t d = ++depth();
        std::size_t cur = max.load();
        while (d > cur && !max.compare_exchange_weak(cur, d)) {
        }
      }
      ~DepthGuard() { --depth(); }
    } guard(max_depth_);

    const OrderExpr A = info(a).expr;
    const OrderExpr B = info(b).expr;
    const bool folded = n == 1;
    const auto posA = positions(A, n, true, folded);
    const auto posB = positions(B, n, false, folded);
    const std::size_t na = posA.size(), nb = posB.size();
    constexpr ExprId unset = std::numeric_limits<ExprId>::max();
    // local interval tables; column index `size` stands for End
    std::vector<ExprId> ivA(folded ? 0 : na * (na + 1), unset), ivB(folded ? 0 : nb * (nb + 1), unset);
    auto iv = [&](std::vector<ExprId>& tab, ExprId id, const std::vector<std::uint64_t>& pos, std::size_t i,
                  std::size_t j) {
      ExprId& slot = tab[i * (pos.size() + 1) + j];
      if (slot == unset) slot = interval(id, pos[i], j == pos.size() ? kEnd : pos[j]);
      return slot;
    };

    // successor relations and colors, tabulated once per search
    const std::size_t words = (na + 63) / 64;
    using Bits = std::vector<std::uint64_t>;
    auto has = [](const Bits& x, std::size_t i) { return (x[i / 64] >> (i % 64)) & 1u; };
    auto set = [](Bits& x, std::size_t i) { x[i / 64] |= std::uint64_t{1} << (i % 64); };
    std::vector<Bits> predA(na, Bits(words, 0));  // predA[t] = {s : t may follow s}
    for (std::size_t s = 0; s < na; ++s)
      for (std::size_t t = 1; t < na; ++t)
        if (after(A, posA[s], posA[t], folded, folded ? 0 : n)) set(predA[t], s);
    std::vector<std::vector<std::size_t>> byColor;  // A-positions carrying each color
    for (std::size_t t = 1; t < na; ++t)
      for (Color c : colors_at(A, posA[t])) {
        if (c >= byColor.size()) byColor.resize(c + 1);
        byColor[c].push_back(t);
      }
    std::vector<ColorSeq> colorsB(nb);
    for (std::size_t j = 1; j < nb; ++j) colorsB[j] = colors_at(B, posB[j]);

    // sub-game verdicts gap <=_{n-1} A(s, t) per distinct gap, as known/true bitsets indexed by t
    struct GapRow {
      std::vector<Bits> known, value;
      Bits tail_known, tail_value;  // verdicts gap <=_{n-1} A(s, End)
    };
    std::unordered_map<ExprId, GapRow> gap_rows;

    struct Node {
      std::size_t pb;
      Bits sa;
      std::ptrdiff_t parent;
      Pick pick;
    };
    std::vector<Node> nodes;
    std::vector<std::vector<std::size_t>> seen(nb);
    std::deque<std::size_t> queue;
    {
      Bits start(words, 0);
      set(start, 0);
      nodes.push_back({0, std::move(start), -1, {kStart, 0}});
    }
    seen[0].push_back(0);
    queue.push_back(0);

    auto fail = [&](std::size_t idx, std::optional<Pick> last) {
      if (refutation) {
        std::vector<Pick> path;
        if (last) path.push_back(*last);
        for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(idx); nodes[static_cast<std::size_t>(i)].parent >= 0;
             i = nodes[static_cast<std::size_t>(i)].parent)
          path.push_back(nodes[static_cast<std::size_t>(i)].pick);
        refutation->assign(path.rbegin(), path.rend());
      }
      return false;
    };
    auto subset = [&](const Bits& x, const Bits& y) {
      for (std::size_t w = 0; w < words; ++w)
        if (x[w] & ~y[w]) return false;
      return true;
    };

    while (!queue.empty()) {
      const std::size_t idx = queue.front();
      queue.pop_front();
      const std::size_t pb = nodes[idx].pb;
      const Bits sa = nodes[idx].sa;

      if (!folded) {
        const ExprId tail = iv(ivB, b, posB, pb, nb);
        GapRow& row = gap_rows[tail];
        if (row.tail_known.empty()) row.tail_known.assign(words, 0), row.tail_value.assign(words, 0);
        bool ok = false;
        for (std::size_t w = 0; w < words && !ok; ++w) ok = (sa[w] & row.tail_value[w]) != 0;
        for (std::size_t s = 0; s < na && !ok; ++s)
          if (has(sa, s) && !has(row.tail_known, s)) {
            set(row.tail_known, s);
            if ((ok = leq_rec(n - 1, tail, iv(ivA, a, posA, s, na)))) set(row.tail_value, s);
          }
        if (!ok) return fail(idx, std::nullopt);
      }

      for (std::size_t j = 1; j < nb; ++j) {
        if (!after(B, posB[pb], posB[j], folded)) continue;
        GapRow* row = nullptr;
        ExprId gap = 0;
        if (!folded) {
          gap = iv(ivB, b, posB, pb, j);
          row = &gap_rows[gap];
          if (row->known.empty()) row->known.assign(na, Bits(words, 0)), row->value.assign(na, Bits(words, 0));
        }
        for (Color c : colorsB[j]) {
          Bits next(words, 0);
          bool any = false;
          if (c < byColor.size())
            for (std::size_t t : byColor[c]) {
              const Bits& pred = predA[t];
              bool ok = false;
              if (folded) {
                for (std::size_t w = 0; w < words && !ok; ++w) ok = (sa[w] & pred[w]) != 0;
              } else {
                Bits& known = row->known[t];
                Bits& value = row->value[t];
                for (std::size_t w = 0; w < words && !ok; ++w) ok = (sa[w] & pred[w] & value[w]) != 0;
                for (std::size_t w = 0; w < words && !ok; ++w) {
                  std::uint64_t open = sa[w] & pred[w] & ~known[w];
                  while (open && !ok) {
                    const std::size_t s = w * 64 + static_cast<std::size_t>(std::countr_zero(open));
                    open &= open - 1;
                    set(known, s);
                    if (leq_rec(n - 1, gap, iv(ivA, a, posA, s, t))) {
                      set(value, s);
                      ok = true;
                    }
                  }
                }
              }
              if (ok) {
                set(next, t);
                any = true;
              }
            }
          if (!any) return fail(idx, Pick{posB[j], c});
          auto& lst = seen[j];
          const bool dominated =
              std::any_of(lst.begin(), lst.end(), [&](std::size_t o) { return subset(nodes[o].sa, next); });
          if (dominated) continue;
          nodes.push_back({j, std::move(next), static_cast<std::ptrdiff_t>(idx), {posB[j], c}});
          lst.push_back(nodes.size() - 1);
          queue.push_back(nodes.size() - 1);
        }
      }
    }
    return true;
  }

  static std::vector<Pick> to_picks(const OrderExpr& e, const CutDescriptor& d) {
    std::vector<Pick> out;
    for (std::size_t i = 0; i < d.specs.size(); ++i) {
      std::visit(overloaded{
                     [&](const PointCut& p) {
                       if (p.selected) out.push_back({code(i, 0), std::get<PointBlock>(e.blocks[i]).color});
                     },
                     [&](const ShuffleCut& s) {
                       for (Color c : s.colors) out.push_back({code(i, 0), c});
                     },
                     [&](const OmegaCut& s) {
                       for (auto j : s.indices) out.push_back({code(i, j), std::get<OmegaBlock>(e.blocks[i]).at(j)});
                     },
                 },
                 d.specs[i]);
    }
    return out;
  }

  static CutDescriptor to_descriptor(const OrderExpr& e, const std::vector<Pick>& picks) {
    CutDescriptor d = empty_cut(e);
    for (const auto& p : picks) {
      std::visit(overloaded{
                     [&](PointCut& c) { c.selected = true; },
                     [&](ShuffleCut& c) { c.colors.push_back(p.color); },
                     [&](OmegaCut& c) {
                       // folded and band positions repeat; unfold to real indices
                       const auto& w = std::get<OmegaBlock>(e.blocks[block_of(p.code)]);
                       std::size_t i = index_of(p.code);
                       if (!c.indices.empty()) i = wrapped_index(w, c.indices.back(), i);
                       c.indices.push_back(i);
                     },
                 },
                 d.specs[block_of(p.code)]);
    }
    return d;
  }

  SymbolicCertificate build_certificate(const OrderExpr& left, const OrderExpr& right, unsigned n) {
    SymbolicCertificate cert;
    cert.query = {left, right, n};
    cert.holds = decide(left, right, n);
    if (n == 0) return cert;
    auto children = [&](const CutDescriptor& d, const CutDescriptor& c, bool all) {
      const Decomposition dr = split(right, d), dl = split(left, c);
      std::vector<SymbolicCertificate> out;
      for (std::size_t j = 0; j < dr.intervals.size(); ++j) {
        if (all) {
          out.push_back(build_certificate(dr.intervals[j], dl.intervals[j], n - 1));
        } else if (!decide(dr.intervals[j], dl.intervals[j], n - 1)) {
          out.push_back(build_certificate(dr.intervals[j], dl.intervals[j], n - 1));
          break;
        }
      }
      return out;
    };
    if (cert.holds) {
      for (const auto& d : canonical_cuts(right, n, opts_.cert_max_total, opts_.cert_pick_cap)) {
        auto c = response(left, right, d, n);
        if (!c) throw std::logic_error("certificate: unanswered move under a holding verdict");
        cert.replies.push_back({d, *c, children(d, *c, true)});
      }
      return cert;
    }
    cert.refutation = refutation(left, right, n);
    for (const auto& c : all_responses(left, right, *cert.refutation, n)) {
      auto kids = children(*cert.refutation, c, false);
      if (kids.empty()) throw std::logic_error("certificate: refuted move has a winning response");
      cert.replies.push_back({*cert.refutation, c, std::move(kids)});
    }
    return cert;
  }

  EngineOptions opts_;
  mutable std::mutex mutex_;
  std::deque<Info> exprs_;
  std::unordered_map<OrderExpr, ExprId> ids_;
  std::unordered_map<std::uint64_t, bool> memo_;
  std::unordered_map<IntervalKey, ExprId, IntervalKeyHash> intervals_;
  std::atomic<std::uint64_t> hits_{0}, misses_{0};
  std::atomic<std::size_t> max_depth_{0};
  std::unique_ptr<Engine> verifier_;
};

}  // namespace bfscott
