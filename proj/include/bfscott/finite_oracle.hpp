#pragma once

// Exhaustive back-and-forth solver on explicit finite colored orders.
//
// (L, a) <=_0 (R, b)      iff the tuples have the same order pattern and colors.
// (L, a) <=_{m+1} (R, b)  iff they agree at rank 0 and for every set d of fresh
//                         elements of R (the empty set included) there is a set c
//                         of fresh elements of L with (R, b d) <=_m (L, a c),
//                         where b d and a c are matched in ascending order.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "certificate.hpp"
#include "order_algebra.hpp"

namespace bfscott {

struct FiniteOrder {
  ColorSeq colors;

  std::size_t size() const { return colors.size(); }
  auto operator<=>(const FiniteOrder&) const = default;
  bool operator==(const FiniteOrder&) const = default;
};

using Tuple = std::vector<std::size_t>;  // ascending positions

struct PebbledPair {
  FiniteOrder left;
  Tuple left_tuple;
  FiniteOrder right;
  Tuple right_tuple;
  bool operator==(const PebbledPair&) const = default;
};

struct OracleQuery {
  PebbledPair pair;
  unsigned rank = 0;
  bool operator==(const OracleQuery&) const = default;
};

using OracleCertificate = Certificate<OracleQuery, Tuple>;

inline void validate(const PebbledPair& p) {
  auto ok = [](const FiniteOrder& o, const Tuple& t) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] >= o.size()) return false;
      if (i && t[i - 1] >= t[i]) return false;
    }
    return o.size() <= 64 && std::all_of(o.colors.begin(), o.colors.end(), [](Color c) { return c < 128; });
  };
  if (p.left_tuple.size() != p.right_tuple.size() || !ok(p.left, p.left_tuple) || !ok(p.right, p.right_tuple))
    throw std::invalid_argument("malformed pebbled pair");
}

struct OracleOptions {
  // Restrict forall-moves to "all fresh elements". Complete because <=_m is
  // preserved under dropping matched pairs from both tuples.
  bool maximal_moves_only = false;
};

class FiniteOracle {
 public:
  explicit FiniteOracle(OracleOptions opts = {}) : opts_(opts) {}

  bool leq(const PebbledPair& p, unsigned n) {
    validate(p);
    return leq_marked(mark(p.left, p.left_tuple), mark(p.right, p.right_tuple), n);
  }

  OracleCertificate certificate(const PebbledPair& p, unsigned n) {
    validate(p);
    return build(p, n);
  }

  std::size_t memo_size() const {
    std::lock_guard lock(mutex_);
    return memo_.size();
  }

 private:
  struct Marked {
    const ColorSeq* colors;
    std::uint64_t mask;
  };

  static Marked mark(const FiniteOrder& o, const Tuple& t) {
    std::uint64_t m = 0;
    for (auto i : t) m |= std::uint64_t{1} << i;
    return {&o.colors, m};
  }

  static bool agree0(const ColorSeq& lc, std::uint64_t lm, const ColorSeq& rc, std::uint64_t rm) {
    if (std::popcount(lm) != std::popcount(rm)) return false;
    while (lm) {
      const int i = std::countr_zero(lm), j = std::countr_zero(rm);
      if (lc[static_cast<std::size_t>(i)] != rc[static_cast<std::size_t>(j)]) return false;
      lm &= lm - 1;
      rm &= rm - 1;
    }
    return true;
  }

  // Calls f on every c among the free elements of l such that (old l marks + c)
  // and (old r marks + d) have the same old/new pattern and colors, in
  // lexicographic order of positions; stops when f returns false.
  template <class F>
  static bool each_response(const Marked& l, const Marked& r, std::uint64_t d, F&& f) {
    const auto& lc = *l.colors;
    const auto& rc = *r.colors;
    std::vector<std::size_t> lold;
    for (std::uint64_t m = l.mask; m; m &= m - 1) lold.push_back(static_cast<std::size_t>(std::countr_zero(m)));
    std::vector<std::pair<bool, std::size_t>> seq;  // (old, position) on the right
    for (std::uint64_t m = r.mask | d; m; m &= m - 1) {
      const auto i = static_cast<std::size_t>(std::countr_zero(m));
      seq.push_back({((r.mask >> i) & 1) != 0, i});
    }
    std::uint64_t c = 0;
    std::function<bool(std::size_t, std::size_t, std::size_t)> rec = [&](std::size_t k, std::size_t from,
                                                                         std::size_t old_seen) -> bool {
      if (k == seq.size()) return f(c);
      const std::size_t limit = old_seen < lold.size() ? lold[old_seen] : lc.size();
      if (seq[k].first) return rec(k + 1, limit + 1, old_seen + 1);
      const Color col = rc[seq[k].second];
      for (std::size_t y = from; y < limit; ++y) {
        if (lc[y] != col) continue;
        c |= std::uint64_t{1} << y;
        const bool go = rec(k + 1, y + 1, old_seen);
        c &= ~(std::uint64_t{1} << y);
        if (!go) return false;
      }
      return true;
    };
    return rec(0, 0, 0);
  }

  static std::string key(const Marked& l, const Marked& r, unsigned n) {
    std::string k;
    k.reserve(l.colors->size() + r.colors->size() + 2);
    k.push_back(static_cast<char>(n));
    for (std::size_t i = 0; i < l.colors->size(); ++i)
      k.push_back(static_cast<char>(((*l.colors)[i] << 1) | ((l.mask >> i) & 1)));
    k.push_back('\xff');
    for (std::size_t i = 0; i < r.colors->size(); ++i)
      k.push_back(static_cast<char>(((*r.colors)[i] << 1) | ((r.mask >> i) & 1)));
    return k;
  }

  static std::uint64_t full(std::size_t n) { return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1; }

  // Calls f on every subset of `from` (ascending as integers); stops when f returns false.
  template <class F>
  static bool each_subset(std::uint64_t from, F&& f) {
    std::uint64_t s = 0;
    while (true) {
      if (!f(s)) return false;
      if (s == from) return true;
      s = (s - from) & from;
    }
  }

  bool leq_marked(const Marked& l, const Marked& r, unsigned n) {
    if (!agree0(*l.colors, l.mask, *r.colors, r.mask)) return false;
    if (n == 0) return true;
    const std::string k = key(l, r, n);
    {
      std::lock_guard lock(mutex_);
      if (auto it = memo_.find(k); it != memo_.end()) return it->second;
    }
    const std::uint64_t rfree = full(r.colors->size()) & ~r.mask;
    auto answer = [&](std::uint64_t d) {
      return !each_response(l, r, d, [&](std::uint64_t c) {
        return !leq_marked(Marked{r.colors, r.mask | d}, Marked{l.colors, l.mask | c}, n - 1);
      });
    };
    bool result;
    if (opts_.maximal_moves_only)
      result = answer(rfree);
    else
      result = each_subset(rfree, [&](std::uint64_t d) { return answer(d); });
    std::lock_guard lock(mutex_);
    memo_.emplace(k, result);
    return result;
  }

  static Tuple positions(std::uint64_t m) {
    Tuple t;
    while (m) {
      t.push_back(static_cast<std::size_t>(std::countr_zero(m)));
      m &= m - 1;
    }
    return t;
  }

  static Tuple merged(const Tuple& base, std::uint64_t add) {
    std::uint64_t m = add;
    for (auto i : base) m |= std::uint64_t{1} << i;
    return positions(m);
  }

  OracleCertificate build(const PebbledPair& p, unsigned n) {
    OracleCertificate cert;
    cert.query = {p, n};
    const Marked l = mark(p.left, p.left_tuple), r = mark(p.right, p.right_tuple);
    cert.holds = leq_marked(l, r, n);
    if (n == 0 || !agree0(p.left.colors, l.mask, p.right.colors, r.mask)) return cert;

    const std::uint64_t rfree = full(p.right.size()) & ~r.mask;
    auto child_pair = [&](std::uint64_t d, std::uint64_t c) {
      return PebbledPair{p.right, merged(p.right_tuple, d), p.left, merged(p.left_tuple, c)};
    };
    auto candidates = [&](std::uint64_t d) {
      std::vector<std::uint64_t> out;
      each_response(l, r, d, [&](std::uint64_t c) {
        out.push_back(c);
        return true;
      });
      return out;
    };

    std::vector<std::uint64_t> moves;
    if (opts_.maximal_moves_only)
      moves.push_back(rfree);
    else
      each_subset(rfree, [&](std::uint64_t d) {
        moves.push_back(d);
        return true;
      });

    for (std::uint64_t d : moves) {
      bool answered = false;
      for (std::uint64_t c : candidates(d)) {
        if (leq_marked(Marked{&p.right.colors, r.mask | d}, Marked{&p.left.colors, l.mask | c}, n - 1)) {
          if (cert.holds) cert.replies.push_back({positions(d), positions(c), {build(child_pair(d, c), n - 1)}});
          answered = true;
          break;
        }
      }
      if (!answered) {
        if (cert.holds) throw std::logic_error("oracle certificate: unanswered move under a holding verdict");
        cert.refutation = positions(d);
        for (std::uint64_t c : candidates(d))
          cert.replies.push_back({positions(d), positions(c), {build(child_pair(d, c), n - 1)}});
        return cert;
      }
    }
    return cert;
  }

  OracleOptions opts_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, bool> memo_;
};

// Shared-memo convenience entry point.
inline bool bf_leq(const PebbledPair& p, unsigned n) {
  static FiniteOracle oracle;
  return oracle.leq(p, n);
}

inline OracleCertificate bf_extract_certificate(const PebbledPair& p, unsigned n) {
  static FiniteOracle oracle;
  return oracle.certificate(p, n);
}

// Replays a certificate against a fresh oracle; true iff every node is consistent.
inline bool replay(const OracleCertificate& cert, FiniteOracle& oracle) {
  const auto& q = cert.query;
  if (oracle.leq(q.pair, q.rank) != cert.holds) return false;
  for (const auto& r : cert.replies) {
    if (r.children.size() != 1) return false;
    const auto& child = r.children.front();
    if (child.query.rank + 1 != q.rank) return false;
    if (child.query.pair.left != q.pair.right || child.query.pair.right != q.pair.left) return false;
    auto merge = [](Tuple a, const Tuple& b) {
      a.insert(a.end(), b.begin(), b.end());
      std::sort(a.begin(), a.end());
      return a;
    };
    if (child.query.pair.left_tuple != merge(q.pair.right_tuple, r.forall_move) ||
        child.query.pair.right_tuple != merge(q.pair.left_tuple, r.exists_move))
      return false;
    if (cert.holds != child.holds) return false;
    if (!replay(child, oracle)) return false;
  }
  if (!cert.holds && q.rank > 0 && !cert.refutation) {
    // only a rank-0 disagreement may fail without a forall-move
    FiniteOracle probe;
    if (probe.leq(q.pair, 0)) return false;
  }
  return true;
}

// Every color sequence of length <= max_size over colors < max_colors, in
// length-lexicographic order.
inline void for_each_order(std::size_t max_size, std::size_t max_colors, const std::function<void(const FiniteOrder&)>& f) {
  for (std::size_t len = 0; len <= max_size; ++len) {
    if (len > 0 && max_colors == 0) break;
    FiniteOrder o{ColorSeq(len, 0)};
    while (true) {
      f(o);
      std::size_t i = len;
      while (i > 0 && o.colors[i - 1] + 1 == max_colors) o.colors[--i] = 0;
      if (i == 0) break;
      ++o.colors[i - 1];
    }
  }
}

inline std::vector<FiniteOrder> enumerate_orders(std::size_t max_size, std::size_t max_colors) {
  std::vector<FiniteOrder> out;
  for_each_order(max_size, max_colors, [&](const FiniteOrder& o) { out.push_back(o); });
  return out;
}

// Finite order denoted by a Point/omega expression with every omega-word cut
// to its first `omega_length` positions.
inline FiniteOrder truncation(const OrderExpr& e, std::size_t omega_length) {
  FiniteOrder out;
  for (const auto& b : e.blocks) {
    if (const auto* p = std::get_if<PointBlock>(&b)) {
      out.colors.push_back(p->color);
    } else if (const auto* w = std::get_if<OmegaBlock>(&b)) {
      for (std::size_t i = 0; i < omega_length; ++i) out.colors.push_back(w->at(i));
    } else {
      throw std::invalid_argument("shuffles have no finite truncation");
    }
  }
  return out;
}

}  // namespace bfscott
