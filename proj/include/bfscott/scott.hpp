#pragma once

// Scott-rank bounds, Scott sentence complexity and 2-universal covers on the
// block algebra.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bf_engine.hpp"
#include "order_algebra.hpp"
#include "sequence_language.hpp"

namespace bfscott {

struct ComplexityTag {
  enum class Shape { Sigma, Pi, dSigma };
  Shape shape = Shape::Pi;
  unsigned level = 1;

  bool operator==(const ComplexityTag&) const = default;
};

inline ComplexityTag Sigma(unsigned n) { return {ComplexityTag::Shape::Sigma, n}; }
inline ComplexityTag Pi(unsigned n) { return {ComplexityTag::Shape::Pi, n}; }
inline ComplexityTag dSigma(unsigned n) { return {ComplexityTag::Shape::dSigma, n}; }

inline std::string to_string(const ComplexityTag& t) {
  switch (t.shape) {
    case ComplexityTag::Shape::Sigma:
      return "Sigma " + std::to_string(t.level);
    case ComplexityTag::Shape::Pi:
      return "Pi " + std::to_string(t.level);
    case ComplexityTag::Shape::dSigma:
      return "d-Sigma " + std::to_string(t.level);
  }
  return "?";
}

// Automorphisms of a normalized sum respect blocks; inside a shuffle the
// color sequence of a selection determines its orbit, omega-words are rigid.
inline bool orbit_equal(const OrderExpr& e, const CutDescriptor& a, const CutDescriptor& b) {
  const OrderExpr ne = normalize(e);
  require_cut(ne, a);
  require_cut(ne, b);
  return a == b;
}

// The sub-selection of d made of the selected elements at the given ascending
// positions of its selection order.
inline CutDescriptor restrict_cut(const OrderExpr& e, const CutDescriptor& d, const std::vector<std::size_t>& keep) {
  require_cut(e, d);
  CutDescriptor out = empty_cut(e);
  std::size_t pos = 0, k = 0;
  auto kept = [&] {
    const bool hit = k < keep.size() && keep[k] == pos;
    if (hit) ++k;
    ++pos;
    return hit;
  };
  for (std::size_t i = 0; i < d.specs.size(); ++i) {
    std::visit(overloaded{
                   [&](const PointCut& p) {
                     if (p.selected && kept()) std::get<PointCut>(out.specs[i]).selected = true;
                   },
                   [&](const ShuffleCut& s) {
                     for (Color c : s.colors)
                       if (kept()) std::get<ShuffleCut>(out.specs[i]).colors.push_back(c);
                   },
                   [&](const OmegaCut& s) {
                     for (auto j : s.indices)
                       if (kept()) std::get<OmegaCut>(out.specs[i]).indices.push_back(j);
                   },
               },
               d.specs[i]);
  }
  return out;
}

struct RankBounds {
  unsigned n_max = 3;
  std::size_t tuple_len = 2;
  std::size_t param_len = 2;
};

struct RankWitness {
  CutDescriptor left;   // left <=_rank right ...
  CutDescriptor right;  // ... yet not orbit-equal
  std::optional<CutDescriptor> parameter;
  unsigned rank = 0;
};

struct RankReport {
  unsigned sr_lower = 1;
  std::optional<unsigned> sr_upper;
  unsigned srp_lower = 1;
  std::optional<unsigned> srp_upper;
  std::optional<RankWitness> witness;
  std::optional<CutDescriptor> best_parameter;  // attains srp_upper
  RankBounds bounds;
  std::vector<std::string> notes;  // inconclusive outcomes met during the search
};

namespace detail {

enum class Tri { No, Yes, Unknown };

struct RankSearch {
  unsigned lower = 1;
  std::optional<unsigned> upper;
  std::optional<RankWitness> witness;
};

// members are indices into the tuple list
using TupleGroups = std::map<std::pair<std::vector<std::size_t>, ColorSeq>, std::vector<std::size_t>>;

// Merged tuples indexed by parameter: for every tuple m and every choice of
// parameter slots, m joins the group (slots, colors) of its restriction.
// Orbit equality over a parameter is descriptor equality within a group.
inline std::map<CutDescriptor, TupleGroups> index_by_parameter(const OrderExpr& e, const std::vector<CutDescriptor>& all,
                                                               const RankBounds& b) {
  std::map<CutDescriptor, TupleGroups> out;
  for (std::size_t idx = 0; idx < all.size(); ++idx) {
    const CutDescriptor& m = all[idx];
    const std::size_t len = m.selected_count();
    const ColorSeq colors = selected_colors(e, m);
    std::vector<std::size_t> slots;
    std::function<void(std::size_t)> pick = [&](std::size_t from) {
      if (len > slots.size() && len <= slots.size() + b.tuple_len)
        out[restrict_cut(e, m, slots)][{slots, colors}].push_back(idx);
      if (slots.size() == b.param_len) return;
      for (std::size_t i = from; i < len; ++i) {
        slots.push_back(i);
        pick(i + 1);
        slots.pop_back();
      }
    };
    pick(0);
  }
  return out;
}

inline RankSearch rank_over(Engine& eng, const std::vector<CutDescriptor>& all,
                            const std::vector<Engine::Pebbled>& pebbled, const CutDescriptor& param,
                            const TupleGroups& groups, const RankBounds& b, std::vector<std::string>& notes) {
  const std::size_t plen = param.selected_count();
  RankSearch out;
  for (unsigned n = 1; n <= b.n_max; ++n) {
    Tri bad = Tri::No;
    for (const auto& [key, members] : groups) {
      for (const auto& x : members) {
        for (const auto& y : members) {
          if (x == y) continue;
          const Outcome o = eng.leq_pebbled(pebbled[x], pebbled[y], n);
          if (o.is_inconclusive()) {
            bad = Tri::Unknown;
            notes.push_back(o.note);
          } else if (o.is_true()) {
            bad = Tri::Yes;
            out.witness = RankWitness{all[x], all[y], plen ? std::optional<CutDescriptor>(param) : std::nullopt, n};
            break;
          }
        }
        if (bad == Tri::Yes) break;
      }
      if (bad == Tri::Yes) break;
    }
    if (bad == Tri::Yes) out.lower = n + 1;
    if (bad == Tri::No) {
      out.upper = std::max(n, out.lower);
      break;
    }
  }
  if (out.upper && *out.upper < out.lower) out.upper.reset();
  return out;
}

}  // namespace detail

inline RankReport rank_report(Engine& eng, const OrderExpr& e, const RankBounds& b = {}) {
  if (b.n_max == 0 || b.tuple_len == 0) throw std::invalid_argument("rank bounds must be positive");
  const OrderExpr ne = normalize(e);
  RankReport r;
  r.bounds = b;
  const std::size_t longest = b.tuple_len + b.param_len;
  // tuples reach one horizon further than parameters, so that every
  // parameter has room above it
  const auto all = eng.canonical_cuts(ne, b.n_max + 1, longest, longest);
  const auto params = eng.canonical_cuts(ne, b.n_max, b.param_len, b.param_len);

  const auto index = detail::index_by_parameter(ne, all, b);
  std::vector<Engine::Pebbled> pebbled;
  pebbled.reserve(all.size());
  for (const auto& m : all) pebbled.push_back(eng.pebble(ne, m));
  auto groups = [&](const CutDescriptor& p) {
    static const detail::TupleGroups empty;
    auto it = index.find(p);
    return it == index.end() ? std::cref(empty) : std::cref(it->second);
  };
  const CutDescriptor none = empty_cut(ne);
  const auto base = detail::rank_over(eng, all, pebbled, none, groups(none), b, r.notes);
  r.sr_lower = base.lower;
  r.sr_upper = base.upper;
  r.witness = base.witness;
  r.srp_lower = base.lower;
  r.srp_upper = base.upper;
  for (const auto& p : params) {
    const std::size_t k = p.selected_count();
    if (k == 0 || k > b.param_len) continue;
    const auto s = detail::rank_over(eng, all, pebbled, p, groups(p), b, r.notes);
    r.srp_lower = std::min(r.srp_lower, s.lower);
    if (s.upper && (!r.srp_upper || *s.upper < *r.srp_upper)) {
      r.srp_upper = s.upper;
      r.best_parameter = p;
    }
  }
  std::sort(r.notes.begin(), r.notes.end());
  r.notes.erase(std::unique(r.notes.begin(), r.notes.end()), r.notes.end());
  return r;
}

inline ComplexityTag complexity_from_invariants(unsigned sr, unsigned srp) {
  if (sr == 0 || srp == 0 || srp > sr || sr > srp + 2) throw std::invalid_argument("inconsistent rank pair");
  if (sr == srp) return Pi(sr + 1);
  if (sr == srp + 1) return dSigma(sr);
  return Sigma(sr);
}

struct ComplexityResult {
  std::optional<ComplexityTag> tag;  // empty when only bounds are known
  std::optional<RankReport> report;  // absent for finite inputs
};

inline ComplexityResult scott_complexity(Engine& eng, const OrderExpr& e, const RankBounds& b = {}) {
  const OrderExpr ne = normalize(e);
  if (ne.empty()) return {Pi(1), std::nullopt};
  if (is_finite(ne)) return {dSigma(1), std::nullopt};
  RankReport r = rank_report(eng, ne, b);
  ComplexityResult out;
  if (r.sr_upper && r.srp_upper && *r.sr_upper == r.sr_lower && *r.srp_upper == r.srp_lower)
    out.tag = complexity_from_invariants(r.sr_lower, r.srp_lower);
  out.report = std::move(r);
  return out;
}

// A sum of points and shuffles M with e <=_2 M.
//
// If e realizes every color sequence over its colors, Sh(colors) works.
// Otherwise take a shortest unrealized c_1..c_k, write e = P + R where R is
// everything above the first c_1 (R omits c_2..c_k) and P is either P' + 1_{c_1}
// or has no c_1 at all, then cover the pieces.
inline OrderExpr cover2(const OrderExpr& e) {
  const OrderExpr ne = normalize(e);
  if (is_finite(ne)) return ne;
  const std::set<Color> colors = colors_used(ne);
  const auto missing = shortest_unrealized(ne, colors);
  if (!missing) return expr({shuffle(ColorSeq(colors.begin(), colors.end()))});
  const Color c1 = missing->front();
  OrderExpr head = prefix_through_color(ne, c1);
  OrderExpr tail = suffix_after_color(ne, c1);
  OrderExpr point_part;
  if (!head.empty()) {
    if (const auto* p = std::get_if<PointBlock>(&head.blocks.back()); p && p->color == c1) {
      point_part.blocks.push_back(head.blocks.back());
      head.blocks.pop_back();
    }
  }
  return normalize(cover2(head) + point_part + cover2(tail));
}

inline bool in_basic_sums(const OrderExpr& e) { return !has_omega(e); }

}  // namespace bfscott
