#pragma once

// The language of ascending color sequences realized by an OrderExpr.
//
// Positions of omega-words are folded modulo the period. Matching a word
// greedily at the earliest possible position is optimal for subsequence
// languages, so a single state suffices to track the matches of a prefix.

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "order_algebra.hpp"

namespace bfscott {

class SequenceAutomaton {
 public:
  // state 0 is "before every element"
  static constexpr std::uint32_t start = 0;

  explicit SequenceAutomaton(OrderExpr e) : expr_(std::move(e)) {
    states_.push_back({0, 0});
    for (std::uint32_t b = 0; b < expr_.blocks.size(); ++b) {
      first_state_.push_back(static_cast<std::uint32_t>(states_.size()));
      std::size_t width = 1;
      if (const auto* w = std::get_if<OmegaBlock>(&expr_.blocks[b])) width = w->prefix.size() + w->period.size();
      for (std::size_t i = 0; i < width; ++i) states_.push_back({b + 1, static_cast<std::uint32_t>(i)});
    }
  }

  const OrderExpr& expr() const { return expr_; }
  std::size_t state_count() const { return states_.size(); }

  // Earliest position of color c strictly after state s.
  std::optional<std::uint32_t> next(std::uint32_t s, Color c) const {
    std::size_t block = 0;  // first block to scan from its beginning
    if (s != start) {
      const auto [b1, idx] = states_[s];
      const std::size_t b = b1 - 1;
      const Block& blk = expr_.blocks[b];
      if (const auto* sh = std::get_if<ShuffleBlock>(&blk)) {
        if (sh->contains(c)) return s;
      } else if (const auto* w = std::get_if<OmegaBlock>(&blk)) {
        const std::size_t plen = w->prefix.size(), qlen = w->period.size();
        for (std::size_t i = idx + 1; i < plen + qlen; ++i)
          if (w->at(i) == c) return first_state_[b] + static_cast<std::uint32_t>(i);
        if (idx >= plen) {
          // wrap into the next copy of the period
          for (std::size_t i = plen; i <= idx; ++i)
            if (w->at(i) == c) return first_state_[b] + static_cast<std::uint32_t>(i);
        }
      }
      block = b + 1;
    }
    for (std::size_t b = block; b < expr_.blocks.size(); ++b) {
      const Block& blk = expr_.blocks[b];
      if (const auto* p = std::get_if<PointBlock>(&blk)) {
        if (p->color == c) return first_state_[b];
      } else if (const auto* sh = std::get_if<ShuffleBlock>(&blk)) {
        if (sh->contains(c)) return first_state_[b];
      } else {
        const auto& w = std::get<OmegaBlock>(blk);
        for (std::size_t i = 0; i < w.prefix.size() + w.period.size(); ++i)
          if (w.at(i) == c) return first_state_[b] + static_cast<std::uint32_t>(i);
      }
    }
    return std::nullopt;
  }

  bool accepts(const ColorSeq& word) const {
    std::uint32_t s = start;
    for (Color c : word) {
      auto n = next(s, c);
      if (!n) return false;
      s = *n;
    }
    return true;
  }

 private:
  OrderExpr expr_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> states_;  // (block + 1, index)
  std::vector<std::uint32_t> first_state_;
};

inline bool realizes_color_sequence(const OrderExpr& e, const ColorSeq& s) { return SequenceAutomaton(e).accepts(s); }

// A shortest color sequence realized in `sub` but not in `super`, if any.
inline std::optional<ColorSeq> sequence_inclusion_counterexample(const OrderExpr& sub, const OrderExpr& super) {
  const SequenceAutomaton a(sub), b(super);
  const auto alphabet = colors_used(sub);
  using Pair = std::pair<std::uint32_t, std::uint32_t>;
  std::map<Pair, std::pair<Pair, Color>> parent;
  std::deque<Pair> queue{{SequenceAutomaton::start, SequenceAutomaton::start}};
  parent[queue.front()] = {queue.front(), 0};
  auto trace = [&](Pair p, Color last) {
    ColorSeq word{last};
    while (p != Pair{SequenceAutomaton::start, SequenceAutomaton::start}) {
      auto [prev, c] = parent.at(p);
      word.push_back(c);
      p = prev;
    }
    return ColorSeq(word.rbegin(), word.rend());
  };
  while (!queue.empty()) {
    const Pair cur = queue.front();
    queue.pop_front();
    for (Color c : alphabet) {
      auto na = a.next(cur.first, c);
      if (!na) continue;
      auto nb = b.next(cur.second, c);
      if (!nb) return trace(cur, c);
      const Pair nxt{*na, *nb};
      if (parent.emplace(nxt, std::pair{cur, c}).second) queue.push_back(nxt);
    }
  }
  return std::nullopt;
}

// Every sequence realized in `sub` is realized in `super`.
inline bool sequences_included(const OrderExpr& sub, const OrderExpr& super) {
  return !sequence_inclusion_counterexample(sub, super).has_value();
}

// A shortest sequence over `alphabet` that e does not realize, if any.
inline std::optional<ColorSeq> shortest_unrealized(const OrderExpr& e, const std::set<Color>& alphabet) {
  const SequenceAutomaton a(e);
  std::map<std::uint32_t, std::pair<std::uint32_t, Color>> parent;
  std::deque<std::uint32_t> queue{SequenceAutomaton::start};
  parent[SequenceAutomaton::start] = {SequenceAutomaton::start, 0};
  while (!queue.empty()) {
    const auto cur = queue.front();
    queue.pop_front();
    for (Color c : alphabet) {
      auto n = a.next(cur, c);
      if (!n) {
        ColorSeq word{c};
        for (auto s = cur; s != SequenceAutomaton::start; s = parent.at(s).first) word.push_back(parent.at(s).second);
        return ColorSeq(word.rbegin(), word.rend());
      }
      if (parent.emplace(*n, std::pair{cur, c}).second) queue.push_back(*n);
    }
  }
  return std::nullopt;
}

}  // namespace bfscott
