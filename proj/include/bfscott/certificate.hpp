#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

namespace bfscott {

// Strategy tree for a query "left <=_n right".
//
// holds:  one reply per forall-move on the right side, each carrying the
//         exists-response on the left and the child certificates that the
//         response wins (sides swap at every level).
// fails:  `refutation` is a single forall-move; `replies` lists every
//         exists-response that agrees at rank 0, each with one losing child.
template <class Query, class Move>
struct Certificate {
  struct Reply {
    Move forall_move;
    Move exists_move;
    std::vector<Certificate> children;
  };

  Query query;
  bool holds = false;
  std::optional<Move> refutation;
  std::vector<Reply> replies;

  std::size_t depth() const {
    std::size_t d = 0;
    for (const auto& r : replies)
      for (const auto& c : r.children) d = std::max(d, 1 + c.depth());
    return d;
  }

  std::size_t node_count() const {
    std::size_t n = 1;
    for (const auto& r : replies)
      for (const auto& c : r.children) n += c.node_count();
    return n;
  }
};

}  // namespace bfscott
