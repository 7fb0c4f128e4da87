#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "bfscott/order_algebra.hpp"
#include "bfscott/sequence_language.hpp"

using namespace bfscott;

namespace {

// first `len` colors of e, with omega blocks unrolled to `len` positions
ColorSeq unroll(const OrderExpr& e, std::size_t len) {
  ColorSeq out;
  for (const auto& b : e.blocks) {
    if (const auto* p = std::get_if<PointBlock>(&b)) out.push_back(p->color);
    if (const auto* w = std::get_if<OmegaBlock>(&b))
      for (std::size_t i = 0; i < len; ++i) out.push_back(w->at(i));
  }
  return out;
}

}  // namespace

TEST_CASE("block constructors canonicalize shuffle colors", "[algebra]") {
  const auto b = shuffle({2, 0, 2, 1});
  REQUIRE(std::get<ShuffleBlock>(b).colors == ColorSeq{0, 1, 2});
  REQUIRE_THROWS_AS(shuffle({}), std::invalid_argument);
  REQUIRE_THROWS_AS(omega({0}, {}), std::invalid_argument);
  REQUIRE_THROWS_AS(repeat(expr({point(0)}), 0), std::invalid_argument);
}

TEST_CASE("omega positions follow prefix then period", "[algebra]") {
  const auto w = std::get<OmegaBlock>(omega({5, 6}, {1, 0}));
  const ColorSeq want{5, 6, 1, 0, 1, 0, 1};
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(w.at(i) == want[i]);
}

TEST_CASE("adjacent equal shuffles merge", "[algebra][normalize]") {
  CHECK(normalize(expr({eta(0), eta(0)})) == expr({eta(0)}));
  CHECK(normalize(expr({shuffle({0, 1}), shuffle({1, 0}), shuffle({0, 1})})) == expr({shuffle({0, 1})}));
  CHECK(normalize(expr({eta(0), eta(1)})) == expr({eta(0), eta(1)}));
}

TEST_CASE("a point between equal shuffles is absorbed only if its color occurs there", "[algebra][normalize]") {
  CHECK(normalize(expr({eta(0), point(0), eta(0)})) == expr({eta(0)}));
  CHECK(normalize(expr({eta(0), point(1), eta(0)})) == expr({eta(0), point(1), eta(0)}));
  CHECK(normalize(expr({shuffle({0, 1}), point(1), shuffle({0, 1}), point(0), shuffle({0, 1})})) ==
        expr({shuffle({0, 1})}));
  // two points stay
  CHECK(normalize(expr({eta(0), point(0), point(0), eta(0)})).size() == 4);
}

TEST_CASE("points before an omega-word join its prefix", "[algebra][normalize]") {
  CHECK(normalize(expr({point(1), omega({}, {0})})) == expr({omega({1}, {0})}));
  CHECK(normalize(expr({point(0), omega({}, {0})})) == expr({omega({}, {0})}));
  CHECK(normalize(expr({point(1), point(0), omega({}, {1, 0})})) == expr({omega({}, {1, 0})}));
  CHECK(normalize(expr({omega({0, 0}, {0, 0, 0})})) == expr({omega({}, {0})}));
  CHECK(normalize(expr({omega({2}, {0, 1, 0, 1})})) == expr({omega({2}, {0, 1})}));
  // points after an omega-word are kept
  CHECK(normalize(expr({omega({}, {0}), point(0)})).size() == 2);
}

TEST_CASE("normalize is idempotent and preserves unrolled colors", "[algebra][normalize]") {
  std::mt19937 rng(7);
  auto rnd = [&](unsigned k) { return static_cast<unsigned>(rng() % k); };
  for (int iter = 0; iter < 500; ++iter) {
    OrderExpr e;
    const unsigned blocks = 1 + rnd(5);
    for (unsigned i = 0; i < blocks; ++i) {
      switch (rnd(3)) {
        case 0:
          e.blocks.push_back(point(rnd(2)));
          break;
        case 1:
          e.blocks.push_back(rnd(2) ? eta(rnd(2)) : shuffle({0, 1}));
          break;
        default: {
          ColorSeq pre, per;
          for (unsigned j = rnd(3); j > 0; --j) pre.push_back(rnd(2));
          for (unsigned j = 1 + rnd(3); j > 0; --j) per.push_back(rnd(2));
          e.blocks.push_back(omega(pre, per));
        }
      }
    }
    const OrderExpr n = normalize(e);
    CHECK(normalize(n) == n);
    CHECK(is_finite(n) == is_finite(e));
    CHECK(colors_used(n) == colors_used(e));
    if (is_finite(e)) CHECK(finite_colors(n) == finite_colors(e));
    // the sequence languages agree
    CHECK(sequences_included(e, n));
    CHECK(sequences_included(n, e));
  }
}

TEST_CASE("an omega prefix merge keeps the word", "[algebra][normalize]") {
  const OrderExpr e = expr({point(1), point(0), omega({1}, {0, 1, 1})});
  const OrderExpr n = normalize(e);
  REQUIRE(n.size() == 1);
  const ColorSeq flat = unroll(e, 20);
  CHECK(unroll(n, 22) == flat);
  const auto& w = std::get<OmegaBlock>(n.blocks[0]);
  const ColorSeq want{1, 0, 1, 0, 1, 1, 0, 1, 1, 0, 1, 1};
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(w.at(i) == want[i]);
}

TEST_CASE("cut descriptors are validated against their expression", "[algebra][cuts]") {
  const OrderExpr e = expr({point(0), shuffle({0, 1}), omega({}, {1, 0})});
  CutDescriptor d{{PointCut{true}, ShuffleCut{{1, 0, 1}}, OmegaCut{{0, 3}}}};
  REQUIRE(cuts(e, d));
  CHECK(d.selected_count() == 6);
  CHECK(selected_colors(e, d) == ColorSeq{0, 1, 0, 1, 1, 0});
  CHECK_FALSE(cuts(e, CutDescriptor{{PointCut{true}, ShuffleCut{{2}}, OmegaCut{}}}));
  CHECK_FALSE(cuts(e, CutDescriptor{{PointCut{true}, ShuffleCut{}, OmegaCut{{3, 3}}}}));
  CHECK_FALSE(cuts(e, CutDescriptor{{PointCut{true}, ShuffleCut{}}}));
  CHECK_FALSE(cuts(e, CutDescriptor{{ShuffleCut{}, ShuffleCut{}, OmegaCut{}}}));
  CHECK_THROWS_AS(require_cut(e, CutDescriptor{}), std::invalid_argument);
  CHECK(empty_cut(e).selected_count() == 0);
  CHECK(cuts(e, empty_cut(e)));
}

TEST_CASE("split yields the interval decomposition", "[algebra][cuts]") {
  const OrderExpr e = expr({eta(0), point(1), shuffle({0, 1}), omega({2}, {0, 1})});
  const CutDescriptor d{{ShuffleCut{}, PointCut{true}, ShuffleCut{{0}}, OmegaCut{{0, 2}}}};
  const Decomposition s = split(e, d);
  REQUIRE(s.colors == ColorSeq{1, 0, 2, 1});
  REQUIRE(s.intervals.size() == 5);
  CHECK(s.intervals[0] == expr({eta(0)}));
  CHECK(s.intervals[1] == expr({shuffle({0, 1})}));
  CHECK(s.intervals[2] == expr({shuffle({0, 1})}));
  CHECK(s.intervals[3] == expr({point(0)}));
  CHECK(s.intervals[4] == expr({omega({}, {0, 1})}));
}

TEST_CASE("split of the empty cut is the whole expression", "[algebra][cuts]") {
  const OrderExpr e = expr({eta(0), point(0), eta(0)});
  const Decomposition s = split(e, empty_cut(e));
  REQUIRE(s.colors.empty());
  REQUIRE(s.intervals.size() == 1);
  CHECK(s.intervals[0] == expr({eta(0)}));
}

TEST_CASE("omega suffixes rotate the period", "[algebra]") {
  const auto w = std::get<OmegaBlock>(omega({3}, {0, 1, 2}));
  CHECK(omega_suffix(w, 0) == std::get<OmegaBlock>(omega({}, {0, 1, 2})));
  CHECK(omega_suffix(w, 1) == std::get<OmegaBlock>(omega({}, {1, 2, 0})));
  CHECK(omega_suffix(w, 5) == std::get<OmegaBlock>(omega({}, {2, 0, 1})));
}

TEST_CASE("color prefix and suffix split around the first occurrence", "[algebra]") {
  const OrderExpr e = expr({eta(0), point(1), eta(2), shuffle({1, 2})});
  CHECK(prefix_through_color(e, 1) == expr({eta(0), point(1)}));
  CHECK(suffix_after_color(e, 1) == expr({eta(2), shuffle({1, 2})}));
  CHECK(prefix_through_color(e, 2) == expr({eta(0), point(1)}));
  CHECK(suffix_after_color(e, 2) == expr({eta(2), shuffle({1, 2})}));
  CHECK(suffix_after_color(e, 7).empty());
  CHECK(prefix_through_color(e, 7) == e);

  const OrderExpr w = expr({omega({0, 0}, {1, 0})});
  CHECK(prefix_through_color(w, 1) == from_colors({0, 0, 1}));
  CHECK(suffix_after_color(w, 1) == expr({omega({}, {0, 1})}));
}

TEST_CASE("rendering follows the expression grammar", "[algebra]") {
  const OrderExpr e = expr({point(3), eta(0), shuffle({0, 2}), omega({1}, {1, 0})});
  CHECK(to_string(e) == "1_3 + eta_0 + sh(0,2) + omega[1;1,0]");
  CHECK(to_string(OrderExpr{}).empty());
  CHECK(to_string(CutDescriptor{{PointCut{true}, ShuffleCut{}, ShuffleCut{{2, 0}}, OmegaCut{{0, 4}}}}) ==
        "*||2,0|0,4");
  CHECK(std::hash<OrderExpr>{}(e) == std::hash<OrderExpr>{}(normalize(e)));
}
