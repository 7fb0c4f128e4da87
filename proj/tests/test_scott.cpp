#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "bfscott/scott.hpp"

using namespace bfscott;

namespace {

const OrderExpr kL = expr({eta(0), point(0), shuffle({0, 1})});

OrderExpr eta_n_eta(std::size_t n) { return expr({eta(0)}) + repeat(expr({point(0)}), n) + expr({eta(0)}); }

}  // namespace

TEST_CASE("rank pairs map to complexity classes", "[scott]") {
  CHECK(complexity_from_invariants(1, 1) == Pi(2));
  CHECK(complexity_from_invariants(2, 1) == dSigma(2));
  CHECK(complexity_from_invariants(3, 1) == Sigma(3));
  CHECK(complexity_from_invariants(2, 2) == Pi(3));
  CHECK(complexity_from_invariants(4, 3) == dSigma(4));
  CHECK_THROWS_WITH(complexity_from_invariants(1, 2), "inconsistent rank pair");
  CHECK_THROWS_WITH(complexity_from_invariants(4, 1), "inconsistent rank pair");
  CHECK_THROWS_WITH(complexity_from_invariants(0, 0), "inconsistent rank pair");
  CHECK(to_string(Pi(2)) == "Pi 2");
  CHECK(to_string(dSigma(2)) == "d-Sigma 2");
  CHECK(to_string(Sigma(3)) == "Sigma 3");
}

TEST_CASE("complexities of small examples", "[scott]") {
  Engine eng;
  auto tag = [&](const OrderExpr& e) {
    const auto r = scott_complexity(eng, e);
    REQUIRE(r.tag);
    return *r.tag;
  };
  CHECK(tag(OrderExpr{}) == Pi(1));
  CHECK(tag(from_colors({0, 1, 1})) == dSigma(1));
  CHECK(tag(expr({eta(0)})) == Pi(2));
  CHECK(tag(expr({shuffle({0, 1})})) == Pi(2));
  CHECK(tag(repeat(expr({eta(0), eta(1)}), 2)) == Pi(2));
  CHECK(tag(eta_n_eta(2)) == dSigma(2));
  CHECK(tag(eta_n_eta(3)) == dSigma(2));
  CHECK(tag(kL) == Sigma(3));
  CHECK(tag(expr({omega({}, {0})})) == Pi(3));
}

TEST_CASE("a single point between copies of eta is absorbed", "[scott]") {
  // eta + 1 + eta is again eta
  Engine eng;
  CHECK(normalize(eta_n_eta(1)) == expr({eta(0)}));
  CHECK(scott_complexity(eng, eta_n_eta(1)).tag == Pi(2));
}

TEST_CASE("the rank report explains the Sigma-3 example", "[scott]") {
  Engine eng;
  const RankReport r = rank_report(eng, kL);
  CHECK(r.sr_lower == 3);
  CHECK(r.sr_upper == 3u);
  CHECK(r.srp_lower == 1);
  CHECK(r.srp_upper == 1u);
  CHECK(r.notes.empty());
  REQUIRE(r.witness);
  CHECK(r.witness->rank == 2);
  CHECK_FALSE(orbit_equal(kL, r.witness->left, r.witness->right));
  CHECK(eng.leq_tuples(kL, r.witness->left, kL, r.witness->right, 2).is_true());
  REQUIRE(r.best_parameter);
  CHECK(r.best_parameter->selected_count() >= 1);
}

TEST_CASE("rank bounds are validated", "[scott]") {
  Engine eng;
  CHECK_THROWS_AS(rank_report(eng, kL, RankBounds{0, 2, 2}), std::invalid_argument);
  CHECK_THROWS_AS(rank_report(eng, kL, RankBounds{3, 0, 2}), std::invalid_argument);
  // too small a bound leaves the rank open
  const RankReport r = rank_report(eng, kL, RankBounds{2, 2, 2});
  CHECK(r.sr_lower == 3);
  CHECK_FALSE(r.sr_upper);
  CHECK_FALSE(scott_complexity(eng, kL, RankBounds{2, 2, 2}).tag);
}

TEST_CASE("orbits are descriptor equality on normal forms", "[scott]") {
  const OrderExpr e = expr({omega({}, {0}), point(1), eta(0)});
  const CutDescriptor a{{OmegaCut{}, PointCut{false}, ShuffleCut{{0}}}};
  const CutDescriptor b{{OmegaCut{}, PointCut{false}, ShuffleCut{{0}}}};
  const CutDescriptor c{{OmegaCut{{0}}, PointCut{false}, ShuffleCut{}}};
  CHECK(orbit_equal(e, a, b));
  CHECK_FALSE(orbit_equal(e, a, c));
  CHECK_THROWS_AS(orbit_equal(e, a, CutDescriptor{}), std::invalid_argument);
}

TEST_CASE("restricting a cut keeps chosen selections", "[scott]") {
  const OrderExpr e = expr({shuffle({0, 1}), point(0), omega({}, {1, 0})});
  const CutDescriptor d{{ShuffleCut{{1, 0}}, PointCut{true}, OmegaCut{{2, 5}}}};
  CHECK(restrict_cut(e, d, {0, 2}) == CutDescriptor{{ShuffleCut{{1}}, PointCut{true}, OmegaCut{}}});
  CHECK(restrict_cut(e, d, {1, 4}) == CutDescriptor{{ShuffleCut{{0}}, PointCut{false}, OmegaCut{{5}}}});
  CHECK(restrict_cut(e, d, {}) == empty_cut(e));
}

TEST_CASE("2-universal covers", "[scott][cover2]") {
  CHECK(cover2(expr({omega({}, {1, 0})})) == expr({shuffle({0, 1})}));
  CHECK(cover2(from_colors({0, 1})) == from_colors({0, 1}));
  // every color sequence over {0,1} occurs
  CHECK(cover2(kL) == expr({shuffle({0, 1})}));
  CHECK(cover2(expr({eta(0), point(1), eta(0)})) == expr({eta(0), point(1), eta(0)}));
  CHECK(in_basic_sums(cover2(expr({omega({0, 0, 1}, {0}), point(1), eta(2)}))));
  CHECK_FALSE(in_basic_sums(expr({omega({}, {0})})));
}

TEST_CASE("covers are sums of basic blocks above their input", "[scott][cover2]") {
  Engine eng;
  std::mt19937 rng(17);
  auto rnd = [&](unsigned k) { return static_cast<unsigned>(rng() % k); };
  for (int i = 0; i < 40; ++i) {
    OrderExpr e;
    for (unsigned b = 1 + rnd(3); b > 0; --b) {
      switch (rnd(3)) {
        case 0:
          e.blocks.push_back(point(rnd(3)));
          break;
        case 1:
          e.blocks.push_back(shuffle({rnd(3), rnd(3)}));
          break;
        default: {
          ColorSeq pre, per;
          for (unsigned j = rnd(3); j > 0; --j) pre.push_back(rnd(3));
          for (unsigned j = 1 + rnd(3); j > 0; --j) per.push_back(rnd(3));
          e.blocks.push_back(omega(pre, per));
        }
      }
    }
    const OrderExpr m = cover2(e);
    INFO(to_string(e) << " -> " << to_string(m));
    CHECK(in_basic_sums(m));
    CHECK(eng.leq(e, m, 2).is_true());
  }
}
