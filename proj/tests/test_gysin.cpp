#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>
#include <vector>

#include "fglchern/chern.hpp"
#include "fglchern/error.hpp"
#include "fglchern/fgl.hpp"
#include "fglchern/gysin.hpp"
#include "fglchern/rational.hpp"
#include "fglchern/ring.hpp"

using namespace fglchern;

namespace {

constexpr unsigned kSeed = 20260818;

RingPtr with_gens(const RingPtr& coeff, const std::vector<std::string>& names) {
  std::vector<Generator> extra;
  for (const auto& n : names) extra.push_back({n, 1, 0});
  return GradedRing::extend(coeff, extra);
}

/// Random element of the subring generated by `names`, with small integer
/// coefficients on monomials of total degree <= 2.
RingElement random_base_elem(std::mt19937& rng, const RingPtr& ring,
                             const std::vector<std::string>& names) {
  auto coeff = [&]() { return Rational(static_cast<long>(rng() % 7) - 3); };
  RingElement acc = RingElement::constant(ring, coeff());
  std::vector<RingElement> gens;
  for (const auto& n : names) gens.push_back(gen_elem(ring, n));
  for (const auto& g : gens) acc += g.scaled(coeff());
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = i; j < gens.size(); ++j) acc += (gens[i] * gens[j]).scaled(coeff());
  return acc;
}

}  // namespace

TEST_CASE("relative line pushforward follows the coefficient rule") {
  auto F = fgl_universal(5);
  auto base = with_gens(F.coeff_ring, {"y1", "y2"});
  auto space = projective_space(base, 1);
  const RingElement x = space.c();
  const RingElement one = RingElement::one(space.total);
  const RingElement a11 = F.a(1, 1).lifted(base);

  CHECK(pushforward_p1(F, space, x) == RingElement::one(base));
  CHECK(pushforward_p1(F, space, one) == -a11);
  CHECK(pushforward_p1(F, space, RingElement::zero(space.total)) ==
        RingElement::zero(base));

  const RingElement y1 = gen_elem(base, "y1");
  RingElement u = y1.lifted(space.total) * x + (y1 * y1).lifted(space.total);
  CHECK(pushforward_p1(F, space, u) == y1 - a11 * y1 * y1);

  auto narrow = projective_space(base, 2);
  CHECK_THROWS_AS(pushforward_p1(F, narrow, RingElement::one(narrow.total)), Error);
}

TEST_CASE("residue engine agrees with the relative line rule on random classes") {
  std::mt19937 rng(kSeed);
  struct Setup {
    FormalGroupLaw F;
    int draws;
  };
  std::vector<Setup> setups;
  setups.push_back({fgl_additive(6), 50});
  setups.push_back({fgl_multiplicative(6), 50});
  setups.push_back({fgl_universal(6), 12});
  for (const auto& [F, draws] : setups) {
    auto base = with_gens(F.coeff_ring, {"y1", "y2"});
    auto space = projective_space(base, 1);
    const RingElement x = space.c();
    for (int t = 0; t < draws; ++t) {
      RingElement a = random_base_elem(rng, base, {"y1", "y2"});
      RingElement b = random_base_elem(rng, base, {"y1", "y2"});
      RingElement u = a.lifted(space.total) + b.lifted(space.total) * x;
      CHECK(pushforward_pn(F, space, u) == pushforward_p1(F, space, u));
    }
  }
}

TEST_CASE("additive projective-space degrees are delta functions") {
  auto F = fgl_additive(6);
  auto base = with_gens(F.coeff_ring, {"y"});
  const RingElement y = gen_elem(base, "y");
  for (int n = 1; n <= 3; ++n) {
    auto space = projective_space(base, n);
    const RingElement x = space.c();
    for (int i = 0; i <= n; ++i) {
      RingElement expected =
          i == n ? RingElement::one(base) : RingElement::zero(base);
      CHECK(pushforward_pn(F, space, x.pow(static_cast<unsigned>(i))) == expected);
      CHECK(pushforward_pn(F, space,
                           y.lifted(space.total) * x.pow(static_cast<unsigned>(i))) ==
            y * expected);
    }
  }
}

TEST_CASE("multiplicative projective-space pushforward matches the Taylor oracle") {
  // Independent closed form: pushing x^e along the trivial n-space gives
  // b^(n-e), i.e. the t^n Taylor coefficient of t^e/(1-bt).
  auto F = fgl_multiplicative(6);
  auto base = with_gens(F.coeff_ring, {"y"});
  const RingElement b = gen_elem(base, "b");
  const RingElement y = gen_elem(base, "y");
  std::mt19937 rng(kSeed + 1);
  for (int n = 1; n <= 3; ++n) {
    auto space = projective_space(base, n);
    const RingElement x = space.c();
    RingElement u = RingElement::zero(space.total);
    RingElement expected = RingElement::zero(base);
    for (int e = 0; e <= n; ++e) {
      RingElement coeff = random_base_elem(rng, base, {"y"});
      u += coeff.lifted(space.total) * x.pow(static_cast<unsigned>(e));
      expected += coeff * b.pow(static_cast<unsigned>(n - e));
    }
    CHECK(pushforward_pn(F, space, u) == expected);
    CHECK(pushforward_pn(F, space, y.lifted(space.total) * x) ==
          y * b.pow(static_cast<unsigned>(n - 1)));
  }
}

TEST_CASE("rank-1 completion pairing has the exact series values") {
  SUBCASE("additive") {
    auto F = fgl_additive(6);
    auto base = with_gens(F.coeff_ring, {"y"});
    const RingElement y = gen_elem(base, "y");
    auto th = thom_class(base, bundle_new(base, {y}));
    const auto& pb = th.completion;
    CHECK(pushforward_completion_rank1(F, pb, RingElement::one(pb.total)) ==
          RingElement::zero(base));
    CHECK(pushforward_completion_rank1(F, pb, pb.c()) ==
          -RingElement::one(base));
    CHECK(pushforward_completion_rank1(F, pb, th.cls) == RingElement::one(base));
  }
  SUBCASE("multiplicative") {
    auto F = fgl_multiplicative(6);
    auto base = with_gens(F.coeff_ring, {"y"});
    const RingElement y = gen_elem(base, "y");
    const RingElement b = gen_elem(base, "b");
    auto th = thom_class(base, bundle_new(base, {y}));
    const auto& pb = th.completion;
    CHECK(pushforward_completion_rank1(F, pb, RingElement::one(pb.total)) == b);
    CHECK(pushforward_completion_rank1(F, pb, pb.c()) ==
          -RingElement::one(base) + b * y);
    CHECK(pushforward_completion_rank1(F, pb, th.cls) == RingElement::one(base));
  }
}

TEST_CASE("rank-1 completion pairing agrees with the twisted residue engine") {
  std::mt19937 rng(kSeed + 2);
  std::vector<FormalGroupLaw> laws;
  laws.push_back(fgl_additive(6));
  laws.push_back(fgl_multiplicative(6));
  for (const auto& F : laws) {
    auto base = with_gens(F.coeff_ring, {"y", "w"});
    const RingElement y = gen_elem(base, "y");
    auto th = thom_class(base, bundle_new(base, {y}));
    const auto& pb = th.completion;
    std::vector<RingElement> classes = {
        RingElement::one(pb.total), pb.c(), th.cls,
        gen_elem(base, "w").lifted(pb.total) * pb.c()};
    for (int t = 0; t < 4; ++t)
      classes.push_back(random_base_elem(rng, base, {"y", "w"}).lifted(pb.total) +
                        random_base_elem(rng, base, {"y", "w"}).lifted(pb.total) * pb.c());
    for (const auto& u : classes)
      CHECK(pushforward_completion_rank1(F, pb, u) == pushforward_projective(F, pb, u));
  }
}

TEST_CASE("twisted pairing values on a rank-2 projectivization") {
  SUBCASE("additive") {
    auto F = fgl_additive(6);
    auto base = with_gens(F.coeff_ring, {"y1", "y2"});
    const RingElement y1 = gen_elem(base, "y1");
    const RingElement y2 = gen_elem(base, "y2");
    auto pb = projective_bundle(base, bundle_new(base, {y1, y2}));
    const RingElement c = pb.c();
    CHECK(pushforward_projective(F, pb, RingElement::one(pb.total)) ==
          RingElement::zero(base));
    CHECK(pushforward_projective(F, pb, c) == -RingElement::one(base));
    CHECK(pushforward_projective(F, pb, c * c) == -(y1 + y2));
  }
  SUBCASE("multiplicative") {
    auto F = fgl_multiplicative(6);
    auto base = with_gens(F.coeff_ring, {"y1", "y2"});
    const RingElement y1 = gen_elem(base, "y1");
    const RingElement y2 = gen_elem(base, "y2");
    const RingElement b = gen_elem(base, "b");
    auto pb = projective_bundle(base, bundle_new(base, {y1, y2}));
    const RingElement c = pb.c();
    CHECK(pushforward_projective(F, pb, RingElement::one(pb.total)) == b);
    CHECK(pushforward_projective(F, pb, c) ==
          -RingElement::one(base) + b * (y1 + y2));
    CHECK(pushforward_projective(F, pb, c * c) ==
          -(y1 + y2) + b * (y1 * y1 + y1 * y2 + y2 * y2));
  }
}

TEST_CASE("zero-section classes pair to one against the completion") {
  SUBCASE("rank 1, additive and multiplicative") {
    for (auto F : {fgl_additive(6), fgl_multiplicative(6)}) {
      auto base = with_gens(F.coeff_ring, {"y"});
      auto r = key_lemma_check(F, bundle_new(base, {gen_elem(base, "y")}));
      CHECK(r.pass);
      CHECK(r.witness.empty());
    }
  }
  SUBCASE("rank 1, universal at several caps") {
    for (int cap : {3, 4, 5}) {
      auto F = fgl_universal(cap);
      auto base = with_gens(F.coeff_ring, {"y"});
      CHECK(key_lemma_check(F, bundle_new(base, {gen_elem(base, "y")})).pass);
    }
  }
  SUBCASE("rank 2, exact laws through the twisted engine") {
    for (auto F : {fgl_additive(6), fgl_multiplicative(6)}) {
      auto base = with_gens(F.coeff_ring, {"y1", "y2"});
      auto v = bundle_new(base, {gen_elem(base, "y1"), gen_elem(base, "y2")});
      CHECK(key_lemma_check(F, v).pass);
    }
  }
  SUBCASE("rank 2 with an incomplete table is refused") {
    auto F = fgl_universal(4);
    auto base = with_gens(F.coeff_ring, {"y1", "y2"});
    auto v = bundle_new(base, {gen_elem(base, "y1"), gen_elem(base, "y2")});
    CHECK_THROWS_AS(key_lemma_check(F, v), Error);
  }
}

TEST_CASE("degree classes match the closed form") {
  auto F = fgl_universal(5);
  auto base = with_gens(F.coeff_ring, {"y0"});
  const RingElement y0 = gen_elem(base, "y0");
  for (long d : {0L, 1L, 2L, 3L}) {
    CHECK(degree_class(F, d, y0) == degree_class_closed(F, d, y0));
    CHECK(degree_class(F, d, RingElement::zero(base)) ==
          RingElement::constant(base, Rational(d)));
  }
  // The two readings of the closed form agree at d = 1 and genuinely differ
  // for higher degrees, which is why reports carry the comparison.
  CHECK(degree_class_closed(F, 1, y0) == degree_class_display(F, 1, y0));
  CHECK(degree_class_closed(F, 2, y0) != degree_class_display(F, 2, y0));

  auto A = fgl_additive(5);
  auto abase = with_gens(A.coeff_ring, {"y0"});
  const RingElement ay0 = gen_elem(abase, "y0");
  for (long d : {1L, 2L, 3L})
    CHECK(degree_class(A, d, ay0) == RingElement::constant(abase, Rational(d)));

  CHECK_THROWS_AS(degree_class(F, 2, y0 * y0), Error);
}

TEST_CASE("excess comparison holds for nested root sets") {
  auto F = fgl_universal(4);
  auto base = with_gens(F.coeff_ring, {"x1", "x2"});
  const RingElement x1 = gen_elem(base, "x1");
  const RingElement x2 = gen_elem(base, "x2");

  SUBCASE("rank-2 into rank-1 leaves a line of excess") {
    auto r = excess_check(F, bundle_new(base, {x1, x2}), bundle_new(base, {x1}));
    CHECK(r.pass);
  }
  SUBCASE("transversal case has no excess") {
    auto r = excess_check(F, bundle_new(base, {x1, x2}), bundle_new(base, {x1, x2}));
    CHECK(r.pass);
  }
  SUBCASE("tensor roots bring law coefficients into the comparison") {
    const RingElement t = c1_tensor(F, x1, x2);
    auto r = excess_check(F, bundle_new(base, {t, x2}), bundle_new(base, {x2}));
    CHECK(r.pass);
    auto r2 = excess_check(F, bundle_new(base, {t, x1}), bundle_new(base, {t}));
    CHECK(r2.pass);
  }
  SUBCASE("non-nested roots are rejected") {
    CHECK_THROWS_AS(
        excess_check(F, bundle_new(base, {x1}), bundle_new(base, {x2})), Error);
  }
}

TEST_CASE("self-intersection returns the top class") {
  auto F = fgl_universal(4);
  auto base = with_gens(F.coeff_ring, {"y1", "y2"});
  const RingElement y1 = gen_elem(base, "y1");
  const RingElement y2 = gen_elem(base, "y2");
  CHECK(self_intersection(F, bundle_new(base, {y1})) == y1);
  CHECK(self_intersection(F, bundle_new(base, {y1, y2})) == y1 * y2);
  CHECK(self_intersection(F, bundle_new(base, {RingElement::zero(base)})) ==
        RingElement::zero(base));
}

TEST_CASE("ramification classes fold component multiplicities") {
  SUBCASE("additive law adds multiplicities linearly") {
    auto F = fgl_additive(6);
    auto base = with_gens(F.coeff_ring, {"e1", "e2", "e3"});
    std::mt19937 rng(kSeed + 3);
    for (int t = 0; t < 10; ++t) {
      std::vector<std::pair<long, RingElement>> comps;
      RingElement expected = RingElement::zero(base);
      for (const auto* name : {"e1", "e2", "e3"}) {
        long m = static_cast<long>(rng() % 5);
        comps.emplace_back(m, gen_elem(base, name));
        expected += gen_elem(base, name).scaled(Rational(m));
      }
      CHECK(ramification_class(F, base, comps) == expected);
    }
  }
  SUBCASE("multiplicative law matches the product identity") {
    // Independent oracle: 1 - prod_k (1 - b e_k)^(m_k) == b * class.
    auto F = fgl_multiplicative(6);
    auto base = with_gens(F.coeff_ring, {"e1", "e2"});
    const RingElement b = gen_elem(base, "b");
    const RingElement one = RingElement::one(base);
    std::mt19937 rng(kSeed + 4);
    for (int t = 0; t < 10; ++t) {
      std::vector<std::pair<long, RingElement>> comps;
      RingElement prod = one;
      for (const auto* name : {"e1", "e2"}) {
        long m = static_cast<long>(rng() % 4);
        comps.emplace_back(m, gen_elem(base, name));
        prod *= (one - b * gen_elem(base, name)).pow(static_cast<unsigned>(m));
      }
      CHECK(one - prod == b * ramification_class(F, base, comps));
    }
    const RingElement e1 = gen_elem(base, "e1");
    CHECK(ramification_class(F, base, {{2, e1}}) == e1.scaled(Rational(2)) - b * e1 * e1);
  }
  SUBCASE("order of components does not matter") {
    auto F = fgl_universal(5);
    auto base = with_gens(F.coeff_ring, {"e1", "e2", "e3"});
    std::vector<std::pair<long, RingElement>> comps = {
        {2, gen_elem(base, "e1")}, {3, gen_elem(base, "e2")}, {1, gen_elem(base, "e3")}};
    RingElement reference = ramification_class(F, base, comps);
    std::mt19937 rng(kSeed + 5);
    for (int t = 0; t < 20; ++t) {
      std::shuffle(comps.begin(), comps.end(), rng);
      CHECK(ramification_class(F, base, comps) == reference);
    }
  }
  SUBCASE("empty divisor has trivial class") {
    auto F = fgl_universal(5);
    CHECK(ramification_class(F, F.coeff_ring, {}) ==
          RingElement::zero(F.coeff_ring));
  }
}

TEST_CASE("projection formula holds on random classes") {
  std::mt19937 rng(kSeed + 6);
  struct Setup {
    FormalGroupLaw F;
    int n;
    int draws;
  };
  std::vector<Setup> setups;
  setups.push_back({fgl_additive(6), 1, 6});
  setups.push_back({fgl_additive(6), 2, 4});
  setups.push_back({fgl_multiplicative(6), 1, 6});
  setups.push_back({fgl_multiplicative(6), 2, 4});
  setups.push_back({fgl_universal(6), 1, 4});
  for (const auto& [F, n, draws] : setups) {
    auto base = with_gens(F.coeff_ring, {"y1", "y2"});
    auto space = projective_space(base, n);
    const RingElement x = space.c();
    for (int t = 0; t < draws; ++t) {
      RingElement xb = random_base_elem(rng, base, {"y1", "y2"});
      RingElement yt = RingElement::zero(space.total);
      for (int e = 0; e <= n; ++e)
        yt += random_base_elem(rng, base, {"y1", "y2"}).lifted(space.total) *
              x.pow(static_cast<unsigned>(e));
      CHECK(projection_formula_check(F, space, xb, yt).pass);
    }
  }
}

TEST_CASE("fundamental classes compose through the pairing") {
  auto F = fgl_multiplicative(6);
  auto base = with_gens(F.coeff_ring, {"y1", "y2"});
  const RingElement y1 = gen_elem(base, "y1");
  const RingElement y2 = gen_elem(base, "y2");
  const RingElement b = gen_elem(base, "b");
  auto L1 = bundle_new(base, {y1});
  auto L2 = bundle_new(base, {y2});
  auto E = bundle_new(base, {y1, y2});

  SUBCASE("zero sections carry their divisor data") {
    auto fc = fundamental_class(zero_section(F, L1));
    CHECK(fc.degree == -1);
    CHECK(thom_equal(fc.value, thom_element(L1, RingElement::one(base))));
  }
  SUBCASE("a projection consumes its matching section") {
    auto s = composite({zero_section(F, E), p1_projection(F, y1)});
    auto fc = fundamental_class(s);
    CHECK(fc.degree == -1);
    CHECK(thom_equal(fc.value, thom_element(L2, RingElement::one(base))));
    auto full = composite(
        {zero_section(F, E), p1_projection(F, y1), p1_projection(F, y2)});
    auto fc2 = fundamental_class(full);
    CHECK(fc2.degree == 0);
    CHECK(thom_equal(fc2.value, thom_unit(base)));
  }
  SUBCASE("an unmatched projection contributes the pushforward of one") {
    auto fc = fundamental_class(p1_projection(F, y1));
    CHECK(fc.degree == 1);
    CHECK(thom_equal(fc.value, thom_element(bundle_new(base, {}), b)));
    auto afc = fundamental_class(p1_projection(fgl_additive(6),
                                               gen_elem(with_gens(fgl_additive(6).coeff_ring, {"y"}), "y")));
    CHECK(afc.degree == 1);
    CHECK(afc.value.coeff.is_zero());
  }
  SUBCASE("projective-space projections use the residue engine") {
    auto fc = fundamental_class(pn_projection(F, base, 2));
    CHECK(fc.degree == 2);
    CHECK(thom_equal(fc.value, thom_element(bundle_new(base, {}), b * b)));
    auto A = fgl_additive(6);
    auto afc = fundamental_class(pn_projection(A, A.coeff_ring, 2));
    CHECK(afc.degree == 2);
    CHECK(afc.value.coeff.is_zero());
  }
  SUBCASE("grouping of composite parts does not matter") {
    std::vector<Scenario> parts = {zero_section(F, L1), p1_projection(F, y2),
                                   zero_section(F, L2), p1_projection(F, y1)};
    auto flat = fundamental_class(composite(parts));
    auto left = fundamental_class(
        composite({composite({parts[0], parts[1]}), composite({parts[2], parts[3]})}));
    auto right = fundamental_class(
        composite({parts[0], composite({parts[1], composite({parts[2], parts[3]})})}));
    CHECK(flat.degree == 0);
    CHECK(left.degree == 0);
    CHECK(right.degree == 0);
    CHECK(thom_equal(flat.value, left.value));
    CHECK(thom_equal(flat.value, right.value));
  }
  SUBCASE("two zero sections multiply in the divisor module") {
    auto fc = fundamental_class(composite({zero_section(F, L1), zero_section(F, L2)}));
    CHECK(fc.degree == -2);
    auto expected = thom_mul(thom_element(L1, RingElement::one(base)),
                             thom_element(L2, RingElement::one(base)));
    CHECK(thom_equal(fc.value, expected));
  }
  SUBCASE("mismatched parts are rejected") {
    auto other = with_gens(F.coeff_ring, {"w"});
    CHECK_THROWS_AS(
        composite({zero_section(F, L1),
                   p1_projection(F, gen_elem(other, "w"))}),
        Error);
    CHECK_THROWS_AS(composite({}), Error);
    CHECK_THROWS_AS(pn_projection(F, base, 4), Error);
    CHECK_THROWS_AS(p1_projection(F, y1 * y2), Error);
  }
}

TEST_CASE("engine guards refuse out-of-range inputs") {
  auto U = fgl_universal(6);
  auto base = with_gens(U.coeff_ring, {"y"});

  SUBCASE("short law tables cannot cross higher-dimensional fibers") {
    auto space = projective_space(base, 2);
    CHECK_THROWS_WITH_AS(
        pushforward_pn(U, space, RingElement::one(space.total)),
        doctest::Contains("need cap >= 7"), Error);
  }
  SUBCASE("twisted fibers need a complete table") {
    auto pb = projective_bundle(base, bundle_new(base, {gen_elem(base, "y"),
                                                        gen_elem(base, "y")}));
    CHECK_THROWS_AS(pushforward_projective(U, pb, RingElement::one(pb.total)), Error);
  }
  SUBCASE("fiber dimension is capped") {
    auto A = fgl_additive(6);
    auto space = projective_space(A.coeff_ring, 4);
    CHECK_THROWS_AS(pushforward_pn(A, space, RingElement::one(space.total)), Error);
  }
  SUBCASE("non-trivial fibers are rejected by the trivial-space entry") {
    auto A = fgl_additive(6);
    auto pb = projective_bundle(base, bundle_new(base, {gen_elem(base, "y")}));
    CHECK_THROWS_AS(pushforward_pn(A, pb, RingElement::one(pb.total)), Error);
  }
  SUBCASE("elements of a foreign ring are rejected") {
    auto A = fgl_additive(6);
    auto space = projective_space(A.coeff_ring, 1);
    CHECK_THROWS_AS(pushforward_pn(A, space, RingElement::one(A.coeff_ring)), Error);
  }
}

TEST_CASE("trivial and twisted conventions orient the line oppositely") {
  // Both modes are exact pushforwards, but they orient the fiber coordinate
  // differently: the trivial rule pushes x to +1 while the twisted pairing
  // on the same space pushes the hyperplane to -1.
  auto F = fgl_additive(6);
  auto space = projective_space(F.coeff_ring, 1);
  CHECK(pushforward_pn(F, space, space.c()) == RingElement::one(F.coeff_ring));
  CHECK(pushforward_projective(F, space, space.c()) ==
        -RingElement::one(F.coeff_ring));
}
