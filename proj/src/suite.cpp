#include "fglchern/suite.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <thread>
#include <utility>

#include "fglchern/chern.hpp"
#include "fglchern/error.hpp"
#include "fglchern/rr.hpp"

namespace fglchern {

std::mt19937 SuiteContext::rng_for(const std::string& name) const {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a, stable across platforms
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  h ^= static_cast<std::uint64_t>(opt_.seed) * 0x9e3779b97f4a7c15ull;
  return std::mt19937(static_cast<std::uint32_t>(h ^ (h >> 32)));
}

const FormalGroupLaw& SuiteContext::universal(int cap) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = universal_.find(cap);
  if (it == universal_.end()) it = universal_.emplace(cap, fgl_universal(cap)).first;
  return it->second;
}

namespace {

// ---------------------------------------------------------------------------
// Small deterministic helpers (plain modulo keeps streams identical across
// standard libraries, unlike the distribution classes)

int rand_int(std::mt19937& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<unsigned>(hi - lo + 1));
}

/// Appends `count` degree-1 generators named stem1.. to `coeff`.
RingPtr with_lines(const RingPtr& coeff, int count, const std::string& stem = "y") {
  std::vector<Generator> gens;
  for (int k = 1; k <= count; ++k) gens.push_back({stem + std::to_string(k), 1, 0});
  return GradedRing::extend(coeff, std::move(gens));
}

/// Random homogeneous degree-1 combination of the generators starting at
/// `first` (never zero).
RingElement random_root(std::mt19937& rng, const RingPtr& ring, std::size_t first,
                        std::size_t count) {
  RingElement r = RingElement::zero(ring);
  bool nonzero = false;
  for (std::size_t k = 0; k < count; ++k) {
    int c = rand_int(rng, -2, 2);
    if (c != 0) {
      r += RingElement::generator(ring, first + k).scaled(rational(c));
      nonzero = true;
    }
  }
  if (!nonzero) r += RingElement::generator(ring, first);
  return r;
}

/// Random element mixing a constant and a few short monomials.
RingElement random_elem(std::mt19937& rng, const RingPtr& ring) {
  RingElement r = RingElement::constant(ring, rational(rand_int(rng, -2, 2)));
  if (ring->size() == 0) return r;
  int terms = rand_int(rng, 1, 3);
  for (int t = 0; t < terms; ++t) {
    RingElement m = RingElement::constant(ring, rational(rand_int(rng, -3, 3)));
    int factors = rand_int(rng, 1, 2);
    for (int f = 0; f < factors; ++f)
      m *= RingElement::generator(ring, rng() % ring->size());
    r += m;
  }
  return r;
}

CheckResult pass_result() { return {true, ""}; }

CheckResult fail_result(std::string witness) { return {false, std::move(witness)}; }

CheckResult expect_zero(const RingElement& diff, const std::string& label) {
  if (diff.is_zero()) return pass_result();
  return fail_result(label + ": " + diff.render());
}

bool series_equal(const PowerSeries& a, const PowerSeries& b, std::size_t upto,
                  std::string* witness) {
  for (std::size_t k = 0; k < upto && k < a.length() && k < b.length(); ++k) {
    if (!((a[k] - b[k]).is_zero())) {
      if (witness) *witness = "slot " + std::to_string(k) + ": " + (a[k] - b[k]).render();
      return false;
    }
  }
  return true;
}

long long binom(long long m, long long k) {
  long long r = 1;
  for (long long j = 1; j <= k; ++j) r = r * (m - j + 1) / j;
  return r;
}

// ---------------------------------------------------------------------------
// Formal-group-law checks

CheckResult check_axioms_additive(SuiteContext& ctx) {
  for (int cap = 2; cap <= ctx.cap(); ++cap) {
    AxiomReport rep = check_fgl_axioms(fgl_additive(cap));
    if (!rep.ok()) return fail_result("cap " + std::to_string(cap) + ": " + rep.witness);
  }
  return pass_result();
}

CheckResult check_axioms_multiplicative(SuiteContext& ctx) {
  for (int cap = 2; cap <= ctx.cap(); ++cap) {
    AxiomReport rep = check_fgl_axioms(fgl_multiplicative(cap));
    if (!rep.ok()) return fail_result("cap " + std::to_string(cap) + ": " + rep.witness);
  }
  return pass_result();
}

CheckResult check_axioms_universal(SuiteContext& ctx) {
  for (int cap = 2; cap <= ctx.cap(); ++cap) {
    AxiomReport rep = check_fgl_axioms(ctx.universal(cap));
    if (!rep.ok()) return fail_result("cap " + std::to_string(cap) + ": " + rep.witness);
  }
  return pass_result();
}

CheckResult check_inverse_identity(SuiteContext& ctx) {
  int cap = ctx.cap();
  const FormalGroupLaw laws[] = {fgl_additive(cap), fgl_multiplicative(cap),
                                 ctx.universal(cap)};
  for (const FormalGroupLaw& F : laws) {
    RingPtr ring = with_lines(F.coeff_ring, 1, "x");
    RingElement x = RingElement::generator(ring, ring->size() - 1);
    RingElement sum = formal_sum(F, x, formal_inverse(F, x));
    if (!sum.is_zero()) return fail_result(F.kind + ": " + sum.render());
  }
  return pass_result();
}

CheckResult check_logarithm_roundtrip(SuiteContext& ctx) {
  int cap = ctx.cap();
  const FormalGroupLaw laws[] = {fgl_additive(cap), fgl_multiplicative(cap),
                                 ctx.universal(std::min(cap, 5))};
  for (const FormalGroupLaw& F : laws) {
    PowerSeries log = log_series(F);
    RingPtr scratch = with_lines(F.coeff_ring, 2, "x");
    RingElement x = RingElement::generator(scratch, scratch->size() - 2);
    RingElement y = RingElement::generator(scratch, scratch->size() - 1);
    RingElement diff =
        log.evaluate(formal_sum(F, x, y)) - log.evaluate(x) - log.evaluate(y);
    if (!diff.is_zero()) return fail_result(F.kind + " additivity: " + diff.render());
    std::string w;
    if (!series_equal(exp_series(F).compose(log), PowerSeries::identity(F.coeff_ring),
                      log.length(), &w))
      return fail_result(F.kind + " exp/log inverse: " + w);
  }
  return pass_result();
}

CheckResult check_exponential_morphism(SuiteContext& ctx) {
  OrientationMorphism m = morphism_exponential(ctx.cap());  // construction validates
  if (m.source.kind != "multiplicative" || m.target.kind != "additive")
    return fail_result("unexpected law kinds " + m.source.kind + " -> " + m.target.kind);
  Rational factorial(1);
  for (std::size_t k = 1; k < m.psi.length(); ++k) {
    factorial *= Rational(static_cast<long>(k));
    Rational expect = Rational(k % 2 == 1 ? 1 : -1) / factorial;
    if (m.psi[k].constant_term() != expect)
      return fail_result("series slot " + std::to_string(k) + ": " +
                         to_string(m.psi[k].constant_term()) + " vs " + to_string(expect));
  }
  return pass_result();
}

// ---------------------------------------------------------------------------
// Chern-class checks

VirtualBundle random_bundle(std::mt19937& rng, const RingPtr& ring, std::size_t first,
                            std::size_t lines, bool allow_minus) {
  std::vector<RingElement> plus, minus;
  int np = rand_int(rng, 1, 2);
  for (int k = 0; k < np; ++k) plus.push_back(random_root(rng, ring, first, lines));
  if (allow_minus && rand_int(rng, 0, 2) == 0)
    minus.push_back(random_root(rng, ring, first, lines));
  return bundle_new(ring, std::move(plus), std::move(minus));
}

CheckResult check_whitney_sum(SuiteContext& ctx) {
  auto rng = ctx.rng_for("chern_whitney_sum");
  int cap = ctx.cap();
  for (int iter = 0; iter < 200; ++iter) {
    int lines = rand_int(rng, 2, 3);
    RingOptions opts;
    opts.degree_cap = cap;
    std::vector<Generator> gens;
    for (int k = 1; k <= lines; ++k) gens.push_back({"y" + std::to_string(k), 1, 0});
    RingPtr ring = GradedRing::create(std::move(gens), opts);
    VirtualBundle v = random_bundle(rng, ring, 0, lines, true);
    VirtualBundle w = random_bundle(rng, ring, 0, lines, true);
    ChernSeries lhs = total_chern(bundle_sum(v, w));
    ChernSeries rhs = total_chern(v) * total_chern(w);
    std::string witness;
    if (!series_equal(lhs, rhs, lhs.length(), &witness))
      return fail_result("instance " + std::to_string(iter) + ": " + witness);
  }
  return pass_result();
}

CheckResult check_chern_nilpotence(SuiteContext& ctx) {
  auto rng = ctx.rng_for("chern_nilpotence");
  int cap = ctx.cap();
  for (int iter = 0; iter < 200; ++iter) {
    int lines = rand_int(rng, 2, 3);
    RingOptions opts;
    opts.degree_cap = cap;
    std::vector<Generator> gens;
    for (int k = 1; k <= lines; ++k) gens.push_back({"y" + std::to_string(k), 1, 0});
    RingPtr ring = GradedRing::create(std::move(gens), opts);
    std::vector<RingElement> roots;
    int rank = rand_int(rng, 1, 3);
    for (int k = 0; k < rank; ++k) roots.push_back(random_root(rng, ring, 0, lines));
    VirtualBundle v = bundle_new(ring, std::move(roots));
    for (int i = rank + 1; i <= std::min(rank + 2, cap); ++i) {
      if (!chern_class(v, i).is_zero())
        return fail_result("instance " + std::to_string(iter) + ": class " +
                           std::to_string(i) + " of a rank-" + std::to_string(rank) +
                           " bundle is " + chern_class(v, i).render());
    }
    RingElement top = chern_class(v, rank) - euler_class(v);
    if (!top.is_zero())
      return fail_result("instance " + std::to_string(iter) +
                         ": top class vs root product: " + top.render());
  }
  return pass_result();
}

CheckResult check_projective_freeness(SuiteContext& ctx) {
  auto rng = ctx.rng_for("chern_projective_freeness");
  int cap = ctx.cap();
  for (int iter = 0; iter < 200; ++iter) {
    int lines = rand_int(rng, 1, 2);
    RingOptions opts;
    opts.degree_cap = cap;
    std::vector<Generator> gens;
    for (int k = 1; k <= lines; ++k) gens.push_back({"y" + std::to_string(k), 1, 0});
    RingPtr base = GradedRing::create(std::move(gens), opts);
    int rank = rand_int(rng, 1, 2);
    std::vector<RingElement> roots;
    for (int k = 0; k < rank; ++k)
      roots.push_back(random_root(rng, base, 0, static_cast<std::size_t>(lines)));
    ProjectiveBundle pb = projective_bundle(base, bundle_new(base, std::move(roots)));
    std::vector<RingElement> coeffs;
    RingElement u = RingElement::zero(pb.total);
    for (int i = 0; i < rank; ++i) {
      coeffs.push_back(random_elem(rng, base));
      u += coeffs.back().lifted(pb.total) * pb.c().pow(static_cast<unsigned>(i));
    }
    std::map<unsigned, RingElement> dec = u.decompose_by(pb.c_index);
    for (int i = 0; i < rank; ++i) {
      auto it = dec.find(static_cast<unsigned>(i));
      RingElement got = it == dec.end() ? RingElement::zero(pb.total) : it->second;
      RingElement diff = got.shrunk(base) - coeffs[static_cast<std::size_t>(i)];
      if (!diff.is_zero())
        return fail_result("instance " + std::to_string(iter) + ": coefficient of c^" +
                           std::to_string(i) + " came back off by " + diff.render());
    }
  }
  return pass_result();
}

// ---------------------------------------------------------------------------
// Pushforward oracles and gated residue checks

CheckResult check_p1_rule_agreement(SuiteContext& ctx) {
  auto rng = ctx.rng_for("gysin_p1_rule_agreement");
  int cap = ctx.cap();
  for (int iter = 0; iter < 50; ++iter) {
    FormalGroupLaw F = iter % 3 == 0   ? fgl_additive(cap)
                       : iter % 3 == 1 ? fgl_multiplicative(cap)
                       : cap >= 3      ? ctx.universal(cap)
                                       : fgl_additive(cap);
    RingPtr base = with_lines(F.coeff_ring, rand_int(rng, 0, 2), "z");
    ProjectiveBundle space = projective_space(base, 1);
    RingElement u = random_elem(rng, space.total);
    RingElement diff =
        pushforward_p1(F, space, u) - pushforward_pn(F, space, u);
    if (!diff.is_zero())
      return fail_result("instance " + std::to_string(iter) + " (" + F.kind +
                         "): " + diff.render());
  }
  return pass_result();
}

CheckResult check_additive_chow_degrees(SuiteContext& ctx) {
  int cap = ctx.cap();
  FormalGroupLaw F = fgl_additive(cap);
  for (int n = 1; n <= std::min(3, cap); ++n) {
    RingPtr base = F.coeff_ring;
    ProjectiveBundle space = projective_space(base, n);
    for (int i = 0; i <= n; ++i) {
      RingElement p = pushforward_pn(F, space, space.c().pow(static_cast<unsigned>(i)));
      RingElement expect = i == n ? RingElement::one(base) : RingElement::zero(base);
      if (!(p - expect).is_zero())
        return fail_result("P^" + std::to_string(n) + ", power " + std::to_string(i) +
                           ": " + p.render());
    }
  }
  return pass_result();
}

CheckResult check_key_lemma(const FormalGroupLaw& F) {
  RingPtr base = with_lines(F.coeff_ring, 2);
  std::size_t first = base->size() - 2;
  RingElement y1 = RingElement::generator(base, first);
  RingElement y2 = RingElement::generator(base, first + 1);
  const RingElement roots[] = {y1, y1 + y2.scaled(rational(2))};
  for (const RingElement& root : roots) {
    CheckResult res = key_lemma_check(F, bundle_new(base, {root}));
    if (!res.pass) return fail_result("root " + root.render() + ": " + res.witness);
  }
  return pass_result();
}

CheckResult check_key_lemma_additive(SuiteContext& ctx) {
  return check_key_lemma(fgl_additive(std::min(5, ctx.cap())));
}

CheckResult check_key_lemma_multiplicative(SuiteContext& ctx) {
  return check_key_lemma(fgl_multiplicative(std::min(5, ctx.cap())));
}

CheckResult check_key_lemma_universal(SuiteContext& ctx) {
  return check_key_lemma(ctx.universal(std::min(5, ctx.cap())));
}

/// The exact rank-1 completion pairing must agree with the twisted residue
/// rule wherever the latter applies (complete tables). Gated by the oracles.
CheckResult check_completion_vs_residue(SuiteContext& ctx) {
  int cap = ctx.cap();
  FormalGroupLaw F = fgl_multiplicative(cap);
  RingPtr base = with_lines(F.coeff_ring, 1);
  RingElement y = RingElement::generator(base, base->size() - 1);
  ThomData th = thom_class(base, bundle_new(base, {y}));
  const ProjectiveBundle& pb = th.completion;
  const RingElement samples[] = {RingElement::one(pb.total), pb.c(), th.cls,
                                 y.lifted(pb.total) * pb.c()};
  for (const RingElement& u : samples) {
    RingElement diff = pushforward_completion_rank1(F, pb, u) -
                       pushforward_projective(F, pb, u);
    if (!diff.is_zero())
      return fail_result("sample " + u.render() + ": " + diff.render());
  }
  return pass_result();
}

CheckResult check_degree_formula_universal(SuiteContext& ctx) {
  const FormalGroupLaw& U = ctx.universal(std::min(5, ctx.cap()));
  RingPtr base = with_lines(U.coeff_ring, 1, "y0_");
  RingElement y0 = RingElement::generator(base, base->size() - 1);
  for (long d = 1; d <= 3; ++d) {
    RingElement diff = degree_class(U, d, y0) - degree_class_closed(U, d, y0);
    if (!diff.is_zero())
      return fail_result("degree " + std::to_string(d) + ": " + diff.render());
  }
  return pass_result();
}

CheckResult check_degree_formula_additive(SuiteContext& ctx) {
  FormalGroupLaw F = fgl_additive(std::min(5, ctx.cap()));
  RingPtr base = with_lines(F.coeff_ring, 1, "y0_");
  RingElement y0 = RingElement::generator(base, base->size() - 1);
  for (long d = 1; d <= 3; ++d) {
    RingElement diff =
        degree_class(F, d, y0) - RingElement::constant(base, rational(d));
    if (!diff.is_zero())
      return fail_result("degree " + std::to_string(d) + ": " + diff.render());
  }
  return pass_result();
}

CheckResult check_thom_multiplicativity(SuiteContext& ctx) {
  int cap = std::min(5, ctx.cap());
  const FormalGroupLaw laws[] = {fgl_additive(cap), fgl_multiplicative(cap),
                                 ctx.universal(cap)};
  for (const FormalGroupLaw& F : laws) {
    RingPtr base = with_lines(F.coeff_ring, 4, "u");
    std::size_t first = base->size() - 4;
    auto g = [&](std::size_t k) { return RingElement::generator(base, first + k); };
    VirtualBundle v = bundle_new(base, {g(0), g(1)});
    VirtualBundle w = bundle_new(base, {g(2) + g(3)});
    ThomModuleElement tv = thom_element(v, RingElement::constant(base, rational(2)));
    ThomModuleElement tw = thom_element(w, g(2));
    ThomModuleElement product = thom_mul(tv, tw);
    ThomModuleElement expect =
        thom_element(bundle_sum(v, w), RingElement::constant(base, rational(2)) * g(2));
    if (!thom_equal(product, expect))
      return fail_result(F.kind + " sum: " + thom_render(product) + " vs " +
                         thom_render(expect));
    ThomModuleElement unit_side =
        thom_mul(thom_element(v, RingElement::one(base)),
                 thom_element(bundle_negate(v), RingElement::one(base)));
    if (!thom_equal(unit_side, thom_unit(base)))
      return fail_result(F.kind + " inverse: " + thom_render(unit_side));
  }
  return pass_result();
}

CheckResult check_ramification_additive(SuiteContext& ctx) {
  auto rng = ctx.rng_for("gysin_ramification_additive");
  FormalGroupLaw F = fgl_additive(ctx.cap());
  RingPtr ring = with_lines(F.coeff_ring, 3, "e");
  std::size_t first = ring->size() - 3;
  for (int iter = 0; iter < 20; ++iter) {
    std::vector<std::pair<long, RingElement>> comps;
    RingElement expect = RingElement::zero(ring);
    int n = rand_int(rng, 1, 3);
    for (int k = 0; k < n; ++k) {
      long m = rand_int(rng, -3, 3);
      if (m == 0) m = 1;
      RingElement e = random_root(rng, ring, first, 3);
      comps.emplace_back(m, e);
      expect += e.scaled(rational(m));
    }
    RingElement diff = ramification_class(F, ring, comps) - expect;
    if (!diff.is_zero())
      return fail_result("instance " + std::to_string(iter) + ": " + diff.render());
  }
  return pass_result();
}

CheckResult check_ramification_multiplicative(SuiteContext& ctx) {
  int cap = ctx.cap();
  FormalGroupLaw F = fgl_multiplicative(cap);
  RingPtr ring = with_lines(F.coeff_ring, 1, "x");
  RingElement x = RingElement::generator(ring, ring->size() - 1);
  RingElement b = RingElement::generator(ring, 0);  // the law's beta, degree -1
  for (long m : {1L, 2L, 3L, 5L}) {
    // closed form [m] x = (1 - (1 - b x)^m) / b = sum_k C(m,k) (-1)^{k+1} b^{k-1} x^k
    RingElement expect = RingElement::zero(ring);
    for (long k = 1; k <= std::min<long>(m, cap); ++k) {
      Rational c = rational(binom(m, k) * (k % 2 == 1 ? 1 : -1));
      expect += b.pow(static_cast<unsigned>(k - 1)) * x.pow(static_cast<unsigned>(k))
                    .scaled(c);
    }
    RingElement diff = n_series(F, m, x) - expect;
    if (!diff.is_zero())
      return fail_result("multiple " + std::to_string(m) + ": " + diff.render());
    RingElement single = ramification_class(F, ring, {{m, x}}) - n_series(F, m, x);
    if (!single.is_zero())
      return fail_result("single component " + std::to_string(m) + ": " + single.render());
  }
  return pass_result();
}

CheckResult check_ramification_permutation(SuiteContext& ctx) {
  auto rng = ctx.rng_for("gysin_ramification_permutation");
  int cap = ctx.cap();
  FormalGroupLaw mult = fgl_multiplicative(cap);
  for (int iter = 0; iter < 100; ++iter) {
    bool use_universal = (iter % 5 == 4) && cap >= 4;
    const FormalGroupLaw& F = use_universal ? ctx.universal(std::min(4, cap)) : mult;
    RingPtr ring = with_lines(F.coeff_ring, 2, "e");
    std::size_t first = ring->size() - 2;
    std::vector<std::pair<long, RingElement>> comps;
    int n = rand_int(rng, 2, 4);
    for (int k = 0; k < n; ++k) {
      long m = rand_int(rng, -3, 3);
      if (m == 0) m = 2;
      comps.emplace_back(m, random_root(rng, ring, first, 2));
    }
    std::vector<std::pair<long, RingElement>> shuffled = comps;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    RingElement diff =
        ramification_class(F, ring, comps) - ramification_class(F, ring, shuffled);
    if (!diff.is_zero())
      return fail_result("instance " + std::to_string(iter) + ": " + diff.render());
  }
  return pass_result();
}

CheckResult check_excess_transversal(SuiteContext& ctx) {
  int cap = std::min(4, ctx.cap());
  const FormalGroupLaw laws[] = {fgl_additive(cap), fgl_multiplicative(cap),
                                 ctx.universal(cap)};
  for (const FormalGroupLaw& F : laws) {
    RingPtr base = with_lines(F.coeff_ring, 2);
    std::size_t first = base->size() - 2;
    RingElement y1 = RingElement::generator(base, first);
    RingElement y2 = RingElement::generator(base, first + 1);
    for (const VirtualBundle& v :
         {bundle_new(base, {y1}), bundle_new(base, {y1, y2})}) {
      CheckResult res = excess_check(F, v, v);
      if (!res.pass) return fail_result(F.kind + ": " + res.witness);
    }
  }
  return pass_result();
}

CheckResult check_excess_rank_one(SuiteContext& ctx) {
  int cap = std::min(4, ctx.cap());
  const FormalGroupLaw& U = ctx.universal(cap);
  RingPtr base = with_lines(U.coeff_ring, 2);
  std::size_t first = base->size() - 2;
  RingElement y1 = RingElement::generator(base, first);
  RingElement y2 = RingElement::generator(base, first + 1);
  CheckResult res = excess_check(U, bundle_new(base, {y1, y2}), bundle_new(base, {y1}));
  if (!res.pass) return res;
  return pass_result();
}

CheckResult check_projection_formula(SuiteContext& ctx) {
  auto rng = ctx.rng_for("gysin_projection_formula");
  int cap = ctx.cap();
  const FormalGroupLaw laws[] = {fgl_additive(cap), fgl_multiplicative(cap)};
  for (const FormalGroupLaw& F : laws) {
    for (int n = 1; n <= 2; ++n) {
      RingPtr base = with_lines(F.coeff_ring, 2, "z");
      ProjectiveBundle space = projective_space(base, n);
      for (int k = 0; k < 3; ++k) {
        RingElement x_base = random_elem(rng, base);
        RingElement y_total = random_elem(rng, space.total);
        CheckResult res = projection_formula_check(F, space, x_base, y_total);
        if (!res.pass)
          return fail_result(F.kind + " P^" + std::to_string(n) + ": " + res.witness);
      }
    }
  }
  return pass_result();
}

CheckResult check_self_intersection(SuiteContext& ctx) {
  int cap = std::min(5, ctx.cap());
  const FormalGroupLaw laws[] = {fgl_additive(cap), fgl_multiplicative(cap),
                                 ctx.universal(cap)};
  for (const FormalGroupLaw& F : laws) {
    RingPtr base = with_lines(F.coeff_ring, 2);
    std::size_t first = base->size() - 2;
    RingElement y1 = RingElement::generator(base, first);
    RingElement y2 = RingElement::generator(base, first + 1);
    for (const VirtualBundle& N :
         {bundle_new(base, {y1}), bundle_new(base, {y1, y2})}) {
      RingElement diff = self_intersection(F, N) - euler_class(N);
      if (!diff.is_zero()) return fail_result(F.kind + ": " + diff.render());
    }
  }
  return pass_result();
}

// ---------------------------------------------------------------------------
// Todd-class and Riemann-Roch checks

CheckResult check_todd_series_division(SuiteContext& ctx) {
  int cap = ctx.cap();
  ToddTransformation T = todd_new(morphism_exponential(cap));
  // Independent oracle: long division of t by (1 - exp(-t)), i.e. invert the
  // series with slots d_j = (-1)^j / (j+1)!.
  std::size_t slots = static_cast<std::size_t>(cap);
  std::vector<Rational> d(slots), q(slots);
  Rational factorial(1);
  for (std::size_t j = 0; j < slots; ++j) {
    factorial *= Rational(static_cast<long>(j + 1));
    d[j] = Rational(j % 2 == 0 ? 1 : -1) / factorial;
  }
  for (std::size_t k = 0; k < slots; ++k) {
    Rational acc = k == 0 ? Rational(1) : Rational(0);
    for (std::size_t j = 1; j <= k; ++j) acc -= d[j] * q[k - j];
    q[k] = acc / d[0];
  }
  for (std::size_t k = 0; k < slots; ++k) {
    if (T.todd_series[k].constant_term() != q[k])
      return fail_result("slot " + std::to_string(k) + ": " +
                         to_string(T.todd_series[k].constant_term()) + " vs " +
                         to_string(q[k]));
  }
  const Rational frozen[] = {rational(1), rational(1, 2), rational(1, 12), rational(0),
                             rational(-1, 720)};
  for (std::size_t k = 0; k < slots && k < 5; ++k) {
    if (q[k] != frozen[k])
      return fail_result("oracle drifted at slot " + std::to_string(k));
  }
  return pass_result();
}

std::vector<OrientationMorphism> todd_test_morphisms(SuiteContext& ctx, int cap) {
  std::vector<OrientationMorphism> out;
  out.push_back(morphism_exponential(cap));
  out.push_back(morphism_identity(ctx.universal(cap)));
  out.push_back(morphism_conjugate(ctx.universal(cap), {rational(1, 2), rational(-3)}));
  return out;
}

CheckResult check_todd_multiplicativity(SuiteContext& ctx) {
  int cap = std::min(5, ctx.cap());
  for (const OrientationMorphism& m : todd_test_morphisms(ctx, cap)) {
    ToddTransformation T = todd_new(m);
    RingPtr base = with_lines(m.source.coeff_ring, 2);
    std::size_t first = base->size() - 2;
    VirtualBundle v = bundle_new(base, {RingElement::generator(base, first)});
    VirtualBundle w = bundle_new(base, {RingElement::generator(base, first + 1)});
    RingElement diff =
        todd_virtual(T, bundle_sum(v, w)) - todd_virtual(T, v) * todd_virtual(T, w);
    if (!diff.is_zero())
      return fail_result(m.source.kind + " sum: " + diff.render());
    RingElement unit =
        todd_virtual(T, bundle_sum(v, bundle_negate(v))) - RingElement::one(base);
    if (!unit.is_zero())
      return fail_result(m.source.kind + " cancellation: " + unit.render());
  }
  return pass_result();
}

CheckResult check_todd_chern_relation(SuiteContext& ctx) {
  int cap = std::min(5, ctx.cap());
  for (const OrientationMorphism& m : todd_test_morphisms(ctx, cap)) {
    ToddTransformation T = todd_new(m);
    RingPtr ring = with_lines(m.source.coeff_ring, 1, "t");
    RingElement root = RingElement::generator(ring, ring->size() - 1);
    CheckResult res = todd_chern_relation_check(T, root);
    if (!res.pass) return fail_result(m.source.kind + ": " + res.witness);
  }
  return pass_result();
}

CheckResult check_grr(SuiteContext& ctx, int n_lines, bool projective_line) {
  int cap = std::min(4, ctx.cap());
  for (const OrientationMorphism& m : todd_test_morphisms(ctx, cap)) {
    ToddTransformation T = todd_new(m);
    Scenario s = [&] {
      if (projective_line)
        return p1_projection(m.source, RingElement::zero(m.source.coeff_ring));
      RingPtr base = with_lines(m.source.coeff_ring, n_lines, "L");
      std::vector<RingElement> roots;
      for (int k = 0; k < n_lines; ++k)
        roots.push_back(RingElement::generator(base, base->size() - n_lines + k));
      return zero_section(m.source, bundle_new(base, std::move(roots)));
    }();
    CheckResult res = grr_check(T, s);
    if (!res.pass) return fail_result(m.source.kind + ": " + res.witness);
  }
  return pass_result();
}

CheckResult check_grr_zero_section_line(SuiteContext& ctx) {
  return check_grr(ctx, 1, false);
}

CheckResult check_grr_zero_section_pair(SuiteContext& ctx) {
  return check_grr(ctx, 2, false);
}

CheckResult check_grr_projective_line(SuiteContext& ctx) {
  return check_grr(ctx, 0, true);
}

CheckResult check_todd_cocycle(SuiteContext& ctx) {
  int cap = std::min(5, ctx.cap());
  OrientationMorphism first = morphism_exponential(cap);
  OrientationMorphism second = morphism_conjugate(first.target, {rational(1, 2)});
  CheckResult res = todd_cocycle_check(first, second);
  if (!res.pass) return fail_result("exponential chain: " + res.witness);

  int cap4 = std::min(4, ctx.cap());
  OrientationMorphism g1 =
      morphism_conjugate(ctx.universal(cap4), {rational(1), rational(-2)});
  OrientationMorphism g2 =
      morphism_conjugate(g1.target, {rational(3), rational(1), rational(2)});
  res = todd_cocycle_check(g1, g2);
  if (!res.pass) return fail_result("universal chain: " + res.witness);

  res = todd_cocycle_check(morphism_identity(g1.source), g1);
  if (!res.pass) return fail_result("left identity: " + res.witness);
  res = todd_cocycle_check(g1, morphism_identity(g1.target));
  if (!res.pass) return fail_result("right identity: " + res.witness);
  return pass_result();
}

CheckResult check_todd_base_change(SuiteContext& ctx) {
  int cap = std::min(5, ctx.cap());
  OrientationMorphism m = morphism_exponential(cap);
  ToddTransformation T = todd_new(m);
  RingPtr source = with_lines(m.source.coeff_ring, 2, "u");
  RingPtr target = with_lines(m.source.coeff_ring, 2, "y");
  std::size_t sf = source->size() - 2, tf = target->size() - 2;
  RingElement u1 = RingElement::generator(source, sf);
  RingElement u2 = RingElement::generator(source, sf + 1);
  RingElement y1 = RingElement::generator(target, tf);
  RingElement y2 = RingElement::generator(target, tf + 1);
  SubstMap images;
  images[sf] = y1 + y2.scaled(rational(2));
  images[sf + 1] = y2 - y1.scaled(rational(3));
  VirtualBundle v = bundle_new(source, {u1, u2});
  VirtualBundle image = bundle_new(target, {images[sf], images[sf + 1]});
  RingElement diff =
      todd_virtual(T, v).substitute(images, target) - todd_virtual(T, image);
  return expect_zero(diff, "base change");
}

}  // namespace

std::vector<SuiteCheck> builtin_suite() {
  std::vector<SuiteCheck> checks;
  auto add = [&](std::string name, CheckResult (*fn)(SuiteContext&), bool oracle = false,
                 bool gated = false) {
    checks.push_back({std::move(name), oracle, gated, fn});
  };
  add("fgl_axioms_additive", check_axioms_additive);
  add("fgl_axioms_multiplicative", check_axioms_multiplicative);
  add("fgl_axioms_universal", check_axioms_universal);
  add("fgl_inverse_identity", check_inverse_identity);
  add("fgl_logarithm_roundtrip", check_logarithm_roundtrip);
  add("fgl_exponential_morphism", check_exponential_morphism);
  add("chern_whitney_sum", check_whitney_sum);
  add("chern_nilpotence", check_chern_nilpotence);
  add("chern_projective_freeness", check_projective_freeness);
  add("gysin_p1_rule_agreement", check_p1_rule_agreement, /*oracle=*/true);
  add("gysin_additive_chow_degrees", check_additive_chow_degrees, /*oracle=*/true);
  add("gysin_key_lemma_additive", check_key_lemma_additive);
  add("gysin_key_lemma_multiplicative", check_key_lemma_multiplicative);
  add("gysin_key_lemma_universal", check_key_lemma_universal);
  add("gysin_completion_vs_residue", check_completion_vs_residue, false, /*gated=*/true);
  add("gysin_degree_formula_universal", check_degree_formula_universal);
  add("gysin_degree_formula_additive", check_degree_formula_additive);
  add("gysin_thom_multiplicativity", check_thom_multiplicativity);
  add("gysin_ramification_additive", check_ramification_additive);
  add("gysin_ramification_multiplicative", check_ramification_multiplicative);
  add("gysin_ramification_permutation", check_ramification_permutation);
  add("gysin_excess_transversal", check_excess_transversal);
  add("gysin_excess_rank_one", check_excess_rank_one);
  add("gysin_projection_formula", check_projection_formula, false, /*gated=*/true);
  add("gysin_self_intersection", check_self_intersection);
  add("rr_todd_series_division", check_todd_series_division);
  add("rr_todd_multiplicativity", check_todd_multiplicativity);
  add("rr_todd_chern_relation", check_todd_chern_relation);
  add("rr_grr_zero_section_line", check_grr_zero_section_line);
  add("rr_grr_zero_section_pair", check_grr_zero_section_pair);
  add("rr_grr_projective_line", check_grr_projective_line);
  add("rr_todd_cocycle", check_todd_cocycle);
  add("rr_todd_base_change", check_todd_base_change);
  return checks;
}

std::vector<Report> run_suite(const std::vector<SuiteCheck>& checks,
                              const SuiteOptions& options) {
  SuiteContext ctx(options);
  std::vector<Report> reports(checks.size());
  for (std::size_t i = 0; i < checks.size(); ++i) {
    reports[i].check = checks[i].name;
    reports[i].cap = options.cap;
    reports[i].status = Report::Status::Fail;
  }

  auto run_at = [&](std::size_t i) {
    Report& r = reports[i];
    auto t0 = std::chrono::steady_clock::now();
    try {
      CheckResult res = checks[i].fn(ctx);
      r.status = res.pass ? Report::Status::Pass : Report::Status::Fail;
      r.witness = res.witness;
    } catch (const std::exception& ex) {
      r.status = Report::Status::Fail;
      r.witness = ex.what();
    }
    r.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  };

  // Phase 1: the oracles.
  std::string failed_oracles;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    if (!checks[i].oracle) continue;
    run_at(i);
    if (reports[i].status != Report::Status::Pass) {
      if (!failed_oracles.empty()) failed_oracles += ", ";
      failed_oracles += checks[i].name;
    }
  }

  // Phase 2: everything else; gated checks are skipped under a failed oracle.
  std::vector<std::size_t> work;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    if (checks[i].oracle) continue;
    if (checks[i].gated && !failed_oracles.empty()) {
      reports[i].status = Report::Status::Skipped;
      reports[i].witness = "oracle failed: " + failed_oracles;
      reports[i].elapsed_ms = 0;
      continue;
    }
    work.push_back(i);
  }

  std::size_t jobs = static_cast<std::size_t>(std::max(1, options.jobs));
  if (jobs <= 1 || work.size() <= 1) {
    for (std::size_t i : work) run_at(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    std::size_t n = std::min(jobs, work.size());
    for (std::size_t t = 0; t < n; ++t) {
      workers.emplace_back([&] {
        for (;;) {
          std::size_t k = next.fetch_add(1);
          if (k >= work.size()) return;
          run_at(work[k]);
        }
      });
    }
    for (auto& w : workers) w.join();
  }
  return reports;
}

}  // namespace fglchern
