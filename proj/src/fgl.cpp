#include "fglchern/fgl.hpp"

#include <algorithm>

#include "fglchern/error.hpp"

namespace fglchern {

namespace {

/// Scratch-variable names that do not collide with `ring`'s generators.
std::vector<std::string> fresh_names(const GradedRing& ring,
                                     std::initializer_list<const char*> wanted) {
  std::vector<std::string> out;
  for (const char* w : wanted) {
    std::string name = w;
    while (ring.find(name)) name += "_";
    out.push_back(std::move(name));
  }
  return out;
}

void require_positively_graded(const RingElement& u, const char* what) {
  for (const auto& [mon, coeff] : u.terms()) {
    (void)coeff;
    if (u.ring()->positive_degree(mon) == 0)
      throw Error(std::string(what) + " requires a positively graded argument",
                  u.render());
  }
}

bool law_equal(const FormalGroupLaw& a, const FormalGroupLaw& b) {
  if (a.coeff_ring != b.coeff_ring) return false;
  auto normalized = [](const FormalGroupLaw& f) {
    std::map<std::pair<int, int>, RingElement> t;
    for (const auto& [ij, e] : f.table) {
      if (!e.is_zero()) t.emplace(ij, e);
    }
    return t;
  };
  auto ta = normalized(a);
  auto tb = normalized(b);
  if (ta.size() != tb.size()) return false;
  for (const auto& [ij, e] : ta) {
    auto it = tb.find(ij);
    if (it == tb.end() || !(it->second == e)) return false;
  }
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// PowerSeries

PowerSeries::PowerSeries(RingPtr ring) : ring_(std::move(ring)) {
  if (!ring_) throw Error("null ring");
  c_.assign(static_cast<std::size_t>(ring_->degree_cap()) + 1,
            RingElement::zero(ring_));
}

PowerSeries PowerSeries::identity(RingPtr ring) {
  PowerSeries s(std::move(ring));
  if (s.length() > 1) s.c_[1] = RingElement::one(s.ring_);
  return s;
}

PowerSeries PowerSeries::from_coeffs(RingPtr ring, std::vector<RingElement> coeffs) {
  PowerSeries s(std::move(ring));
  for (std::size_t k = 0; k < coeffs.size() && k < s.length(); ++k) {
    coeffs[k].ring();  // validity check
    if (coeffs[k].ring() != s.ring_) throw Error("ring mismatch");
    s.c_[k] = std::move(coeffs[k]);
  }
  return s;
}

const RingElement& PowerSeries::operator[](std::size_t k) const {
  if (k >= c_.size()) throw Error("series index beyond truncation order");
  return c_[k];
}

void PowerSeries::set(std::size_t k, RingElement v) {
  if (k >= c_.size()) throw Error("series index beyond truncation order");
  if (v.ring() != ring_) throw Error("ring mismatch");
  c_[k] = std::move(v);
}

bool PowerSeries::is_zero() const {
  return std::all_of(c_.begin(), c_.end(),
                     [](const RingElement& e) { return e.is_zero(); });
}

PowerSeries PowerSeries::operator+(const PowerSeries& rhs) const {
  if (ring_ != rhs.ring_) throw Error("ring mismatch");
  PowerSeries out(ring_);
  for (std::size_t k = 0; k < c_.size(); ++k) out.c_[k] = c_[k] + rhs.c_[k];
  return out;
}

PowerSeries PowerSeries::operator-(const PowerSeries& rhs) const {
  if (ring_ != rhs.ring_) throw Error("ring mismatch");
  PowerSeries out(ring_);
  for (std::size_t k = 0; k < c_.size(); ++k) out.c_[k] = c_[k] - rhs.c_[k];
  return out;
}

PowerSeries PowerSeries::operator*(const PowerSeries& rhs) const {
  if (ring_ != rhs.ring_) throw Error("ring mismatch");
  PowerSeries out(ring_);
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i].is_zero()) continue;
    for (std::size_t j = 0; i + j < c_.size(); ++j) {
      if (rhs.c_[j].is_zero()) continue;
      out.c_[i + j] += c_[i] * rhs.c_[j];
    }
  }
  return out;
}

PowerSeries PowerSeries::scaled(const Rational& c) const {
  PowerSeries out(ring_);
  for (std::size_t k = 0; k < c_.size(); ++k) out.c_[k] = c_[k].scaled(c);
  return out;
}

PowerSeries PowerSeries::compose(const PowerSeries& rhs) const {
  if (ring_ != rhs.ring_) throw Error("ring mismatch");
  if (!rhs.c_[0].is_zero())
    throw Error("series composition requires zero constant term");
  PowerSeries out(ring_);
  out.c_[0] = c_[0];
  PowerSeries power = rhs;
  for (std::size_t k = 1; k < c_.size(); ++k) {
    if (!c_[k].is_zero()) {
      for (std::size_t j = 0; j < c_.size(); ++j) out.c_[j] += c_[k] * power.c_[j];
    }
    if (k + 1 < c_.size()) power = power * rhs;
  }
  return out;
}

PowerSeries PowerSeries::reciprocal() const {
  RingElement r0 = c_[0].reciprocal();
  PowerSeries out(ring_);
  out.c_[0] = r0;
  for (std::size_t k = 1; k < c_.size(); ++k) {
    RingElement s = RingElement::zero(ring_);
    for (std::size_t j = 1; j <= k; ++j) s += c_[j] * out.c_[k - j];
    out.c_[k] = -(r0 * s);
  }
  return out;
}

PowerSeries PowerSeries::reversion() const {
  if (!c_[0].is_zero()) throw Error("series reversion requires zero constant term");
  if (c_.size() < 2) return PowerSeries(ring_);
  RingElement r1 = c_[1].reciprocal();
  PowerSeries e(ring_);
  e.c_[1] = r1;
  for (std::size_t k = 2; k < c_.size(); ++k) {
    PowerSeries comp = compose(e);
    e.c_[k] = -(r1 * comp.c_[k]);
  }
  return e;
}

PowerSeries PowerSeries::shifted_down(unsigned k) const {
  for (unsigned j = 0; j < k && j < c_.size(); ++j) {
    if (!c_[j].is_zero())
      throw Error("series shift would drop a nonzero coefficient", c_[j].render());
  }
  PowerSeries out(ring_);
  for (std::size_t j = k; j < c_.size(); ++j) out.c_[j - k] = c_[j];
  return out;
}

PowerSeries PowerSeries::integrated() const {
  PowerSeries out(ring_);
  for (std::size_t k = 1; k < c_.size(); ++k)
    out.c_[k] = c_[k - 1].scaled(rational(1, static_cast<long>(k)));
  return out;
}

RingElement PowerSeries::evaluate(const RingElement& u) const {
  const RingPtr& target = u.ring();
  require_positively_graded(u, "series evaluation");
  RingElement acc = c_[0].lifted(target);
  RingElement power = RingElement::one(target);
  for (std::size_t k = 1; k < c_.size(); ++k) {
    power *= u;
    if (power.is_zero()) break;
    if (!c_[k].is_zero()) acc += c_[k].lifted(target) * power;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Law constructors

RingElement FormalGroupLaw::a(int i, int j) const {
  if (i > j) std::swap(i, j);
  auto it = table.find({i, j});
  if (it == table.end()) return RingElement::zero(coeff_ring);
  return it->second;
}

FormalGroupLaw fgl_additive(int cap) {
  return {GradedRing::create({}, {cap}), "additive", {}};
}

FormalGroupLaw fgl_multiplicative(int cap) {
  auto ring = GradedRing::create({{"b", -1, 0}}, {cap});
  return fgl_multiplicative_over(ring, gen_elem(ring, "b"));
}

FormalGroupLaw fgl_multiplicative_over(RingPtr ring, const RingElement& beta) {
  if (beta.ring() != ring) throw Error("ring mismatch");
  std::map<std::pair<int, int>, RingElement> table;
  table.emplace(std::make_pair(1, 1), -beta);
  return {std::move(ring), "multiplicative", std::move(table)};
}

FormalGroupLaw fgl_custom(RingPtr ring,
                          std::map<std::pair<int, int>, RingElement> table,
                          std::string kind) {
  for (auto it = table.begin(); it != table.end();) {
    auto [i, j] = it->first;
    if (i < 1 || i > j) throw Error("law table index out of range");
    if (i + j > ring->degree_cap()) throw Error("law table entry beyond degree cap");
    if (it->second.ring() != ring) throw Error("ring mismatch");
    it = it->second.is_zero() ? table.erase(it) : std::next(it);
  }
  return {std::move(ring), std::move(kind), std::move(table)};
}

FormalGroupLaw fgl_universal(int cap) {
  if (cap < 2) return {GradedRing::create({}, {cap}), "universal", {}};

  std::vector<Generator> gens;
  std::vector<std::pair<int, int>> pairs;
  for (int s = 2; s <= cap; ++s) {
    for (int i = 1; 2 * i <= s; ++i) {
      int j = s - i;
      gens.push_back({"a" + std::to_string(i) + std::to_string(j), 1 - s, 0});
      pairs.emplace_back(i, j);
    }
  }
  const std::size_t n = gens.size();

  // Pre-quotient law over free coefficients, used to expand the
  // associativity defect.
  auto free_ring = GradedRing::create(gens, {cap});
  std::map<std::pair<int, int>, RingElement> free_table;
  for (std::size_t g = 0; g < n; ++g)
    free_table.emplace(pairs[g], RingElement::generator(free_ring, g));
  FormalGroupLaw pre{free_ring, "universal", std::move(free_table)};

  auto scratch = GradedRing::extend(free_ring, {{"x", 1, 0}, {"y", 1, 0}, {"z", 1, 0}});
  auto x = gen_elem(scratch, "x");
  auto y = gen_elem(scratch, "y");
  auto z = gen_elem(scratch, "z");
  RingElement defect = formal_sum(pre, formal_sum(pre, x, y), z) -
                       formal_sum(pre, x, formal_sum(pre, y, z));

  // Group the defect by variable exponents: each group is one homogeneous
  // relation among the coefficients.
  std::map<Monomial, TermMap> groups;
  for (const auto& [mon, coeff] : defect.terms()) {
    Monomial key(mon.begin() + n, mon.end());
    Monomial rest = mon;
    rest[n] = rest[n + 1] = rest[n + 2] = 0;
    groups[std::move(key)][std::move(rest)] += coeff;
  }
  std::vector<TermMap> relations;
  relations.reserve(groups.size());
  for (auto& [key, rel] : groups) relations.push_back(std::move(rel));

  std::vector<std::size_t> support(n);
  std::vector<int> weights(n);
  for (std::size_t g = 0; g < n; ++g) {
    support[g] = g;
    weights[g] = -gens[g].degree;
  }
  auto table = std::make_shared<QuotientTable>(std::move(support), std::move(weights),
                                               relations);
  auto coeff_ring = GradedRing::create(std::move(gens), {cap}, std::move(table));

  std::map<std::pair<int, int>, RingElement> quot_table;
  for (std::size_t g = 0; g < n; ++g)
    quot_table.emplace(pairs[g], RingElement::generator(coeff_ring, g));
  return {std::move(coeff_ring), "universal", std::move(quot_table)};
}

// ---------------------------------------------------------------------------
// Law operations

RingElement formal_sum(const FormalGroupLaw& F, const RingElement& u,
                       const RingElement& v) {
  if (u.ring() != v.ring()) throw Error("ring mismatch");
  const RingPtr& R = u.ring();

  RingElement acc = u + v;
  if (F.table.empty() || u.is_zero() || v.is_zero()) return acc;

  std::vector<RingElement> pu{RingElement::one(R), u};
  std::vector<RingElement> pv{RingElement::one(R), v};
  auto power = [](std::vector<RingElement>& p, const RingElement& base, int e) {
    while (static_cast<int>(p.size()) <= e) p.push_back(p.back() * base);
    return p[e];
  };

  for (const auto& [ij, aij] : F.table) {
    if (aij.is_zero()) continue;
    auto [i, j] = ij;
    RingElement term = power(pu, u, i) * power(pv, v, j);
    if (i != j) term += power(pu, u, j) * power(pv, v, i);
    if (term.is_zero()) continue;
    acc += aij.lifted(R) * term;
  }
  return acc;
}

RingElement formal_inverse(const FormalGroupLaw& F, const RingElement& u) {
  const RingPtr& R = u.ring();
  require_positively_graded(u, "formal inverse");
  RingElement cur = -u;
  for (int iter = 0; iter <= R->degree_cap() + 1; ++iter) {
    RingElement s = formal_sum(F, u, cur);
    if (s.is_zero()) return cur;
    cur -= s;
  }
  throw Error("formal inverse iteration did not converge", u.render());
}

RingElement n_series(const FormalGroupLaw& F, long n, const RingElement& u) {
  if (n < 0) return formal_inverse(F, n_series(F, -n, u));
  RingElement acc = RingElement::zero(u.ring());
  for (long k = 0; k < n; ++k) acc = formal_sum(F, acc, u);
  return acc;
}

AxiomReport check_fgl_axioms(const FormalGroupLaw& F) {
  auto names = fresh_names(*F.coeff_ring, {"x", "y", "z"});
  auto scratch = GradedRing::extend(
      F.coeff_ring, {{names[0], 1, 0}, {names[1], 1, 0}, {names[2], 1, 0}});
  auto x = gen_elem(scratch, names[0]);
  auto y = gen_elem(scratch, names[1]);
  auto z = gen_elem(scratch, names[2]);
  auto zero = RingElement::zero(scratch);

  AxiomReport report;
  auto lowest_part = [](const RingElement& d) {
    long best = 0;
    bool seen = false;
    for (const auto& [mon, coeff] : d.terms()) {
      (void)coeff;
      long w = d.ring()->weighted_degree(mon);
      if (!seen || w < best) {
        best = w;
        seen = true;
      }
    }
    return d.homogeneous_part(best);
  };

  report.unit_ok = formal_sum(F, x, zero) == x && formal_sum(F, zero, y) == y;
  if (!report.unit_ok) report.witness = "unit: " + formal_sum(F, x, zero).render();

  RingElement comm = formal_sum(F, x, y) - formal_sum(F, y, x);
  report.commutative_ok = comm.is_zero();
  if (report.witness.empty() && !report.commutative_ok)
    report.witness = "commutativity: " + lowest_part(comm).render();

  RingElement assoc = formal_sum(F, formal_sum(F, x, y), z) -
                      formal_sum(F, x, formal_sum(F, y, z));
  report.associative_ok = assoc.is_zero();
  if (report.witness.empty() && !report.associative_ok)
    report.witness = "associativity: " + lowest_part(assoc).render();
  return report;
}

PowerSeries log_series(const FormalGroupLaw& F) {
  if (F.coeff_ring->integer_only())
    throw Error("logarithm requires rational scalars");
  // dF/dy (t, 0) = 1 + sum_i a_{i,1} t^i.
  PowerSeries g(F.coeff_ring);
  g.set(0, RingElement::one(F.coeff_ring));
  for (std::size_t i = 1; i < g.length(); ++i)
    g.set(i, F.a(static_cast<int>(i), 1));
  return g.reciprocal().integrated();
}

PowerSeries exp_series(const FormalGroupLaw& F) { return log_series(F).reversion(); }

// ---------------------------------------------------------------------------
// Orientation morphisms

OrientationMorphism morphism_new(FormalGroupLaw source, FormalGroupLaw target,
                                 PowerSeries psi) {
  if (source.coeff_ring != target.coeff_ring)
    throw Error("morphism laws must share one coefficient ring");
  if (psi.ring() != source.coeff_ring) throw Error("ring mismatch");
  if (!psi[0].is_zero() || !(psi[1] == RingElement::one(psi.ring())))
    throw Error("morphism series must be t plus higher-order terms");

  auto names = fresh_names(*source.coeff_ring, {"x", "y"});
  auto scratch =
      GradedRing::extend(source.coeff_ring, {{names[0], 1, 0}, {names[1], 1, 0}});
  auto x = gen_elem(scratch, names[0]);
  auto y = gen_elem(scratch, names[1]);

  RingElement lhs = psi.evaluate(formal_sum(target, x, y));
  RingElement rhs = formal_sum(source, psi.evaluate(x), psi.evaluate(y));
  RingElement diff = lhs - rhs;
  if (!diff.is_zero()) {
    long best = 0;
    bool seen = false;
    for (const auto& [mon, coeff] : diff.terms()) {
      (void)coeff;
      long w = scratch->weighted_degree(mon);
      if (!seen || w < best) {
        best = w;
        seen = true;
      }
    }
    throw Error("incompatible orientation series",
                "degree " + std::to_string(best) + ": " +
                    diff.homogeneous_part(best).render());
  }
  return {std::move(source), std::move(target), std::move(psi)};
}

OrientationMorphism morphism_identity(const FormalGroupLaw& F) {
  return morphism_new(F, F, PowerSeries::identity(F.coeff_ring));
}

OrientationMorphism morphism_compose(const OrientationMorphism& first,
                                     const OrientationMorphism& second) {
  if (!law_equal(first.target, second.source))
    throw Error("morphism composition: middle laws differ");
  return morphism_new(first.source, second.target,
                      first.psi.compose(second.psi));
}

OrientationMorphism morphism_exponential(int cap) {
  auto ring = GradedRing::create({}, {cap});
  auto one = RingElement::one(ring);
  FormalGroupLaw source = fgl_multiplicative_over(ring, one);
  FormalGroupLaw target = fgl_custom(ring, {}, "additive");
  PowerSeries psi(ring);
  Rational factorial(1);
  for (std::size_t k = 1; k < psi.length(); ++k) {
    factorial *= Rational(static_cast<long>(k));
    Rational coeff = Rational(k % 2 == 1 ? 1 : -1) / factorial;
    psi.set(k, RingElement::constant(ring, coeff));
  }
  return morphism_new(std::move(source), std::move(target), std::move(psi));
}

OrientationMorphism morphism_conjugate(const FormalGroupLaw& F,
                                       const std::vector<Rational>& alphas) {
  const RingPtr& ring = F.coeff_ring;
  PowerSeries psi = PowerSeries::identity(ring);
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    if (k + 2 < psi.length())
      psi.set(k + 2, RingElement::constant(ring, alphas[k]));
  }
  PowerSeries inv = psi.reversion();

  auto names = fresh_names(*ring, {"x", "y"});
  auto scratch = GradedRing::extend(ring, {{names[0], 1, 0}, {names[1], 1, 0}});
  auto x = gen_elem(scratch, names[0]);
  auto y = gen_elem(scratch, names[1]);
  RingElement g = inv.evaluate(formal_sum(F, psi.evaluate(x), psi.evaluate(y)));

  // Read the conjugated law's table out of g = x + y + sum g_ij x^i y^j.
  const std::size_t base = ring->size();
  std::map<std::pair<int, int>, TermMap> buckets;
  for (const auto& [mon, coeff] : g.terms()) {
    int i = mon[base];
    int j = mon[base + 1];
    if (i + j <= 1) continue;   // the linear part x + y
    if (i < 1 || j < 1 || i > j) continue;  // symmetric: keep i <= j
    Monomial rest(mon.begin(), mon.begin() + base);
    buckets[{i, j}][std::move(rest)] += coeff;
  }
  std::map<std::pair<int, int>, RingElement> table;
  for (auto& [ij, terms] : buckets)
    table.emplace(ij, RingElement::from_terms(ring, std::move(terms)));
  FormalGroupLaw target = fgl_custom(ring, std::move(table), "conjugate");
  return morphism_new(F, std::move(target), std::move(psi));
}

}  // namespace fglchern
