#include "fglchern/gysin.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fglchern/error.hpp"

namespace fglchern {

namespace {

constexpr long kNoBand = std::numeric_limits<long>::max() / 4;

std::string fresh_name(const GradedRing& ring, std::string base) {
  while (ring.find(base)) base += "_";
  return base;
}

bool law_is_exact(const FormalGroupLaw& F) {
  return F.kind == "additive" || F.kind == "multiplicative";
}

long z_weight(const Monomial& m, const std::vector<std::size_t>& z_idx) {
  long s = 0;
  for (std::size_t i : z_idx)
    if (i < m.size()) s += m[i];
  return s;
}

/// Auxiliary ring: the base plus one regularization variable per fiber root,
/// with enough extra cap headroom that truncation noise stays above the
/// degrees the divisions can pull down into the answer.
struct ResidueSetup {
  RingPtr aux;
  std::vector<std::size_t> z_idx;
  std::vector<RingElement> z;
};

ResidueSetup make_aux(const RingPtr& base, std::size_t count, int extra_cap) {
  std::vector<Generator> gens = base->gens();
  std::vector<std::string> names;
  for (std::size_t k = 0; k < count; ++k) {
    std::string n = fresh_name(*base, "z" + std::to_string(k));
    while (std::find(names.begin(), names.end(), n) != names.end()) n += "_";
    names.push_back(n);
    gens.push_back({n, 1, 0});
  }
  RingOptions opts;
  opts.degree_cap = base->degree_cap() + extra_cap;
  opts.integer_only = base->integer_only();
  opts.strict_degree = base->strict_degree();
  ResidueSetup s;
  s.aux = GradedRing::create(std::move(gens), opts, base->quotient());
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t idx = s.aux->index_of(names[k]);
    s.z_idx.push_back(idx);
    s.z.push_back(RingElement::generator(s.aux, idx));
  }
  return s;
}

struct LinearDivision {
  RingElement quotient;
  RingElement remainder;
};

/// u = (var - w) * quotient + remainder by synthetic division from the top
/// coefficient; w must not involve var.
LinearDivision divide_linear(const RingElement& u, std::size_t var, const RingElement& w) {
  const RingPtr& ring = u.ring();
  const RingElement zero = RingElement::zero(ring);
  auto parts = u.decompose_by(var);
  if (parts.empty()) return {zero, zero};
  const unsigned top = parts.rbegin()->first;
  if (top == 0) return {zero, u};
  auto at = [&](unsigned e) -> RingElement {
    auto it = parts.find(e);
    return it == parts.end() ? zero : it->second;
  };
  std::vector<RingElement> q(top, zero);
  q[top - 1] = at(top);
  for (unsigned e = top - 1; e >= 1; --e) q[e - 1] = at(e) + w * q[e];
  RingElement remainder = at(0) + w * q[0];
  RingElement quotient = zero;
  const RingElement var_elem = RingElement::generator(ring, var);
  RingElement power = RingElement::one(ring);
  for (unsigned e = 0; e < top; ++e) {
    if (!q[e].is_zero()) quotient += q[e] * power;
    if (e + 1 < top) power *= var_elem;
  }
  return {quotient, remainder};
}

/// Every exactly-divisible input leaves only truncation noise in the
/// remainder, and that noise lives above the tracked degree floors. A term
/// inside both bands means the division was not exact: fail loudly.
void require_out_of_band(const RingElement& rem, const std::vector<std::size_t>& z_idx,
                         long z_band, long pos_band, const char* stage) {
  for (const auto& [m, c] : rem.terms()) {
    if (z_weight(m, z_idx) <= z_band && rem.ring()->positive_degree(m) <= pos_band) {
      TermMap one_term;
      one_term[m] = c;
      throw Error(std::string("pushforward: inexact residue division at ") + stage,
                  RingElement::from_terms(rem.ring(), std::move(one_term)).render());
    }
  }
}

RingElement z_free_part(const RingElement& u, const std::vector<std::size_t>& z_idx) {
  TermMap keep;
  for (const auto& [m, c] : u.terms())
    if (z_weight(m, z_idx) == 0) keep[m] = c;
  return RingElement::from_terms(u.ring(), std::move(keep));
}

/// Residue-rule pushforward shared by the trivial and twisted modes.
///
/// The class u = sum_e A_e c^e is evaluated at completed roots and divided
/// by the pairwise differences:
///   p(u) = sum_k u(r_k) / prod_{j != k} D_kj,   all z -> 0,
/// where in trivial mode r_k = z_k and D_kj = F(z_k, [-1] z_j), and in
/// twisted mode r_k = F(x_k, z_k) and D_kj = F([-1] r_k, r_j). Everything
/// is put over the common denominator prod_{i != j} D_ij; each factor splits
/// as (z_j - w_ij) * unit, the units are inverted directly, and the linear
/// factors are removed by synthetic division. Setting z = 0 then yields the
/// exact pushforward whenever the guards below hold:
///  - truncated tables put noise only at z-degree > cap (trivial mode), and
///    each division lowers that by one, so cap >= pairs + 1 keeps all noise
///    at positive z-degree, where z -> 0 kills it;
///  - ring-cap noise sits above base cap + pairs + 1 and never erodes below
///    base cap + 1, where the final shrink drops it.
RingElement residue_pushforward(const FormalGroupLaw& F, const ProjectiveBundle& pb,
                                const RingElement& u, bool twisted) {
  const RingPtr& base = pb.base;
  if (u.ring() != pb.total)
    throw Error("pushforward: element does not live in the bundle's total ring");
  if (!F.coeff_ring->is_prefix_of(*base))
    throw Error("pushforward: base ring does not extend the law's coefficient ring");
  const std::size_t R = static_cast<std::size_t>(pb.rank);
  const long pairs = static_cast<long>(R) * (static_cast<long>(R) - 1);
  const bool exact = law_is_exact(F);
  const long table_band = exact ? kNoBand : F.cap();
  if (twisted && !exact)
    throw Error(
        "pushforward: twisted fibers need a law with a complete table "
        "(additive or multiplicative)",
        F.kind);
  if (!twisted && !exact && table_band < pairs + 1)
    throw Error("pushforward: law table too short for this fiber dimension; need cap >= " +
                    std::to_string(pairs + 1),
                F.kind);

  ResidueSetup setup = make_aux(base, R, static_cast<int>(pairs) + 1);
  const RingPtr& aux = setup.aux;
  const RingElement zero = RingElement::zero(aux);

  RingElement reduced = pb.reduce(u);
  std::vector<RingElement> coeffs(R, zero);
  for (const auto& [e, a] : reduced.decompose_by(pb.c_index)) {
    if (e >= R) throw Error("pushforward: normal form exceeds the fiber rank");
    coeffs[e] = a.shrunk(base).lifted(aux);
  }

  // Fiber roots are stored lifted into the total ring; pull them back to the
  // base (they are free of the fiber coordinate) and lift into the aux ring.
  std::vector<RingElement> fiber_roots;
  fiber_roots.reserve(R);
  for (std::size_t k = 0; k < R; ++k)
    fiber_roots.push_back(pb.fibers.plus[k].shrunk(base).lifted(aux));

  std::vector<RingElement> roots;
  roots.reserve(R);
  for (std::size_t k = 0; k < R; ++k) {
    if (twisted)
      roots.push_back(formal_sum(F, fiber_roots[k], setup.z[k]));
    else
      roots.push_back(setup.z[k]);
  }

  std::vector<std::vector<RingElement>> D(R, std::vector<RingElement>(R, zero));
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < R; ++j) {
      if (i == j) continue;
      D[i][j] = twisted ? formal_sum(F, formal_inverse(F, roots[i]), roots[j])
                        : formal_sum(F, setup.z[i], formal_inverse(F, setup.z[j]));
    }

  // w_ij: the z_j-free root of D_ij as a polynomial in z_j.
  auto division_root = [&](std::size_t i, std::size_t j) -> RingElement {
    if (!twisted) return setup.z[i];
    return formal_sum(F, formal_inverse(F, fiber_roots[j]), roots[i]);
  };

  RingElement numerator = zero;
  for (std::size_t k = 0; k < R; ++k) {
    RingElement g = zero;
    RingElement power = RingElement::one(aux);
    for (std::size_t e = 0; e < R; ++e) {
      if (!coeffs[e].is_zero()) g += coeffs[e] * power;
      if (e + 1 < R) power *= roots[k];
    }
    for (std::size_t i = 0; i < R; ++i) {
      if (i == k) continue;
      for (std::size_t j = 0; j < R; ++j) {
        if (j == i) continue;
        g *= D[i][j];
      }
    }
    numerator += g;
  }

  // Garbage floors: minimum z-degree / positive degree at which truncation
  // noise can currently live in `numerator`.
  long z_floor = twisted ? kNoBand : table_band + 1;
  long pos_floor = static_cast<long>(aux->degree_cap()) + 1;

  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < R; ++j) {
      if (i == j) continue;
      LinearDivision du = divide_linear(D[i][j], setup.z_idx[j], division_root(i, j));
      require_out_of_band(du.remainder, setup.z_idx, z_floor - 2, pos_floor - 2,
                          "unit extraction");
      numerator *= du.quotient.reciprocal();
    }
  if (pairs > 0) {
    z_floor -= 1;
    pos_floor -= 1;
  }

  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < R; ++j) {
      if (i == j) continue;
      LinearDivision dn = divide_linear(numerator, setup.z_idx[j], division_root(i, j));
      require_out_of_band(dn.remainder, setup.z_idx, z_floor - 2, pos_floor - 2,
                          "linear division");
      numerator = dn.quotient;
      z_floor -= 1;
      pos_floor -= 1;
    }

  return z_free_part(numerator, setup.z_idx).shrunk(base);
}

void require_trivial_space(const ProjectiveBundle& space) {
  for (const auto& r : space.fibers.plus)
    if (!r.is_zero())
      throw Error("pushforward: space is not a trivial projective space", r.render());
  if (!space.fibers.minus.empty())
    throw Error("pushforward: space fibers must be effective");
}

/// S-series of the exact rank-1 completion pairing. With i(t) the formal
/// inverse series of the law, Sc = t/i(t) and S1 = ((t + i(t))/t^2) * Sc;
/// the pairing is p(a + b*c) = a*S1(y) + b*Sc(y), and t*S1 - Sc = 1 exactly.
struct CompletionSeries {
  PowerSeries sc;
  PowerSeries s1;
};

PowerSeries inverse_series(const FormalGroupLaw& F) {
  const RingPtr& coeff = F.coeff_ring;
  auto scratch = GradedRing::extend(coeff, {{fresh_name(*coeff, "t"), 1, 0}});
  const std::size_t t_idx = scratch->size() - 1;
  RingElement inv = formal_inverse(F, RingElement::generator(scratch, t_idx));
  PowerSeries s(coeff);
  for (const auto& [e, c] : inv.decompose_by(t_idx)) s.set(e, c.shrunk(coeff));
  return s;
}

CompletionSeries completion_series(const FormalGroupLaw& F) {
  // The reciprocal and the double shift consume inverse-series slots up to
  // two past each retained slot, so compute everything in a copy of the
  // coefficient ring with two extra degrees of headroom and restrict back.
  const RingPtr& coeff = F.coeff_ring;
  RingOptions opts;
  opts.degree_cap = coeff->degree_cap() + 2;
  opts.integer_only = coeff->integer_only();
  opts.strict_degree = coeff->strict_degree();
  RingPtr wide = GradedRing::create(coeff->gens(), opts, coeff->quotient());
  std::map<std::pair<int, int>, RingElement> table;
  for (const auto& [ij, aij] : F.table) table.emplace(ij, aij.lifted(wide));
  FormalGroupLaw wide_law{wide, F.kind, std::move(table)};

  PowerSeries inv = inverse_series(wide_law);
  PowerSeries sc_wide = inv.shifted_down(1).reciprocal();
  PowerSeries s1_wide = (PowerSeries::identity(wide) + inv).shifted_down(2) * sc_wide;

  std::vector<RingElement> sc_coeffs;
  std::vector<RingElement> s1_coeffs;
  for (std::size_t k = 0; k <= static_cast<std::size_t>(coeff->degree_cap()); ++k) {
    sc_coeffs.push_back(sc_wide[k].shrunk(coeff));
    s1_coeffs.push_back(s1_wide[k].shrunk(coeff));
  }
  return {PowerSeries::from_coeffs(coeff, std::move(sc_coeffs)),
          PowerSeries::from_coeffs(coeff, std::move(s1_coeffs))};
}

bool same_law(const FormalGroupLaw& a, const FormalGroupLaw& b) {
  return a.coeff_ring == b.coeff_ring && a.kind == b.kind && a.table == b.table;
}

void accumulate_scenario(const Scenario& s, ThomModuleElement& acc) {
  switch (s.kind) {
    case Scenario::Kind::ZeroSection:
      acc = thom_mul(acc, thom_element(*s.bundle, RingElement::one(s.base)));
      return;
    case Scenario::Kind::P1Projection: {
      // Pairing against a pending section root: a matching root is consumed
      // (its divisor class pushes to 1); otherwise the projection contributes
      // the pushforward of 1.
      VirtualBundle b = bundle_cancel(acc.bundle);
      for (std::size_t i = 0; i < b.plus.size(); ++i) {
        if (b.plus[i] == s.twist) {
          b.plus.erase(b.plus.begin() + static_cast<std::ptrdiff_t>(i));
          acc = thom_element(b, acc.coeff);
          return;
        }
      }
      CompletionSeries cs = completion_series(s.fgl);
      acc = thom_element(b, acc.coeff * cs.s1.evaluate(s.twist));
      return;
    }
    case Scenario::Kind::PnProjection: {
      ProjectiveBundle space = projective_space(s.base, s.n);
      RingElement unit_push =
          pushforward_pn(s.fgl, space, RingElement::one(space.total));
      acc = thom_element(acc.bundle, acc.coeff * unit_push);
      return;
    }
    case Scenario::Kind::Composite:
      for (const auto& part : s.parts) accumulate_scenario(part, acc);
      return;
  }
  throw Error("scenario: unknown kind");
}

}  // namespace

RingElement pushforward_p1(const FormalGroupLaw& F, const ProjectiveBundle& space,
                           const RingElement& u) {
  require_trivial_space(space);
  if (space.rank != 2)
    throw Error("pushforward: relative line expected", std::to_string(space.rank));
  if (u.ring() != space.total)
    throw Error("pushforward: element does not live in the bundle's total ring");
  if (!F.coeff_ring->is_prefix_of(*space.base))
    throw Error("pushforward: base ring does not extend the law's coefficient ring");
  RingElement a = RingElement::zero(space.base);
  RingElement b = RingElement::zero(space.base);
  for (const auto& [e, part] : u.decompose_by(space.c_index)) {
    if (e == 0)
      a = part.shrunk(space.base);
    else if (e == 1)
      b = part.shrunk(space.base);
    else
      throw Error("pushforward: normal form exceeds the fiber rank");
  }
  return b - F.a(1, 1).lifted(space.base) * a;
}

RingElement pushforward_pn(const FormalGroupLaw& F, const ProjectiveBundle& space,
                           const RingElement& u) {
  require_trivial_space(space);
  if (space.rank > 4)
    throw Error("pushforward: fiber dimension capped at 3", std::to_string(space.rank - 1));
  return residue_pushforward(F, space, u, /*twisted=*/false);
}

RingElement pushforward_projective(const FormalGroupLaw& F, const ProjectiveBundle& pb,
                                   const RingElement& u) {
  if (pb.rank > 4)
    throw Error("pushforward: fiber dimension capped at 3", std::to_string(pb.rank - 1));
  return residue_pushforward(F, pb, u, /*twisted=*/true);
}

RingElement pushforward_completion_rank1(const FormalGroupLaw& F,
                                         const ProjectiveBundle& pb,
                                         const RingElement& u) {
  if (pb.rank != 2 || pb.fibers.plus.size() != 2 || !pb.fibers.plus[1].is_zero())
    throw Error("pushforward: expected a rank-1 completion with fibers [y, 0]");
  if (u.ring() != pb.total)
    throw Error("pushforward: element does not live in the bundle's total ring");
  if (!F.coeff_ring->is_prefix_of(*pb.base))
    throw Error("pushforward: base ring does not extend the law's coefficient ring");
  const RingElement y = pb.fibers.plus[0].shrunk(pb.base);
  RingElement a = RingElement::zero(pb.base);
  RingElement b = RingElement::zero(pb.base);
  for (const auto& [e, part] : pb.reduce(u).decompose_by(pb.c_index)) {
    if (e == 0)
      a = part.shrunk(pb.base);
    else if (e == 1)
      b = part.shrunk(pb.base);
    else
      throw Error("pushforward: normal form exceeds the fiber rank");
  }
  CompletionSeries cs = completion_series(F);
  return a * cs.s1.evaluate(y) + b * cs.sc.evaluate(y);
}

int Scenario::relative_dimension() const {
  switch (kind) {
    case Kind::ZeroSection:
      return -bundle->rank();
    case Kind::P1Projection:
      return 1;
    case Kind::PnProjection:
      return n;
    case Kind::Composite: {
      int s = 0;
      for (const auto& p : parts) s += p.relative_dimension();
      return s;
    }
  }
  throw Error("scenario: unknown kind");
}

Scenario zero_section(const FormalGroupLaw& F, VirtualBundle v) {
  if (!v.effective() || v.plus.empty())
    throw Error("zero section: needs an effective bundle of positive rank");
  if (!F.coeff_ring->is_prefix_of(*v.ring))
    throw Error("zero section: bundle ring does not extend the law's coefficient ring");
  Scenario s;
  s.kind = Scenario::Kind::ZeroSection;
  s.fgl = F;
  s.base = v.ring;
  s.bundle = std::move(v);
  return s;
}

Scenario p1_projection(const FormalGroupLaw& F, RingElement twist) {
  if (!twist.valid()) throw Error("projection: twist element required");
  if (!twist.is_homogeneous(1))
    throw Error("projection: twist must be homogeneous of degree 1", twist.render());
  if (!F.coeff_ring->is_prefix_of(*twist.ring()))
    throw Error("projection: twist ring does not extend the law's coefficient ring");
  Scenario s;
  s.kind = Scenario::Kind::P1Projection;
  s.fgl = F;
  s.base = twist.ring();
  s.twist = std::move(twist);
  return s;
}

Scenario pn_projection(const FormalGroupLaw& F, RingPtr base, int n) {
  if (n < 1 || n > 3)
    throw Error("projection: fiber dimension must be between 1 and 3", std::to_string(n));
  if (!F.coeff_ring->is_prefix_of(*base))
    throw Error("projection: base ring does not extend the law's coefficient ring");
  Scenario s;
  s.kind = Scenario::Kind::PnProjection;
  s.fgl = F;
  s.base = std::move(base);
  s.n = n;
  return s;
}

Scenario composite(std::vector<Scenario> parts) {
  if (parts.empty()) throw Error("composite scenario: needs at least one part");
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (parts[i].base != parts[0].base)
      throw Error("composite scenario: parts live over different base rings");
    if (!same_law(parts[i].fgl, parts[0].fgl))
      throw Error("composite scenario: parts use different laws");
  }
  Scenario s;
  s.kind = Scenario::Kind::Composite;
  s.fgl = parts[0].fgl;
  s.base = parts[0].base;
  s.parts = std::move(parts);
  return s;
}

FundamentalClass fundamental_class(const Scenario& s) {
  if (!s.base) throw Error("scenario: missing base ring");
  ThomModuleElement acc = thom_unit(s.base);
  accumulate_scenario(s, acc);
  return {s.relative_dimension(), std::move(acc)};
}

CheckResult key_lemma_check(const FormalGroupLaw& F, const VirtualBundle& v) {
  if (!v.effective() || v.plus.empty())
    throw Error("key lemma: needs an effective bundle of positive rank");
  ThomData th = thom_class(v.ring, v);
  RingElement p = v.rank() == 1
                      ? pushforward_completion_rank1(F, th.completion, th.cls)
                      : pushforward_projective(F, th.completion, th.cls);
  RingElement diff = p - RingElement::one(v.ring);
  if (diff.is_zero()) return {true, ""};
  return {false, diff.render()};
}

CheckResult excess_check(const FormalGroupLaw& F, const VirtualBundle& f_tangent,
                         const VirtualBundle& g_tangent) {
  if (!f_tangent.effective() || !g_tangent.effective())
    throw Error("excess check: bundles must be effective");
  if (f_tangent.ring != g_tangent.ring)
    throw Error("excess check: bundles live over different rings");
  if (!F.coeff_ring->is_prefix_of(*f_tangent.ring))
    throw Error("excess check: ring does not extend the law's coefficient ring");
  if (g_tangent.plus.empty())
    throw Error("excess check: the smaller bundle needs positive rank");
  std::vector<RingElement> remaining = f_tangent.plus;
  for (const auto& r : g_tangent.plus) {
    auto it = std::find(remaining.begin(), remaining.end(), r);
    if (it == remaining.end())
      throw Error("excess check: roots are not nested", r.render());
    remaining.erase(it);
  }
  VirtualBundle excess = bundle_new(f_tangent.ring, std::move(remaining));
  ThomData tf = thom_class(f_tangent.ring, f_tangent);
  ThomData tg = thom_class(g_tangent.ring, g_tangent);
  RingElement lhs = transport_hyperplane(tf.cls, tf.completion, tg.completion);
  RingElement rhs = euler_class(excess).lifted(tg.completion.total) * tg.cls;
  RingElement diff = lhs - rhs;
  if (diff.is_zero()) return {true, ""};
  return {false, diff.render()};
}

RingElement ramification_class(const FormalGroupLaw& F, const RingPtr& ring,
                               const std::vector<std::pair<long, RingElement>>& components) {
  if (!F.coeff_ring->is_prefix_of(*ring))
    throw Error("ramification: ring does not extend the law's coefficient ring");
  RingElement acc = RingElement::zero(ring);
  for (const auto& [m, e] : components) {
    if (e.ring() != ring)
      throw Error("ramification: component lives in a different ring", e.render());
    acc = formal_sum(F, acc, n_series(F, m, e));
  }
  return acc;
}

RingElement self_intersection(const FormalGroupLaw& F, const VirtualBundle& N) {
  if (!N.effective() || N.plus.empty())
    throw Error("self-intersection: needs an effective bundle of positive rank");
  if (!F.coeff_ring->is_prefix_of(*N.ring))
    throw Error("self-intersection: ring does not extend the law's coefficient ring");
  ThomData th = thom_class(N.ring, N);
  SubstMap images;
  images[th.completion.c_index] = RingElement::zero(th.completion.total);
  RingElement restricted = th.cls.substitute(images).shrunk(N.ring);
  RingElement e = euler_class(N);
  if (restricted != e)
    throw Error("self-intersection: divisor class does not restrict to the top class",
                (restricted - e).render());
  return e;
}

RingElement degree_class(const FormalGroupLaw& F, long d, const RingElement& y0) {
  if (!y0.valid()) throw Error("degree class: twist element required");
  if (!y0.is_homogeneous(1))
    throw Error("degree class: twist must be homogeneous of degree 1", y0.render());
  const RingPtr& base = y0.ring();
  ProjectiveBundle space = projective_space(base, 1);
  RingElement u = formal_sum(F, n_series(F, d, space.c()), y0.lifted(space.total));
  return pushforward_p1(F, space, u);
}

namespace {

RingElement degree_class_reading(const FormalGroupLaw& F, long d, const RingElement& y0,
                                 bool scale_tail) {
  if (!y0.valid()) throw Error("degree class: twist element required");
  if (!y0.is_homogeneous(1))
    throw Error("degree class: twist must be homogeneous of degree 1", y0.render());
  const RingPtr& base = y0.ring();
  if (!F.coeff_ring->is_prefix_of(*base))
    throw Error("degree class: ring does not extend the law's coefficient ring");
  RingElement acc = RingElement::constant(base, Rational(d));
  acc += F.a(1, 1).lifted(base).scaled(Rational(d - 1)) * y0;
  RingElement power = y0 * y0;
  for (int i = 2; i <= base->degree_cap() && !power.is_zero(); ++i) {
    RingElement a1i = F.a(1, i).lifted(base);
    if (scale_tail) a1i = a1i.scaled(Rational(d));
    acc += a1i * power;
    power *= y0;
  }
  return acc;
}

}  // namespace

RingElement degree_class_closed(const FormalGroupLaw& F, long d, const RingElement& y0) {
  return degree_class_reading(F, d, y0, /*scale_tail=*/true);
}

RingElement degree_class_display(const FormalGroupLaw& F, long d, const RingElement& y0) {
  return degree_class_reading(F, d, y0, /*scale_tail=*/false);
}

CheckResult projection_formula_check(const FormalGroupLaw& F, const ProjectiveBundle& space,
                                     const RingElement& x_base, const RingElement& y_total) {
  if (x_base.ring() != space.base)
    throw Error("projection formula: first element must live in the base ring");
  if (y_total.ring() != space.total)
    throw Error("projection formula: second element must live in the total ring");
  RingElement lhs = pushforward_pn(F, space, x_base.lifted(space.total) * y_total);
  RingElement rhs = x_base * pushforward_pn(F, space, y_total);
  RingElement diff = lhs - rhs;
  if (diff.is_zero()) return {true, ""};
  return {false, diff.render()};
}

}  // namespace fglchern
