#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fglchern/chern.hpp"
#include "fglchern/fgl.hpp"
#include "fglchern/ring.hpp"

namespace fglchern {

/// Pushforward along the trivial P^1 over the space's base: reads the normal
/// form u = a + b*x and returns -a_11 * a + b in the base ring.
RingElement pushforward_p1(const FormalGroupLaw& F, const ProjectiveBundle& space,
                           const RingElement& u);

/// Residue-rule pushforward along a trivial P^n (all fibers zero), n <= 3:
///   p(g(x)) = sum_k g(z_k) / prod_{j != k} F(z_k, [-1] z_j),  z -> 0,
/// computed with auxiliary variables and exact synthetic division. The
/// z-free part is exact: truncation garbage keeps positive z-degree. Laws
/// whose tables are only known to the cap need cap >= n(n+1) + 1; the
/// additive and multiplicative tables are complete, so any cap works.
RingElement pushforward_pn(const FormalGroupLaw& F, const ProjectiveBundle& space,
                           const RingElement& u);

/// Pushforward along an arbitrary projectivization P(E) -> base by the
/// twisted residue rule with denominators F([-1] roots_k, roots_j). The
/// auxiliary-variable regularization is exact only when the law's table is
/// complete, so this accepts the additive and multiplicative laws.
RingElement pushforward_projective(const FormalGroupLaw& F, const ProjectiveBundle& pb,
                                   const RingElement& u);

/// Exact pairing for a rank-1 completion P(L+1) (fibers [y, 0]), valid for
/// every law: with i(t) the formal-inverse series,
///   p(a + b*c) = a * S1(y) + b * Sc(y),
///   Sc = t/i(t) (as a power series),  S1 = ((t + i(t))/t^2) * Sc.
/// The identity t*S1 - Sc = 1 makes p(th(L)) = 1 exact.
RingElement pushforward_completion_rank1(const FormalGroupLaw& F,
                                         const ProjectiveBundle& pb,
                                         const RingElement& u);

/// Pass/fail outcome of a symbolic identity check; witness holds the residue
/// (canonical text of the offending difference) on failure.
struct CheckResult {
  bool pass = false;
  std::string witness;
};

/// Geometry the engine models directly: zero sections of effective bundles,
/// projections of rank-1 completions (with a twist class) and of trivial
/// projective spaces, and composites of those.
struct Scenario {
  enum class Kind { ZeroSection, P1Projection, PnProjection, Composite };
  Kind kind = Kind::Composite;
  FormalGroupLaw fgl;
  RingPtr base;
  std::optional<VirtualBundle> bundle;  // ZeroSection
  RingElement twist;                    // P1Projection: c1 of the twisting line
  int n = 0;                            // PnProjection
  std::vector<Scenario> parts;          // Composite

  /// -rank for a zero section, +1 / +n for projections, sum for composites.
  int relative_dimension() const;
};

Scenario zero_section(const FormalGroupLaw& F, VirtualBundle v);
Scenario p1_projection(const FormalGroupLaw& F, RingElement twist);
Scenario pn_projection(const FormalGroupLaw& F, RingPtr base, int n);
Scenario composite(std::vector<Scenario> parts);

/// Fundamental class of a scenario. Zero sections contribute their Thom
/// module element; projections are operational (their standalone value is
/// the unit) and act in composites through the pairing: a P^1 projection
/// whose twist matches a pending section root consumes it (the key lemma),
/// otherwise it multiplies by the pushforward of 1.
struct FundamentalClass {
  int degree = 0;
  ThomModuleElement value;
};

FundamentalClass fundamental_class(const Scenario& s);

/// Verifies that the zero-section class of v pairs to 1 against the
/// completion projection: p(th(v)) = 1 in the base ring. Rank 1 uses the
/// exact series pairing (every law); rank 2 uses the twisted residue rule
/// (additive/multiplicative laws).
CheckResult key_lemma_check(const FormalGroupLaw& F, const VirtualBundle& v);

/// Excess-intersection comparison for a sub-bundle inclusion: restricting
/// the divisor class of the larger zero section to the smaller completion
/// must produce the Euler class of the excess bundle times the smaller
/// divisor class. g_tangent's roots must be a sub-multiset of f_tangent's;
/// the excess is the result of removing them.
CheckResult excess_check(const FormalGroupLaw& F, const VirtualBundle& f_tangent,
                         const VirtualBundle& g_tangent);

/// Formal sum over components of [m_k]-series of the divisor classes:
/// [m_1] e_1 +_F ... +_F [m_r] e_r. Empty input gives 0.
RingElement ramification_class(const FormalGroupLaw& F, const RingPtr& ring,
                               const std::vector<std::pair<long, RingElement>>& components);

/// Euler class of N, asserting the Thom-model identity that the divisor
/// class of the zero section restricts to it when the fiber coordinate is
/// set to zero.
RingElement self_intersection(const FormalGroupLaw& F, const VirtualBundle& N);

/// Degree-d covering class through P^1: pushforward of [d](x) +_F y0 along
/// the trivial P^1 over y0's ring.
RingElement degree_class(const FormalGroupLaw& F, long d, const RingElement& y0);

/// Closed form of degree_class derived from the pushforward pipeline:
///   d + (d-1) a_11 y0 + sum_{i>=2} d a_1i y0^i.
RingElement degree_class_closed(const FormalGroupLaw& F, long d, const RingElement& y0);

/// Alternative reading with unit coefficients on the degree >= 2 terms:
///   d + (d-1) a_11 y0 + sum_{i>=2} a_1i y0^i.
/// Kept for comparison reports; degree_class_closed is the normative form.
RingElement degree_class_display(const FormalGroupLaw& F, long d, const RingElement& y0);

/// Checks p(lift(x) * y) = x * p(y) along a trivial projective space.
CheckResult projection_formula_check(const FormalGroupLaw& F, const ProjectiveBundle& space,
                                     const RingElement& x_base, const RingElement& y_total);

}  // namespace fglchern
