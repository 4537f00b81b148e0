#pragma once

#include <cstddef>
#include <vector>

#include "fglchern/chern.hpp"
#include "fglchern/fgl.hpp"
#include "fglchern/gysin.hpp"
#include "fglchern/ring.hpp"

namespace fglchern {

/// An orientation change together with its Todd correction series
/// td(t) = t / psi(t), a unit series with constant coefficient 1.
///
/// Slots 0..cap-1 of the series are determined by the morphism; slot cap
/// would need psi's coefficient one past the cap, which is not part of the
/// data, so it is computed from the zero extension. Every identity in this
/// module multiplies the evaluated series into a positive-degree class,
/// which keeps that convention slot out of all comparisons.
struct ToddTransformation {
  OrientationMorphism morphism;
  PowerSeries todd_series;

  int cap() const { return morphism.source.cap(); }
};

/// Builds the Todd series from the morphism's orientation series.
ToddTransformation todd_new(OrientationMorphism m);

/// Todd class of a line bundle presented by its first Chern class `root`:
/// the Todd series evaluated at the root. The root must be nilpotent (every
/// monomial positively graded) and live in an extension of the morphism's
/// coefficient ring. The value is a unit with constant term 1; the zero
/// root gives 1.
RingElement todd_line(const ToddTransformation& T, const RingElement& root);

/// Multiplicative extension to virtual bundles: the product of todd_line
/// over the plus roots times element reciprocals of todd_line over the
/// minus roots. Satisfies todd_virtual(v + w) = todd_virtual(v) *
/// todd_virtual(w), todd_virtual(-v) = todd_virtual(v)^{-1}, and
/// todd_virtual(0) = 1.
RingElement todd_virtual(const ToddTransformation& T, const VirtualBundle& v);

/// Checks the relation tying the orientation series to the Todd class of
/// the virtual negative of a line bundle:
///   psi(root) == todd_virtual(-L_root) * root.
/// The root must be nilpotent and homogeneous of degree 1.
CheckResult todd_chern_relation_check(const ToddTransformation& T,
                                      const RingElement& root);

/// Applies the orientation change to a class written in source-theory
/// coordinates. The indices in `source_roots` are the theory tag: those
/// generators are first Chern classes taken in the source orientation and
/// are rewritten to psi(generator). A positive-degree generator appearing
/// in `u` without a tag is an error; generators of degree <= 0 are
/// coefficients and pass through unchanged. The map is a ring homomorphism
/// and the identity morphism leaves every class fixed.
RingElement grothendieck_transform(const ToddTransformation& T, const RingElement& u,
                                   const std::vector<std::size_t>& source_roots);

/// Convenience overload tagging every positive-degree generator of u's ring.
RingElement grothendieck_transform(const ToddTransformation& T, const RingElement& u);

/// Riemann-Roch comparison for a scenario expressed in source-theory
/// coordinates (the scenario's law must equal the morphism's source).
///
/// Zero section of an effective bundle N with single-generator roots: in
/// the completion P(N + 1), the transform of the divisor class of the zero
/// section equals todd_virtual(-N) times that divisor class, after
/// reduction. The virtual tangent bundle of the section is -N.
///
/// Projective line (a projection scenario with zero twist): over the
/// scenario's base, for u in {1, x},
///   transform(push_F(u)) == push_G(todd_virtual(tau) * transform(u))
/// with tau = [O(1)] + [O(1)] - [O] the relative tangent class of the
/// line's projection.
///
/// Other scenario kinds (and twisted projections) are not supported.
CheckResult grr_check(const ToddTransformation& T, const Scenario& s);

/// Cocycle for composable orientation changes first: E -> M (series psi1)
/// and second: M -> F (series psi2). The composite rewrites source classes
/// through psi1 o psi2, and its Todd series factors:
///   td_composite(t) == td_second(t) * td_first(psi2(t))
/// in every slot below the cap (each side's cap slot uses its own zero
/// extension, so it is excluded). The element-level form
///   td_composite(x) == td_second(x) * transform_second(td_first(x))
/// is checked at a root whose nilpotency equals the cap, where both sides
/// are exact.
CheckResult todd_cocycle_check(const OrientationMorphism& first,
                               const OrientationMorphism& second);

}  // namespace fglchern
