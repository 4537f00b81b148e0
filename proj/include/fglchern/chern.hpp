#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fglchern/fgl.hpp"
#include "fglchern/ring.hpp"

namespace fglchern {

/// Formal difference of two sums of line bundles, recorded by their first
/// Chern classes ("roots"). Every root is a homogeneous degree-1 element of
/// `ring` (zero allowed: a trivial line bundle).
struct VirtualBundle {
  RingPtr ring;
  std::vector<RingElement> plus;
  std::vector<RingElement> minus;

  int rank() const {
    return static_cast<int>(plus.size()) - static_cast<int>(minus.size());
  }
  bool effective() const { return minus.empty(); }
};

/// Validates roots (ring match, homogeneous of degree 1) and builds a bundle.
VirtualBundle bundle_new(RingPtr ring, std::vector<RingElement> plus,
                         std::vector<RingElement> minus = {});

VirtualBundle bundle_sum(const VirtualBundle& a, const VirtualBundle& b);
VirtualBundle bundle_negate(const VirtualBundle& a);
/// Removes plus/minus root pairs that are equal as ring elements.
VirtualBundle bundle_cancel(const VirtualBundle& a);
VirtualBundle bundle_lift(const VirtualBundle& a, const RingPtr& bigger);

/// Total Chern series c_0 + c_1 t + c_2 t^2 + ...; coefficient k is the k-th
/// Chern class. For a difference the series of the negative part is inverted,
/// so Whitney's formula holds by construction: use series multiplication.
using ChernSeries = PowerSeries;
ChernSeries total_chern(const VirtualBundle& v);

/// i-th Chern class (coefficient of the total series; 0 beyond the cap).
RingElement chern_class(const VirtualBundle& v, int i);

/// Top Chern class of an effective bundle: the product of its roots.
RingElement euler_class(const VirtualBundle& v);

/// First Chern class of a tensor product of line bundles: F(a, b).
RingElement c1_tensor(const FormalGroupLaw& F, const RingElement& a,
                      const RingElement& b);

/// First Chern class of the dual line bundle: the formal inverse.
RingElement c1_dual(const FormalGroupLaw& F, const RingElement& a);

/// The cohomology of a projectivization P(E) over a base ring: the base
/// extended by the hyperplane class c subject to
///   c^r = sum_{i=1..r} (-1)^{i+1} c_i(E) c^{r-i}   (r = rank E),
/// the expansion of prod_k (x_k - c) = 0. A trivial bundle (all roots zero)
/// uses plain nilpotency c^r = 0, which makes P^{r-1} over the base.
struct ProjectiveBundle {
  RingPtr total;
  RingPtr base;
  VirtualBundle fibers;  // roots lifted into `total`
  std::size_t c_index = 0;
  int rank = 0;                 // fiber count: P(fibers) has dimension rank-1
  RingElement rewrite;          // what c^rank rewrites to (zero when nilpotent)

  RingElement c() const { return RingElement::generator(total, c_index); }
  /// Normal form: no c-exponent reaches `rank`.
  RingElement reduce(RingElement u) const;
};

/// Builds P(E) for an effective bundle over `base`; the hyperplane generator
/// gets `name` (uniquified against the base's generators).
ProjectiveBundle projective_bundle(const RingPtr& base, const VirtualBundle& v,
                                   const std::string& name = "c");

/// Trivial projective space P^n over the base (a rank n+1 trivial bundle).
ProjectiveBundle projective_space(const RingPtr& base, int n,
                                  const std::string& name = "x");

/// Transports u along the ring map P(E) -> P(E') induced by c -> c' for two
/// projectivizations over the same base, reducing in the target.
RingElement transport_hyperplane(const RingElement& u, const ProjectiveBundle& from,
                                 const ProjectiveBundle& to);

/// Thom class data: the completion P(E + 1) together with the class
/// th(E) = prod_k (x_k - c), the divisor class of the zero section.
struct ThomData {
  ProjectiveBundle completion;  // P(E + 1): rank = rank E + 1
  RingElement cls;
};

ThomData thom_class(const RingPtr& base, const VirtualBundle& v,
                    const std::string& name = "c");

/// Element coeff * t_v of the universal Thom module; multiplication adds
/// bundles (after plus/minus cancellation) and multiplies coefficients, so
/// t_v * t_{-v} = t_0 = 1.
struct ThomModuleElement {
  VirtualBundle bundle;
  RingElement coeff;
};

ThomModuleElement thom_unit(const RingPtr& ring);
ThomModuleElement thom_element(VirtualBundle v, RingElement coeff);
ThomModuleElement thom_mul(const ThomModuleElement& a, const ThomModuleElement& b);
bool thom_equal(const ThomModuleElement& a, const ThomModuleElement& b);
std::string thom_render(const ThomModuleElement& a);

}  // namespace fglchern
