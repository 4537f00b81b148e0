#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fglchern/ring.hpp"

namespace fglchern {

/// Univariate power series over a ring, truncated at the ring's degree cap
/// (the series variable counts as degree 1). Coefficient k multiplies t^k.
class PowerSeries {
 public:
  explicit PowerSeries(RingPtr ring);  // zero series
  static PowerSeries identity(RingPtr ring);
  static PowerSeries from_coeffs(RingPtr ring, std::vector<RingElement> coeffs);

  const RingPtr& ring() const { return ring_; }
  std::size_t length() const { return c_.size(); }  // ring cap + 1
  const RingElement& operator[](std::size_t k) const;
  void set(std::size_t k, RingElement v);
  bool is_zero() const;

  PowerSeries operator+(const PowerSeries& rhs) const;
  PowerSeries operator-(const PowerSeries& rhs) const;
  PowerSeries operator*(const PowerSeries& rhs) const;
  PowerSeries scaled(const Rational& c) const;

  /// this(rhs(t)); rhs must have zero constant coefficient.
  PowerSeries compose(const PowerSeries& rhs) const;
  /// 1/this; the constant coefficient must be a unit.
  PowerSeries reciprocal() const;
  /// Compositional inverse; requires zero constant term and unit linear term.
  PowerSeries reversion() const;
  /// this / t^k; the first k coefficients must vanish.
  PowerSeries shifted_down(unsigned k) const;
  /// Term-by-term antiderivative with zero constant (rational scalars).
  PowerSeries integrated() const;

  /// Sum of coeff[k] * u^k. `u`'s ring must be the series ring or an
  /// extension of it; every monomial of u must be positively graded.
  RingElement evaluate(const RingElement& u) const;

 private:
  RingPtr ring_;
  std::vector<RingElement> c_;
};

/// Commutative one-dimensional formal group law x + y + sum a_ij x^i y^j,
/// truncated at the coefficient ring's degree cap. The table stores a_ij for
/// 1 <= i <= j only; lookups are symmetric. Working rings for elements fed to
/// formal_sum and friends must be extensions of `coeff_ring`.
struct FormalGroupLaw {
  RingPtr coeff_ring;
  std::string kind;  // "additive", "multiplicative", "universal", "custom"
  std::map<std::pair<int, int>, RingElement> table;

  int cap() const { return coeff_ring->degree_cap(); }
  /// Symmetric coefficient lookup; zero for pairs beyond the table.
  RingElement a(int i, int j) const;
};

/// x + y: the trivial law over a generator-free rational ring.
FormalGroupLaw fgl_additive(int cap);

/// x + y - b*x*y over Q[b], deg b = -1.
FormalGroupLaw fgl_multiplicative(int cap);

/// x + y - beta*x*y with a caller-supplied beta in `ring`.
FormalGroupLaw fgl_multiplicative_over(RingPtr ring, const RingElement& beta);

/// The universal law: one generator a_ij per 1 <= i <= j with i + j <= cap,
/// with the coefficient ring cut by the relations that make the law
/// associative. The relations are recomputed from the associativity defect on
/// every call, degree slice by degree slice.
FormalGroupLaw fgl_universal(int cap);

/// Law with an explicit coefficient table (validated: indices in range,
/// entries in `ring`).
FormalGroupLaw fgl_custom(RingPtr ring, std::map<std::pair<int, int>, RingElement> table,
                          std::string kind = "custom");

/// F(u, v) for elements of a common extension of F's coefficient ring.
RingElement formal_sum(const FormalGroupLaw& F, const RingElement& u,
                       const RingElement& v);

/// The inverse series value: formal_sum(F, u, formal_inverse(F, u)) == 0.
RingElement formal_inverse(const FormalGroupLaw& F, const RingElement& u);

/// [n]-series: iterated formal sum (negative n through the inverse).
RingElement n_series(const FormalGroupLaw& F, long n, const RingElement& u);

struct AxiomReport {
  bool unit_ok = false;
  bool commutative_ok = false;
  bool associative_ok = false;
  std::string witness;  // canonical render of the first failing defect
  bool ok() const { return unit_ok && commutative_ok && associative_ok; }
};

/// Checks F(x,0) = x, F(x,y) = F(y,x), F(F(x,y),z) = F(x,F(y,z)) in a fresh
/// scratch extension with three degree-1 variables.
AxiomReport check_fgl_axioms(const FormalGroupLaw& F);

/// Logarithm: the unique series with log(F(x,y)) = log(x) + log(y), built
/// from log'(t) = 1 / (dF/dy)(t, 0). Requires rational scalars.
PowerSeries log_series(const FormalGroupLaw& F);

/// Compositional inverse of the logarithm.
PowerSeries exp_series(const FormalGroupLaw& F);

/// Orientation-change data between two laws over one coefficient ring: a
/// series with psi(G(x,y)) = F(psi(x), psi(y)). `psi` rewrites the source
/// theory's first Chern class in terms of the target theory's.
struct OrientationMorphism {
  FormalGroupLaw source;  // F
  FormalGroupLaw target;  // G
  PowerSeries psi;
};

/// Validates the compatibility equation; throws with the first failing degree
/// and a monomial witness when the series is not a morphism.
OrientationMorphism morphism_new(FormalGroupLaw source, FormalGroupLaw target,
                                 PowerSeries psi);

OrientationMorphism morphism_identity(const FormalGroupLaw& F);

/// Composite of source->mid and mid->final: psi = first.psi o second.psi.
OrientationMorphism morphism_compose(const OrientationMorphism& first,
                                     const OrientationMorphism& second);

/// Multiplicative-to-additive morphism with beta = 1 and
/// psi(t) = 1 - exp(-t) = sum_{k>=1} (-1)^{k+1} t^k / k!.
OrientationMorphism morphism_exponential(int cap);

/// Conjugates F by an invertible series psi (rational coefficients alpha_k for
/// t^k, k >= 2): the target law G = psi^{-1}(F(psi(x), psi(y))) makes psi a
/// valid morphism F -> G by construction.
OrientationMorphism morphism_conjugate(const FormalGroupLaw& F,
                                       const std::vector<Rational>& alphas);

}  // namespace fglchern
