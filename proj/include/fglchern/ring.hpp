#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fglchern/rational.hpp"

namespace fglchern {

/// One polynomial generator. `degree` is a nonzero integer weight; positive
/// degrees count against the ring's global cap, negative degrees never do.
/// `nilpotency` k (k >= 2) means the k-th power vanishes; 0 means unbounded.
struct Generator {
  std::string name;
  int degree = 1;
  int nilpotency = 0;
};

/// Exponent vector aligned with the owning ring's generator list.
using Monomial = std::vector<std::uint16_t>;

struct RingOptions {
  int degree_cap = 6;
  bool integer_only = false;   // reject non-integer scalars
  bool strict_degree = false;  // substitution images must match degrees
};

class GradedRing;
class RingElement;
using RingPtr = std::shared_ptr<const GradedRing>;

/// Sparse terms keyed by exponent vector (plain lexicographic key order;
/// display order is computed at render time).
using TermMap = std::map<Monomial, Rational>;

/// Rewrite table for a quotient by homogeneous relations supported on a fixed
/// prefix of negative-degree generators. Each degree slice is solved once by
/// row reduction over the rationals and cached; reduction of an element is a
/// single pass of pivot lookups, so normal forms are canonical.
class QuotientTable {
 public:
  /// `support` lists generator indices (a prefix-stable set) the relations
  /// live on; `weights` gives -degree per support generator (all positive).
  /// Relations are term maps over full-ring monomials whose exponents vanish
  /// outside the support; each must be homogeneous.
  QuotientTable(std::vector<std::size_t> support, std::vector<int> weights,
                const std::vector<TermMap>& relations);

  /// Rewrites every reducible term of `terms` (monomials sized for `width`
  /// generators) into normal form. Thread-safe.
  void reduce(TermMap& terms, std::size_t width) const;

  std::size_t relation_count() const { return relations_.size(); }

  /// Dimension of the quotient's slice in weighted degree -w.
  std::size_t slice_dimension(int w) const;

 private:
  struct Slice {
    std::vector<Monomial> basis;  // projected monomials, weight w
    // pivot monomial -> normal-form expansion over non-pivot monomials
    std::map<Monomial, std::vector<std::pair<Monomial, Rational>>> pivots;
  };

  const Slice& slice(int w) const;
  std::vector<Monomial> enumerate(int w) const;

  std::vector<std::size_t> support_;
  std::vector<int> weights_;
  std::vector<TermMap> relations_;  // projected to support width
  std::vector<int> relation_weights_;
  mutable std::mutex mu_;
  mutable std::map<int, Slice> slices_;
};

/// Graded-commutative polynomial ring, truncated by per-generator nilpotency
/// and a global cap on the total degree contributed by positive-degree
/// generators. Immutable once created; elements share the ring by pointer,
/// and mixing elements of different ring objects is an error.
class GradedRing : public std::enable_shared_from_this<GradedRing> {
 public:
  static RingPtr create(std::vector<Generator> gens, RingOptions opts = {},
                        std::shared_ptr<const QuotientTable> quotient = nullptr);

  /// New ring with `extra` generators appended. Options and quotient table
  /// are inherited; the original generators keep their indices, so elements
  /// of `base` lift by zero-padding exponents.
  static RingPtr extend(const RingPtr& base, std::vector<Generator> extra);

  std::size_t size() const { return gens_.size(); }
  const Generator& gen(std::size_t i) const { return gens_[i]; }
  const std::vector<Generator>& gens() const { return gens_; }
  std::optional<std::size_t> find(const std::string& name) const;
  /// find() that throws "unknown generator" instead of returning nullopt.
  std::size_t index_of(const std::string& name) const;

  int degree_cap() const { return opts_.degree_cap; }
  bool integer_only() const { return opts_.integer_only; }
  bool strict_degree() const { return opts_.strict_degree; }
  const std::shared_ptr<const QuotientTable>& quotient() const { return quotient_; }

  long weighted_degree(const Monomial& m) const;
  /// Degree counting only positive-degree generators (what the cap bounds).
  long positive_degree(const Monomial& m) const;
  /// True when the monomial dies under a nilpotency bound or the cap.
  bool truncates(const Monomial& m) const;

  /// True when this ring's generator list is a prefix of `bigger`'s and the
  /// options and quotient table coincide.
  bool is_prefix_of(const GradedRing& bigger) const;

  /// Drops zero coefficients, truncated monomials, and applies the quotient
  /// table. All element constructors and arithmetic funnel through here.
  void normalize(TermMap& terms) const;

 private:
  GradedRing(std::vector<Generator> gens, RingOptions opts,
             std::shared_ptr<const QuotientTable> quotient);

  std::vector<Generator> gens_;
  RingOptions opts_;
  std::shared_ptr<const QuotientTable> quotient_;
  std::unordered_map<std::string, std::size_t> by_name_;
};

/// Substitution images: source generator index -> element of the target ring.
using SubstMap = std::map<std::size_t, RingElement>;

class RingElement {
 public:
  RingElement() = default;  // null element; any operation throws

  static RingElement zero(RingPtr ring);
  static RingElement one(RingPtr ring);
  static RingElement constant(RingPtr ring, const Rational& c);
  static RingElement generator(RingPtr ring, std::size_t index);
  static RingElement generator(RingPtr ring, const std::string& name);
  /// Builds from raw terms (normalizing). Monomials must match the ring width.
  static RingElement from_terms(RingPtr ring, TermMap terms);

  bool valid() const { return ring_ != nullptr; }
  const RingPtr& ring() const;
  const TermMap& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Coefficient of the trivial monomial (0 when absent).
  Rational constant_term() const;
  /// Coefficient of an arbitrary monomial (0 when absent).
  Rational coefficient(const Monomial& m) const;

  RingElement operator-() const;
  RingElement& operator+=(const RingElement& rhs);
  RingElement& operator-=(const RingElement& rhs);
  RingElement& operator*=(const RingElement& rhs);
  friend RingElement operator+(RingElement a, const RingElement& b) { return a += b; }
  friend RingElement operator-(RingElement a, const RingElement& b) { return a -= b; }
  RingElement scaled(const Rational& c) const;
  RingElement pow(unsigned e) const;

  friend RingElement operator*(const RingElement& a, const RingElement& b);
  friend bool operator==(const RingElement& a, const RingElement& b);
  friend bool operator!=(const RingElement& a, const RingElement& b) { return !(a == b); }

  /// Evaluation determined by generator images. Generators absent from
  /// `images` map to the target's generator of the same name. With
  /// strict_degree on the target, every image must be homogeneous of the
  /// source generator's degree. This is a homomorphism of truncated rings
  /// only when images respect the filtration (each image monomial at least
  /// as heavy as the generator it replaces, zero images always allowed) and
  /// satisfy the source's nilpotency relations; callers pick such images.
  RingElement substitute(const SubstMap& images, const RingPtr& target) const;
  /// Same-ring convenience overload.
  RingElement substitute(const SubstMap& images) const;

  /// Reinterprets the element in an extension ring (this ring must be a
  /// prefix of `bigger`).
  RingElement lifted(const RingPtr& bigger) const;
  /// Inverse of lifted(): requires zero exponents outside the prefix and
  /// re-truncates to the smaller ring's cap.
  RingElement shrunk(const RingPtr& smaller) const;

  /// Multiplicative inverse of a unit whose non-constant monomials all carry
  /// at least one positive-degree generator (so the Neumann series stops).
  RingElement reciprocal() const;

  /// Sum of terms of exact weighted degree d.
  RingElement homogeneous_part(long d) const;
  bool is_homogeneous(long d) const;
  /// Largest exponent of generator `idx` across terms (0 for zero element).
  unsigned max_exponent(std::size_t idx) const;
  /// Writes the element as sum_e coeff[e] * gen^e; returned map's elements
  /// carry exponent 0 on `idx`.
  std::map<unsigned, RingElement> decompose_by(std::size_t idx) const;

  /// Canonical text: terms ascend by (weighted degree, reverse-lex exponent
  /// vector); "p/q" scalars; unit coefficients omitted; e.g.
  /// "1 + 1/2*c1 + 1/12*c1^2". Zero renders "0".
  std::string render() const;

 private:
  RingElement(RingPtr ring, TermMap terms)
      : ring_(std::move(ring)), terms_(std::move(terms)) {}
  static void require_same_ring(const RingElement& a, const RingElement& b);
  void require_valid() const;

  RingPtr ring_;
  TermMap terms_;  // normalized: no zero coeffs, no truncated monomials
};

/// Convenience: generator element by name, throwing on unknown names.
RingElement gen_elem(const RingPtr& ring, const std::string& name);

}  // namespace fglchern
