#include "fglchern/rr.hpp"

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fglchern/error.hpp"

namespace fglchern {

namespace {

bool law_equal(const FormalGroupLaw& a, const FormalGroupLaw& b) {
  if (a.coeff_ring != b.coeff_ring || a.kind != b.kind) return false;
  if (a.table.size() != b.table.size()) return false;
  for (const auto& [ij, val] : a.table) {
    auto it = b.table.find(ij);
    if (it == b.table.end() || !(it->second == val)) return false;
  }
  return true;
}

std::string fresh_name(const GradedRing& ring, std::string stem) {
  const auto taken = [&ring](const std::string& name) {
    for (const auto& g : ring.gens())
      if (g.name == name) return true;
    return false;
  };
  while (taken(stem)) stem += "_";
  return stem;
}

void require_nilpotent(const RingElement& root, const char* what) {
  if (!root.valid()) throw Error(std::string(what) + ": element required");
  for (const auto& [mon, coeff] : root.terms()) {
    (void)coeff;
    if (root.ring()->weighted_degree(mon) <= 0) {
      throw Error(std::string(what) + ": root must be nilpotent (positively graded)",
                  root.render());
    }
  }
}

/// Index of the single generator the element consists of; the theory tag of
/// a root is attached to generators, so compound roots cannot be tagged.
std::size_t generator_index_of(const RingElement& root) {
  if (root.valid() && root.terms().size() == 1) {
    const auto& [mon, coeff] = *root.terms().begin();
    if (coeff == Rational(1)) {
      std::size_t idx = 0, hits = 0;
      unsigned total = 0;
      for (std::size_t i = 0; i < mon.size(); ++i) {
        if (mon[i] > 0) {
          idx = i;
          ++hits;
          total += mon[i];
        }
      }
      if (hits == 1 && total == 1) return idx;
    }
  }
  throw Error("transform: roots must be single generators",
              root.valid() ? root.render() : std::string("(null)"));
}

std::vector<RingElement> lifted_all(const std::vector<RingElement>& roots,
                                    const RingPtr& target) {
  std::vector<RingElement> out;
  out.reserve(roots.size());
  for (const auto& r : roots) out.push_back(r.lifted(target));
  return out;
}

}  // namespace

ToddTransformation todd_new(OrientationMorphism m) {
  PowerSeries td = m.psi.shifted_down(1).reciprocal();
  return ToddTransformation{std::move(m), std::move(td)};
}

RingElement todd_line(const ToddTransformation& T, const RingElement& root) {
  require_nilpotent(root, "todd class");
  return T.todd_series.evaluate(root);
}

RingElement todd_virtual(const ToddTransformation& T, const VirtualBundle& v) {
  RingElement out = RingElement::one(v.ring);
  for (const auto& r : v.plus) out *= todd_line(T, r);
  for (const auto& r : v.minus) out *= todd_line(T, r).reciprocal();
  return out;
}

CheckResult todd_chern_relation_check(const ToddTransformation& T,
                                      const RingElement& root) {
  require_nilpotent(root, "todd class");
  const RingElement lhs = T.morphism.psi.evaluate(root);
  const VirtualBundle minus_line = bundle_new(root.ring(), {}, {root});
  const RingElement rhs = todd_virtual(T, minus_line) * root;
  RingElement diff = lhs - rhs;
  if (diff.is_zero()) return {true, ""};
  return {false, diff.render()};
}

RingElement grothendieck_transform(const ToddTransformation& T, const RingElement& u,
                                   const std::vector<std::size_t>& source_roots) {
  if (!u.valid()) throw Error("transform: element required");
  const RingPtr& ring = u.ring();
  const auto& gens = ring->gens();
  std::set<std::size_t> tags(source_roots.begin(), source_roots.end());
  for (std::size_t idx : tags) {
    if (idx >= gens.size())
      throw Error("transform: tag index out of range", std::to_string(idx));
    if (gens[idx].degree <= 0)
      throw Error("transform: tagged generator must have positive degree",
                  gens[idx].name);
  }
  for (const auto& [mon, coeff] : u.terms()) {
    (void)coeff;
    for (std::size_t i = 0; i < mon.size(); ++i) {
      if (mon[i] > 0 && gens[i].degree > 0 && tags.count(i) == 0)
        throw Error("transform: untagged positive-degree generator", gens[i].name);
    }
  }
  SubstMap images;
  for (std::size_t idx : tags)
    images[idx] = T.morphism.psi.evaluate(RingElement::generator(ring, idx));
  return u.substitute(images);
}

RingElement grothendieck_transform(const ToddTransformation& T, const RingElement& u) {
  if (!u.valid()) throw Error("transform: element required");
  std::vector<std::size_t> tags;
  const auto& gens = u.ring()->gens();
  for (std::size_t i = 0; i < gens.size(); ++i)
    if (gens[i].degree > 0) tags.push_back(i);
  return grothendieck_transform(T, u, tags);
}

CheckResult grr_check(const ToddTransformation& T, const Scenario& s) {
  if (!law_equal(s.fgl, T.morphism.source))
    throw Error("riemann-roch: the scenario must use the morphism's source law");

  if (s.kind == Scenario::Kind::ZeroSection) {
    const VirtualBundle& v = *s.bundle;
    std::vector<std::size_t> tags;
    tags.reserve(v.plus.size() + 1);
    for (const auto& r : v.plus) tags.push_back(generator_index_of(r));
    const ThomData th = thom_class(v.ring, v);
    tags.push_back(th.completion.c_index);
    const RingElement lhs =
        th.completion.reduce(grothendieck_transform(T, th.cls, tags));
    const VirtualBundle minus_n =
        bundle_new(th.completion.total, {}, lifted_all(v.plus, th.completion.total));
    const RingElement rhs = th.completion.reduce(todd_virtual(T, minus_n) * th.cls);
    RingElement diff = lhs - rhs;
    if (diff.is_zero()) return {true, ""};
    return {false, diff.render()};
  }

  if (s.kind == Scenario::Kind::P1Projection) {
    if (!s.twist.is_zero())
      throw Error("riemann-roch: the projective-line comparison is untwisted");
    const FormalGroupLaw& F = T.morphism.source;
    const FormalGroupLaw& G = T.morphism.target;
    const ProjectiveBundle space =
        projective_space(s.base, 1, fresh_name(*s.base, "c"));
    const RingElement x = space.c();
    const VirtualBundle tau =
        bundle_new(space.total, {x, x}, {RingElement::zero(space.total)});
    const RingElement td_tau = todd_virtual(T, tau);
    const std::vector<std::size_t> no_tags;
    for (const RingElement& u : {RingElement::one(space.total), x}) {
      const RingElement lhs =
          grothendieck_transform(T, pushforward_p1(F, space, u), no_tags);
      const RingElement phi_u = grothendieck_transform(T, u, {space.c_index});
      const RingElement rhs = pushforward_p1(G, space, td_tau * phi_u);
      RingElement diff = lhs - rhs;
      if (!diff.is_zero())
        return {false, "basis " + u.render() + ": " + diff.render()};
    }
    return {true, ""};
  }

  throw Error("riemann-roch: unsupported scenario kind");
}

CheckResult todd_cocycle_check(const OrientationMorphism& first,
                               const OrientationMorphism& second) {
  const ToddTransformation t_first = todd_new(first);
  const ToddTransformation t_second = todd_new(second);
  const ToddTransformation t_comp = todd_new(morphism_compose(first, second));

  const PowerSeries rhs_series =
      t_second.todd_series * t_first.todd_series.compose(second.psi);
  const std::size_t cap = t_comp.todd_series.length() - 1;
  for (std::size_t k = 0; k < cap; ++k) {
    RingElement diff = t_comp.todd_series[k] - rhs_series[k];
    if (!diff.is_zero())
      return {false, "slot " + std::to_string(k) + ": " + diff.render()};
  }

  const RingPtr& coeff = first.source.coeff_ring;
  const std::string name = fresh_name(*coeff, "t");
  const RingPtr scratch =
      GradedRing::extend(coeff, {{name, 1, static_cast<int>(cap)}});
  const RingElement x = RingElement::generator(scratch, name);
  const RingElement lhs = todd_line(t_comp, x);
  const RingElement rhs = todd_line(t_second, x) *
                          grothendieck_transform(t_second, todd_line(t_first, x));
  RingElement diff = lhs - rhs;
  if (diff.is_zero()) return {true, ""};
  return {false, "element: " + diff.render()};
}

}  // namespace fglchern
