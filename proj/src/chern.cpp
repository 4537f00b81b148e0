#include "fglchern/chern.hpp"

#include <algorithm>
#include <utility>

#include "fglchern/error.hpp"

namespace fglchern {

namespace {

void require_root(const RingPtr& ring, const RingElement& root) {
  if (!root.valid() || root.ring() != ring) {
    throw Error("bundle root does not live in the bundle's ring");
  }
  if (!root.is_homogeneous(1)) {
    throw Error("bundle root must be homogeneous of degree 1",
                root.render());
  }
}

std::string fresh_name(const RingPtr& ring, std::string hint) {
  while (ring->find(hint)) hint += "_";
  return hint;
}

std::vector<std::string> sorted_renders(const std::vector<RingElement>& roots) {
  std::vector<std::string> keys;
  keys.reserve(roots.size());
  for (const auto& r : roots) keys.push_back(r.render());
  std::sort(keys.begin(), keys.end());
  return keys;
}

std::string join(const std::vector<RingElement>& roots) {
  std::string out;
  for (std::size_t k = 0; k < roots.size(); ++k) {
    if (k) out += ", ";
    out += roots[k].render();
  }
  return out;
}

}  // namespace

VirtualBundle bundle_new(RingPtr ring, std::vector<RingElement> plus,
                         std::vector<RingElement> minus) {
  if (!ring) throw Error("bundle requires a ring");
  for (const auto& r : plus) require_root(ring, r);
  for (const auto& r : minus) require_root(ring, r);
  return VirtualBundle{std::move(ring), std::move(plus), std::move(minus)};
}

VirtualBundle bundle_sum(const VirtualBundle& a, const VirtualBundle& b) {
  if (a.ring != b.ring) throw Error("bundle sum across different rings");
  VirtualBundle out = a;
  out.plus.insert(out.plus.end(), b.plus.begin(), b.plus.end());
  out.minus.insert(out.minus.end(), b.minus.begin(), b.minus.end());
  return out;
}

VirtualBundle bundle_negate(const VirtualBundle& a) {
  return VirtualBundle{a.ring, a.minus, a.plus};
}

VirtualBundle bundle_cancel(const VirtualBundle& a) {
  VirtualBundle out{a.ring, a.plus, {}};
  for (const auto& w : a.minus) {
    auto hit = std::find(out.plus.begin(), out.plus.end(), w);
    if (hit != out.plus.end()) {
      out.plus.erase(hit);
    } else {
      out.minus.push_back(w);
    }
  }
  return out;
}

VirtualBundle bundle_lift(const VirtualBundle& a, const RingPtr& bigger) {
  VirtualBundle out{bigger, {}, {}};
  out.plus.reserve(a.plus.size());
  out.minus.reserve(a.minus.size());
  for (const auto& r : a.plus) out.plus.push_back(r.lifted(bigger));
  for (const auto& r : a.minus) out.minus.push_back(r.lifted(bigger));
  return out;
}

ChernSeries total_chern(const VirtualBundle& v) {
  const RingElement one = RingElement::one(v.ring);
  PowerSeries s = PowerSeries::from_coeffs(v.ring, {one});
  for (const auto& x : v.plus) {
    s = s * PowerSeries::from_coeffs(v.ring, {one, x});
  }
  for (const auto& w : v.minus) {
    s = s * PowerSeries::from_coeffs(v.ring, {one, w}).reciprocal();
  }
  return s;
}

RingElement chern_class(const VirtualBundle& v, int i) {
  if (i < 0) throw Error("Chern classes are indexed from 0");
  const auto s = total_chern(v);
  if (static_cast<std::size_t>(i) >= s.length()) return RingElement::zero(v.ring);
  return s[static_cast<std::size_t>(i)];
}

RingElement euler_class(const VirtualBundle& v) {
  if (!v.effective()) {
    throw Error("Euler class requires an effective bundle",
                "negative roots: " + join(v.minus));
  }
  RingElement e = RingElement::one(v.ring);
  for (const auto& x : v.plus) e *= x;
  return e;
}

RingElement c1_tensor(const FormalGroupLaw& F, const RingElement& a,
                      const RingElement& b) {
  return formal_sum(F, a, b);
}

RingElement c1_dual(const FormalGroupLaw& F, const RingElement& a) {
  return formal_inverse(F, a);
}

RingElement ProjectiveBundle::reduce(RingElement u) const {
  if (!u.valid() || u.ring() != total) {
    throw Error("element does not live in this projectivization's ring");
  }
  const unsigned r = static_cast<unsigned>(rank);
  const RingElement c_elem = c();
  while (true) {
    auto parts = u.decompose_by(c_index);
    if (parts.empty()) return u;
    const auto top = parts.rbegin();
    const unsigned e = top->first;
    if (e < r) return u;
    u -= top->second * c_elem.pow(e);
    u += top->second * c_elem.pow(e - r) * rewrite;
  }
}

ProjectiveBundle projective_bundle(const RingPtr& base, const VirtualBundle& v,
                                   const std::string& name) {
  if (v.ring != base) throw Error("bundle must live over the base ring");
  if (!v.effective() || v.plus.empty()) {
    throw Error("projectivization requires an effective bundle of rank >= 1");
  }
  const int r = v.rank();
  const bool trivial = std::all_of(v.plus.begin(), v.plus.end(),
                                   [](const RingElement& x) { return x.is_zero(); });

  ProjectiveBundle pb;
  pb.base = base;
  pb.rank = r;
  pb.c_index = base->size();
  Generator g;
  g.name = fresh_name(base, name);
  g.degree = 1;
  g.nilpotency = trivial ? r : 0;
  pb.total = GradedRing::extend(base, {g});
  pb.fibers = bundle_lift(v, pb.total);

  pb.rewrite = RingElement::zero(pb.total);
  if (!trivial) {
    const auto cs = total_chern(v);
    const RingElement c_elem =
        RingElement::generator(pb.total, pb.c_index);
    for (int i = 1; i <= r; ++i) {
      if (static_cast<std::size_t>(i) >= cs.length()) break;  // cap kills c_i
      const Rational sign = (i % 2 == 1) ? rational(1) : rational(-1);
      pb.rewrite += cs[static_cast<std::size_t>(i)].lifted(pb.total).scaled(sign) *
                    c_elem.pow(static_cast<unsigned>(r - i));
    }
  }
  return pb;
}

ProjectiveBundle projective_space(const RingPtr& base, int n,
                                  const std::string& name) {
  if (n < 0) throw Error("projective space needs a non-negative dimension");
  const std::vector<RingElement> roots(static_cast<std::size_t>(n) + 1,
                                       RingElement::zero(base));
  return projective_bundle(base, bundle_new(base, roots), name);
}

RingElement transport_hyperplane(const RingElement& u, const ProjectiveBundle& from,
                                 const ProjectiveBundle& to) {
  if (!u.valid() || u.ring() != from.total) {
    throw Error("element does not live in the source projectivization");
  }
  if (from.base != to.base) {
    throw Error("hyperplane transport requires a shared base ring");
  }
  SubstMap images;
  images.emplace(from.c_index, to.c());
  return to.reduce(u.substitute(images, to.total));
}

ThomData thom_class(const RingPtr& base, const VirtualBundle& v,
                    const std::string& name) {
  if (!v.effective()) {
    throw Error("Thom classes are built for effective bundles",
                "negative roots: " + join(v.minus));
  }
  const VirtualBundle completed =
      bundle_sum(v, bundle_new(base, {RingElement::zero(base)}));
  ThomData out;
  out.completion = projective_bundle(base, completed, name);
  RingElement cls = RingElement::one(out.completion.total);
  const RingElement c_elem = out.completion.c();
  for (const auto& x : v.plus) {
    cls *= x.lifted(out.completion.total) - c_elem;
  }
  out.cls = out.completion.reduce(cls);
  return out;
}

ThomModuleElement thom_unit(const RingPtr& ring) {
  return ThomModuleElement{VirtualBundle{ring, {}, {}}, RingElement::one(ring)};
}

ThomModuleElement thom_element(VirtualBundle v, RingElement coeff) {
  if (!coeff.valid() || coeff.ring() != v.ring) {
    throw Error("Thom module coefficient must live in the bundle's ring");
  }
  return ThomModuleElement{bundle_cancel(v), std::move(coeff)};
}

ThomModuleElement thom_mul(const ThomModuleElement& a, const ThomModuleElement& b) {
  return thom_element(bundle_sum(a.bundle, b.bundle), a.coeff * b.coeff);
}

bool thom_equal(const ThomModuleElement& a, const ThomModuleElement& b) {
  if (a.coeff != b.coeff) return false;
  if (a.coeff.is_zero()) return true;
  const auto ca = bundle_cancel(a.bundle);
  const auto cb = bundle_cancel(b.bundle);
  return sorted_renders(ca.plus) == sorted_renders(cb.plus) &&
         sorted_renders(ca.minus) == sorted_renders(cb.minus);
}

std::string thom_render(const ThomModuleElement& a) {
  const auto c = bundle_cancel(a.bundle);
  if (c.plus.empty() && c.minus.empty()) return a.coeff.render();
  std::string out = "(" + a.coeff.render() + ")*t{" + join(c.plus);
  if (!c.minus.empty()) out += " ; " + join(c.minus);
  out += "}";
  return out;
}

}  // namespace fglchern
