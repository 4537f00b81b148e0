#include "fglchern/ring.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "fglchern/error.hpp"

namespace fglchern {

namespace {

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char ch : s) {
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_') return false;
  }
  return true;
}

Monomial add_monomials(const Monomial& a, const Monomial& b) {
  Monomial out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    unsigned sum = static_cast<unsigned>(a[i]) + static_cast<unsigned>(b[i]);
    if (sum > 60000) throw Error("exponent overflow");
    out[i] = static_cast<std::uint16_t>(sum);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// QuotientTable

QuotientTable::QuotientTable(std::vector<std::size_t> support,
                             std::vector<int> weights,
                             const std::vector<TermMap>& relations)
    : support_(std::move(support)), weights_(std::move(weights)) {
  if (support_.size() != weights_.size())
    throw Error("quotient table: support/weight size mismatch");
  for (int w : weights_) {
    if (w <= 0) throw Error("quotient table: weights must be positive");
  }
  for (const TermMap& rel : relations) {
    TermMap projected;
    int weight = -1;
    for (const auto& [mon, coeff] : rel) {
      if (coeff == 0) continue;
      Monomial p(support_.size(), 0);
      for (std::size_t s = 0; s < support_.size(); ++s) p[s] = mon[support_[s]];
      // Exponents outside the support must vanish.
      std::uint32_t total = 0, captured = 0;
      for (std::uint16_t e : mon) total += e;
      for (std::uint16_t e : p) captured += e;
      if (total != captured)
        throw Error("quotient table: relation supported outside designated generators");
      int w = 0;
      for (std::size_t s = 0; s < support_.size(); ++s) w += p[s] * weights_[s];
      if (weight < 0) weight = w;
      if (w != weight) throw Error("quotient table: relation not homogeneous");
      projected[std::move(p)] += coeff;
    }
    for (auto it = projected.begin(); it != projected.end();)
      it = (it->second == 0) ? projected.erase(it) : std::next(it);
    if (projected.empty()) continue;
    relations_.push_back(std::move(projected));
    relation_weights_.push_back(weight);
  }
}

std::vector<Monomial> QuotientTable::enumerate(int w) const {
  std::vector<Monomial> out;
  Monomial cur(support_.size(), 0);
  // Depth-first over exponents, heaviest-index last; results sorted afterwards.
  auto rec = [&](auto&& self, std::size_t s, int rest) -> void {
    if (s + 1 == support_.size()) {
      if (rest % weights_[s] == 0) {
        cur[s] = static_cast<std::uint16_t>(rest / weights_[s]);
        out.push_back(cur);
        cur[s] = 0;
      }
      return;
    }
    for (int e = 0; e * weights_[s] <= rest; ++e) {
      cur[s] = static_cast<std::uint16_t>(e);
      self(self, s + 1, rest - e * weights_[s]);
    }
    cur[s] = 0;
  };
  if (!support_.empty()) rec(rec, 0, w);
  std::sort(out.begin(), out.end());
  return out;
}

const QuotientTable::Slice& QuotientTable::slice(int w) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = slices_.find(w);
  if (it != slices_.end()) return it->second;

  Slice s;
  s.basis = enumerate(w);
  std::map<Monomial, std::size_t> col;
  for (std::size_t i = 0; i < s.basis.size(); ++i) col[s.basis[i]] = i;

  // Span of the relation slice: every relation shifted into weight w.
  std::vector<std::vector<Rational>> rows;
  for (std::size_t ri = 0; ri < relations_.size(); ++ri) {
    int g = relation_weights_[ri];
    if (g > w) continue;
    for (const Monomial& mu : enumerate(w - g)) {
      std::vector<Rational> row(s.basis.size(), Rational(0));
      for (const auto& [mon, coeff] : relations_[ri]) {
        Monomial shifted(mon.size());
        for (std::size_t k = 0; k < mon.size(); ++k)
          shifted[k] = static_cast<std::uint16_t>(mon[k] + mu[k]);
        row[col.at(shifted)] += coeff;
      }
      rows.push_back(std::move(row));
    }
  }

  // Reduced row echelon form; pivot columns then read off as rewrite rules.
  std::size_t rank = 0;
  for (std::size_t c = 0; c < s.basis.size() && rank < rows.size(); ++c) {
    std::size_t sel = rank;
    while (sel < rows.size() && rows[sel][c] == 0) ++sel;
    if (sel == rows.size()) continue;
    std::swap(rows[rank], rows[sel]);
    Rational inv = Rational(1) / rows[rank][c];
    for (auto& v : rows[rank]) v *= inv;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || rows[r][c] == 0) continue;
      Rational f = rows[r][c];
      for (std::size_t k = c; k < s.basis.size(); ++k) rows[r][k] -= f * rows[rank][k];
    }
    ++rank;
  }
  for (std::size_t r = 0; r < rank; ++r) {
    std::size_t lead = 0;
    while (lead < s.basis.size() && rows[r][lead] == 0) ++lead;
    if (lead == s.basis.size()) continue;
    std::vector<std::pair<Monomial, Rational>> expansion;
    for (std::size_t k = lead + 1; k < s.basis.size(); ++k) {
      if (rows[r][k] != 0) expansion.emplace_back(s.basis[k], -rows[r][k]);
    }
    s.pivots[s.basis[lead]] = std::move(expansion);
  }

  return slices_.emplace(w, std::move(s)).first->second;
}

std::size_t QuotientTable::slice_dimension(int w) const {
  const Slice& s = slice(w);
  return s.basis.size() - s.pivots.size();
}

void QuotientTable::reduce(TermMap& terms, std::size_t width) const {
  // Cheap pre-pass: rebuild the map only when some term actually rewrites.
  bool reducible = false;
  for (const auto& [mon, coeff] : terms) {
    (void)coeff;
    Monomial p(support_.size(), 0);
    int w = 0;
    for (std::size_t s = 0; s < support_.size(); ++s) {
      p[s] = mon[support_[s]];
      w += p[s] * weights_[s];
    }
    if (w > 0 && slice(w).pivots.count(p) != 0) {
      reducible = true;
      break;
    }
  }
  if (!reducible) return;

  TermMap out;
  for (const auto& [mon, coeff] : terms) {
    Monomial p(support_.size(), 0);
    int w = 0;
    for (std::size_t s = 0; s < support_.size(); ++s) {
      p[s] = mon[support_[s]];
      w += p[s] * weights_[s];
    }
    if (w == 0) {
      out[mon] += coeff;
      continue;
    }
    const Slice& sl = slice(w);
    auto pv = sl.pivots.find(p);
    if (pv == sl.pivots.end()) {
      out[mon] += coeff;
      continue;
    }
    for (const auto& [q, c] : pv->second) {
      Monomial full = mon;
      for (std::size_t s = 0; s < support_.size(); ++s) full[support_[s]] = q[s];
      out[std::move(full)] += coeff * c;
    }
  }
  for (auto it = out.begin(); it != out.end();)
    it = (it->second == 0) ? out.erase(it) : std::next(it);
  terms = std::move(out);
  (void)width;
}

// ---------------------------------------------------------------------------
// GradedRing

GradedRing::GradedRing(std::vector<Generator> gens, RingOptions opts,
                       std::shared_ptr<const QuotientTable> quotient)
    : gens_(std::move(gens)), opts_(opts), quotient_(std::move(quotient)) {
  for (std::size_t i = 0; i < gens_.size(); ++i) by_name_[gens_[i].name] = i;
}

RingPtr GradedRing::create(std::vector<Generator> gens, RingOptions opts,
                           std::shared_ptr<const QuotientTable> quotient) {
  if (opts.degree_cap < 0) throw Error("ring: negative degree cap");
  std::unordered_map<std::string, std::size_t> seen;
  for (const Generator& g : gens) {
    if (!valid_name(g.name)) throw Error("ring: invalid generator name", g.name);
    if (g.degree == 0) throw Error("ring: generator degree must be nonzero", g.name);
    if (g.nilpotency == 1 || g.nilpotency < 0)
      throw Error("ring: nilpotency must be 0 (none) or at least 2", g.name);
    if (!seen.emplace(g.name, 0).second)
      throw Error("ring: duplicate generator name", g.name);
  }
  return RingPtr(new GradedRing(std::move(gens), opts, std::move(quotient)));
}

RingPtr GradedRing::extend(const RingPtr& base, std::vector<Generator> extra) {
  if (!base) throw Error("ring: extend of null ring");
  std::vector<Generator> gens = base->gens_;
  for (Generator& g : extra) gens.push_back(std::move(g));
  return create(std::move(gens), base->opts_, base->quotient_);
}

std::optional<std::size_t> GradedRing::find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::size_t GradedRing::index_of(const std::string& name) const {
  auto idx = find(name);
  if (!idx) throw Error("unknown generator", name);
  return *idx;
}

long GradedRing::weighted_degree(const Monomial& m) const {
  long d = 0;
  for (std::size_t i = 0; i < gens_.size(); ++i) d += static_cast<long>(m[i]) * gens_[i].degree;
  return d;
}

long GradedRing::positive_degree(const Monomial& m) const {
  long d = 0;
  for (std::size_t i = 0; i < gens_.size(); ++i) {
    if (gens_[i].degree > 0) d += static_cast<long>(m[i]) * gens_[i].degree;
  }
  return d;
}

bool GradedRing::truncates(const Monomial& m) const {
  long pos = 0;
  for (std::size_t i = 0; i < gens_.size(); ++i) {
    if (m[i] == 0) continue;
    const Generator& g = gens_[i];
    if (g.nilpotency != 0 && m[i] >= g.nilpotency) return true;
    if (g.degree > 0) pos += static_cast<long>(m[i]) * g.degree;
  }
  return pos > opts_.degree_cap;
}

bool GradedRing::is_prefix_of(const GradedRing& bigger) const {
  if (gens_.size() > bigger.gens_.size()) return false;
  for (std::size_t i = 0; i < gens_.size(); ++i) {
    const Generator& a = gens_[i];
    const Generator& b = bigger.gens_[i];
    if (a.name != b.name || a.degree != b.degree || a.nilpotency != b.nilpotency)
      return false;
  }
  return opts_.integer_only == bigger.opts_.integer_only &&
         opts_.strict_degree == bigger.opts_.strict_degree &&
         quotient_ == bigger.quotient_;
}

void GradedRing::normalize(TermMap& terms) const {
  for (auto it = terms.begin(); it != terms.end();) {
    if (it->first.size() != gens_.size()) throw Error("ring: monomial width mismatch");
    if (it->second == 0 || truncates(it->first)) {
      it = terms.erase(it);
    } else {
      ++it;
    }
  }
  if (opts_.integer_only) {
    for (const auto& [mon, coeff] : terms) {
      (void)mon;
      if (!is_integer(coeff))
        throw Error("ring: non-integer coefficient in integer ring", to_string(coeff));
    }
  }
  if (quotient_) {
    quotient_->reduce(terms, gens_.size());
  }
}

// ---------------------------------------------------------------------------
// RingElement

RingElement RingElement::zero(RingPtr ring) {
  if (!ring) throw Error("null ring");
  return RingElement(std::move(ring), {});
}

RingElement RingElement::one(RingPtr ring) { return constant(std::move(ring), Rational(1)); }

RingElement RingElement::constant(RingPtr ring, const Rational& c) {
  if (!ring) throw Error("null ring");
  TermMap t;
  if (c != 0) t[Monomial(ring->size(), 0)] = c;
  ring->normalize(t);
  return RingElement(std::move(ring), std::move(t));
}

RingElement RingElement::generator(RingPtr ring, std::size_t index) {
  if (!ring) throw Error("null ring");
  if (index >= ring->size()) throw Error("unknown generator index");
  TermMap t;
  Monomial m(ring->size(), 0);
  m[index] = 1;
  t[std::move(m)] = Rational(1);
  ring->normalize(t);
  return RingElement(std::move(ring), std::move(t));
}

RingElement RingElement::generator(RingPtr ring, const std::string& name) {
  if (!ring) throw Error("null ring");
  return generator(ring, ring->index_of(name));
}

RingElement RingElement::from_terms(RingPtr ring, TermMap terms) {
  if (!ring) throw Error("null ring");
  ring->normalize(terms);
  return RingElement(std::move(ring), std::move(terms));
}

const RingPtr& RingElement::ring() const {
  require_valid();
  return ring_;
}

void RingElement::require_valid() const {
  if (!ring_) throw Error("operation on null element");
}

void RingElement::require_same_ring(const RingElement& a, const RingElement& b) {
  a.require_valid();
  b.require_valid();
  if (a.ring_ != b.ring_) throw Error("ring mismatch");
}

bool RingElement::is_constant() const {
  require_valid();
  if (terms_.empty()) return true;
  if (terms_.size() > 1) return false;
  const Monomial& m = terms_.begin()->first;
  return std::all_of(m.begin(), m.end(), [](std::uint16_t e) { return e == 0; });
}

Rational RingElement::constant_term() const {
  require_valid();
  return coefficient(Monomial(ring_->size(), 0));
}

Rational RingElement::coefficient(const Monomial& m) const {
  require_valid();
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

RingElement RingElement::operator-() const {
  require_valid();
  TermMap t = terms_;
  for (auto& [mon, coeff] : t) coeff = -coeff;
  return RingElement(ring_, std::move(t));
}

// Sums of normal forms stay in normal form (reducibility is a per-monomial
// property), so += and -= only merge coefficients.
RingElement& RingElement::operator+=(const RingElement& rhs) {
  require_same_ring(*this, rhs);
  for (const auto& [mon, coeff] : rhs.terms_) {
    auto [it, fresh] = terms_.emplace(mon, coeff);
    if (!fresh) {
      it->second += coeff;
      if (it->second == 0) terms_.erase(it);
    }
  }
  return *this;
}

RingElement& RingElement::operator-=(const RingElement& rhs) {
  require_same_ring(*this, rhs);
  for (const auto& [mon, coeff] : rhs.terms_) {
    auto [it, fresh] = terms_.emplace(mon, -coeff);
    if (!fresh) {
      it->second -= coeff;
      if (it->second == 0) terms_.erase(it);
    }
  }
  return *this;
}

RingElement operator*(const RingElement& a, const RingElement& b) {
  RingElement::require_same_ring(a, b);
  TermMap acc;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      Monomial m = add_monomials(ma, mb);
      if (a.ring_->truncates(m)) continue;
      auto [it, fresh] = acc.emplace(std::move(m), ca * cb);
      if (!fresh) it->second += ca * cb;
    }
  }
  a.ring_->normalize(acc);
  return RingElement(a.ring_, std::move(acc));
}

RingElement& RingElement::operator*=(const RingElement& rhs) {
  *this = *this * rhs;
  return *this;
}

RingElement RingElement::scaled(const Rational& c) const {
  require_valid();
  if (c == 0) return zero(ring_);
  TermMap t = terms_;
  for (auto& [mon, coeff] : t) coeff *= c;
  ring_->normalize(t);
  return RingElement(ring_, std::move(t));
}

RingElement RingElement::pow(unsigned e) const {
  require_valid();
  RingElement acc = one(ring_);
  RingElement base = *this;
  while (e > 0) {
    if (e & 1u) acc *= base;
    e >>= 1u;
    if (e > 0) base *= base;
  }
  return acc;
}

bool operator==(const RingElement& a, const RingElement& b) {
  RingElement::require_same_ring(a, b);
  return a.terms_ == b.terms_;
}

RingElement RingElement::substitute(const SubstMap& images) const {
  require_valid();
  return substitute(images, ring_);
}

RingElement RingElement::substitute(const SubstMap& images, const RingPtr& target) const {
  require_valid();
  if (!target) throw Error("null ring");
  if (target == ring_ && images.empty()) return *this;

  const std::size_t n = ring_->size();
  std::vector<RingElement> image(n);
  for (const auto& [idx, elem] : images) {
    if (idx >= n) throw Error("unknown generator index");
    elem.require_valid();
    if (elem.ring_ != target) throw Error("ring mismatch");
    if (target->strict_degree() && !elem.is_homogeneous(ring_->gen(idx).degree))
      throw Error("wrong-degree assignment", ring_->gen(idx).name);
    image[idx] = elem;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (image[i].valid()) continue;
    auto t = target->find(ring_->gen(i).name);
    if (!t || target->gen(*t).degree != ring_->gen(i).degree)
      throw Error("unknown generator", ring_->gen(i).name);
    image[i] = generator(target, *t);
  }

  std::vector<std::vector<RingElement>> powers(n);
  auto power = [&](std::size_t i, unsigned e) -> const RingElement& {
    auto& pw = powers[i];
    if (pw.empty()) pw.push_back(one(target));
    while (pw.size() <= e) pw.push_back(pw.back() * image[i]);
    return pw[e];
  };

  RingElement acc = zero(target);
  for (const auto& [mon, coeff] : terms_) {
    RingElement prod = constant(target, coeff);
    for (std::size_t i = 0; i < n && !prod.is_zero(); ++i) {
      if (mon[i] != 0) prod *= power(i, mon[i]);
    }
    acc += prod;
  }
  return acc;
}

RingElement RingElement::lifted(const RingPtr& bigger) const {
  require_valid();
  if (!bigger) throw Error("null ring");
  if (bigger == ring_) return *this;
  if (!ring_->is_prefix_of(*bigger) || bigger->degree_cap() < ring_->degree_cap())
    throw Error("ring mismatch: not an extension");
  TermMap t;
  for (const auto& [mon, coeff] : terms_) {
    Monomial m(bigger->size(), 0);
    std::copy(mon.begin(), mon.end(), m.begin());
    t[std::move(m)] = coeff;
  }
  bigger->normalize(t);
  return RingElement(bigger, std::move(t));
}

RingElement RingElement::shrunk(const RingPtr& smaller) const {
  require_valid();
  if (!smaller) throw Error("null ring");
  if (smaller == ring_) return *this;
  if (!smaller->is_prefix_of(*ring_)) throw Error("ring mismatch: not an extension");
  TermMap t;
  for (const auto& [mon, coeff] : terms_) {
    for (std::size_t i = smaller->size(); i < mon.size(); ++i) {
      if (mon[i] != 0)
        throw Error("shrink: element involves extension generators",
                    ring_->gen(i).name);
    }
    t[Monomial(mon.begin(), mon.begin() + smaller->size())] = coeff;
  }
  smaller->normalize(t);
  return RingElement(smaller, std::move(t));
}

RingElement RingElement::reciprocal() const {
  require_valid();
  Rational c = constant_term();
  if (c == 0) throw Error("division by non-unit", render());
  if (ring_->integer_only() && c != 1 && c != -1)
    throw Error("division by non-unit in integer ring", to_string(c));
  // tail = 1 - this/c has no constant term; every tail monomial must carry a
  // positive-degree generator so its powers die under the cap.
  RingElement tail = one(ring_) - scaled(Rational(1) / c);
  for (const auto& [mon, coeff] : tail.terms_) {
    (void)coeff;
    if (ring_->positive_degree(mon) == 0)
      throw Error("division by non-unit: tail does not vanish", render());
  }
  RingElement acc = one(ring_);
  RingElement p = one(ring_);
  for (int k = 1; k <= ring_->degree_cap(); ++k) {
    p *= tail;
    if (p.is_zero()) break;
    acc += p;
  }
  return acc.scaled(Rational(1) / c);
}

RingElement RingElement::homogeneous_part(long d) const {
  require_valid();
  TermMap t;
  for (const auto& [mon, coeff] : terms_) {
    if (ring_->weighted_degree(mon) == d) t[mon] = coeff;
  }
  return RingElement(ring_, std::move(t));
}

bool RingElement::is_homogeneous(long d) const {
  require_valid();
  for (const auto& [mon, coeff] : terms_) {
    (void)coeff;
    if (ring_->weighted_degree(mon) != d) return false;
  }
  return true;
}

unsigned RingElement::max_exponent(std::size_t idx) const {
  require_valid();
  if (idx >= ring_->size()) throw Error("unknown generator index");
  unsigned m = 0;
  for (const auto& [mon, coeff] : terms_) {
    (void)coeff;
    m = std::max(m, static_cast<unsigned>(mon[idx]));
  }
  return m;
}

std::map<unsigned, RingElement> RingElement::decompose_by(std::size_t idx) const {
  require_valid();
  if (idx >= ring_->size()) throw Error("unknown generator index");
  std::map<unsigned, TermMap> buckets;
  for (const auto& [mon, coeff] : terms_) {
    Monomial m = mon;
    unsigned e = m[idx];
    m[idx] = 0;
    buckets[e][std::move(m)] = coeff;
  }
  std::map<unsigned, RingElement> out;
  for (auto& [e, t] : buckets) out.emplace(e, RingElement(ring_, std::move(t)));
  return out;
}

std::string RingElement::render() const {
  require_valid();
  if (terms_.empty()) return "0";

  std::vector<const std::pair<const Monomial, Rational>*> order;
  order.reserve(terms_.size());
  for (const auto& term : terms_) order.push_back(&term);
  std::sort(order.begin(), order.end(), [&](const auto* a, const auto* b) {
    long da = ring_->weighted_degree(a->first);
    long db = ring_->weighted_degree(b->first);
    if (da != db) return da < db;
    return b->first < a->first;
  });

  std::ostringstream os;
  bool first = true;
  for (const auto* term : order) {
    const Monomial& mon = term->first;
    Rational c = term->second;
    bool negative = c < 0;
    if (first) {
      if (negative) os << "-";
      first = false;
    } else {
      os << (negative ? " - " : " + ");
    }
    Rational mag = negative ? Rational(-c) : c;

    std::string monstr;
    for (std::size_t i = 0; i < mon.size(); ++i) {
      if (mon[i] == 0) continue;
      if (!monstr.empty()) monstr += "*";
      monstr += ring_->gen(i).name;
      if (mon[i] > 1) monstr += "^" + std::to_string(mon[i]);
    }
    if (monstr.empty()) {
      os << to_string(mag);
    } else if (mag == 1) {
      os << monstr;
    } else {
      os << to_string(mag) << "*" << monstr;
    }
  }
  return os.str();
}

RingElement gen_elem(const RingPtr& ring, const std::string& name) {
  return RingElement::generator(ring, name);
}

}  // namespace fglchern
