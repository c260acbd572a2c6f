#include "mbfv/galois.hpp"

#include <algorithm>
#include <bit>

namespace mbfv::gf {

namespace {

thread_local uint64_t tls_mul_ops = 0;

int gf2_deg(uint64_t p) { return p == 0 ? -1 : std::bit_width(p) - 1; }

uint64_t gf2_mod(uint64_t a, uint64_t m) {
  const int dm = gf2_deg(m);
  for (int d = gf2_deg(a); d >= dm; d = gf2_deg(a)) {
    a ^= m << (d - dm);
  }
  return a;
}

uint64_t gf2_mulmod(uint64_t a, uint64_t b, uint64_t m) {
  uint64_t acc = 0;
  a = gf2_mod(a, m);
  while (b) {
    if (b & 1) acc ^= a;
    b >>= 1;
    a <<= 1;
    if (gf2_deg(a) >= gf2_deg(m)) a ^= m << (gf2_deg(a) - gf2_deg(m));
  }
  return acc;
}

uint64_t gf2_gcd(uint64_t a, uint64_t b) {
  while (b) {
    a = gf2_mod(a, b);
    std::swap(a, b);
  }
  return a;
}

std::vector<uint32_t> prime_factors(uint64_t n) {
  std::vector<uint32_t> out;
  for (uint64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      out.push_back(static_cast<uint32_t>(p));
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) out.push_back(static_cast<uint32_t>(n));
  return out;
}

}  // namespace

uint64_t mul_op_count() { return tls_mul_ops; }

bool is_irreducible_gf2(uint64_t poly) {
  const int d = gf2_deg(poly);
  if (d < 1) return false;
  if (d == 1) return true;
  if ((poly & 1) == 0) return false;  // x divides

  // Rabin: x^(2^d) == x mod poly, and gcd(x^(2^(d/p)) - x, poly) = 1
  // for every prime p dividing d.
  uint64_t r = 2;  // the polynomial x
  std::vector<uint64_t> checkpoints;
  const auto primes = prime_factors(static_cast<uint64_t>(d));
  for (int i = 1; i <= d; ++i) {
    r = gf2_mulmod(r, r, poly);
    for (uint32_t p : primes) {
      if (i == d / static_cast<int>(p)) checkpoints.push_back(r ^ 2);
    }
  }
  if (r != 2) return false;
  for (uint64_t c : checkpoints) {
    if (gf2_deg(gf2_gcd(c, poly)) != 0) return false;
  }
  return true;
}

FieldSpec FieldSpec::standard(unsigned e) {
  if (e == 16) return {16, 0x1100B};  // x^16 + x^12 + x^3 + x + 1
  if (e < 2 || e > 32) throw ParameterError("field degree out of range [2,32]");
  for (uint64_t cand = (uint64_t{1} << e) | 1;; cand += 2) {
    if (is_irreducible_gf2(cand)) return {static_cast<uint16_t>(e), cand};
  }
}

Field::Field(FieldSpec spec) : spec_(spec) {
  if (spec_.e < 2 || spec_.e > 32) {
    throw ParameterError("field degree out of range [2,32]");
  }
  if ((spec_.reduction >> spec_.e) != 1) {
    throw ParameterError("reduction polynomial degree does not match e");
  }
  if (!is_irreducible_gf2(spec_.reduction)) {
    throw ParameterError("reduction polynomial is not irreducible");
  }
  if (spec_.e > 16) return;  // shift-reduce path, no tables

  const uint64_t order = size() - 1;
  const auto primes = prime_factors(order);
  auto pow_sr = [&](uint32_t base, uint64_t n) {
    uint32_t acc = 1;
    uint32_t b = base;
    while (n) {
      if (n & 1) acc = mul_shift_reduce(acc, b);
      b = mul_shift_reduce(b, b);
      n >>= 1;
    }
    return acc;
  };
  uint32_t gen = 2;
  for (;; ++gen) {
    bool ok = true;
    for (uint32_t p : primes) {
      if (pow_sr(gen, order / p) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) break;
  }
  exp_.resize(order);
  log_.assign(size(), 0);
  uint32_t v = 1;
  for (uint64_t i = 0; i < order; ++i) {
    exp_[i] = v;
    log_[v] = static_cast<uint32_t>(i);
    v = mul_shift_reduce(v, gen);
  }
}

uint32_t Field::mul_shift_reduce(uint32_t a, uint32_t b) const {
  uint64_t acc = 0;
  uint64_t aa = a;
  const uint64_t top = uint64_t{1} << spec_.e;
  while (b) {
    if (b & 1) acc ^= aa;
    b >>= 1;
    aa <<= 1;
    if (aa & top) aa ^= spec_.reduction;
  }
  return static_cast<uint32_t>(acc);
}

uint32_t Field::mul(uint32_t a, uint32_t b) const {
  ++tls_mul_ops;
  if (a == 0 || b == 0) return 0;
  if (exp_.empty()) return mul_shift_reduce(a, b);
  const uint64_t order = size() - 1;
  uint64_t s = uint64_t{log_[a]} + log_[b];
  if (s >= order) s -= order;
  return exp_[s];
}

uint32_t Field::inv(uint32_t a) const {
  if (a == 0) throw DivisionByZeroError("inverse of zero field element");
  ++tls_mul_ops;
  if (!exp_.empty()) {
    const uint64_t order = size() - 1;
    uint64_t s = order - log_[a];
    if (s == order) s = 0;
    return exp_[s];
  }
  // Extended Euclid in GF(2)[x] for the table-free path.
  uint64_t r0 = spec_.reduction, r1 = a;
  uint64_t s0 = 0, s1 = 1;
  while (r1 != 0) {
    uint64_t q = 0, r = r0;
    const int d1 = gf2_deg(r1);
    for (int d = gf2_deg(r); d >= d1; d = gf2_deg(r)) {
      q ^= uint64_t{1} << (d - d1);
      r ^= r1 << (d - d1);
    }
    r0 = r1;
    r1 = r;
    const uint64_t s2 = s0 ^ gf2_mulmod(q, s1, spec_.reduction);
    s0 = s1;
    s1 = s2;
  }
  return static_cast<uint32_t>(s0);
}

uint32_t Field::pow(uint32_t a, uint64_t n) const {
  uint32_t acc = 1;
  while (n) {
    if (n & 1) acc = mul(acc, a);
    a = mul(a, a);
    n >>= 1;
  }
  return acc;
}

namespace {

void require_same_spec(const Field& a, const Field& b) {
  if (!(a.spec() == b.spec())) {
    throw FieldMismatchError("operands bound to different field specs");
  }
}

}  // namespace

FieldElement element(const Field& f, uint32_t value) {
  if (value > f.max_value()) {
    throw EncodingOverflowError("value does not fit the field");
  }
  return {value, &f};
}

FieldElement add(FieldElement a, FieldElement b) {
  if (!a.field || !b.field) throw ParameterError("unbound field element");
  require_same_spec(*a.field, *b.field);
  return {Field::add(a.value, b.value), a.field};
}

FieldElement mul(FieldElement a, FieldElement b) {
  if (!a.field || !b.field) throw ParameterError("unbound field element");
  require_same_spec(*a.field, *b.field);
  return {a.field->mul(a.value, b.value), a.field};
}

FieldElement inv(FieldElement a) {
  if (!a.field) throw ParameterError("unbound field element");
  return {a.field->inv(a.value), a.field};
}

FieldPoly::FieldPoly(const Field& f, std::vector<uint32_t> coeffs)
    : field_(&f), coeffs_(std::move(coeffs)) {
  for (uint32_t c : coeffs_) {
    if (c > f.max_value()) throw EncodingOverflowError("coefficient does not fit the field");
  }
  trim();
}

void FieldPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

FieldPoly poly_add(const FieldPoly& p, const FieldPoly& q) {
  require_same_spec(p.field(), q.field());
  FieldPoly r(p.field());
  r.coeffs_.resize(std::max(p.coeffs_.size(), q.coeffs_.size()), 0);
  for (size_t i = 0; i < r.coeffs_.size(); ++i) r.coeffs_[i] = p.coeff(i) ^ q.coeff(i);
  r.trim();
  return r;
}

FieldPoly poly_mul(const FieldPoly& p, const FieldPoly& q) {
  require_same_spec(p.field(), q.field());
  FieldPoly r(p.field());
  if (p.is_zero() || q.is_zero()) return r;
  const Field& f = p.field();
  r.coeffs_.assign(p.coeffs_.size() + q.coeffs_.size() - 1, 0);
  for (size_t i = 0; i < p.coeffs_.size(); ++i) {
    if (p.coeffs_[i] == 0) continue;
    for (size_t j = 0; j < q.coeffs_.size(); ++j) {
      r.coeffs_[i + j] ^= f.mul(p.coeffs_[i], q.coeffs_[j]);
    }
  }
  r.trim();
  return r;
}

FieldPoly poly_scale(const FieldPoly& p, uint32_t c) {
  const Field& f = p.field();
  std::vector<uint32_t> out(p.coeffs().begin(), p.coeffs().end());
  for (auto& v : out) v = f.mul(v, c);
  return FieldPoly(f, std::move(out));
}

std::pair<FieldPoly, FieldPoly> poly_divmod(const FieldPoly& p, const FieldPoly& q) {
  require_same_spec(p.field(), q.field());
  if (q.is_zero()) throw DivisionByZeroError("polynomial division by zero");
  const Field& f = p.field();
  std::vector<uint32_t> rem(p.coeffs().begin(), p.coeffs().end());
  const int dq = q.degree();
  if (p.degree() < dq) return {FieldPoly(f), p};
  std::vector<uint32_t> quot(p.degree() - dq + 1, 0);
  const uint32_t lead_inv = f.inv(q.leading());
  for (int d = p.degree(); d >= dq; --d) {
    const uint32_t c = rem[d];
    if (c == 0) continue;
    const uint32_t factor = f.mul(c, lead_inv);
    quot[d - dq] = factor;
    for (int i = 0; i <= dq; ++i) {
      rem[d - dq + i] ^= f.mul(factor, q.coeff(i));
    }
  }
  return {FieldPoly(f, std::move(quot)), FieldPoly(f, std::move(rem))};
}

uint32_t poly_eval(const FieldPoly& p, uint32_t x) {
  const Field& f = p.field();
  uint32_t acc = 0;
  for (size_t i = p.coeffs().size(); i-- > 0;) {
    acc = f.mul(acc, x) ^ p.coeff(i);
  }
  return acc;
}

FieldPoly poly_from_roots(const Field& f, std::span<const uint32_t> roots) {
  {
    std::vector<uint32_t> sorted(roots.begin(), roots.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ParameterError("duplicate root");
    }
  }
  std::vector<uint32_t> c{1};
  for (uint32_t r : roots) {
    c.push_back(0);
    for (size_t i = c.size() - 1; i-- > 0;) {
      // (X + r) * old: shift up plus scaled copy; char 2 so X - r = X + r
      const uint32_t v = c[i];
      c[i] = f.mul(v, r);
      c[i + 1] ^= v;
    }
  }
  return FieldPoly(f, std::move(c));
}

FieldPoly lagrange_interpolate(
    const Field& f, std::span<const std::pair<uint32_t, uint32_t>> points) {
  if (points.empty()) throw ParameterError("interpolation needs at least one point");
  std::vector<uint32_t> xs(points.size());
  for (size_t i = 0; i < points.size(); ++i) xs[i] = points[i].first;
  {
    std::vector<uint32_t> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ParameterError("duplicate abscissa");
    }
  }

  const FieldPoly master = poly_from_roots(f, xs);  // prod (X - x_i), monic
  std::vector<uint32_t> acc(points.size(), 0);
  std::vector<uint32_t> li(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    // li = master / (X - x_i) by synthetic division.
    const uint32_t xi = xs[i];
    uint32_t carry = master.coeff(points.size());
    for (size_t j = points.size(); j-- > 0;) {
      li[j] = carry;
      carry = f.mul(carry, xi) ^ master.coeff(j);
    }
    const uint32_t denom = [&] {
      uint32_t v = 0;
      for (size_t j = li.size(); j-- > 0;) v = f.mul(v, xi) ^ li[j];
      return v;
    }();
    const uint32_t scale = f.mul(points[i].second, f.inv(denom));
    if (scale == 0) continue;
    for (size_t j = 0; j < li.size(); ++j) acc[j] ^= f.mul(scale, li[j]);
  }
  return FieldPoly(f, std::move(acc));
}

FieldPoly poly_gcd(FieldPoly a, FieldPoly b) {
  require_same_spec(a.field(), b.field());
  while (!b.is_zero()) {
    FieldPoly r = poly_divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.is_zero() && a.leading() != 1) a = poly_scale(a, a.field().inv(a.leading()));
  return a;
}

namespace {

FieldPoly poly_mulmod(const FieldPoly& a, const FieldPoly& b, const FieldPoly& m) {
  return poly_divmod(poly_mul(a, b), m).second;
}

}  // namespace

std::vector<uint32_t> find_roots(const FieldPoly& p) {
  if (p.is_zero()) throw ParameterError("root finding on the zero polynomial");
  const Field& f = p.field();
  std::vector<uint32_t> roots;
  FieldPoly work = p;
  if (work.coeff(0) == 0) {
    roots.push_back(0);
    std::vector<uint32_t> shifted;
    size_t first = 0;
    while (work.coeff(first) == 0) ++first;
    shifted.assign(work.coeffs().begin() + first, work.coeffs().end());
    work = FieldPoly(f, std::move(shifted));
  }
  if (work.degree() >= 1) {
    // Split off the product of distinct linear factors: gcd(X^(2^e) - X, work).
    FieldPoly xp(f, {0, 1});
    for (unsigned i = 0; i < f.degree(); ++i) xp = poly_mulmod(xp, xp, work);
    FieldPoly lin = poly_gcd(poly_add(xp, FieldPoly(f, {0, 1})), work);

    // Berlekamp-trace splitting over the GF(2)-basis {x^0, ..., x^(e-1)}:
    // any two distinct roots differ on some Tr(beta * r), so after all basis
    // elements every surviving factor is linear.
    std::vector<FieldPoly> pending;
    if (lin.degree() >= 1) pending.push_back(std::move(lin));
    for (unsigned j = 0; j < f.degree() && !pending.empty(); ++j) {
      const uint32_t beta = uint32_t{1} << j;
      std::vector<FieldPoly> next;
      for (FieldPoly& h : pending) {
        if (h.degree() == 1) {
          next.push_back(std::move(h));
          continue;
        }
        FieldPoly term = poly_divmod(FieldPoly(f, {0, beta}), h).second;
        FieldPoly trace = term;
        for (unsigned i = 1; i < f.degree(); ++i) {
          term = poly_mulmod(term, term, h);
          trace = poly_add(trace, term);
        }
        FieldPoly g0 = poly_gcd(trace, h);
        if (g0.degree() <= 0 || g0.degree() == h.degree()) {
          next.push_back(std::move(h));
          continue;
        }
        FieldPoly g1 = poly_divmod(h, g0).first;
        next.push_back(std::move(g0));
        next.push_back(std::move(g1));
      }
      pending = std::move(next);
    }
    for (const FieldPoly& h : pending) {
      if (h.degree() == 1) {
        roots.push_back(f.mul(h.coeff(0), f.inv(h.coeff(1))));
      }
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

}  // namespace mbfv::gf
