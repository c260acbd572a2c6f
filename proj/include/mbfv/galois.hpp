#ifndef MBFV_GALOIS_HPP
#define MBFV_GALOIS_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mbfv/errors.hpp"

namespace mbfv::gf {

// Binary extension field description. `reduction` is the bitmask of the
// irreducible reduction polynomial (bit i = coefficient of x^i); bit e must
// be set. Validated by Field's constructor.
struct FieldSpec {
  uint16_t e = 0;
  uint64_t reduction = 0;

  bool operator==(const FieldSpec&) const = default;

  // Curated default reduction polynomial for the given extension degree.
  // e = 16 uses x^16+x^12+x^3+x+1; otherwise the lexicographically smallest
  // irreducible polynomial of that degree.
  static FieldSpec standard(unsigned e);
};

// Irreducibility of a GF(2)[x] polynomial given as a bitmask (Rabin test).
bool is_irreducible_gf2(uint64_t poly);

// Monotone thread-local counter of field multiplications/inversions.
// Decoders report work by taking deltas; deterministic for fixed inputs.
uint64_t mul_op_count();

// Arithmetic context for GF(2^e), 2 <= e <= 32. Log/antilog tables are built
// for e <= 16; larger fields fall back to shift-reduce multiplication.
// Immutable after construction; safe for concurrent use.
class Field {
 public:
  explicit Field(FieldSpec spec);

  const FieldSpec& spec() const { return spec_; }
  unsigned degree() const { return spec_.e; }
  uint64_t size() const { return uint64_t{1} << spec_.e; }
  uint32_t max_value() const { return static_cast<uint32_t>(size() - 1); }

  static uint32_t add(uint32_t a, uint32_t b) { return a ^ b; }
  uint32_t mul(uint32_t a, uint32_t b) const;
  uint32_t inv(uint32_t a) const;  // throws DivisionByZeroError on 0
  uint32_t div(uint32_t a, uint32_t b) const { return mul(a, inv(b)); }
  uint32_t pow(uint32_t a, uint64_t n) const;

 private:
  FieldSpec spec_;
  std::vector<uint32_t> exp_;  // exp_[i] = g^i, i in [0, 2^e-1); empty for e > 16
  std::vector<uint32_t> log_;
  uint32_t mul_shift_reduce(uint32_t a, uint32_t b) const;
};

// A field element bound to its spec; combining elements from different
// specs raises FieldMismatchError. Hot paths use Field's raw-value API.
struct FieldElement {
  uint32_t value = 0;
  const Field* field = nullptr;
};

FieldElement add(FieldElement a, FieldElement b);
FieldElement mul(FieldElement a, FieldElement b);
FieldElement inv(FieldElement a);
inline FieldElement operator+(FieldElement a, FieldElement b) { return add(a, b); }
inline FieldElement operator*(FieldElement a, FieldElement b) { return mul(a, b); }

// Makes a bound element, checking value < 2^e.
FieldElement element(const Field& f, uint32_t value);

// Univariate polynomial over GF(2^e), coefficients lowest-degree first,
// kept canonical (no trailing zero coefficients; zero poly = empty list).
class FieldPoly {
 public:
  // degree() of the zero polynomial; smaller than any true degree.
  static constexpr int kZeroDegree = -1;

  explicit FieldPoly(const Field& f) : field_(&f) {}
  FieldPoly(const Field& f, std::vector<uint32_t> coeffs);

  const Field& field() const { return *field_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  std::span<const uint32_t> coeffs() const { return coeffs_; }
  uint32_t coeff(size_t i) const { return i < coeffs_.size() ? coeffs_[i] : 0; }
  uint32_t leading() const { return coeffs_.empty() ? 0 : coeffs_.back(); }

  bool operator==(const FieldPoly& o) const {
    return field_->spec() == o.field_->spec() && coeffs_ == o.coeffs_;
  }

 private:
  const Field* field_;
  std::vector<uint32_t> coeffs_;
  friend FieldPoly poly_add(const FieldPoly&, const FieldPoly&);
  friend FieldPoly poly_mul(const FieldPoly&, const FieldPoly&);
  void trim();
};

FieldPoly poly_add(const FieldPoly& p, const FieldPoly& q);
FieldPoly poly_mul(const FieldPoly& p, const FieldPoly& q);
FieldPoly poly_scale(const FieldPoly& p, uint32_t c);

// (quotient, remainder) with deg rem < deg q; throws on zero divisor.
std::pair<FieldPoly, FieldPoly> poly_divmod(const FieldPoly& p, const FieldPoly& q);

uint32_t poly_eval(const FieldPoly& p, uint32_t x);

// Unique polynomial of degree < |points| through the given points.
// Throws ParameterError on duplicate abscissae or empty input.
FieldPoly lagrange_interpolate(
    const Field& f, std::span<const std::pair<uint32_t, uint32_t>> points);

// Monic polynomial prod (X - r) over the given distinct roots.
// Empty input yields the constant 1. Throws ParameterError on duplicates.
FieldPoly poly_from_roots(const Field& f, std::span<const uint32_t> roots);

FieldPoly poly_gcd(FieldPoly a, FieldPoly b);  // monic gcd

// All distinct roots in the field (Berlekamp-trace splitting), sorted.
std::vector<uint32_t> find_roots(const FieldPoly& p);

}  // namespace mbfv::gf

#endif
