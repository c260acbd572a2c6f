#ifndef MBFV_DECODER_HPP
#define MBFV_DECODER_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mbfv/galois.hpp"

namespace mbfv::decode {

// One unlocking-set pair (b, V(b)).
struct Point {
  uint32_t x = 0;
  uint32_t y = 0;
};
using PointList = std::vector<Point>;

struct GsParams {
  unsigned multiplicity = 1;
  unsigned max_list = 32;
};

struct DecodeResult {
  std::vector<gf::FieldPoly> candidates;  // each deg < k
  // Work performed, in units of one Lagrange interpolation of k points.
  double ops = 0.0;
};

// Number of pairs a degree < k polynomial must match for the
// Guruswami-Sudan list at multiplicity m to be guaranteed to contain it.
// Exact monomial-counting bound, not the asymptotic approximation.
unsigned decoding_radius(unsigned u, unsigned k, unsigned multiplicity);

// Smallest multiplicity whose decoding radius admits u - omega errors;
// nullopt iff omega <= sqrt(u(k-1)), the GS feasibility bound.
std::optional<unsigned> min_multiplicity(unsigned u, unsigned k, unsigned omega);

// Lagrange decoding over k-subsets in lexicographic order, at most `budget`
// subsets (budget >= C(u,k) means exhaustive). ops = interpolations done.
DecodeResult bruteforce_decode(const gf::Field& field, std::span<const Point> pairs,
                               unsigned k, uint64_t budget);

// Guruswami-Sudan list decoding: Koetter interpolation with the given
// multiplicity, Roth-Ruckenstein Y-root extraction, candidates filtered to
// those agreeing with >= decoding_radius(u, k, m) pairs.
DecodeResult gs_decode(const gf::Field& field, std::span<const Point> pairs,
                       unsigned k, const GsParams& params);

// Number of pairs the polynomial agrees with.
unsigned agreement(const gf::FieldPoly& p, std::span<const Point> pairs);

// Field multiplications consumed by one canonical Lagrange interpolation of
// k points; the denominator of the ops unit. Deterministic, memoized.
double lagrange_unit_cost(const gf::Field& field, unsigned k);

}  // namespace mbfv::decode

#endif
