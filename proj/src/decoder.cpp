#include "mbfv/decoder.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace mbfv::decode {

namespace {

using u128 = unsigned __int128;

// Monomials (a, b) with a + w*b <= d.
u128 monomial_count(uint64_t d, uint64_t w) {
  const uint64_t L = d / w;
  return u128(L + 1) * (d + 1) - u128(w) * L * (L + 1) / 2;
}

// Smallest d with monomial_count(d, w) > constraints.
uint64_t min_weighted_degree(u128 constraints, uint64_t w) {
  uint64_t lo = 0, hi = 1;
  while (monomial_count(hi, w) <= constraints) hi *= 2;
  while (lo < hi) {
    const uint64_t mid = lo + (hi - lo) / 2;
    if (monomial_count(mid, w) > constraints) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

void validate_pairs(const gf::Field& field, std::span<const Point> pairs) {
  std::vector<uint32_t> xs(pairs.size());
  for (size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].x > field.max_value() || pairs[i].y > field.max_value()) {
      throw EncodingOverflowError("unlocking pair does not fit the field");
    }
    xs[i] = pairs[i].x;
  }
  std::sort(xs.begin(), xs.end());
  if (std::adjacent_find(xs.begin(), xs.end()) != xs.end()) {
    throw ParameterError("duplicate abscissa in unlocking set");
  }
}

// C(n, k) mod 2 via Lucas.
bool binom_odd(uint64_t n, uint64_t k) { return (n & k) == k; }

// Bivariate polynomial as Y-coefficient rows: Q = sum_b yc[b](X) Y^b.
struct Bivariate {
  std::vector<std::vector<uint32_t>> yc;

  static Bivariate y_power(unsigned b) {
    Bivariate q;
    q.yc.resize(b + 1);
    q.yc[b] = {1};
    return q;
  }

  bool is_zero() const {
    for (const auto& row : yc) {
      for (uint32_t c : row) {
        if (c) return false;
      }
    }
    return true;
  }

  // Leading monomial under (1, w)-weighted degree, ties to higher Y power.
  // Returns {wdeg, b}; {0, 0} only meaningful for nonzero polynomials.
  std::pair<uint64_t, uint64_t> leading_monomial(uint64_t w) const {
    std::pair<uint64_t, uint64_t> best{0, 0};
    bool found = false;
    for (size_t b = 0; b < yc.size(); ++b) {
      const auto& row = yc[b];
      for (size_t a = row.size(); a-- > 0;) {
        if (row[a] == 0) continue;
        std::pair<uint64_t, uint64_t> cand{a + w * b, b};
        if (!found || cand > best) best = cand;
        found = true;
        break;  // highest a in this row
      }
    }
    return best;
  }

  // Hasse derivative coefficient D_{(r,s)} Q evaluated at (x, y).
  uint32_t hasse_at(const gf::Field& f, unsigned r, unsigned s, uint32_t x,
                    uint32_t y) const {
    uint32_t acc = 0;
    uint32_t ypow = 1;
    for (size_t b = s; b < yc.size(); ++b, ypow = f.mul(ypow, y)) {
      if (!binom_odd(b, s)) continue;
      const auto& row = yc[b];
      uint32_t v = 0;
      uint32_t xpow = 1;
      for (size_t a = r; a < row.size(); ++a, xpow = f.mul(xpow, x)) {
        if (row[a] && binom_odd(a, r)) v ^= f.mul(row[a], xpow);
      }
      if (v) acc ^= f.mul(v, ypow);
    }
    return acc;
  }

  void axpy(const gf::Field& f, uint32_t c, const Bivariate& o) {
    if (o.yc.size() > yc.size()) yc.resize(o.yc.size());
    for (size_t b = 0; b < o.yc.size(); ++b) {
      if (o.yc[b].size() > yc[b].size()) yc[b].resize(o.yc[b].size(), 0);
      for (size_t a = 0; a < o.yc[b].size(); ++a) {
        if (o.yc[b][a]) yc[b][a] ^= f.mul(c, o.yc[b][a]);
      }
    }
  }

  void mul_x_minus(const gf::Field& f, uint32_t x) {
    for (auto& row : yc) {
      row.push_back(0);
      for (size_t a = row.size() - 1; a-- > 0;) {
        const uint32_t v = row[a];
        row[a] = f.mul(v, x);
        row[a + 1] ^= v;
      }
    }
  }
};

Bivariate koetter_interpolate(const gf::Field& f, std::span<const Point> pairs,
                              unsigned k, unsigned m, uint64_t weighted_degree) {
  const uint64_t w = k - 1;
  const size_t basis_size = weighted_degree / w + 1;
  std::vector<Bivariate> basis;
  basis.reserve(basis_size);
  for (size_t j = 0; j < basis_size; ++j) basis.push_back(Bivariate::y_power(j));

  std::vector<uint32_t> discrepancy(basis_size);
  for (const Point& pt : pairs) {
    for (unsigned s = 0; s < m; ++s) {
      // r ascending keeps earlier same-point constraints invariant under
      // the (X - x) update.
      for (unsigned r = 0; r + s < m; ++r) {
        size_t pivot = basis_size;
        std::pair<uint64_t, uint64_t> pivot_lead{0, 0};
        for (size_t j = 0; j < basis_size; ++j) {
          discrepancy[j] = basis[j].hasse_at(f, r, s, pt.x, pt.y);
          if (discrepancy[j] == 0) continue;
          const auto lead = basis[j].leading_monomial(w);
          if (pivot == basis_size || lead < pivot_lead) {
            pivot = j;
            pivot_lead = lead;
          }
        }
        if (pivot == basis_size) continue;
        const uint32_t inv_piv = f.inv(discrepancy[pivot]);
        for (size_t j = 0; j < basis_size; ++j) {
          if (j == pivot || discrepancy[j] == 0) continue;
          basis[j].axpy(f, f.mul(discrepancy[j], inv_piv), basis[pivot]);
        }
        basis[pivot].mul_x_minus(f, pt.x);
      }
    }
  }

  size_t best = 0;
  auto best_lead = basis[0].leading_monomial(w);
  for (size_t j = 1; j < basis_size; ++j) {
    const auto lead = basis[j].leading_monomial(w);
    if (lead < best_lead) {
      best = j;
      best_lead = lead;
    }
  }
  return std::move(basis[best]);
}

// Divides out the largest power of X dividing every row.
void strip_x(Bivariate& q) {
  size_t v = SIZE_MAX;
  for (const auto& row : q.yc) {
    for (size_t a = 0; a < row.size(); ++a) {
      if (row[a]) {
        v = std::min(v, a);
        break;
      }
    }
  }
  if (v == 0 || v == SIZE_MAX) return;
  for (auto& row : q.yc) {
    if (row.size() <= v) {
      row.clear();
    } else {
      row.erase(row.begin(), row.begin() + v);
    }
  }
}

// Q(X, c + X*Y): yc'[j] = X^j * sum_{b >= j, C(b,j) odd} c^(b-j) yc[b].
Bivariate shift_substitute(const gf::Field& f, const Bivariate& q, uint32_t c) {
  Bivariate out;
  out.yc.resize(q.yc.size());
  for (size_t j = 0; j < q.yc.size(); ++j) {
    std::vector<uint32_t> acc;
    uint32_t cpow = 1;
    for (size_t b = j; b < q.yc.size(); ++b, cpow = f.mul(cpow, c)) {
      if (!binom_odd(b, j)) continue;
      const auto& row = q.yc[b];
      if (acc.size() < row.size()) acc.resize(row.size(), 0);
      for (size_t a = 0; a < row.size(); ++a) {
        if (row[a]) acc[a] ^= f.mul(cpow, row[a]);
      }
    }
    acc.insert(acc.begin(), j, 0);
    out.yc[j] = std::move(acc);
  }
  return out;
}

bool row_is_zero(const std::vector<uint32_t>& row) {
  return std::all_of(row.begin(), row.end(), [](uint32_t c) { return c == 0; });
}

void rr_recurse(const gf::Field& f, Bivariate q, unsigned depth, unsigned k,
                std::vector<uint32_t>& prefix,
                std::set<std::vector<uint32_t>>& out) {
  if (depth == k) {
    if (q.yc.empty() || row_is_zero(q.yc[0])) {
      std::vector<uint32_t> p = prefix;
      while (!p.empty() && p.back() == 0) p.pop_back();
      out.insert(std::move(p));
    }
    return;
  }
  strip_x(q);
  std::vector<uint32_t> r_coeffs(q.yc.size());
  for (size_t b = 0; b < q.yc.size(); ++b) {
    r_coeffs[b] = q.yc[b].empty() ? 0 : q.yc[b][0];
  }
  const gf::FieldPoly r(f, std::move(r_coeffs));
  if (r.is_zero()) return;  // cannot happen after strip_x on nonzero Q
  for (uint32_t gamma : gf::find_roots(r)) {
    prefix.push_back(gamma);
    rr_recurse(f, shift_substitute(f, q, gamma), depth + 1, k, prefix, out);
    prefix.pop_back();
  }
}

std::vector<std::vector<uint32_t>> rr_roots(const gf::Field& f, Bivariate q,
                                            unsigned k) {
  std::set<std::vector<uint32_t>> out;
  std::vector<uint32_t> prefix;
  rr_recurse(f, std::move(q), 0, k, prefix, out);
  return {out.begin(), out.end()};
}

}  // namespace

unsigned decoding_radius(unsigned u, unsigned k, unsigned multiplicity) {
  if (k < 1 || multiplicity < 1) throw ParameterError("k and multiplicity must be >= 1");
  if (u < k) throw ParameterError("decoding needs at least k pairs");
  if (k == 1) return 1;
  const u128 constraints = u128(u) * multiplicity * (multiplicity + 1) / 2;
  const uint64_t d = min_weighted_degree(constraints, k - 1);
  return static_cast<unsigned>(d / multiplicity + 1);
}

std::optional<unsigned> min_multiplicity(unsigned u, unsigned k, unsigned omega) {
  if (k < 1 || u < k) throw ParameterError("require u >= k >= 1");
  if (omega > u) throw ParameterError("omega cannot exceed u");
  if (k == 1) return omega >= 1 ? std::optional<unsigned>(1) : std::nullopt;
  const uint64_t uw = uint64_t(u) * (k - 1);
  if (uint64_t(omega) * omega <= uw) return std::nullopt;  // omega <= sqrt(u(k-1))
  const uint64_t cap = uw / (uint64_t(omega) * omega - uw) + 8;
  for (unsigned m = 1; m <= cap; ++m) {
    if (decoding_radius(u, k, m) <= omega) return m;
  }
  throw std::logic_error("min_multiplicity search exceeded its theoretical cap");
}

unsigned agreement(const gf::FieldPoly& p, std::span<const Point> pairs) {
  unsigned n = 0;
  for (const Point& pt : pairs) {
    if (gf::poly_eval(p, pt.x) == pt.y) ++n;
  }
  return n;
}

double lagrange_unit_cost(const gf::Field& field, unsigned k) {
  thread_local std::unordered_map<uint64_t, double> cache;
  const uint64_t key = (uint64_t(field.degree()) << 32) | k;
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  std::vector<std::pair<uint32_t, uint32_t>> pts(k);
  for (unsigned i = 0; i < k; ++i) pts[i] = {i, 1};
  const uint64_t before = gf::mul_op_count();
  (void)gf::lagrange_interpolate(field, pts);
  const double cost = static_cast<double>(gf::mul_op_count() - before);
  cache[key] = cost;
  return cost;
}

DecodeResult bruteforce_decode(const gf::Field& field, std::span<const Point> pairs,
                               unsigned k, uint64_t budget) {
  if (k < 1) throw ParameterError("k must be >= 1");
  if (pairs.size() < k) throw ParameterError("fewer pairs than polynomial degree bound");
  if (budget < 1) throw ParameterError("budget must be >= 1");
  validate_pairs(field, pairs);

  const size_t u = pairs.size();
  std::vector<size_t> idx(k);
  for (unsigned i = 0; i < k; ++i) idx[i] = i;

  std::set<std::vector<uint32_t>> seen;
  uint64_t done = 0;
  std::vector<std::pair<uint32_t, uint32_t>> subset(k);
  while (true) {
    for (unsigned i = 0; i < k; ++i) subset[i] = {pairs[idx[i]].x, pairs[idx[i]].y};
    gf::FieldPoly cand = gf::lagrange_interpolate(field, subset);
    seen.insert({cand.coeffs().begin(), cand.coeffs().end()});
    ++done;
    if (done >= budget) break;
    // next k-combination in lexicographic order
    int pos = static_cast<int>(k) - 1;
    while (pos >= 0 && idx[pos] == u - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (unsigned i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }

  DecodeResult res;
  res.ops = static_cast<double>(done);
  res.candidates.reserve(seen.size());
  for (const auto& c : seen) {
    res.candidates.emplace_back(field, std::vector<uint32_t>(c));
  }
  return res;
}

DecodeResult gs_decode(const gf::Field& field, std::span<const Point> pairs,
                       unsigned k, const GsParams& params) {
  if (params.multiplicity < 1 || params.max_list < 1) {
    throw ParameterError("multiplicity and max_list must be >= 1");
  }
  if (k < 1) throw ParameterError("k must be >= 1");
  if (pairs.size() < k) throw ParameterError("fewer pairs than polynomial degree bound");
  validate_pairs(field, pairs);

  const double unit_cost = lagrange_unit_cost(field, k);
  const uint64_t ops_before = gf::mul_op_count();
  const unsigned u = static_cast<unsigned>(pairs.size());
  const unsigned radius = decoding_radius(u, k, params.multiplicity);

  std::vector<std::vector<uint32_t>> raw;
  if (k == 1) {
    // Degree bound 1: candidates are constants; every value present among
    // the y's agrees with >= 1 = radius pairs.
    std::set<uint32_t> ys;
    for (const Point& pt : pairs) ys.insert(pt.y);
    for (uint32_t y : ys) {
      raw.push_back(y == 0 ? std::vector<uint32_t>{} : std::vector<uint32_t>{y});
    }
  } else {
    const u128 constraints =
        u128(u) * params.multiplicity * (params.multiplicity + 1) / 2;
    const uint64_t wdeg = min_weighted_degree(constraints, k - 1);
    Bivariate q = koetter_interpolate(field, pairs, k, params.multiplicity, wdeg);
    raw = rr_roots(field, std::move(q), k);
  }

  struct Scored {
    unsigned agreement;
    std::vector<uint32_t> coeffs;
  };
  std::vector<Scored> scored;
  for (auto& c : raw) {
    gf::FieldPoly p(field, std::vector<uint32_t>(c));
    const unsigned agr = agreement(p, pairs);
    if (agr >= radius) scored.push_back({agr, std::move(c)});
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.agreement != b.agreement) return a.agreement > b.agreement;
    return a.coeffs < b.coeffs;
  });
  if (scored.size() > size_t{params.max_list}) scored.resize(params.max_list);

  DecodeResult res;
  res.candidates.reserve(scored.size());
  for (auto& s : scored) res.candidates.emplace_back(field, std::move(s.coeffs));
  res.ops = static_cast<double>(gf::mul_op_count() - ops_before) / unit_cost;
  return res;
}

}  // namespace mbfv::decode
