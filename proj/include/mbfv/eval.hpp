#ifndef MBFV_EVAL_HPP
#define MBFV_EVAL_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mbfv/codec.hpp"
#include "mbfv/random.hpp"
#include "mbfv/vault.hpp"

namespace mbfv::eval {

// One synthetic characteristic: an overlap profile plus the integer
// universe its raw elements are drawn from (pre-fusion).
struct ProfileSpec {
  std::string name;
  codec::OverlapProfile profile;
  uint64_t universe = 16384;
};

struct TrialConfig {
  std::string system_name = "system";
  std::vector<ProfileSpec> profiles;  // >= 2 entries are fused per trial
  std::vector<uint32_t> k_values;
  vault::DecoderChoice decoder;
  uint32_t n_mated = 1000;
  uint32_t n_nonmated = 1000;
  uint64_t seed = 1;
  double scale = 1.0;  // divisor on profile sizes/overlaps for desk-scale runs
  gf::FieldSpec field = gf::FieldSpec::standard(16);

  void validate() const;
};

struct TrialRow {
  uint32_t k = 0;
  bool infeasible = false;
  double gmr_pct = 0;
  double fmr_pct = 0;
  std::optional<double> fas_bits;
  bool extrapolated = false;  // true iff FMR = 0 for this row
  double avg_ops = 0;         // mean decode ops of non-mated attempts
  double median_ops = 0;
  double ops_unit_mults = 0;  // field mults per Lagrange interpolation at k
  uint32_t mated_accepts = 0;
  uint32_t nonmated_accepts = 0;
  uint32_t enroll_failures = 0;  // draws too small to enrol, counted as rejects
};

struct TrialReport {
  std::string system_name;
  uint64_t seed = 0;
  double scale = 1.0;
  std::string decoder_desc;
  std::vector<TrialRow> rows;
};

// Two sets with sizes Poisson-distributed around the profile's average and
// an intersection drawn around the mated or non-mated overlap; built
// exactly (shared part first, then disjoint remainders), so measured means
// converge to the profile values.
std::pair<vault::FeatureSet, vault::FeatureSet> generate_pair(
    const codec::OverlapProfile& profile, bool mated, uint64_t universe,
    RandomSource& rng);

// Exact-size variant: |A| = size_a, |B| = size_b, |A n B| = ov.
std::pair<vault::FeatureSet, vault::FeatureSet> make_pair_with_overlap(
    uint32_t size_a, uint32_t size_b, uint32_t ov, uint64_t universe,
    RandomSource& rng);

// Mated/non-mated trials for every k: enrol one set of each generated pair,
// verify with the other, and aggregate GMR/FMR/FAS rows. Deterministic for
// a fixed config (per-trial derived seeds).
TrialReport run_trials(const TrialConfig& config);

// FAS in bits from the mean per-attempt work and the false match rate
// (fraction, 0 < fmr < 1): log2(t_ops * log(0.5) / log(1 - fmr)).
double estimate_fas_bits(double t_ops, double fmr);

// Completes zero-FMR rows by extending the line through the last two
// estimable FAS values (uniform k spacing). Standalone series form used by
// fixtures; the row form is applied by run_trials.
struct FasPoint {
  uint32_t k = 0;
  std::optional<double> fas_bits;
};
std::vector<FasPoint> extrapolate_series(std::vector<FasPoint> series);
void extrapolate_fas(std::vector<TrialRow>& rows);

// Plot-ready (GMR %, FAS bits) pairs; infeasible and FAS-less rows omitted.
std::vector<std::pair<double, double>> gmr_fas_curve(const TrialReport& report);

}  // namespace mbfv::eval

#endif
