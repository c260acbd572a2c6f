#ifndef MBFV_CODEC_HPP
#define MBFV_CODEC_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mbfv/vault.hpp"

namespace mbfv::codec {

// --- minutiae ---------------------------------------------------------

// Pre-aligned minutia: position in pixels, angle in [0, 2*pi), and a
// comparable quality score used to rank which minutiae survive the cap.
struct Minutia {
  double x = 0;
  double y = 0;
  double angle = 0;
  double quality = 0;
};

struct MinutiaRecord {
  std::vector<Minutia> minutiae;
  double width = 400;
  double height = 500;
};

struct HexGridConfig {
  double spacing = 25.0;      // pixel distance between grid coordinates
  unsigned angle_quanta = 6;  // s
  double width = 400;
  double height = 500;
  unsigned t_max = 40;        // per-finger cap on quantised minutiae
};

// Hexagonal grid: rows at vertical pitch spacing*sqrt(3)/2, odd rows offset
// by spacing/2, row-major indexing, bounding box centered in the region.
class HexGrid {
 public:
  explicit HexGrid(const HexGridConfig& config);

  size_t size() const { return size_t{cols_} * rows_; }
  unsigned cols() const { return cols_; }
  unsigned rows() const { return rows_; }
  std::pair<double, double> coordinate(unsigned index) const;
  // Index of the nearest grid coordinate; ties break to the lowest index.
  unsigned nearest(double x, double y) const;

 private:
  unsigned cols_, rows_;
  double spacing_, pitch_, x0_, y0_;
};

// Minutiae ranked by quality (descending; encoding breaks ties), then
// successively quantised to angle_quanta * cell + angle_quantum until the
// set holds t_max distinct encodings.
vault::FeatureSet quantize_minutiae(const MinutiaRecord& record,
                                    const HexGridConfig& config);

// Largest encoding the grid can emit; drives fused-capacity checks.
uint32_t max_minutia_code(const HexGridConfig& config);

// --- float embeddings (LSSC) ------------------------------------------

// Per-dimension quantization into `intervals` equal-probable intervals,
// each level coded as a linearly separable subcode (unary): the set holds
// the indexes of the 1 bits, so set distance equals summed level distance.
struct LsscConfig {
  unsigned dims = 512;
  unsigned intervals = 4;
  // dims * (intervals - 1) thresholds, ascending within each dimension.
  std::vector<double> thresholds;

  void validate() const;
  double threshold(unsigned dim, unsigned i) const {
    return thresholds[size_t{dim} * (intervals - 1) + i];
  }
  // Standard-normal quantile thresholds (the synthetic-mode default).
  static LsscConfig standard_normal(unsigned dims, unsigned intervals = 4);
};

vault::FeatureSet encode_lssc(std::span<const double> values,
                              const LsscConfig& config);

inline uint32_t max_lssc_code(const LsscConfig& c) {
  return c.dims * (c.intervals - 1) - 1;
}

// --- fusion and balancing ---------------------------------------------

// Index-attached union: element x of set i (1-based among N sets) maps to
// i + N*x, so fused size and fused overlap are exactly the sums of the
// per-characteristic sizes and overlaps. `capacity` is the field size 2^e.
vault::FeatureSet fuse(std::span<const vault::FeatureSet> sets, uint64_t capacity);

// Size balancing g: each element x becomes {x*m + r : r < m}, multiplying
// both set size and pairwise overlap exactly by m.
vault::FeatureSet clone_scale(const vault::FeatureSet& set, unsigned m,
                              uint64_t capacity);
unsigned clone_factor(double own_avg_size, double target_avg_size);
vault::FeatureSet balance_size_g(const vault::FeatureSet& set, double own_avg_size,
                                 double target_avg_size, uint64_t capacity);

// --- empirical statistics ---------------------------------------------

struct OverlapProfile {
  double avg_size = 0;
  double mated_overlap = 0;
  double nonmated_overlap = 0;

  void validate() const;  // nonmated <= mated <= avg_size, all >= 0
  double relative_nonmated() const { return nonmated_overlap / avg_size; }
};

struct LabeledPair {
  vault::FeatureSet a;
  vault::FeatureSet b;
  bool mated = false;
};

// Empirical means of set sizes and mated/non-mated overlaps.
// Requires at least one pair of each class.
OverlapProfile estimate_profile(std::span<const LabeledPair> pairs);

// Mean of 2|A n B| / (|A| + |B|) over the selected class.
double mean_relative_overlap(std::span<const LabeledPair> pairs, bool mated);

// --- overlap balancing f (calibration search) --------------------------

// Outcome of searching a declared coarseness schedule for the first setting
// whose measured non-mated relative overlap reaches the target. When the
// target is unreachable the baseline setting is kept and reachable=false;
// callers report rather than throw.
struct FCalibration {
  bool reachable = false;
  size_t chosen_index = 0;
  double achieved_nonmated = 0;
  std::vector<double> measured_nonmated;  // one entry per schedule setting
  std::vector<double> measured_mated;     // mated-side effect, same order
};

struct MinutiaPair {
  MinutiaRecord a;
  MinutiaRecord b;
  bool mated = false;
};

// Schedule entries are grid spacings; entry 0 is the current setting.
FCalibration balance_overlap_f_minutiae(std::span<const MinutiaPair> corpus,
                                        const HexGridConfig& base,
                                        std::span<const double> spacing_schedule,
                                        double target_relative_overlap);

struct EmbeddingPair {
  std::vector<double> a;
  std::vector<double> b;
  bool mated = false;
};

// Empirical per-dimension quantile thresholds from a calibration corpus.
LsscConfig lssc_from_corpus(std::span<const EmbeddingPair> corpus, unsigned dims,
                            unsigned intervals);

// Schedule entries are interval counts; entry 0 is the current setting.
// Thresholds are re-derived from the corpus for every setting.
FCalibration balance_overlap_f_embedding(std::span<const EmbeddingPair> corpus,
                                         unsigned dims,
                                         std::span<const unsigned> interval_schedule,
                                         double target_relative_overlap);

}  // namespace mbfv::codec

#endif
