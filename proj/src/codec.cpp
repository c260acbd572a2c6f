#include "mbfv/codec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mbfv::codec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Inverse standard-normal CDF (Acklam's rational approximation); only used
// to seed synthetic-mode LSSC thresholds, where ~1e-9 accuracy is plenty.
double normal_quantile(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (p <= 0 || p >= 1) throw ConfigError("quantile probability out of range");
  if (p < plow) {
    const double q = std::sqrt(-2 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  if (p > 1 - plow) {
    const double q = std::sqrt(-2 * std::log(1 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  const double q = p - 0.5, r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

}  // namespace

HexGrid::HexGrid(const HexGridConfig& config) {
  if (config.spacing <= 0 || config.width <= 0 || config.height <= 0) {
    throw ConfigError("hex grid needs positive spacing and region");
  }
  if (config.angle_quanta < 1 || config.t_max < 1) {
    throw ConfigError("hex grid needs angle_quanta >= 1 and t_max >= 1");
  }
  spacing_ = config.spacing;
  pitch_ = config.spacing * std::numbers::sqrt3 / 2.0;
  cols_ = static_cast<unsigned>(config.width / spacing_) + 1;
  rows_ = static_cast<unsigned>(config.height / pitch_) + 1;
  // Center the even-row span; odd rows carry the half-spacing offset and may
  // overhang the region edge, which is harmless for nearest-coordinate
  // snapping.
  x0_ = (config.width - (cols_ - 1) * spacing_) / 2.0;
  y0_ = (config.height - (rows_ - 1) * pitch_) / 2.0;
}

std::pair<double, double> HexGrid::coordinate(unsigned index) const {
  const unsigned r = index / cols_;
  const unsigned c = index % cols_;
  const double x = x0_ + c * spacing_ + (r % 2 == 1 ? spacing_ / 2 : 0.0);
  return {x, y0_ + r * pitch_};
}

unsigned HexGrid::nearest(double x, double y) const {
  unsigned best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (unsigned i = 0; i < size(); ++i) {
    const auto [cx, cy] = coordinate(i);
    const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

uint32_t max_minutia_code(const HexGridConfig& config) {
  const HexGrid grid(config);
  return static_cast<uint32_t>(config.angle_quanta * grid.size() - 1);
}

vault::FeatureSet quantize_minutiae(const MinutiaRecord& record,
                                    const HexGridConfig& config) {
  const HexGrid grid(config);
  const unsigned s = config.angle_quanta;

  struct Ranked {
    double quality;
    uint32_t code;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(record.minutiae.size());
  for (const Minutia& m : record.minutiae) {
    if (m.x < 0 || m.x >= record.width || m.y < 0 || m.y >= record.height ||
        m.angle < 0 || m.angle >= kTwoPi) {
      throw ParameterError("minutia outside the pre-aligned region");
    }
    unsigned angle_q = static_cast<unsigned>(s * m.angle / kTwoPi);
    if (angle_q >= s) angle_q = s - 1;  // floating-point edge at 2*pi
    const uint32_t code = angle_q + s * grid.nearest(m.x, m.y);
    ranked.push_back({m.quality, code});
  }
  // Quality-descending with the encoding as tie-break keeps the result
  // invariant under permutation of equal-quality minutiae.
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.quality != b.quality) return a.quality > b.quality;
    return a.code < b.code;
  });

  std::vector<uint32_t> out;
  for (const Ranked& r : ranked) {
    if (out.size() >= config.t_max) break;
    if (std::find(out.begin(), out.end(), r.code) == out.end()) {
      out.push_back(r.code);
    }
  }
  return vault::FeatureSet::from_values(std::move(out));
}

void LsscConfig::validate() const {
  if (dims < 1 || intervals < 2) {
    throw ConfigError("LSSC needs dims >= 1 and intervals >= 2");
  }
  if (thresholds.size() != size_t{dims} * (intervals - 1)) {
    throw ConfigError("LSSC needs intervals-1 thresholds per dimension");
  }
  for (unsigned d = 0; d < dims; ++d) {
    for (unsigned i = 1; i + 1 < intervals; ++i) {
      if (!(threshold(d, i - 1) < threshold(d, i))) {
        throw ConfigError("LSSC thresholds must be strictly increasing");
      }
    }
  }
}

LsscConfig LsscConfig::standard_normal(unsigned dims, unsigned intervals) {
  if (intervals < 2) throw ConfigError("LSSC needs intervals >= 2");
  LsscConfig cfg;
  cfg.dims = dims;
  cfg.intervals = intervals;
  cfg.thresholds.resize(size_t{dims} * (intervals - 1));
  for (unsigned i = 0; i + 1 < intervals; ++i) {
    const double t = normal_quantile(double(i + 1) / intervals);
    for (unsigned d = 0; d < dims; ++d) {
      cfg.thresholds[size_t{d} * (intervals - 1) + i] = t;
    }
  }
  cfg.validate();
  return cfg;
}

vault::FeatureSet encode_lssc(std::span<const double> values,
                              const LsscConfig& config) {
  config.validate();
  if (values.size() != config.dims) {
    throw ConfigError("embedding length does not match the codec dims");
  }
  std::vector<uint32_t> out;
  const unsigned bits = config.intervals - 1;
  for (unsigned d = 0; d < config.dims; ++d) {
    unsigned level = 0;
    while (level < bits && config.threshold(d, level) < values[d]) ++level;
    for (unsigned j = 0; j < level; ++j) out.push_back(bits * d + j);
  }
  return vault::FeatureSet(std::move(out));
}

vault::FeatureSet fuse(std::span<const vault::FeatureSet> sets, uint64_t capacity) {
  if (sets.empty()) throw ParameterError("fusion needs at least one set");
  const uint64_t n = sets.size();
  std::vector<uint32_t> out;
  size_t total = 0;
  for (const auto& s : sets) total += s.size();
  out.reserve(total);
  for (uint64_t i = 0; i < n; ++i) {
    for (uint32_t x : sets[i].elements) {
      const uint64_t fused = (i + 1) + n * uint64_t{x};
      if (fused >= capacity) {
        throw EncodingOverflowError("fused element exceeds the field capacity");
      }
      out.push_back(static_cast<uint32_t>(fused));
    }
  }
  std::sort(out.begin(), out.end());
  return vault::FeatureSet(std::move(out));  // ctor rejects duplicates
}

vault::FeatureSet clone_scale(const vault::FeatureSet& set, unsigned m,
                              uint64_t capacity) {
  if (m < 1) throw ParameterError("clone factor must be >= 1");
  if (m == 1) return set;
  std::vector<uint32_t> out;
  out.reserve(set.size() * m);
  for (uint32_t x : set.elements) {
    const uint64_t base = uint64_t{x} * m;
    if (base + m - 1 >= capacity) {
      throw EncodingOverflowError("cloned element exceeds the field capacity");
    }
    for (unsigned r = 0; r < m; ++r) out.push_back(static_cast<uint32_t>(base + r));
  }
  return vault::FeatureSet(std::move(out));
}

unsigned clone_factor(double own_avg_size, double target_avg_size) {
  if (own_avg_size <= 0) throw ParameterError("own average size must be positive");
  if (target_avg_size < own_avg_size) {
    throw ParameterError("size balancing only grows the smaller set");
  }
  return static_cast<unsigned>(std::ceil(target_avg_size / own_avg_size));
}

vault::FeatureSet balance_size_g(const vault::FeatureSet& set, double own_avg_size,
                                 double target_avg_size, uint64_t capacity) {
  return clone_scale(set, clone_factor(own_avg_size, target_avg_size), capacity);
}

void OverlapProfile::validate() const {
  if (nonmated_overlap < 0 || nonmated_overlap > mated_overlap ||
      mated_overlap > avg_size) {
    throw ConfigError("overlap profile must satisfy nonmated <= mated <= size");
  }
}

OverlapProfile estimate_profile(std::span<const LabeledPair> pairs) {
  double size_sum = 0;
  double mated_sum = 0, nonmated_sum = 0;
  size_t n_mated = 0, n_nonmated = 0;
  for (const LabeledPair& p : pairs) {
    size_sum += static_cast<double>(p.a.size() + p.b.size());
    const double ov = static_cast<double>(overlap(p.a, p.b));
    if (p.mated) {
      mated_sum += ov;
      ++n_mated;
    } else {
      nonmated_sum += ov;
      ++n_nonmated;
    }
  }
  if (n_mated == 0 || n_nonmated == 0) {
    throw InsufficientDataError("profile estimation needs both comparison classes");
  }
  OverlapProfile prof;
  prof.avg_size = size_sum / (2.0 * pairs.size());
  prof.mated_overlap = mated_sum / n_mated;
  prof.nonmated_overlap = nonmated_sum / n_nonmated;
  return prof;
}

double mean_relative_overlap(std::span<const LabeledPair> pairs, bool mated) {
  double sum = 0;
  size_t n = 0;
  for (const LabeledPair& p : pairs) {
    if (p.mated != mated) continue;
    const size_t denom = p.a.size() + p.b.size();
    if (denom == 0) continue;
    sum += 2.0 * static_cast<double>(overlap(p.a, p.b)) / denom;
    ++n;
  }
  if (n == 0) throw InsufficientDataError("no pairs of the requested class");
  return sum / n;
}

namespace {

FCalibration search_schedule(const std::vector<std::vector<LabeledPair>>& encoded,
                             double target) {
  FCalibration cal;
  cal.measured_nonmated.reserve(encoded.size());
  for (const auto& pairs : encoded) {
    cal.measured_nonmated.push_back(mean_relative_overlap(pairs, false));
    cal.measured_mated.push_back(mean_relative_overlap(pairs, true));
  }
  for (size_t i = 0; i < encoded.size(); ++i) {
    if (cal.measured_nonmated[i] >= target) {
      cal.reachable = true;
      cal.chosen_index = i;
      cal.achieved_nonmated = cal.measured_nonmated[i];
      return cal;
    }
  }
  cal.reachable = false;
  cal.chosen_index = 0;  // keep the current setting
  cal.achieved_nonmated = cal.measured_nonmated.empty() ? 0 : cal.measured_nonmated[0];
  return cal;
}

}  // namespace

FCalibration balance_overlap_f_minutiae(std::span<const MinutiaPair> corpus,
                                        const HexGridConfig& base,
                                        std::span<const double> spacing_schedule,
                                        double target_relative_overlap) {
  if (spacing_schedule.empty()) throw ConfigError("empty spacing schedule");
  std::vector<std::vector<LabeledPair>> encoded;
  for (double spacing : spacing_schedule) {
    HexGridConfig cfg = base;
    cfg.spacing = spacing;
    std::vector<LabeledPair> pairs;
    pairs.reserve(corpus.size());
    for (const MinutiaPair& p : corpus) {
      pairs.push_back(
          {quantize_minutiae(p.a, cfg), quantize_minutiae(p.b, cfg), p.mated});
    }
    encoded.push_back(std::move(pairs));
  }
  return search_schedule(encoded, target_relative_overlap);
}

LsscConfig lssc_from_corpus(std::span<const EmbeddingPair> corpus, unsigned dims,
                            unsigned intervals) {
  if (corpus.empty()) throw InsufficientDataError("empty calibration corpus");
  LsscConfig cfg;
  cfg.dims = dims;
  cfg.intervals = intervals;
  cfg.thresholds.resize(size_t{dims} * (intervals - 1));
  std::vector<double> column;
  column.reserve(corpus.size() * 2);
  for (unsigned d = 0; d < dims; ++d) {
    column.clear();
    for (const EmbeddingPair& p : corpus) {
      if (p.a.size() != dims || p.b.size() != dims) {
        throw ConfigError("corpus embedding length does not match dims");
      }
      column.push_back(p.a[d]);
      column.push_back(p.b[d]);
    }
    std::sort(column.begin(), column.end());
    const size_t base = size_t{d} * (intervals - 1);
    for (unsigned i = 0; i + 1 < intervals; ++i) {
      size_t idx = column.size() * (i + 1) / intervals;
      if (idx >= column.size()) idx = column.size() - 1;
      double t = column[idx];
      // Force strict increase when the empirical quantiles collide.
      if (i > 0 && t <= cfg.thresholds[base + i - 1]) {
        t = std::nextafter(cfg.thresholds[base + i - 1],
                           std::numeric_limits<double>::max());
      }
      cfg.thresholds[base + i] = t;
    }
  }
  cfg.validate();
  return cfg;
}

FCalibration balance_overlap_f_embedding(std::span<const EmbeddingPair> corpus,
                                         unsigned dims,
                                         std::span<const unsigned> interval_schedule,
                                         double target_relative_overlap) {
  if (interval_schedule.empty()) throw ConfigError("empty interval schedule");
  std::vector<std::vector<LabeledPair>> encoded;
  for (unsigned intervals : interval_schedule) {
    const LsscConfig cfg = lssc_from_corpus(corpus, dims, intervals);
    std::vector<LabeledPair> pairs;
    pairs.reserve(corpus.size());
    for (const EmbeddingPair& p : corpus) {
      pairs.push_back({encode_lssc(p.a, cfg), encode_lssc(p.b, cfg), p.mated});
    }
    encoded.push_back(std::move(pairs));
  }
  return search_schedule(encoded, target_relative_overlap);
}

}  // namespace mbfv::codec
