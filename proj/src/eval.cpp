#include "mbfv/eval.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "mbfv/decoder.hpp"

namespace mbfv::eval {

void TrialConfig::validate() const {
  if (profiles.empty()) throw ConfigError("trial config needs at least one profile");
  if (k_values.empty()) throw ConfigError("trial config needs k values");
  if (n_mated < 1 || n_nonmated < 1) {
    throw ConfigError("trial counts must be >= 1");
  }
  if (scale < 1.0) throw ConfigError("scale must be >= 1");
  const uint64_t field_size = uint64_t{1} << field.e;
  const uint64_t n = profiles.size();
  for (const ProfileSpec& p : profiles) {
    p.profile.validate();
    if (p.universe < 2) throw ConfigError("profile universe too small");
    // Largest fused image must stay below 2^e.
    if (n > 1 && n + n * (p.universe - 1) >= field_size) {
      throw ConfigError("profile universe exceeds fused field capacity");
    }
    if (n == 1 && p.universe > field_size) {
      throw ConfigError("profile universe exceeds field capacity");
    }
  }
}

std::pair<vault::FeatureSet, vault::FeatureSet> make_pair_with_overlap(
    uint32_t size_a, uint32_t size_b, uint32_t ov, uint64_t universe,
    RandomSource& rng) {
  if (ov > std::min(size_a, size_b)) {
    throw ParameterError("overlap exceeds a set size");
  }
  const uint64_t needed = uint64_t{size_a} + size_b - ov;
  if (needed > universe) {
    throw ConfigError("universe too small for the requested set sizes");
  }
  std::unordered_set<uint32_t> used;
  used.reserve(needed * 2);
  auto draw = [&] {
    for (;;) {
      const auto v = static_cast<uint32_t>(rng.uniform(universe));
      if (used.insert(v).second) return v;
    }
  };
  std::vector<uint32_t> a, b;
  a.reserve(size_a);
  b.reserve(size_b);
  for (uint32_t i = 0; i < ov; ++i) {
    const uint32_t v = draw();
    a.push_back(v);
    b.push_back(v);
  }
  for (uint32_t i = ov; i < size_a; ++i) a.push_back(draw());
  for (uint32_t i = ov; i < size_b; ++i) b.push_back(draw());
  return {vault::FeatureSet::from_values(std::move(a)),
          vault::FeatureSet::from_values(std::move(b))};
}

std::pair<vault::FeatureSet, vault::FeatureSet> generate_pair(
    const codec::OverlapProfile& profile, bool mated, uint64_t universe,
    RandomSource& rng) {
  profile.validate();
  const double target = mated ? profile.mated_overlap : profile.nonmated_overlap;
  // An overlap expectation equal to the size expectation, combined with the
  // pointwise bound |A n B| <= min(|A|, |B|), forces identical draws.
  if (target >= profile.avg_size) {
    const auto n = static_cast<uint32_t>(
        std::max<uint64_t>(1, rng.poisson(profile.avg_size)));
    auto pair = make_pair_with_overlap(n, n, n, universe, rng);
    return pair;
  }
  const auto size_a = static_cast<uint32_t>(std::max<uint64_t>(1, rng.poisson(profile.avg_size)));
  const auto size_b = static_cast<uint32_t>(std::max<uint64_t>(1, rng.poisson(profile.avg_size)));
  auto ov = static_cast<uint32_t>(rng.poisson(target));
  ov = std::min(ov, std::min(size_a, size_b));
  return make_pair_with_overlap(size_a, size_b, ov, universe, rng);
}

double estimate_fas_bits(double t_ops, double fmr) {
  if (t_ops <= 0) throw ParameterError("mean attempt work must be positive");
  if (fmr <= 0) throw ParameterError("FMR = 0: use extrapolation instead");
  if (fmr >= 1) return std::log2(t_ops);  // degenerate floor: one attempt suffices
  const double n_ops = t_ops * std::log(0.5) / std::log1p(-fmr);
  return std::log2(n_ops);
}

std::vector<FasPoint> extrapolate_series(std::vector<FasPoint> series) {
  if (series.size() >= 2) {
    const int64_t step = int64_t{series[1].k} - series[0].k;
    if (step <= 0) throw ParameterError("series k values must increase");
    for (size_t i = 2; i < series.size(); ++i) {
      if (int64_t{series[i].k} - series[i - 1].k != step) {
        throw ParameterError("series k spacing must be uniform");
      }
    }
  }
  for (size_t i = 0; i < series.size(); ++i) {
    if (series[i].fas_bits) continue;
    // The last two estimable rows before this one define the line.
    std::optional<size_t> i1, i2;
    for (size_t j = 0; j < i; ++j) {
      if (series[j].fas_bits) {
        i1 = i2;
        i2 = j;
      }
    }
    if (!i1 || !i2) {
      throw InsufficientDataError(
          "extrapolation needs two estimable rows before a zero-FMR row");
    }
    const double slope = (*series[*i2].fas_bits - *series[*i1].fas_bits) /
                         static_cast<double>(*i2 - *i1);
    series[i].fas_bits = *series[*i2].fas_bits + slope * static_cast<double>(i - *i2);
  }
  return series;
}

void extrapolate_fas(std::vector<TrialRow>& rows) {
  std::vector<FasPoint> series;
  std::vector<size_t> index;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].infeasible) continue;
    series.push_back({rows[i].k, rows[i].fas_bits});
    index.push_back(i);
  }
  try {
    series = extrapolate_series(std::move(series));
  } catch (const InsufficientDataError&) {
    return;  // too few estimable rows; leave FAS unset on zero-FMR rows
  }
  for (size_t j = 0; j < series.size(); ++j) {
    rows[index[j]].fas_bits = series[j].fas_bits;
  }
}

namespace {

codec::OverlapProfile scaled(const codec::OverlapProfile& p, double scale) {
  return {p.avg_size / scale, p.mated_overlap / scale, p.nonmated_overlap / scale};
}

std::string describe(const vault::DecoderChoice& d) {
  if (d.kind == vault::DecoderChoice::Kind::kBruteforce) {
    return "bruteforce budget=" + std::to_string(d.bruteforce_budget);
  }
  return "gs multiplicity=" + std::to_string(d.gs.multiplicity) +
         " max_list=" + std::to_string(d.gs.max_list);
}

}  // namespace

TrialReport run_trials(const TrialConfig& config) {
  config.validate();
  const gf::Field field(config.field);
  const uint64_t field_size = field.size();
  const size_t n_profiles = config.profiles.size();

  std::vector<codec::OverlapProfile> profs;
  double fused_avg = 0;
  for (const ProfileSpec& p : config.profiles) {
    profs.push_back(scaled(p.profile, config.scale));
    fused_avg += profs.back().avg_size;
  }

  TrialReport report;
  report.system_name = config.system_name;
  report.seed = config.seed;
  report.scale = config.scale;
  report.decoder_desc = describe(config.decoder);

  for (uint32_t k : config.k_values) {
    TrialRow row;
    row.k = k;
    if (static_cast<double>(k) >= fused_avg) {
      row.infeasible = true;
      report.rows.push_back(row);
      continue;
    }
    row.ops_unit_mults = decode::lagrange_unit_cost(field, k);

    auto run_side = [&](bool mated, uint32_t n_trials, uint32_t& accepts,
                        std::vector<double>* ops_log) {
      for (uint32_t j = 0; j < n_trials; ++j) {
        SeededRandom rng(
            SeededRandom::derive(config.seed, k, mated ? 0 : 1, j));
        std::vector<vault::FeatureSet> as(n_profiles), bs(n_profiles);
        for (size_t i = 0; i < n_profiles; ++i) {
          std::tie(as[i], bs[i]) = generate_pair(
              profs[i], mated, config.profiles[i].universe, rng);
        }
        const vault::FeatureSet enrol_set =
            n_profiles == 1 ? std::move(as[0]) : codec::fuse(as, field_size);
        const vault::FeatureSet probe_set =
            n_profiles == 1 ? std::move(bs[0]) : codec::fuse(bs, field_size);
        if (enrol_set.size() <= k) {
          if (mated) ++row.enroll_failures;
          if (ops_log) ops_log->push_back(0.0);
          continue;
        }
        auto [record, secret] = vault::enroll(enrol_set, k, field, rng);
        const vault::VerifyOutcome outcome =
            vault::verify(record, field, probe_set, config.decoder);
        if (ops_log) ops_log->push_back(outcome.decode_ops);
        if (outcome.accepted) ++accepts;
      }
    };

    run_side(true, config.n_mated, row.mated_accepts, nullptr);
    std::vector<double> ops;
    ops.reserve(config.n_nonmated);
    run_side(false, config.n_nonmated, row.nonmated_accepts, &ops);

    row.gmr_pct = 100.0 * row.mated_accepts / config.n_mated;
    row.fmr_pct = 100.0 * row.nonmated_accepts / config.n_nonmated;
    if (!ops.empty()) {
      double sum = 0;
      for (double v : ops) sum += v;
      row.avg_ops = sum / static_cast<double>(ops.size());
      std::sort(ops.begin(), ops.end());
      row.median_ops = ops[ops.size() / 2];
    }
    if (row.fmr_pct > 0 && row.avg_ops > 0) {
      row.fas_bits = estimate_fas_bits(row.avg_ops, row.fmr_pct / 100.0);
    } else {
      row.extrapolated = true;  // zero-FMR rows get extrapolated FAS below
    }
    report.rows.push_back(row);
  }

  extrapolate_fas(report.rows);
  return report;
}

std::vector<std::pair<double, double>> gmr_fas_curve(const TrialReport& report) {
  std::vector<std::pair<double, double>> out;
  for (const TrialRow& row : report.rows) {
    if (row.infeasible || !row.fas_bits) continue;
    out.emplace_back(row.gmr_pct, *row.fas_bits);
  }
  return out;
}

}  // namespace mbfv::eval
