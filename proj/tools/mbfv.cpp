// Command-line surface for the multi-biometric fuzzy vault: enrolment,
// verification, evaluation runs and codec calibration.
//
// Exit codes: 0 accept/success, 1 reject, 2 parse failure, 3 parameter or
// infeasible configuration, 4 codec fingerprint mismatch.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>

#include "mbfv/digest.hpp"
#include "mbfv/eval.hpp"
#include "mbfv/files.hpp"
#include "mbfv/harden.hpp"
#include "mbfv/vault.hpp"

namespace {

constexpr int kExitAccept = 0;
constexpr int kExitReject = 1;
constexpr int kExitParse = 2;
constexpr int kExitParameter = 3;
constexpr int kExitMismatch = 4;

using namespace mbfv;

std::unique_ptr<RandomSource> make_rng(const std::optional<uint64_t>& seed) {
  if (seed) return std::make_unique<SeededRandom>(*seed);
  return std::make_unique<OsRandom>();
}

std::vector<files::FeatureInput> load_inputs(const files::CodecConfig& config,
                                             const std::vector<std::string>& paths) {
  if (paths.size() != config.characteristics.size()) {
    throw FormatError("expected " + std::to_string(config.characteristics.size()) +
                      " inputs, one per configured characteristic, got " +
                      std::to_string(paths.size()));
  }
  std::vector<files::FeatureInput> inputs;
  inputs.reserve(paths.size());
  for (size_t i = 0; i < paths.size(); ++i) {
    inputs.push_back(
        files::load_feature_file(paths[i], config.characteristics[i].type));
  }
  return inputs;
}

vault::DecoderChoice decoder_from_flags(const std::string& name,
                                        unsigned multiplicity, unsigned max_list,
                                        uint64_t budget) {
  vault::DecoderChoice d;
  if (name == "bruteforce") {
    d.kind = vault::DecoderChoice::Kind::kBruteforce;
    d.bruteforce_budget = budget;
  } else if (name == "gs") {
    d.kind = vault::DecoderChoice::Kind::kGs;
    d.gs.multiplicity = multiplicity;
    d.gs.max_list = max_list;
  } else {
    throw ParameterError("unknown decoder: " + name);
  }
  return d;
}

int cmd_enroll(const std::string& config_path,
               const std::vector<std::string>& input_paths, uint32_t k,
               const std::string& out_path, const std::optional<std::string>& password,
               const std::optional<uint64_t>& seed, bool emit_secret) {
  const files::CodecConfig config = files::load_codec_config(config_path);
  const auto inputs = load_inputs(config, input_paths);
  const vault::FeatureSet fused = files::encode_and_fuse(config, inputs);

  const gf::Field field(config.field);
  auto rng = make_rng(seed);
  auto [record, secret] = vault::enroll(fused, k, field, *rng);
  record.codec_fingerprint = config.fingerprint();
  if (password) record = harden::seal(record, *password, *rng);

  files::write_binary(out_path, vault::serialize(record));
  std::cout << "vault: " << out_path << "\n"
            << "t: " << record.t << " k: " << record.k
            << (record.sealed() ? " (sealed)" : "") << "\n"
            << "secret digest: " << hex_encode(record.secret_hash) << "\n";
  if (emit_secret) {
    std::string hex;
    for (uint32_t i = 0; i < secret.k; ++i) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%0*x", (field.degree() + 3) / 4,
                    secret.poly.coeff(i));
      hex += (i ? " " : "") + std::string(buf);
    }
    std::cout << "secret coefficients: " << hex << "\n";
  }
  return kExitAccept;
}

int cmd_verify(const std::string& config_path, const std::string& vault_path,
               const std::vector<std::string>& input_paths,
               const std::optional<std::string>& password,
               const vault::DecoderChoice& decoder) {
  const files::CodecConfig config = files::load_codec_config(config_path);
  vault::VaultRecord record = vault::parse(files::read_binary(vault_path));

  if (record.codec_fingerprint != config.fingerprint()) {
    std::cerr << "codec fingerprint mismatch: record was enrolled with a "
                 "different transform configuration\n";
    return kExitMismatch;
  }
  if (record.sealed()) {
    // A missing password behaves like a wrong one: the spurious polynomial
    // is rejected downstream by the hash check.
    record = harden::open(record, password.value_or(""));
  }

  const auto inputs = load_inputs(config, input_paths);
  const vault::FeatureSet probe = files::encode_and_fuse(config, inputs);
  const gf::Field field(config.field);
  const vault::VerifyOutcome outcome = vault::verify(record, field, probe, decoder);

  std::cout << "decode_ops: " << outcome.decode_ops << "\n";
  if (!outcome.reason.empty()) std::cout << "note: " << outcome.reason << "\n";
  if (outcome.accepted) {
    std::cout << "accepted\nrecovered secret digest: "
              << hex_encode(vault::hash_secret(*outcome.recovered)) << "\n";
    return kExitAccept;
  }
  std::cout << "rejected\n";
  return kExitReject;
}

int cmd_eval(const std::string& config_path, const std::string& out_dir) {
  const files::EvalFileConfig config = files::load_eval_config(config_path);
  std::filesystem::create_directories(out_dir);

  for (const files::FasFixture& fx : config.fixtures) {
    const auto completed = eval::extrapolate_series(fx.rows);
    files::write_text_file(out_dir + "/" + fx.name + ".fas.txt",
                           files::fas_series_text(fx, completed));
    nlohmann::json rows = nlohmann::json::array();
    for (size_t i = 0; i < completed.size(); ++i) {
      rows.push_back({{"k", completed[i].k},
                      {"fas_bits", completed[i].fas_bits.value()},
                      {"extrapolated", !fx.rows[i].fas_bits.has_value()}});
    }
    files::write_text_file(out_dir + "/" + fx.name + ".fas.json",
                           nlohmann::json{{"series", fx.name}, {"rows", rows}}.dump(2) + "\n");
    std::cout << "fas series '" << fx.name << "' written\n";
  }

  for (const eval::TrialConfig& system : config.systems) {
    const eval::TrialReport report = eval::run_trials(system);
    bool any_feasible = false;
    for (const auto& row : report.rows) any_feasible |= !row.infeasible;
    if (!any_feasible) {
      std::cerr << "system '" << system.system_name
                << "': every k is infeasible (first offending k = "
                << report.rows.front().k << ")\n";
      return kExitParameter;
    }
    const std::string base = out_dir + "/" + system.system_name;
    files::write_text_file(base + ".report.txt", files::report_text(report));
    files::write_text_file(base + ".report.json",
                           files::report_json(report).dump(2) + "\n");
    files::write_text_file(base + ".curve.txt", files::curve_text(report));
    std::cout << files::report_text(report);
  }
  return kExitAccept;
}

int cmd_calibrate(const std::string& config_path,
                  const std::vector<std::string>& corpus_paths,
                  const std::string& out_path, bool skip_f, size_t nonmated_cap) {
  files::CodecConfig config = files::load_codec_config(config_path);
  if (corpus_paths.size() != config.characteristics.size()) {
    throw ParameterError("expected one corpus per characteristic");
  }

  const size_t n = config.characteristics.size();
  std::vector<std::vector<files::CorpusSample>> corpora(n);
  for (size_t i = 0; i < n; ++i) {
    corpora[i] = files::load_corpus(corpus_paths[i], config.characteristics[i].type);
  }

  auto encode_pairs = [&](size_t i) {
    std::vector<codec::LabeledPair> pairs;
    const auto& samples = corpora[i];
    auto encode = [&](size_t s) {
      return files::encode_characteristic(config, i, samples[s].input);
    };
    for (auto [a, b] : files::mated_pairs(samples)) {
      pairs.push_back({encode(a), encode(b), true});
    }
    for (auto [a, b] : files::nonmated_pairs(samples, nonmated_cap)) {
      pairs.push_back({encode(a), encode(b), false});
    }
    return pairs;
  };

  // Step 0: measure the as-configured profiles.
  std::vector<codec::OverlapProfile> before(n);
  std::vector<double> rel_nonmated(n);
  for (size_t i = 0; i < n; ++i) {
    const auto pairs = encode_pairs(i);
    before[i] = codec::estimate_profile(pairs);
    rel_nonmated[i] = codec::mean_relative_overlap(pairs, false);
    std::cout << config.characteristics[i].name << ": size " << before[i].avg_size
              << ", mated " << before[i].mated_overlap << ", non-mated "
              << before[i].nonmated_overlap << " (rel "
              << rel_nonmated[i] << ")\n";
  }

  // Step 1 (f): raise lower non-mated relative overlaps toward the largest
  // one by searching each characteristic's declared coarseness schedule.
  if (!skip_f && n > 1) {
    const double target = *std::max_element(rel_nonmated.begin(), rel_nonmated.end());
    for (size_t i = 0; i < n; ++i) {
      auto& cc = config.characteristics[i];
      if (rel_nonmated[i] >= target) continue;
      if (cc.type == files::CharType::kMinutiae && !cc.f_knob.spacings.empty()) {
        std::vector<codec::MinutiaPair> raw;
        const auto& samples = corpora[i];
        for (auto [a, b] : files::mated_pairs(samples)) {
          raw.push_back({std::get<codec::MinutiaRecord>(samples[a].input),
                         std::get<codec::MinutiaRecord>(samples[b].input), true});
        }
        for (auto [a, b] : files::nonmated_pairs(samples, nonmated_cap)) {
          raw.push_back({std::get<codec::MinutiaRecord>(samples[a].input),
                         std::get<codec::MinutiaRecord>(samples[b].input), false});
        }
        const auto cal = codec::balance_overlap_f_minutiae(
            raw, cc.grid, cc.f_knob.spacings, target);
        if (cal.reachable) {
          cc.grid.spacing = cc.f_knob.spacings[cal.chosen_index];
          std::cout << cc.name << ": f chose spacing " << cc.grid.spacing
                    << " (non-mated rel " << cal.achieved_nonmated << ")\n";
        } else {
          std::cout << cc.name << ": warning: f target " << target
                    << " unreachable within the spacing schedule; keeping "
                    << cc.grid.spacing << " and balancing size only\n";
        }
      } else if (cc.type == files::CharType::kEmbedding &&
                 !cc.f_knob.intervals.empty()) {
        std::vector<codec::EmbeddingPair> raw;
        const auto& samples = corpora[i];
        for (auto [a, b] : files::mated_pairs(samples)) {
          raw.push_back({std::get<std::vector<double>>(samples[a].input),
                         std::get<std::vector<double>>(samples[b].input), true});
        }
        for (auto [a, b] : files::nonmated_pairs(samples, nonmated_cap)) {
          raw.push_back({std::get<std::vector<double>>(samples[a].input),
                         std::get<std::vector<double>>(samples[b].input), false});
        }
        const auto cal = codec::balance_overlap_f_embedding(
            raw, cc.lssc.dims, cc.f_knob.intervals, target);
        if (cal.reachable) {
          cc.lssc = codec::lssc_from_corpus(raw, cc.lssc.dims,
                                            cc.f_knob.intervals[cal.chosen_index]);
          std::cout << cc.name << ": f chose " << cc.lssc.intervals
                    << " intervals (non-mated rel " << cal.achieved_nonmated << ")\n";
        } else {
          std::cout << cc.name << ": warning: f target " << target
                    << " unreachable within the interval schedule; keeping "
                    << cc.lssc.intervals << " and balancing size only\n";
        }
      } else {
        std::cout << cc.name << ": no f knob declared; size balancing only\n";
      }
    }
  }

  // Step 2 (g): equalize group sizes with element cloning (exact on the
  // relative overlap, so it runs after f).
  std::vector<codec::OverlapProfile> after(n);
  for (size_t i = 0; i < n; ++i) after[i] = codec::estimate_profile(encode_pairs(i));
  std::map<std::string, double> group_size;
  for (size_t i = 0; i < n; ++i) {
    group_size[config.characteristics[i].group] += after[i].avg_size;
  }
  double target_size = 0;
  for (const auto& [_, sz] : group_size) target_size = std::max(target_size, sz);
  for (size_t i = 0; i < n; ++i) {
    auto& cc = config.characteristics[i];
    cc.clone_factor = codec::clone_factor(group_size.at(cc.group), target_size);
  }

  config.validate();
  files::save_codec_config(config, out_path);

  std::cout << "balanced config: " << out_path << "\n";
  for (size_t i = 0; i < n; ++i) {
    const auto& cc = config.characteristics[i];
    const auto prof = codec::estimate_profile(encode_pairs(i));
    std::cout << cc.name << " (clone x" << cc.clone_factor << "): size "
              << prof.avg_size << ", mated " << prof.mated_overlap
              << ", non-mated " << prof.nonmated_overlap << "\n";
  }
  return kExitAccept;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-biometric fuzzy vault"};
  app.require_subcommand(1);

  std::string config_path, vault_path, out_path = "vault.mbfv", out_dir = "eval-out";
  std::vector<std::string> inputs, corpora;
  uint32_t k = 0;
  std::optional<std::string> password;
  std::optional<uint64_t> seed;
  bool emit_secret = false, skip_f = false;
  std::string decoder_name = "gs";
  unsigned multiplicity = 1, max_list = 32;
  uint64_t budget = 1'000'000;
  size_t nonmated_cap = 20'000;

  CLI::App* enroll = app.add_subcommand("enroll", "Lock feature inputs into a vault record");
  enroll->add_option("--config", config_path, "codec config JSON")->required();
  enroll->add_option("--input", inputs, "feature file per characteristic, in config order")
      ->required();
  enroll->add_option("--k", k, "secret polynomial degree bound")->required();
  enroll->add_option("--out", out_path, "output record path");
  enroll->add_option("--password", password, "seal the record under this password");
  enroll->add_option("--seed", seed, "deterministic randomness (evaluation only)");
  enroll->add_flag("--emit-secret", emit_secret, "print the bound key material");

  CLI::App* verify = app.add_subcommand("verify", "Verify probe inputs against a record");
  verify->add_option("--config", config_path, "codec config JSON")->required();
  verify->add_option("--vault", vault_path, "record path")->required();
  verify->add_option("--input", inputs, "probe feature file per characteristic")
      ->required();
  verify->add_option("--password", password, "password for sealed records");
  verify->add_option("--decoder", decoder_name, "gs | bruteforce");
  verify->add_option("--multiplicity", multiplicity, "GS interpolation multiplicity");
  verify->add_option("--max-list", max_list, "GS candidate list cap");
  verify->add_option("--budget", budget, "bruteforce subset budget");

  CLI::App* eval_cmd = app.add_subcommand("eval", "Run synthetic GMR/FMR/FAS trials");
  eval_cmd->add_option("--config", config_path, "trial config JSON")->required();
  eval_cmd->add_option("--out", out_dir, "output directory");

  CLI::App* calibrate = app.add_subcommand(
      "calibrate", "Measure overlap profiles and balance characteristics");
  calibrate->add_option("--config", config_path, "codec config JSON")->required();
  calibrate->add_option("--corpus", corpora, "corpus file per characteristic")
      ->required();
  calibrate->add_option("--out", out_path, "balanced config output path")->required();
  calibrate->add_flag("--skip-f", skip_f, "skip overlap balancing (size only)");
  calibrate->add_option("--nonmated-cap", nonmated_cap,
                        "cap on non-mated calibration pairs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (enroll->parsed()) {
      return cmd_enroll(config_path, inputs, k, out_path, password, seed, emit_secret);
    }
    if (verify->parsed()) {
      return cmd_verify(config_path, vault_path, inputs, password,
                        decoder_from_flags(decoder_name, multiplicity, max_list, budget));
    }
    if (eval_cmd->parsed()) return cmd_eval(config_path, out_dir);
    if (calibrate->parsed()) {
      return cmd_calibrate(config_path, corpora, out_path, skip_f, nonmated_cap);
    }
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParameter;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParameter;
  } catch (const EncodingOverflowError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParameter;
  } catch (const InsufficientDataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParameter;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitParse;
  }
  return kExitParse;
}
