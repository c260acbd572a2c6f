#ifndef MBFV_FILES_HPP
#define MBFV_FILES_HPP

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "mbfv/codec.hpp"
#include "mbfv/eval.hpp"
#include "mbfv/vault.hpp"

namespace mbfv::files {

// --- feature inputs -----------------------------------------------------
// Line formats (JSON documents):
//   minutiae:  {"minutiae": [[x, y, angle, quality], ...], "region": [w, h]}
//   embedding: {"values": [f1, ..., fD]}
//   set:       {"elements": [ints]}

enum class CharType { kMinutiae, kEmbedding, kSet };

using FeatureInput =
    std::variant<codec::MinutiaRecord, std::vector<double>, vault::FeatureSet>;

FeatureInput parse_feature(const nlohmann::json& j, CharType type);
FeatureInput load_feature_file(const std::string& path, CharType type);

// --- codec configuration -------------------------------------------------

// Coarseness schedule for the overlap-balancing search; entry 0 is the
// operating setting.
struct FKnob {
  std::vector<double> spacings;    // minutiae
  std::vector<unsigned> intervals; // embeddings
};

struct CharacteristicConfig {
  std::string name;
  std::string group;  // size-balancing group; defaults to the name
  CharType type = CharType::kSet;
  codec::HexGridConfig grid;  // minutiae
  codec::LsscConfig lssc;     // embedding
  uint32_t max_element = 0;   // set passthrough: declared element bound
  unsigned clone_factor = 1;  // g
  FKnob f_knob;

  uint32_t max_raw_code() const;  // before cloning
};

struct CodecConfig {
  gf::FieldSpec field = gf::FieldSpec::standard(16);
  std::vector<CharacteristicConfig> characteristics;

  void validate() const;  // per-characteristic fused capacity check
  // SHA-256 of the canonical JSON form, first 8 bytes little-endian;
  // stored in records so verification provably uses the same transforms.
  uint64_t fingerprint() const;
};

CodecConfig parse_codec_config(const nlohmann::json& j);
nlohmann::json codec_config_json(const CodecConfig& config);
CodecConfig load_codec_config(const std::string& path);
void save_codec_config(const CodecConfig& config, const std::string& path);

// Quantize one characteristic, apply its clone factor, check capacity.
vault::FeatureSet encode_characteristic(const CodecConfig& config, size_t index,
                                        const FeatureInput& input);
// Full pipeline: per-characteristic encoding, cloning, index-attached fusion.
vault::FeatureSet encode_and_fuse(const CodecConfig& config,
                                  std::span<const FeatureInput> inputs);

// --- calibration corpora --------------------------------------------------
// {"type": "minutiae", "samples": [{"subject": "s01", ...feature fields}]}

struct CorpusSample {
  std::string subject;
  FeatureInput input;
};
std::vector<CorpusSample> load_corpus(const std::string& path, CharType type);

// Mated pairs from same-subject samples, non-mated from cross-subject ones
// (deterministic order, capped).
std::vector<std::pair<size_t, size_t>> mated_pairs(
    std::span<const CorpusSample> corpus);
std::vector<std::pair<size_t, size_t>> nonmated_pairs(
    std::span<const CorpusSample> corpus, size_t cap);

// --- evaluation configs and reports ---------------------------------------

struct FasFixture {
  std::string name;
  std::vector<eval::FasPoint> rows;  // null FAS entries get extrapolated
};

struct EvalFileConfig {
  std::vector<eval::TrialConfig> systems;
  std::vector<FasFixture> fixtures;
};

EvalFileConfig parse_eval_config(const nlohmann::json& j);
EvalFileConfig load_eval_config(const std::string& path);

std::string report_text(const eval::TrialReport& report);
nlohmann::json report_json(const eval::TrialReport& report);
std::string curve_text(const eval::TrialReport& report);
std::string fas_series_text(const FasFixture& fixture,
                            const std::vector<eval::FasPoint>& completed);

// --- small helpers ----------------------------------------------------------

nlohmann::json load_json(const std::string& path);  // FormatError on failure
void write_text_file(const std::string& path, const std::string& content);
std::vector<uint8_t> read_binary(const std::string& path);
void write_binary(const std::string& path, std::span<const uint8_t> data);

}  // namespace mbfv::files

#endif
