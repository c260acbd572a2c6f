#include "mbfv/files.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mbfv/digest.hpp"

namespace mbfv::files {

using nlohmann::json;

namespace {

json require(const json& j, const char* key) {
  if (!j.contains(key)) {
    throw FormatError(std::string("missing key '") + key + "'");
  }
  return j.at(key);
}

CharType char_type_from(const std::string& s) {
  if (s == "minutiae") return CharType::kMinutiae;
  if (s == "embedding") return CharType::kEmbedding;
  if (s == "set") return CharType::kSet;
  throw FormatError("unknown characteristic type: " + s);
}

std::string char_type_name(CharType t) {
  switch (t) {
    case CharType::kMinutiae: return "minutiae";
    case CharType::kEmbedding: return "embedding";
    case CharType::kSet: return "set";
  }
  throw FormatError("bad characteristic type");
}

codec::MinutiaRecord parse_minutiae(const json& j) {
  codec::MinutiaRecord rec;
  const json region = require(j, "region");
  if (!region.is_array() || region.size() != 2) {
    throw FormatError("minutiae region must be [width, height]");
  }
  rec.width = region[0].get<double>();
  rec.height = region[1].get<double>();
  for (const json& m : require(j, "minutiae")) {
    if (!m.is_array() || m.size() != 4) {
      throw FormatError("minutia must be [x, y, angle, quality]");
    }
    rec.minutiae.push_back({m[0].get<double>(), m[1].get<double>(),
                            m[2].get<double>(), m[3].get<double>()});
  }
  return rec;
}

vault::FeatureSet parse_set(const json& j) {
  std::vector<uint32_t> v;
  for (const json& e : require(j, "elements")) v.push_back(e.get<uint32_t>());
  return vault::FeatureSet::from_values(std::move(v));
}

}  // namespace

FeatureInput parse_feature(const json& j, CharType type) {
  switch (type) {
    case CharType::kMinutiae:
      return parse_minutiae(j);
    case CharType::kEmbedding:
      return require(j, "values").get<std::vector<double>>();
    case CharType::kSet:
      return parse_set(j);
  }
  throw FormatError("bad characteristic type");
}

FeatureInput load_feature_file(const std::string& path, CharType type) {
  return parse_feature(load_json(path), type);
}

uint32_t CharacteristicConfig::max_raw_code() const {
  switch (type) {
    case CharType::kMinutiae: return codec::max_minutia_code(grid);
    case CharType::kEmbedding: return codec::max_lssc_code(lssc);
    case CharType::kSet: return max_element;
  }
  throw FormatError("bad characteristic type");
}

void CodecConfig::validate() const {
  if (characteristics.empty()) {
    throw ConfigError("codec config needs at least one characteristic");
  }
  const uint64_t field_size = uint64_t{1} << field.e;
  const uint64_t n = characteristics.size();
  for (size_t i = 0; i < characteristics.size(); ++i) {
    const auto& c = characteristics[i];
    if (c.clone_factor < 1) throw ConfigError("clone factor must be >= 1");
    if (c.type == CharType::kEmbedding) c.lssc.validate();
    const uint64_t max_cloned =
        uint64_t{c.max_raw_code()} * c.clone_factor + (c.clone_factor - 1);
    const uint64_t max_fused = (i + 1) + n * max_cloned;
    if (max_fused >= field_size) {
      throw ConfigError("characteristic '" + c.name +
                        "' can exceed the field capacity after fusion");
    }
  }
}

uint64_t CodecConfig::fingerprint() const {
  const std::string canonical = codec_config_json(*this).dump();
  const auto digest = sha256(std::span<const uint8_t>(
      reinterpret_cast<const uint8_t*>(canonical.data()), canonical.size()));
  uint64_t fp = 0;
  for (int i = 0; i < 8; ++i) fp |= uint64_t{digest[i]} << (8 * i);
  return fp;
}

CodecConfig parse_codec_config(const json& j) {
  CodecConfig cfg;
  const json field = require(j, "field");
  cfg.field.e = require(field, "e").get<uint16_t>();
  cfg.field.reduction = require(field, "reduction").get<uint64_t>();
  for (const json& c : require(j, "characteristics")) {
    CharacteristicConfig cc;
    cc.name = require(c, "name").get<std::string>();
    cc.group = c.value("group", cc.name);
    cc.type = char_type_from(require(c, "type").get<std::string>());
    cc.clone_factor = c.value("clone_factor", 1u);
    if (cc.type == CharType::kMinutiae) {
      const json g = require(c, "grid");
      cc.grid.spacing = require(g, "spacing").get<double>();
      cc.grid.angle_quanta = require(g, "angle_quanta").get<unsigned>();
      const json region = require(g, "region");
      cc.grid.width = region[0].get<double>();
      cc.grid.height = region[1].get<double>();
      cc.grid.t_max = require(g, "t_max").get<unsigned>();
      if (c.contains("f_knob")) {
        cc.f_knob.spacings =
            c.at("f_knob").value("spacings", std::vector<double>{});
      }
    } else if (cc.type == CharType::kEmbedding) {
      const json l = require(c, "lssc");
      cc.lssc.dims = require(l, "dims").get<unsigned>();
      cc.lssc.intervals = l.value("intervals", 4u);
      cc.lssc.thresholds = require(l, "thresholds").get<std::vector<double>>();
      if (c.contains("f_knob")) {
        cc.f_knob.intervals =
            c.at("f_knob").value("intervals", std::vector<unsigned>{});
      }
    } else {
      cc.max_element = require(c, "max_element").get<uint32_t>();
    }
    cfg.characteristics.push_back(std::move(cc));
  }
  cfg.validate();
  return cfg;
}

json codec_config_json(const CodecConfig& config) {
  json chars = json::array();
  for (const auto& c : config.characteristics) {
    json jc{{"name", c.name},
            {"group", c.group},
            {"type", char_type_name(c.type)},
            {"clone_factor", c.clone_factor}};
    if (c.type == CharType::kMinutiae) {
      jc["grid"] = {{"spacing", c.grid.spacing},
                    {"angle_quanta", c.grid.angle_quanta},
                    {"region", {c.grid.width, c.grid.height}},
                    {"t_max", c.grid.t_max}};
      if (!c.f_knob.spacings.empty()) {
        jc["f_knob"] = {{"spacings", c.f_knob.spacings}};
      }
    } else if (c.type == CharType::kEmbedding) {
      jc["lssc"] = {{"dims", c.lssc.dims},
                    {"intervals", c.lssc.intervals},
                    {"thresholds", c.lssc.thresholds}};
      if (!c.f_knob.intervals.empty()) {
        jc["f_knob"] = {{"intervals", c.f_knob.intervals}};
      }
    } else {
      jc["max_element"] = c.max_element;
    }
    chars.push_back(std::move(jc));
  }
  return json{{"field", {{"e", config.field.e}, {"reduction", config.field.reduction}}},
              {"characteristics", std::move(chars)}};
}

CodecConfig load_codec_config(const std::string& path) {
  return parse_codec_config(load_json(path));
}

void save_codec_config(const CodecConfig& config, const std::string& path) {
  write_text_file(path, codec_config_json(config).dump(2) + "\n");
}

vault::FeatureSet encode_characteristic(const CodecConfig& config, size_t index,
                                        const FeatureInput& input) {
  const auto& cc = config.characteristics.at(index);
  vault::FeatureSet raw;
  switch (cc.type) {
    case CharType::kMinutiae:
      raw = codec::quantize_minutiae(std::get<codec::MinutiaRecord>(input), cc.grid);
      break;
    case CharType::kEmbedding:
      raw = codec::encode_lssc(std::get<std::vector<double>>(input), cc.lssc);
      break;
    case CharType::kSet: {
      raw = std::get<vault::FeatureSet>(input);
      for (uint32_t v : raw.elements) {
        if (v > cc.max_element) {
          throw EncodingOverflowError("set element exceeds the declared bound");
        }
      }
      break;
    }
  }
  // Largest raw value admissible for this slot after cloning and fusion.
  const uint64_t field_size = uint64_t{1} << config.field.e;
  const uint64_t n = config.characteristics.size();
  const uint64_t cloned_cap = (field_size - 1 - (index + 1)) / n + 1;
  return codec::clone_scale(raw, cc.clone_factor, cloned_cap);
}

vault::FeatureSet encode_and_fuse(const CodecConfig& config,
                                  std::span<const FeatureInput> inputs) {
  if (inputs.size() != config.characteristics.size()) {
    throw ParameterError("expected one input per configured characteristic");
  }
  std::vector<vault::FeatureSet> sets;
  sets.reserve(inputs.size());
  for (size_t i = 0; i < inputs.size(); ++i) {
    sets.push_back(encode_characteristic(config, i, inputs[i]));
  }
  return codec::fuse(sets, uint64_t{1} << config.field.e);
}

std::vector<CorpusSample> load_corpus(const std::string& path, CharType type) {
  const json j = load_json(path);
  const std::string declared = require(j, "type").get<std::string>();
  if (char_type_from(declared) != type) {
    throw FormatError("corpus type '" + declared + "' does not match the config");
  }
  std::vector<CorpusSample> out;
  for (const json& s : require(j, "samples")) {
    out.push_back({require(s, "subject").get<std::string>(), parse_feature(s, type)});
  }
  return out;
}

std::vector<std::pair<size_t, size_t>> mated_pairs(
    std::span<const CorpusSample> corpus) {
  std::vector<std::pair<size_t, size_t>> out;
  for (size_t i = 0; i < corpus.size(); ++i) {
    for (size_t j = i + 1; j < corpus.size(); ++j) {
      if (corpus[i].subject == corpus[j].subject) out.emplace_back(i, j);
    }
  }
  return out;
}

std::vector<std::pair<size_t, size_t>> nonmated_pairs(
    std::span<const CorpusSample> corpus, size_t cap) {
  std::vector<std::pair<size_t, size_t>> out;
  for (size_t i = 0; i < corpus.size() && out.size() < cap; ++i) {
    for (size_t j = i + 1; j < corpus.size() && out.size() < cap; ++j) {
      if (corpus[i].subject != corpus[j].subject) out.emplace_back(i, j);
    }
  }
  return out;
}

EvalFileConfig parse_eval_config(const json& j) {
  EvalFileConfig out;
  const uint64_t seed = j.value("seed", uint64_t{1});
  const double scale = j.value("scale", 1.0);
  const uint32_t n_mated = j.value("n_mated", 1000u);
  const uint32_t n_nonmated = j.value("n_nonmated", 1000u);
  gf::FieldSpec field = gf::FieldSpec::standard(16);
  if (j.contains("field")) {
    field.e = require(j.at("field"), "e").get<uint16_t>();
    field.reduction = require(j.at("field"), "reduction").get<uint64_t>();
  }
  vault::DecoderChoice decoder;
  if (j.contains("decoder")) {
    const json d = j.at("decoder");
    const std::string type = d.value("type", "gs");
    if (type == "bruteforce") {
      decoder.kind = vault::DecoderChoice::Kind::kBruteforce;
      decoder.bruteforce_budget = d.value("budget", uint64_t{1000000});
    } else if (type == "gs") {
      decoder.kind = vault::DecoderChoice::Kind::kGs;
      decoder.gs.multiplicity = d.value("multiplicity", 1u);
      decoder.gs.max_list = d.value("max_list", 32u);
    } else {
      throw FormatError("unknown decoder type: " + type);
    }
  }

  for (const json& s : j.value("systems", json::array())) {
    eval::TrialConfig tc;
    tc.system_name = require(s, "name").get<std::string>();
    tc.k_values = require(s, "k_values").get<std::vector<uint32_t>>();
    tc.seed = seed;
    tc.scale = scale;
    tc.n_mated = n_mated;
    tc.n_nonmated = n_nonmated;
    tc.field = field;
    tc.decoder = decoder;
    for (const json& p : require(s, "profiles")) {
      eval::ProfileSpec ps;
      ps.name = require(p, "name").get<std::string>();
      ps.profile.avg_size = require(p, "avg_size").get<double>();
      ps.profile.mated_overlap = require(p, "mated_overlap").get<double>();
      ps.profile.nonmated_overlap = require(p, "nonmated_overlap").get<double>();
      ps.universe = p.value("universe", uint64_t{16384});
      tc.profiles.push_back(std::move(ps));
    }
    out.systems.push_back(std::move(tc));
  }

  for (const json& f : j.value("fas_fixtures", json::array())) {
    FasFixture fx;
    fx.name = require(f, "name").get<std::string>();
    for (const json& r : require(f, "rows")) {
      if (!r.is_array() || r.size() != 2) {
        throw FormatError("fas fixture rows must be [k, fas-or-null]");
      }
      eval::FasPoint pt;
      pt.k = r[0].get<uint32_t>();
      if (!r[1].is_null()) pt.fas_bits = r[1].get<double>();
      fx.rows.push_back(pt);
    }
    out.fixtures.push_back(std::move(fx));
  }

  if (out.systems.empty() && out.fixtures.empty()) {
    throw ConfigError("eval config has neither systems nor fas fixtures");
  }
  return out;
}

EvalFileConfig load_eval_config(const std::string& path) {
  return parse_eval_config(load_json(path));
}

std::string report_text(const eval::TrialReport& report) {
  std::ostringstream os;
  os << "# system: " << report.system_name << " (scale " << report.scale
     << ", seed " << report.seed << ", " << report.decoder_desc << ")\n";
  os << "#     k     GMR(%)       FMR(%)   FAS(bits)      avg_ops   median_ops\n";
  char buf[160];
  for (const auto& row : report.rows) {
    if (row.infeasible) {
      std::snprintf(buf, sizeof buf, "%7u   infeasible\n", row.k);
      os << buf;
      continue;
    }
    std::string fas = "      n/a";
    if (row.fas_bits) {
      std::snprintf(buf, sizeof buf, "%8.2f%s", *row.fas_bits,
                    row.extrapolated ? "*" : " ");
      fas = buf;
    }
    std::snprintf(buf, sizeof buf, "%7u   %8.2f   %10.6f   %s   %10.1f   %10.1f\n",
                  row.k, row.gmr_pct, row.fmr_pct, fas.c_str(), row.avg_ops,
                  row.median_ops);
    os << buf;
  }
  os << "# * FAS extrapolated (no false matches observed at this k)\n";
  os << "# ops unit: one Lagrange interpolation of k points\n";
  return os.str();
}

nlohmann::json report_json(const eval::TrialReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    json row{{"k", r.k}, {"infeasible", r.infeasible}};
    if (!r.infeasible) {
      row["gmr_pct"] = r.gmr_pct;
      row["fmr_pct"] = r.fmr_pct;
      row["fas_bits"] = r.fas_bits ? json(*r.fas_bits) : json(nullptr);
      row["extrapolated"] = r.extrapolated;
      row["avg_ops"] = r.avg_ops;
      row["median_ops"] = r.median_ops;
      row["ops_unit_mults"] = r.ops_unit_mults;
      row["mated_accepts"] = r.mated_accepts;
      row["nonmated_accepts"] = r.nonmated_accepts;
      row["enroll_failures"] = r.enroll_failures;
    }
    rows.push_back(std::move(row));
  }
  return json{{"system", report.system_name},
              {"seed", report.seed},
              {"scale", report.scale},
              {"decoder", report.decoder_desc},
              {"rows", std::move(rows)}};
}

std::string curve_text(const eval::TrialReport& report) {
  std::ostringstream os;
  os << "# gmr_pct fas_bits (" << report.system_name << ")\n";
  for (const auto& [gmr, fas] : eval::gmr_fas_curve(report)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f %.4f\n", gmr, fas);
    os << buf;
  }
  return os.str();
}

std::string fas_series_text(const FasFixture& fixture,
                            const std::vector<eval::FasPoint>& completed) {
  std::ostringstream os;
  os << "# fas series: " << fixture.name << "\n#     k   FAS(bits)\n";
  for (size_t i = 0; i < completed.size(); ++i) {
    char buf[64];
    const bool extrapolated = !fixture.rows[i].fas_bits.has_value();
    std::snprintf(buf, sizeof buf, "%7u   %8.2f%s\n", completed[i].k,
                  completed[i].fas_bits.value_or(0.0), extrapolated ? "*" : "");
    os << buf;
  }
  os << "# * extrapolated\n";
  return os.str();
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open file: " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw FormatError("invalid JSON in " + path);
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot write file: " + path);
  out << content;
}

std::vector<uint8_t> read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open file: " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_binary(const std::string& path, std::span<const uint8_t> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write file: " + path);
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
}

}  // namespace mbfv::files
