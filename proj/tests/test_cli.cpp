// End-to-end tests of the command-line surface and its exit-code contract:
// 0 accept, 1 reject, 2 parse, 3 parameter, 4 codec fingerprint mismatch.
//
// Usage: test_cli <path-to-mbfv-binary>

#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "mbfv/files.hpp"
#include "mbfv/random.hpp"
#include "support/synth.hpp"

namespace {

std::string g_binary;
std::filesystem::path g_dir;

int run(const std::string& args) {
  const std::string cmd =
      g_binary + " " + args + " >" + (g_dir / "stdout.txt").string() + " 2>" +
      (g_dir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string last_stdout() {
  std::ifstream in(g_dir / "stdout.txt");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string path_of(const std::string& name) { return (g_dir / name).string(); }

void write_json(const std::string& name, const nlohmann::json& j) {
  std::ofstream out(g_dir / name);
  out << j.dump(2);
}

using mbfv::codec::MinutiaRecord;

nlohmann::json minutiae_json(const MinutiaRecord& rec) {
  nlohmann::json m = nlohmann::json::array();
  for (const auto& mm : rec.minutiae) {
    m.push_back({mm.x, mm.y, mm.angle, mm.quality});
  }
  return {{"minutiae", std::move(m)}, {"region", {rec.width, rec.height}}};
}

// Codec config: four fingers plus one 64-dim face embedding.
nlohmann::json demo_config() {
  nlohmann::json chars = nlohmann::json::array();
  for (int i = 1; i <= 4; ++i) {
    chars.push_back({{"name", "finger" + std::to_string(i)},
                     {"group", "fingerprints"},
                     {"type", "minutiae"},
                     {"grid",
                      {{"spacing", 25.0},
                       {"angle_quanta", 6},
                       {"region", {400.0, 500.0}},
                       {"t_max", 40}}}});
  }
  auto lssc = mbfv::codec::LsscConfig::standard_normal(64, 4);
  chars.push_back({{"name", "face"},
                   {"type", "embedding"},
                   {"lssc",
                    {{"dims", 64}, {"intervals", 4}, {"thresholds", lssc.thresholds}}}});
  return {{"field", {{"e", 16}, {"reduction", 0x1100B}}},
          {"characteristics", std::move(chars)}};
}

struct Subject {
  std::vector<MinutiaRecord> fingers_a, fingers_b;
  std::vector<double> face_a, face_b;
};

Subject make_subject(uint64_t seed) {
  using namespace mbfv::testsupport;
  mbfv::SeededRandom rng(seed);
  MinutiaCorpusParams params;
  EmbeddingCorpusParams eparams;
  eparams.dims = 64;
  const EmbeddingCorpus corpus = make_embedding_corpus(eparams, rng);
  Subject s;
  for (int i = 0; i < 4; ++i) {
    s.fingers_a.push_back(random_finger(params, rng));
    s.fingers_b.push_back(resample_finger(s.fingers_a.back(), params, rng));
  }
  s.face_a = random_subject(corpus, rng);
  s.face_b = resample_subject(corpus, s.face_a, rng);
  return s;
}

void write_inputs(const Subject& s, const std::string& prefix, bool second) {
  for (int i = 0; i < 4; ++i) {
    write_json(prefix + "_finger" + std::to_string(i + 1) + ".json",
               minutiae_json(second ? s.fingers_b[i] : s.fingers_a[i]));
  }
  write_json(prefix + "_face.json",
             {{"values", second ? s.face_b : s.face_a}});
}

std::string input_args(const std::string& prefix) {
  std::string args;
  for (int i = 1; i <= 4; ++i) {
    args += " --input " + path_of(prefix + "_finger" + std::to_string(i) + ".json");
  }
  return args + " --input " + path_of(prefix + "_face.json");
}

}  // namespace

TEST_CASE("enroll/verify round trip with fingerprint guard and hardening") {
  write_json("codec.json", demo_config());
  const Subject alice = make_subject(100);
  const Subject eve = make_subject(200);
  write_inputs(alice, "alice_ref", false);
  write_inputs(alice, "alice_probe", true);
  write_inputs(eve, "eve", false);

  // Paper-shaped parameters at demo scale: 4 fingers (t_max 40) plus a
  // 64-dimension face embedding, fused sets of ~250 elements.
  const std::string enroll_base = "enroll --config " + path_of("codec.json") +
                                  input_args("alice_ref") + " --k 40 --out " +
                                  path_of("alice.mbfv") + " --seed 9";
  CHECK(run(enroll_base + " --emit-secret") == 0);
  const std::string out = last_stdout();
  CHECK(out.find("secret digest:") != std::string::npos);
  CHECK(out.find("secret coefficients:") != std::string::npos);

  // Determinism under --seed: identical record bytes.
  CHECK(run("enroll --config " + path_of("codec.json") + input_args("alice_ref") +
            " --k 40 --out " + path_of("alice2.mbfv") + " --seed 9") == 0);
  CHECK(mbfv::files::read_binary(path_of("alice.mbfv")) ==
        mbfv::files::read_binary(path_of("alice2.mbfv")));

  const std::string verify_base = "verify --config " + path_of("codec.json") +
                                  " --vault " + path_of("alice.mbfv");
  CHECK(run(verify_base + input_args("alice_probe")) == 0);
  CHECK(last_stdout().find("recovered secret digest:") != std::string::npos);
  CHECK(run(verify_base + input_args("eve")) == 1);

  // Missing one of the N declared inputs: parse-level failure.
  CHECK(run("verify --config " + path_of("codec.json") + " --vault " +
            path_of("alice.mbfv") + " --input " + path_of("alice_probe_face.json")) ==
        2);

  // A different transform configuration must be refused.
  nlohmann::json other = demo_config();
  other["characteristics"][0]["grid"]["t_max"] = 30;
  write_json("codec_other.json", other);
  CHECK(run("verify --config " + path_of("codec_other.json") + " --vault " +
            path_of("alice.mbfv") + input_args("alice_probe")) == 4);

  // Password hardening: flags bit set, right/wrong/missing password flows.
  CHECK(run(enroll_base + " --password tops3cret") == 0);
  const auto sealed = mbfv::files::read_binary(path_of("alice.mbfv"));
  CHECK((sealed[5] & 0x01) == 0x01);
  CHECK(run(verify_base + input_args("alice_probe") + " --password tops3cret") == 0);
  CHECK(run(verify_base + input_args("alice_probe") + " --password wrong") == 1);
  CHECK(run(verify_base + input_args("alice_probe")) == 1);
}

TEST_CASE("corrupted records never produce a false accept") {
  write_json("codec1.json",
             {{"field", {{"e", 16}, {"reduction", 0x1100B}}},
              {"characteristics",
               {{{"name", "ints"}, {"type", "set"}, {"max_element", 4000}}}}});
  mbfv::SeededRandom rng(4242);
  std::vector<uint32_t> ref_elems, probe_elems;
  for (int i = 0; i < 64; ++i) ref_elems.push_back(static_cast<uint32_t>(rng.uniform(4000)));
  for (int i = 0; i < 64; ++i) probe_elems.push_back(static_cast<uint32_t>(rng.uniform(4000)));
  write_json("ref.json", {{"elements", ref_elems}});
  write_json("probe.json", {{"elements", probe_elems}});  // non-mated probe

  CHECK(run("enroll --config " + path_of("codec1.json") + " --input " +
            path_of("ref.json") + " --k 12 --out " + path_of("set.mbfv") +
            " --seed 5") == 0);
  const auto bytes = mbfv::files::read_binary(path_of("set.mbfv"));

  for (int trial = 0; trial < 40; ++trial) {
    auto flipped = bytes;
    const size_t bit = rng.uniform(flipped.size() * 8);
    flipped[bit / 8] ^= uint8_t(1u << (bit % 8));
    mbfv::files::write_binary(path_of("corrupt.mbfv"), flipped);
    const int code = run("verify --config " + path_of("codec1.json") + " --vault " +
                         path_of("corrupt.mbfv") + " --input " + path_of("probe.json"));
    CHECK(code != 0);  // reject, parse failure, parameter error, or mismatch
    CHECK(code != -1);
  }
}

TEST_CASE("eval command: fixtures and trial systems") {
  const nlohmann::json eval_cfg{
      {"seed", 77},
      {"scale", 10.0},
      {"n_mated", 40},
      {"n_nonmated", 40},
      {"decoder", {{"type", "gs"}, {"multiplicity", 1}, {"max_list", 8}}},
      {"systems",
       {{{"name", "toy-face"},
         {"k_values", {26, 30}},
         {"profiles",
          {{{"name", "face"},
            {"avg_size", 769.83},
            {"mated_overlap", 615.04},
            {"nonmated_overlap", 449.40},
            {"universe", 16384}}}}}}},
      {"fas_fixtures",
       {{{"name", "fingers"},
         {"rows", {{26, 22.02}, {28, 23.61}, {30, nullptr}}}}}}};
  write_json("eval.json", eval_cfg);
  CHECK(run("eval --config " + path_of("eval.json") + " --out " +
            path_of("evalout")) == 0);

  const auto fas =
      mbfv::files::load_json(path_of("evalout") + "/fingers.fas.json");
  CHECK(fas["rows"][2]["k"] == 30);
  CHECK(fas["rows"][2]["fas_bits"].get<double>() == doctest::Approx(25.20));
  CHECK(fas["rows"][2]["extrapolated"] == true);

  const auto rep =
      mbfv::files::load_json(path_of("evalout") + "/toy-face.report.json");
  CHECK(rep["rows"].size() == 2);
  CHECK(std::filesystem::exists(path_of("evalout") + "/toy-face.curve.txt"));

  // Identical config, identical bytes.
  CHECK(run("eval --config " + path_of("eval.json") + " --out " +
            path_of("evalout2")) == 0);
  CHECK(mbfv::files::read_binary(path_of("evalout") + "/toy-face.report.json") ==
        mbfv::files::read_binary(path_of("evalout2") + "/toy-face.report.json"));

  // Every k infeasible: parameter exit with the offending row reported.
  nlohmann::json bad = eval_cfg;
  bad["systems"][0]["k_values"] = {500, 600};
  bad.erase("fas_fixtures");
  write_json("eval_bad.json", bad);
  CHECK(run("eval --config " + path_of("eval_bad.json") + " --out " +
            path_of("evalout3")) == 3);
}

TEST_CASE("calibrate balances group sizes and writes the config") {
  using namespace mbfv::testsupport;
  // One minutiae characteristic and one embedding characteristic; the
  // embedding side is much larger, so the minutiae side gets cloned.
  auto lssc = mbfv::codec::LsscConfig::standard_normal(64, 4);
  const nlohmann::json cfg{
      {"field", {{"e", 16}, {"reduction", 0x1100B}}},
      {"characteristics",
       {{{"name", "finger"},
         {"type", "minutiae"},
         {"grid",
          {{"spacing", 25.0},
           {"angle_quanta", 6},
           {"region", {400.0, 500.0}},
           {"t_max", 40}}},
         {"f_knob", {{"spacings", {25.0, 35.0, 50.0}}}}},
        {{"name", "face"},
         {"type", "embedding"},
         {"lssc",
          {{"dims", 64}, {"intervals", 4}, {"thresholds", lssc.thresholds}}}}}}};
  write_json("codec_cal.json", cfg);

  // Subject-labelled corpora: 8 subjects, two samples each.
  mbfv::SeededRandom rng(31);
  MinutiaCorpusParams mparams;
  EmbeddingCorpusParams eparams;
  eparams.dims = 64;
  const EmbeddingCorpus ecorpus = make_embedding_corpus(eparams, rng);
  nlohmann::json fsamples = nlohmann::json::array();
  nlohmann::json esamples = nlohmann::json::array();
  for (int s = 0; s < 8; ++s) {
    const std::string subject = "s" + std::to_string(s);
    const MinutiaRecord a = random_finger(mparams, rng);
    const MinutiaRecord b = resample_finger(a, mparams, rng);
    nlohmann::json ja = minutiae_json(a);
    ja["subject"] = subject;
    nlohmann::json jb = minutiae_json(b);
    jb["subject"] = subject;
    fsamples.push_back(std::move(ja));
    fsamples.push_back(std::move(jb));
    const auto ea = random_subject(ecorpus, rng);
    esamples.push_back({{"subject", subject}, {"values", ea}});
    esamples.push_back(
        {{"subject", subject}, {"values", resample_subject(ecorpus, ea, rng)}});
  }
  write_json("corpus_finger.json", {{"type", "minutiae"}, {"samples", fsamples}});
  write_json("corpus_face.json", {{"type", "embedding"}, {"samples", esamples}});

  CHECK(run("calibrate --config " + path_of("codec_cal.json") + " --corpus " +
            path_of("corpus_finger.json") + " --corpus " + path_of("corpus_face.json") +
            " --out " + path_of("codec_balanced.json") + " --skip-f") == 0);

  const auto balanced = mbfv::files::load_codec_config(path_of("codec_balanced.json"));
  // Embedding sets average 64 * 1.5 = 96 elements; minutiae cap at 40.
  CHECK(balanced.characteristics[0].clone_factor >= 2);
  CHECK(balanced.characteristics[1].clone_factor == 1);

  // With f enabled the spacing knob is consulted; the run must still succeed.
  CHECK(run("calibrate --config " + path_of("codec_cal.json") + " --corpus " +
            path_of("corpus_finger.json") + " --corpus " + path_of("corpus_face.json") +
            " --out " + path_of("codec_balanced_f.json")) == 0);
  CHECK(std::filesystem::exists(path_of("codec_balanced_f.json")));
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli <mbfv-binary>\n");
    return 1;
  }
  g_binary = argv[1];
  g_dir = std::filesystem::temp_directory_path() / "mbfv_cli_test";
  std::filesystem::remove_all(g_dir);
  std::filesystem::create_directories(g_dir);

  doctest::Context ctx;
  ctx.applyCommandLine(argc - 1, argv + 1);
  const int rc = ctx.run();
  std::filesystem::remove_all(g_dir);
  return rc;
}
