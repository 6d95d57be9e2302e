#include <becprobe.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

using namespace becprobe;
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

fs::path scratch_dir(const std::string& tag) {
  std::random_device rd;
  const auto p = fs::temp_directory_path() / ("becprobe_" + tag + "_" + std::to_string(rd()));
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json load_json(const fs::path& p) { return json::parse(slurp(p)); }

std::string config_error_field(const std::string& text) {
  try {
    parse_scenario_text(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<none>";
}

int cli(const std::string& args) {
  const std::string cmd = std::string("\"") + BECPROBE_CLI + "\" " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path write_config(const fs::path& dir, const std::string& name, const json& doc) {
  const auto p = dir / (name + ".json");
  std::ofstream(p) << doc.dump(2);
  return p;
}

}  // namespace

TEST(Config, DefaultsResolveAndEcho) {
  const auto sc = parse_scenario(json::object());
  EXPECT_EQ(sc.gas.dimension, 3);
  EXPECT_EQ(sc.probe.model, ProbeModel::double_well);
  EXPECT_TRUE(sc.resolved.contains("gas"));
  EXPECT_TRUE(sc.resolved["probe"].contains("separation_nm"));
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_EQ(config_error_field(R"({"gas": {"dimension": 4}})"), "gas.dimension");
  EXPECT_EQ(config_error_field(R"({"gas": {"temperature_nK": -1}})"), "gas.temperature_nK");
  EXPECT_EQ(config_error_field(R"({"gas": {"density_per_um_D": 0}})"), "gas.density_per_um_D");
  EXPECT_EQ(config_error_field(R"({"probe": {"model": "III"}})"), "probe.model");
  EXPECT_EQ(config_error_field(R"({"probe": {"model": "II", "separation_nm": 100}})"), "probe.separation_nm");
  EXPECT_EQ(config_error_field(R"({"time_grid": {"t_min": 5, "t_max": 1}})").substr(0, 9), "time_grid");
  EXPECT_EQ(config_error_field(R"({"ohmicity": {"points": 10}})"), "ohmicity.points");
  EXPECT_EQ(config_error_field(R"({"gas": {"dimension": "three"}})"), "gas.dimension");
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_EQ(config_error_field(R"({"gas": {"dimenson": 3}})"), "gas.dimenson");
  EXPECT_EQ(config_error_field(R"({"extra": 1})"), "extra");
}

TEST(Config, MalformedJson) { EXPECT_THROW(parse_scenario_text("{"), ConfigError); }

TEST(Runner, ZeroCouplingGivesZeroGamma) {
  const auto dir = scratch_dir("zero");
  const auto sc = parse_scenario_text(
      R"({"name": "zero", "probe": {"coupling_scattering_length_nm": 0}, "time_grid": {"points": 20}})");
  run_gamma(sc, {dir, 1, false});
  std::ifstream f(dir / "zero.csv");
  std::string line;
  std::size_t rows = 0;
  bool header = true;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      EXPECT_EQ(line, "t,gamma,gamma_prime,coherence,err");
      header = false;
      continue;
    }
    std::stringstream ss(line);
    std::string t, g, gp, c;
    std::getline(ss, t, ',');
    std::getline(ss, g, ',');
    std::getline(ss, gp, ',');
    std::getline(ss, c, ',');
    EXPECT_EQ(std::stod(g), 0.0);
    EXPECT_EQ(std::stod(gp), 0.0);
    EXPECT_EQ(std::stod(c), 1.0);
    ++rows;
  }
  EXPECT_EQ(rows, 20u);
  fs::remove_all(dir);
}

TEST(Runner, SidecarCarriesProvenance) {
  const auto dir = scratch_dir("meta");
  const auto sc = parse_scenario_text(R"({"name": "meta", "time_grid": {"points": 10}})");
  run_gamma(sc, {dir, 1, false});
  const auto j = load_json(dir / "meta.json");
  EXPECT_EQ(j["version"], version);
  EXPECT_EQ(j["kind"], "gamma");
  EXPECT_TRUE(j.contains("config"));
  EXPECT_TRUE(j.contains("unit_system"));
  EXPECT_FALSE(j["assumptions"].empty());
  EXPECT_EQ(j["results"]["failures"], 0);
  EXPECT_EQ(slurp(dir / "meta.csv").rfind("# becprobe", 0), 0u);
  fs::remove_all(dir);
}

TEST(Runner, RerunsAreByteIdentical) {
  const auto a = scratch_dir("rerun_a");
  const auto b = scratch_dir("rerun_b");
  const auto sc = parse_scenario_text(R"({"name": "same", "time_grid": {"points": 40}})");
  run_gamma(sc, {a, 1, false});
  run_gamma(sc, {b, 3, false});
  EXPECT_EQ(slurp(a / "same.csv"), slurp(b / "same.csv"));
  EXPECT_EQ(slurp(a / "same.json"), slurp(b / "same.json"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Runner, SpectrumSidecar) {
  const auto dir = scratch_dir("spectrum");
  const auto two = parse_scenario_text(R"({"name": "two", "gas": {"dimension": 3}, "probe": {"model": "II"}})");
  run_spectrum(two, {dir, 1, false});
  auto j = load_json(dir / "two.json");
  EXPECT_TRUE(j["results"]["roots"].empty());
  EXPECT_FALSE(j["results"]["ohmicity"].is_null());

  const auto one = parse_scenario(load_json(fs::path(SAMPLE_CONFIGS) / "spectrum_1d_model_I.json"));
  run_spectrum(one, {dir, 1, false});
  j = load_json(dir / (one.name + ".json"));
  const auto& roots = j["results"]["roots"];
  const auto& closed = j["results"]["roots_closed_form"];
  ASSERT_FALSE(roots.empty());
  ASSERT_EQ(roots.size(), closed.size());
  for (std::size_t i = 0; i < roots.size(); ++i) {
    EXPECT_NEAR(roots[i].get<double>() / closed[i].get<double>(), 1.0, 1e-6);
  }
  std::size_t low_rows = 0;
  std::ifstream f(dir / (one.name + "_low.csv"));
  for (std::string line; std::getline(f, line);) low_rows += (!line.empty() && line[0] != '#' && line[0] != 'o');
  EXPECT_GE(low_rows, 50u);
  fs::remove_all(dir);
}

TEST(Runner, CrossoverPresence) {
  const auto dir = scratch_dir("cross");
  auto presence = [&](const std::string& text) {
    const auto sc = parse_scenario_text(text);
    run_crossover(sc, {dir, 2, false});
    return load_json(dir / (sc.name + ".json"))["results"]["crossover"];
  };
  const auto one_d = presence(R"({"name": "c1", "gas": {"dimension": 1}, "probe": {"model": "II"},
                                  "scan": {"points": 8, "bisect": false}})");
  EXPECT_FALSE(one_d["present"].get<bool>());
  const auto three_d = presence(R"({"name": "c3", "gas": {"dimension": 3}, "probe": {"model": "I"},
                                    "scan": {"points": 8}})");
  ASSERT_TRUE(three_d["present"].get<bool>());
  EXPECT_GT(three_d["a_crit_nm"].get<double>(), three_d["scan_bracket_nm"][0].get<double>());
  EXPECT_LT(three_d["a_crit_nm"].get<double>(), three_d["scan_bracket_nm"][1].get<double>());
  const auto warm = presence(R"({"name": "cw", "gas": {"dimension": 3, "temperature_nK": 10},
                                 "probe": {"model": "II"}, "scan": {"points": 8, "bisect": false}})");
  EXPECT_FALSE(warm["present"].get<bool>());
  fs::remove_all(dir);
}

TEST(Runner, SweepResumeSkipsFinishedCells) {
  const auto dir = scratch_dir("sweep");
  const auto sc = parse_scenario_text(R"({"name": "sw", "time_grid": {"points": 10},
      "sweep": {"kind": "gamma", "models": ["I", "II"], "dimensions": [1, 3]}})");
  auto first = run_sweep(sc, {dir, 2, false});
  EXPECT_EQ(first.cells, 4u);
  EXPECT_EQ(first.skipped_cells, 0u);
  const auto before = slurp(dir / "sw_sweep.json");
  fs::remove(dir / "sw_modelII_D3_aB5.29177nm_T0nK.json");
  auto second = run_sweep(sc, {dir, 2, true});
  EXPECT_EQ(second.skipped_cells, 3u);
  EXPECT_EQ(slurp(dir / "sw_sweep.json"), before);
  for (const auto& c : load_json(dir / "sw_sweep.json")["cells"]) EXPECT_EQ(c["status"], "ok");
  fs::remove_all(dir);
}

TEST(Runner, SweepRejectsInfraredCell) {
  const auto sc = parse_scenario_text(R"({"gas": {"temperature_nK": 10}, "probe": {"model": "II"},
      "sweep": {"kind": "gamma", "dimensions": [1], "scattering_lengths_nm": [0]}})");
  EXPECT_THROW(expand_sweep(sc), ConfigError);
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch_dir("exit");
  const auto out = " --out \"" + dir.string() + "\"";
  EXPECT_EQ(cli("gamma --config \"" + write_config(dir, "good", {{"time_grid", {{"points", 10}}}}).string() + "\"" + out),
            0);
  EXPECT_EQ(cli("gamma --config \"" + write_config(dir, "bad", {{"gas", {{"dimension", 7}}}}).string() + "\"" + out), 1);
  const json ir = {{"gas", {{"dimension", 2}, {"scattering_length_nm", 0}, {"temperature_nK", 5}}},
                   {"probe", {{"model", "II"}}}};
  EXPECT_EQ(cli("gamma --config \"" + write_config(dir, "ir", ir).string() + "\"" + out), 1);
  const json starved = {{"time_grid", {{"points", 10}}},
                        {"quadrature", {{"max_evaluations", 15}, {"rel_tol", 1e-15}, {"abs_tol", 1e-300}}}};
  EXPECT_EQ(cli("gamma --config \"" + write_config(dir, "starved", starved).string() + "\"" + out), 2);
  fs::remove_all(dir);
}

TEST(Cli, SelftestAndNegativeControl) {
  EXPECT_EQ(cli("selftest"), 0);
  EXPECT_EQ(cli("selftest --tamper-constant 1.01"), 2);
}

TEST(Selftest, TamperFailsOnlyTheDualPath) {
  const auto r = run_selftest({1.01});
  EXPECT_FALSE(r.passed());
  for (const auto& c : r.checks) EXPECT_EQ(c.pass, c.module != "dual-path") << c.name;
}
