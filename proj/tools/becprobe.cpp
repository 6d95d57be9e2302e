// becprobe: dephasing curves, spectral densities and backflow scans from a
// JSON scenario.
//
// Exit codes: 0 success, 1 validation error, 2 numerical failure in >= 1 cell.

#include <becprobe.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

enum Exit { ok = 0, invalid = 1, numerical = 2 };

becprobe::Scenario load(const std::string& path) {
  if (path.empty()) return becprobe::parse_scenario(nlohmann::ordered_json::object());
  std::ifstream f(path);
  if (!f) throw becprobe::ConfigError("--config", "cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return becprobe::parse_scenario_text(ss.str());
}

int report(const becprobe::RunOutcome& r) {
  for (const auto& f : r.files) std::cout << "wrote " << f.string() << "\n";
  if (r.skipped_cells) std::cout << r.skipped_cells << " cell(s) already complete, skipped\n";
  if (r.numerical_failure()) {
    std::cerr << "numerical failure in " << r.failed_cells << " of " << r.cells << " cell(s); see sidecars\n";
    return numerical;
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Qubit-probe dephasing in a Bose-Einstein condensate"};
  app.require_subcommand(1);

  std::string config;
  std::string out = ".";
  unsigned threads = 1;
  bool resume = false;
  double tamper = 1.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "Scenario JSON (defaults when omitted)")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Output directory")->capture_default_str();
    sub->add_option("--threads", threads, "Worker threads")->capture_default_str()->check(CLI::Range(1u, 1024u));
    sub->add_flag("--resume", resume, "Skip cells whose sidecar already exists");
  };
  auto* gamma = app.add_subcommand("gamma", "Decoherence function Gamma(t) and Gamma'(t)");
  auto* spectrum = app.add_subcommand("spectrum", "Spectral density J(w), Ohmicity fit and roots");
  auto* crossover = app.add_subcommand("crossover", "Backflow measure over a scattering-length scan");
  auto* sweep = app.add_subcommand("sweep", "Cartesian sweep described by the scenario's \"sweep\" section");
  auto* selftest = app.add_subcommand("selftest", "Built-in closed-form checks and the dual-path identity");
  for (auto* s : {gamma, spectrum, crossover, sweep}) add_common(s);
  selftest->add_option("--tamper-constant", tamper, "Scale the spectral normalisation (negative control)")
      ->group("");

  CLI11_PARSE(app, argc, argv);

  try {
    if (selftest->parsed()) {
      const auto r = becprobe::run_selftest({tamper});
      becprobe::print(r, std::cout);
      return r.passed() ? ok : numerical;
    }
    const auto sc = load(config);
    const becprobe::RunOptions opt{out, threads, resume};
    if (gamma->parsed()) return report(becprobe::run_gamma(sc, opt));
    if (spectrum->parsed()) return report(becprobe::run_spectrum(sc, opt));
    if (crossover->parsed()) return report(becprobe::run_crossover(sc, opt));
    if (sweep->parsed()) return report(becprobe::run_sweep(sc, opt));
  } catch (const becprobe::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return invalid;
  } catch (const becprobe::InfraredDivergence& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return invalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return invalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return numerical;
  }
  return ok;
}
