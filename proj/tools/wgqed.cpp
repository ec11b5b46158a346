// wgqed: run waveguide scenarios from JSON configs or presets.

#include <CLI11.hpp>

#include <iostream>

#include "wgqed/acceptance.hpp"
#include "wgqed/wgqed.hpp"

namespace {

void report(const wgqed::ScenarioResult& r, const std::vector<std::filesystem::path>& files) {
  const auto& s = r.system;
  std::cout << r.config.name << ": layout " << wgqed::layout_name(s.layout) << ", gamma11 = " << s.rates.gamma11;
  if (s.layout != wgqed::Layout::perpendicular) std::cout << ", tau1 = " << s.tau1();
  std::cout << ", t_end = " << r.t_end << "\n";
  for (const auto& run : r.runs)
    std::cout << "  " << run.engine << ": " << run.atoms.size() << " rows in " << run.seconds << " s\n";
  for (const auto& f : files) std::cout << "  wrote " << f.string() << "\n";
}

int run_config(const wgqed::ScenarioConfig& cfg) {
  const auto result = wgqed::run_scenario(cfg);
  report(result, wgqed::write_outputs(result));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-atom rectangular waveguide dynamics: retarded equations, master equation, discrete-mode oracle"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run a scenario config");
  run->add_option("config", config_path, "JSON config file")->required();

  std::string preset;
  std::string out_dir;
  std::vector<std::string> overrides;
  auto* pre = app.add_subcommand("preset", "Run a named preset");
  pre->add_option("name", preset, "centered-12, centered-24, offcenter-x, perp-x or perp-y")->required();
  pre->add_option("--out", out_dir, "Output directory");
  pre->add_option("--override", overrides, "Config override key=value (dotted key, JSON value)");

  auto* check = app.add_subcommand("check", "Run the acceptance criteria");
  std::vector<int> only;
  check->add_option("--only", only, "Run only these criterion numbers");

  std::string rates_path;
  auto* rates = app.add_subcommand("rates", "Print derived quantities of a config");
  rates->add_option("config", rates_path, "JSON config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_config(wgqed::parse_config(wgqed::load_json_file(config_path)));
    if (*pre) {
      if (!out_dir.empty()) overrides.push_back("output.dir=\"" + out_dir + "\"");
      return run_config(wgqed::preset_config(preset, overrides));
    }
    if (*rates) {
      const auto cfg = wgqed::parse_config(wgqed::load_json_file(rates_path));
      std::cout << wgqed::derived_json(wgqed::derive_system(wgqed::geometry_input(cfg))).dump(2) << "\n";
      return 0;
    }
    if (*check) {
      const auto criteria = wgqed::acceptance::all_criteria();
      int failed = 0;
      for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        const auto r = wgqed::acceptance::run_guarded(id, criteria[i]);
        std::cout << wgqed::acceptance::format_line(r) << std::endl;
        if (!r.passed) ++failed;
      }
      return failed == 0 ? 0 : 1;
    }
  } catch (const wgqed::Error& e) {
    std::cerr << "error [" << wgqed::category_name(e.category()) << "]: " << e.what() << "\n";
    return wgqed::exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error [internal]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
