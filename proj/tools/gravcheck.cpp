#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "gravcheck/checks.hpp"

using namespace gravcheck;

int main(int argc, char** argv) {
  CLI::App app{"gravcheck: numerical certification of tetrad-gravity identities"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "load a scenario and run checks");
  std::string preset, manifest, checks_arg = "all", format = "text", out_dir;
  int points = 100;
  unsigned seed = 42;
  std::vector<std::string> tol_args;
  std::string radii_arg;
  int n_theta = 32, n_phi = 64;

  auto* preset_opt =
      run->add_option("--preset", preset, "built-in scenario name");
  auto* manifest_opt =
      run->add_option("--manifest", manifest, "scenario manifest file");
  preset_opt->excludes(manifest_opt);
  run->add_option("--checks", checks_arg,
                  "comma list of suites or 'all' (identities, cartan, oracle, "
                  "field-eq, nice-formula, conservation, energy)");
  run->add_option("--points", points, "number of sample points")
      ->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "seed for randomized fields");
  run->add_option("--tol", tol_args, "per-check tolerance override NAME=VALUE")
      ->take_all();
  run->add_option("--radii", radii_arg, "comma list of sphere radii");
  run->add_option("--format", format, "text | json | both")
      ->check(CLI::IsMember({"text", "json", "both"}));
  run->add_option("--out", out_dir, "directory for report files");
  run->add_option("--quad-theta", n_theta, "Gauss-Legendre order in cos(theta)");
  run->add_option("--quad-phi", n_phi, "trapezoid order in phi");

  CLI11_PARSE(app, argc, argv);

  try {
    Scenario scenario;
    if (!preset.empty())
      scenario = load_preset(preset);
    else if (!manifest.empty())
      scenario = load_manifest(manifest);
    else {
      std::cerr << "run: need --preset or --manifest\n";
      return 2;
    }

    RunOptions opt;
    opt.points = points;
    opt.seed = seed;
    opt.n_theta = n_theta;
    opt.n_phi = n_phi;
    opt.checks.clear();
    {
      std::string cur;
      for (char c : checks_arg + ",") {
        if (c == ',') {
          if (!cur.empty()) opt.checks.push_back(cur);
          cur.clear();
        } else if (!isspace((unsigned char)c)) {
          cur += c;
        }
      }
    }
    for (const auto& t : tol_args) {
      auto eq = t.find('=');
      if (eq == std::string::npos) {
        std::cerr << "bad --tol argument '" << t << "' (want NAME=VALUE)\n";
        return 2;
      }
      opt.tol_overrides[t.substr(0, eq)] = std::stod(t.substr(eq + 1));
    }
    if (!radii_arg.empty()) {
      std::string cur;
      for (char c : radii_arg + ",") {
        if (c == ',') {
          if (!cur.empty()) opt.radii.push_back(std::stod(cur));
          cur.clear();
        } else if (!isspace((unsigned char)c)) {
          cur += c;
        }
      }
    }

    CheckReport report = run_checks(scenario, opt);

    std::string text = report.to_text();
    std::string json = report.to_json();
    if (format == "text" || format == "both") std::cout << text;
    if (format == "json") std::cout << json << "\n";
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      if (format == "text" || format == "both")
        std::ofstream(out_dir + "/report.txt") << text;
      if (format == "json" || format == "both")
        std::ofstream(out_dir + "/report.json") << json << "\n";
    }
    return report.all_passed() ? 0 : 1;
  } catch (const ManifestError& e) {
    std::cerr << e.what() << "\n";
    for (const auto& issue : e.issues()) std::cerr << "  - " << issue << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
