#ifndef GRAVCHECK_CHECKS_HPP
#define GRAVCHECK_CHECKS_HPP

#include <random>

#include "gravcheck/oracle.hpp"
#include "gravcheck/scenario.hpp"

namespace gravcheck {

/// One named residual record. max_rel uses the mixed metric
/// |residual| / (1 + scale) with a per-point scale taken from the magnitudes
/// of the quantities entering the identity, so it is relative where values
/// are O(1) or larger and absolute where they vanish.
struct CheckRecord {
  std::string name;
  int n_points = 0;
  double max_abs = 0.0;
  double max_rel = 0.0;
  double tol = 0.0;
  bool pass = true;
  bool advisory = false;  // reported, never gates the verdict
  std::string note;
};

struct EnergyTable {
  std::string name;
  std::vector<std::pair<double, double>> series;  // radius -> value
  bool has_extrapolation = false;
  double extrapolated = 0.0;
  double fit_residual = 0.0;
  double condition = 0.0;
};

struct CheckReport {
  std::string scenario;
  unsigned seed = 42;
  std::vector<CheckRecord> checks;
  std::vector<EnergyTable> energy;
  std::vector<std::string> notes;

  bool all_passed() const;
  std::string to_json() const;  // deterministic, no timestamps
  std::string to_text() const;
};

struct RunOptions {
  std::vector<std::string> checks{"all"};  // suite names or "all"
  int points = 100;
  unsigned seed = 42;
  std::map<std::string, double> tol_overrides;  // by record name
  std::vector<double> radii;                    // empty: preset defaults
  int n_theta = 32;
  int n_phi = 64;
};

/// Suite names accepted in RunOptions::checks.
std::vector<std::string> check_suite_names();

/// Runs the selected suites on a scenario and assembles the report.
CheckReport run_checks(const Scenario& s, const RunOptions& opt);

// --- pieces reused by tests and the acceptance suite ---

/// Smooth random scalar: low-degree polynomial times/plus trig factors.
ScalarField random_poly_trig(std::mt19937& rng,
                             const std::array<std::string, 4>& coords);

/// Random k-form with poly-trig components.
KForm random_form(std::mt19937& rng, int grade, const ChartPtr& chart);

/// Perturbed-Minkowski tetrad g^a = dx^a + eps p^a (regenerates until the
/// frame is safely nondegenerate on the sample box).
Cotetrad random_tetrad(std::mt19937& rng, const ChartPtr& chart, double eps,
                       const std::vector<std::array<double, 4>>& probe);

/// Residual evaluation helper: max |res| and max |res|/(1+scale) over points,
/// where scale is the pointwise max magnitude of the scale fields.
struct ResidualStats {
  int n_points = 0;
  double max_abs = 0.0;
  double max_rel = 0.0;
  int failures = 0;
  std::string first_failure;
};
ResidualStats evaluate_residuals(const std::vector<ScalarField>& residuals,
                                 const std::vector<ScalarField>& scales,
                                 const std::vector<std::string>& symbols,
                                 const std::vector<std::vector<double>>& inputs);

/// Symbol list (coords then params) and bound inputs for a scenario's points.
std::vector<std::string> scenario_symbols(const Scenario& s);
std::vector<std::vector<double>> scenario_inputs(
    const Scenario& s, const std::vector<std::array<double, 4>>& pts);

}  // namespace gravcheck

#endif
