#ifndef GRAVCHECK_SCENARIO_HPP
#define GRAVCHECK_SCENARIO_HPP

#include <optional>

#include "gravcheck/energy.hpp"

namespace gravcheck {

/// Manifest syntax or validation failure. Validation collects every problem
/// before throwing rather than stopping at the first.
class ManifestError : public std::runtime_error {
public:
  ManifestError(std::string what, std::vector<std::string> issues)
      : std::runtime_error(std::move(what)), issues_(std::move(issues)) {}
  const std::vector<std::string>& issues() const { return issues_; }

private:
  std::vector<std::string> issues_;
};

/// A fully validated scenario: chart, domain, parameters and the cotetrad
/// component table. Everything the checks need, nothing they must re-derive.
struct Scenario {
  std::string name;
  std::string preset;  // nonempty for built-ins
  ChartPtr chart;
  ChartKind kind = ChartKind::Cartesian;
  std::array<double, 4> domain_min{}, domain_max{};
  std::array<double, 4> sample_min{}, sample_max{};  // defaults to domain

  struct Exclusion {
    ScalarField lhs, rhs;
    bool less = true;  // excluded when lhs < rhs (or > for less = false)
    std::string text;
  };
  std::vector<Exclusion> exclusions;

  std::map<std::string, double> params;
  Mat4<ScalarField> frame;  // e^a_mu over the declared coordinate order
  std::optional<ScalarField> lapse;
  bool asymptotically_cartesian = false;
  std::vector<double> default_radii;

  double mass() const {
    auto it = params.find("M");
    return it == params.end() ? 0.0 : it->second;
  }
};

Scenario load_manifest(const std::string& path);
Scenario load_manifest_text(const std::string& text, const std::string& name);

/// Built-in presets: minkowski, rindler, schwarzschild,
/// schwarzschild_isotropic, flrw. Optional parameter overrides (e.g. M).
Scenario load_preset(const std::string& name,
                     const std::map<std::string, double>& overrides = {});
std::vector<std::string> preset_names();

Cotetrad scenario_cotetrad(const Scenario& s);
ChartFrame scenario_chart_frame(const Scenario& s);

/// Deterministic low-discrepancy points in the sample box, honoring the
/// exclusion predicates and rejecting near-degenerate frame points.
struct SamplePointSet {
  std::vector<std::array<double, 4>> points;
  int rejected = 0;
};
SamplePointSet sample_points(const Scenario& s, int n);

/// Point bindings: coordinates plus parameters.
Bindings point_bindings(const Scenario& s, const std::array<double, 4>& x);

double halton(std::size_t index, int base);

}  // namespace gravcheck

#endif
