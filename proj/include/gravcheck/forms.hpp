#ifndef GRAVCHECK_FORMS_HPP
#define GRAVCHECK_FORMS_HPP

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "gravcheck/expr.hpp"

namespace gravcheck {

/// A 4-dimensional coordinate chart. The declared order of the coordinates
/// fixes the positive orientation: dx^0 ^ dx^1 ^ dx^2 ^ dx^3.
struct Chart {
  std::array<std::string, 4> coords;
};
using ChartPtr = std::shared_ptr<const Chart>;

ChartPtr make_chart(std::array<std::string, 4> coords);

// Sorted multi-index tables for grades 0..4 over {0,1,2,3}.
int binom4(int k);
std::span<const int> combo_indices(int grade, int pos);
int combo_position(int grade, std::span<const int> sorted);

/// Differential form of grade 0..4. Components are stored on strictly
/// increasing multi-indices in the canonical (lexicographic) order;
/// antisymmetry is carried by sign bookkeeping in the operations.
class KForm {
public:
  KForm() = default;
  KForm(int grade, ChartPtr chart);  // zero form of the given grade

  static KForm scalar(ChartPtr chart, ScalarField f);
  static KForm coordinate_differential(ChartPtr chart, int mu);  // dx^mu

  int grade() const { return grade_; }
  const ChartPtr& chart() const { return chart_; }
  int num_components() const { return static_cast<int>(comps_.size()); }

  const ScalarField& comp(int pos) const { return comps_[pos]; }
  ScalarField& comp(int pos) { return comps_[pos]; }

  /// Component for an arbitrary (possibly unsorted) index tuple; sorts and
  /// applies the permutation sign, returns 0 for repeated indices.
  ScalarField component(std::span<const int> indices) const;

  bool is_zero() const;  // all components structurally 0

private:
  int grade_ = -1;
  ChartPtr chart_;
  std::vector<ScalarField> comps_;
};

KForm operator+(const KForm&, const KForm&);
KForm operator-(const KForm&, const KForm&);
KForm operator-(const KForm&);
KForm operator*(const ScalarField&, const KForm&);
KForm operator*(double, const KForm&);

/// Metric data on a chart: covariant components, contravariant components,
/// sqrt|det g| and the orientation sign of the ordered coordinate cobasis.
struct MetricData {
  ChartPtr chart;
  std::array<std::array<ScalarField, 4>, 4> g;
  std::array<std::array<ScalarField, 4>, 4> ginv;
  ScalarField sqrt_abs_det;
  int orientation = +1;
};

/// diag(1,-1,-1,-1) on the given chart.
MetricData minkowski_metric(ChartPtr chart);

/// Graded-anticommutative product. For j+k > 4 the result is the exact zero
/// form of grade 4 (clamped).
KForm wedge(const KForm& a, const KForm& b);

/// Exterior derivative via exact symbolic partials; d of a grade-4 form is
/// the zero grade-4 form (there is no grade 5; this case never arises in the
/// formulas and is convenient for composition).
KForm exterior_derivative(const KForm& a);

/// Metric left contraction a _| b for grade(a) <= grade(b). For 1-forms it
/// is g(a,b); higher grades contract iteratively, (A^B)_|C = A_|(B_|C).
/// Throws std::invalid_argument on grade mismatch.
KForm left_contract(const KForm& a, const KForm& b, const MetricData& m);

/// Hodge star fixed by a ^ star(b) = <a,b> tau_g with tau_g =
/// sqrt|det g| dx^0^dx^1^dx^2^dx^3; satisfies star(star(a)) =
/// -(-1)^{k(4-k)} a in Lorentzian signature.
KForm hodge_star(const KForm& a, const MetricData& m);

/// Inverse of hodge_star (a per-grade sign times hodge_star).
KForm hodge_star_inverse(const KForm& a, const MetricData& m);

/// Codifferential delta = star d star on every grade (the sign table that
/// makes -(d delta + delta d) the coordinate wave operator on Minkowski
/// scalars, with delta.delta = 0). Grade-0 input is an error.
KForm codifferential(const KForm& a, const MetricData& m);

/// The Hodge D'Alembertian -(d delta + delta d); on scalars the d delta term
/// is absent (delta of a scalar is undefined).
KForm hodge_dalembertian(const KForm& a, const MetricData& m);

/// Pointwise scalar product of same-grade forms, the pairing used by
/// hodge_star.
ScalarField form_scalar_product(const KForm& a, const KForm& b,
                                const MetricData& m);

/// All components of a form at a point (canonical order), direct evaluation.
std::vector<double> components_at(const KForm& a, const Bindings& env);

}  // namespace gravcheck

#endif
