#ifndef GRAVCHECK_ORACLE_HPP
#define GRAVCHECK_ORACLE_HPP

#include <array>
#include <vector>

#include "gravcheck/expr.hpp"

namespace gravcheck {
namespace oracle {

// Fully independent coordinate-tensor pipeline used to cross-validate the
// forms pipeline. Shares only the expression module; the metric inverse is
// recomputed here by adjugate/determinant rather than taken from the caller.

template <typename T>
using M4 = std::array<std::array<T, 4>, 4>;

struct ChristoffelData {
  std::array<std::string, 4> coords;
  M4<ScalarField> g;     // input g_{mu nu}
  M4<ScalarField> ginv;  // independently inverted
  ScalarField sqrt_abs_det;
  std::array<M4<ScalarField>, 4> gamma;               // gamma[l][m][n] = Gamma^l_{mn}
  std::array<std::array<M4<ScalarField>, 4>, 4> riemann;  // [r][s][m][n] = R^r_{s mn}
  M4<ScalarField> ricci;      // R_{mu nu} = R^l_{mu l nu}
  ScalarField scalar;
  M4<ScalarField> einstein;   // G_{mu nu}
};

/// Standard Levi-Civita coordinate formulas, symbolic throughout.
ChristoffelData christoffel_pipeline(const std::array<std::string, 4>& coords,
                                     const M4<ScalarField>& g);

/// Contracted Bianchi residuals nabla_mu G^mu_nu (third derivatives).
std::array<ScalarField, 4> contracted_bianchi(const ChristoffelData& cd);

/// Antisymmetric-tensor components of a k-form on strictly increasing
/// multi-indices, the oracle's own minimal form representation.
struct CompForm {
  int grade = 0;
  std::vector<ScalarField> comps;
};

/// Exterior derivative from raw partials.
CompForm ext_d(const ChristoffelData& cd, const CompForm& a);

/// Codifferential via the covariant divergence,
/// (delta a)_J = -g^{nu rho} (nabla_nu a)_{rho J}.
CompForm codifferential(const ChristoffelData& cd, const CompForm& a);

/// Rough (connection) D'Alembertian g^{mu nu} nabla_mu nabla_nu on a 1-form.
std::array<ScalarField, 4> rough_dalembertian_oneform(
    const ChristoffelData& cd, const std::array<ScalarField, 4>& a);

}  // namespace oracle
}  // namespace gravcheck

#endif
