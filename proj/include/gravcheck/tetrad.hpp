#ifndef GRAVCHECK_TETRAD_HPP
#define GRAVCHECK_TETRAD_HPP

#include <array>

#include "gravcheck/forms.hpp"

namespace gravcheck {

constexpr double kEta[4] = {1.0, -1.0, -1.0, -1.0};  // eta_ab = eta^ab

template <typename T>
using Mat4 = std::array<std::array<T, 4>, 4>;

/// Four orthonormal 1-form potentials g^a = e^a_mu dx^mu with nondegenerate
/// frame matrix. The sole physical input of every derivation.
struct Cotetrad {
  ChartPtr chart;
  Mat4<ScalarField> frame;          // e^a_mu
  Mat4<ScalarField> inverse_frame;  // e_a^mu, symbolic adjugate / det
  ScalarField det_frame;
  std::array<KForm, 4> g;           // the 1-forms g^a
};

/// Builds a cotetrad from its frame matrix (rows = tetrad index a, columns =
/// coordinate index mu). The symbolic inverse is formed by adjugate over
/// determinant; degeneracy surfaces at evaluation as a division fault.
Cotetrad make_cotetrad(ChartPtr chart, const Mat4<ScalarField>& frame);

/// g_{mu nu} = eta_ab e^a_mu e^b_nu, inverse from the inverse frame,
/// sqrt|det g| = |det e|.
MetricData build_metric(const Cotetrad& c);

/// Connection 1-forms of the Levi-Civita connection, tetrad indices.
struct ConnectionForms {
  Mat4<KForm> omega;  // omega^a_b, grade 1
};

/// Curvature 2-forms R^a_b = d omega^a_b + omega^a_c ^ omega^c_b.
struct Curvature2Forms {
  Mat4<KForm> R;  // grade 2
};

/// Structure coefficients c^a_{kl} of the frame, defined through
/// dg^a + 1/2 c^a_{kl} g^k ^ g^l = 0; antisymmetric in (k,l).
std::array<Mat4<ScalarField>, 4> structure_coefficients(const Cotetrad& c);

/// omega^{cd} = 1/2 [ g^d _| dg^c - g^c _| dg^d + g^c _| (g^d _| dg_a) g^a ],
/// lowered to omega^a_b with eta. Antisymmetry omega^{cd} = -omega^{dc} holds
/// structurally.
ConnectionForms levi_civita_connection(const Cotetrad& c, const MetricData& m);

/// First Cartan structure equation Theta^a = dg^a + omega^a_b ^ g^b;
/// vanishes identically for the Levi-Civita connection.
std::array<KForm, 4> cartan_torsion(const Cotetrad& c,
                                    const ConnectionForms& w);

Curvature2Forms curvature_2forms(const ConnectionForms& w);

/// Ricci 1-forms R^d = R^d_a g^a, the Ricci tetrad components R_{ab}
/// (symmetric) and the curvature scalar, all symbolic. The contraction is
/// carried out with the metric, R^d = g_b _| R^{bd}, so no extra frame
/// inversion enters.
struct RicciData {
  std::array<KForm, 4> ricci_oneform;  // R^d
  Mat4<ScalarField> ricci;             // R_{ab}, tetrad indices
  ScalarField scalar;                  // R
};
RicciData ricci_and_scalar(const Curvature2Forms& cur, const Cotetrad& c,
                           const MetricData& m);

/// Teleparallel torsion F^a = dg^a (zero-connection structure equation).
std::array<KForm, 4> teleparallel_torsion(const Cotetrad& c);

/// g'^a = Lambda^a_b g^b for a point-dependent Lorentz matrix field.
Cotetrad lorentz_transform(const Cotetrad& c, const Mat4<ScalarField>& lambda);

/// Tetrad-frame curvature components R^a_{b c d} extracted numerically at a
/// point through the inverse frame: R^a_b = 1/2 R^a_{b cd} g^c ^ g^d.
/// Returned flat-indexed as [a][b][pos] over grade-2 combos (c,d).
std::array<std::array<std::array<double, 6>, 4>, 4> curvature_components_at(
    const Curvature2Forms& cur, const Cotetrad& c, const Bindings& env);

}  // namespace gravcheck

#endif
