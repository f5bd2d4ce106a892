#ifndef GRAVCHECK_GRAVFIELD_HPP
#define GRAVCHECK_GRAVFIELD_HPP

#include "gravcheck/tetrad.hpp"

namespace gravcheck {

/// Everything the field-theory formulas consume, derived once from a
/// cotetrad: metric, Levi-Civita connection, curvature and Ricci data.
struct FieldTheory {
  Cotetrad cotetrad;
  MetricData metric;
  ConnectionForms connection;
  Curvature2Forms curvature;
  RicciData ricci;
};

FieldTheory build_field_theory(const Cotetrad& c);

/// Gravitational Lagrangian density, its Einstein-Hilbert part and the exact
/// term; L_g - L_EH - exact_term vanishes identically.
struct LagrangianSample {
  KForm L_g;        // -1/2 dg^a ^ *dg_a + 1/2 (del g^a)(*del g_a) + 1/4 (dg^a^g_a) ^ *(dg^b^g_b)
  KForm L_EH;       // 1/2 R_cd ^ *(g^c ^ g^d)
  KForm exact_term; // d(g^a ^ *dg_a)
};

LagrangianSample lagrangian_forms(const FieldTheory& ft);

/// Superpotentials, gravitational energy-momentum forms and matter forms.
struct EnergyMomentumSet {
  std::array<KForm, 4> star_S;      // *S_d, grade 2
  std::array<KForm, 4> S;           // S_d, grade 2
  std::array<KForm, 4> star_t;      // *t_d, grade 3 (five-term variational form)
  std::array<KForm, 4> h;           // h_d = d(2-form), grade 3, exact
  std::array<KForm, 4> bold_t;      // t^d + h^d, grade 1 (variational route)
  std::array<KForm, 4> T;           // Einstein 1-forms Ricci^d - 1/2 R g^d
  std::array<KForm, 4> dd_g;        // covariant D'Alembertian of g^d, grade 1
  std::array<KForm, 4> frak_t;      // 1/2 R g^d + dd_g (nice formula)
  std::array<KForm, 4> bold_t_nice; // frak_t + d delta g^d (curvature route)
};

EnergyMomentumSet energy_momentum_set(const FieldTheory& ft);

/// d *S_d + *t_d + sign *T_d; identically zero for any smooth tetrad, not
/// only for solutions (the Euler-Lagrange identity behind the equivalence
/// with the Einstein equations).
std::array<KForm, 4> field_equation_residual(const FieldTheory& ft,
                                             const EnergyMomentumSet& ems);

/// delta(matter + gravitational energy-momentum), four scalars that vanish
/// by nilpotency; exercises third derivatives of the frame.
std::array<ScalarField, 4> conservation_residual(const FieldTheory& ft,
                                                 const EnergyMomentumSet& ems);

/// Sampled component matrix t_da = eta_ac eta_dl (t^c _| g^l) plus the
/// antisymmetry diagnostic: lhs = t^{da} - t^{ad}, rhs = 2 (dd_g^d _| g^a).
struct EmComponentSample {
  double t[4][4];
  double asym_lhs[4][4];
  double asym_rhs[4][4];
};
EmComponentSample em_components_at(const FieldTheory& ft,
                                   const EnergyMomentumSet& ems,
                                   const Bindings& env);

/// The sign relating the paper's matter 3-forms to the Einstein 1-forms as
/// stored here (the paper's curly-T equals kMatterSign times T^d).
extern const double kMatterSign;

}  // namespace gravcheck

#endif
