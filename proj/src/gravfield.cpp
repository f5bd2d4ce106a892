#include "gravcheck/gravfield.hpp"

namespace gravcheck {

// Pinned by the Friedmann source check (T^0 _| g^0 = G_tt > 0) together with
// the vanishing of the Euler-Lagrange identity off shell; matches the
// paper's footnote that its matter 3-forms carry the opposite sign to the
// true energy-momentum forms.
const double kMatterSign = -1.0;

namespace {

ScalarField half() { return ScalarField::number(0.5); }

KForm lower(int a, const KForm& f) { return kEta[a] > 0 ? f : -f; }

}  // namespace

FieldTheory build_field_theory(const Cotetrad& c) {
  FieldTheory ft;
  ft.cotetrad = c;
  ft.metric = build_metric(c);
  ft.connection = levi_civita_connection(c, ft.metric);
  ft.curvature = curvature_2forms(ft.connection);
  ft.ricci = ricci_and_scalar(ft.curvature, c, ft.metric);
  return ft;
}

LagrangianSample lagrangian_forms(const FieldTheory& ft) {
  const auto& c = ft.cotetrad;
  const auto& m = ft.metric;
  std::array<KForm, 4> dg, star_dg_low;
  for (int a = 0; a < 4; ++a) {
    dg[a] = exterior_derivative(c.g[a]);
    star_dg_low[a] = hodge_star(lower(a, dg[a]), m);
  }
  // Chern-Simons 3-form dg^a ^ g_a
  KForm chern(3, c.chart);
  for (int a = 0; a < 4; ++a) chern = chern + wedge(dg[a], lower(a, c.g[a]));

  LagrangianSample out;
  KForm lg(4, c.chart);
  for (int a = 0; a < 4; ++a) {
    lg = lg - half() * wedge(dg[a], star_dg_low[a]);
    KForm cod = codifferential(c.g[a], m);  // grade 0
    lg = lg + half() * wedge(cod, hodge_star(lower(a, cod), m));
  }
  lg = lg + ScalarField::number(0.25) * wedge(chern, hodge_star(chern, m));
  out.L_g = lg;

  KForm leh(4, c.chart);
  for (int cc = 0; cc < 4; ++cc)
    for (int dd = 0; dd < 4; ++dd) {
      KForm r_low = lower(cc, ft.curvature.R[cc][dd]);  // R_{cd}
      leh = leh + wedge(r_low, hodge_star(wedge(c.g[cc], c.g[dd]), m));
    }
  out.L_EH = half() * leh;

  KForm pot(3, c.chart);
  for (int a = 0; a < 4; ++a) pot = pot + wedge(c.g[a], star_dg_low[a]);
  out.exact_term = exterior_derivative(pot);
  return out;
}

EnergyMomentumSet energy_momentum_set(const FieldTheory& ft) {
  const auto& c = ft.cotetrad;
  const auto& m = ft.metric;
  EnergyMomentumSet out;

  std::array<KForm, 4> g_low, dg, dg_low, star_dg_low, star_g, dstar_g_scalar;
  for (int a = 0; a < 4; ++a) {
    g_low[a] = lower(a, c.g[a]);
    dg[a] = exterior_derivative(c.g[a]);
    dg_low[a] = lower(a, dg[a]);
    star_dg_low[a] = hodge_star(dg_low[a], m);
    star_g[a] = hodge_star(c.g[a], m);  // *g^a, grade 3
    // *d*g_a, grade 0
    dstar_g_scalar[a] =
        hodge_star(exterior_derivative(hodge_star(g_low[a], m)), m);
  }
  KForm chern(3, c.chart);
  for (int a = 0; a < 4; ++a) chern = chern + wedge(dg[a], g_low[a]);
  KForm star_chern = hodge_star(chern, m);  // grade 1

  for (int d = 0; d < 4; ++d) {
    // *S_d = -*dg_d - (g_d _| *g^a) ^ *d*g_a + 1/2 g_d ^ *(dg^a ^ g_a)
    KForm s = -star_dg_low[d];
    for (int a = 0; a < 4; ++a)
      s = s - wedge(left_contract(g_low[d], star_g[a], m), dstar_g_scalar[a]);
    s = s + half() * wedge(g_low[d], star_chern);
    out.star_S[d] = s;
    out.S[d] = hodge_star_inverse(s, m);

    // the five-term *t_d
    KForm t(3, c.chart);
    for (int a = 0; a < 4; ++a) {
      t = t + half() * wedge(left_contract(g_low[d], dg[a], m),
                             star_dg_low[a]);
      t = t - half() * wedge(dg[a], left_contract(g_low[d], star_dg_low[a], m));
      KForm gdsg = left_contract(g_low[d], star_g[a], m);  // grade 2
      t = t + half() * wedge(exterior_derivative(gdsg), dstar_g_scalar[a]);
      // *d*dg_a, grade 1
      KForm sdsd = hodge_star(
          exterior_derivative(hodge_star(dg_low[a], m)), m);
      t = t + half() * wedge(gdsg, sdsd);
    }
    t = t + half() * wedge(dg_low[d], star_chern);
    KForm gd_star_chern = left_contract(g_low[d], star_chern, m);  // grade 0
    t = t - ScalarField::number(0.25) * wedge(chern, gd_star_chern);
    t = t - ScalarField::number(0.25) *
                wedge(left_contract(g_low[d], chern, m), star_chern);
    out.star_t[d] = t;

    // h_d = d[(g_d _| *g^a) ^ *d*g_a - 1/2 g_d ^ *(F^a ^ g_a)], exact by
    // construction
    KForm pot(2, c.chart);
    for (int a = 0; a < 4; ++a)
      pot = pot +
            wedge(left_contract(g_low[d], star_g[a], m), dstar_g_scalar[a]);
    pot = pot - half() * wedge(g_low[d], star_chern);
    out.h[d] = exterior_derivative(pot);

    // variational 1-forms t^d + h^d
    KForm t_low = hodge_star_inverse(out.star_t[d], m);
    KForm h_low = hodge_star_inverse(out.h[d], m);
    out.bold_t[d] = kEta[d] > 0 ? t_low + h_low : -(t_low + h_low);

    // Einstein 1-forms
    out.T[d] = ft.ricci.ricci_oneform[d] -
               half() * (ft.ricci.scalar * c.g[d]);
  }

  // curvature-route forms: dd_g^d = Hodge D'Alembertian minus Ricci operator
  for (int d = 0; d < 4; ++d) {
    KForm box = hodge_dalembertian(c.g[d], m);
    KForm ricci_op = kMatterSign * ft.ricci.ricci_oneform[d];
    out.dd_g[d] = box - ricci_op;
    KForm half_R_g =
        half() * ((ScalarField::number(kMatterSign) * ft.ricci.scalar) *
                  c.g[d]);
    out.frak_t[d] = half_R_g + out.dd_g[d];
    out.bold_t_nice[d] =
        out.frak_t[d] +
        exterior_derivative(codifferential(c.g[d], m));
  }
  return out;
}

std::array<KForm, 4> field_equation_residual(const FieldTheory& ft,
                                             const EnergyMomentumSet& ems) {
  std::array<KForm, 4> res;
  for (int d = 0; d < 4; ++d) {
    KForm star_T_low =
        hodge_star(lower(d, ems.T[d]), ft.metric);  // *T_d, grade 3
    res[d] = exterior_derivative(ems.star_S[d]) + ems.star_t[d] +
             kMatterSign * star_T_low;
  }
  return res;
}

std::array<ScalarField, 4> conservation_residual(
    const FieldTheory& ft, const EnergyMomentumSet& ems) {
  std::array<ScalarField, 4> res;
  for (int d = 0; d < 4; ++d) {
    KForm total = kMatterSign * ems.T[d] + ems.bold_t[d];
    res[d] = codifferential(total, ft.metric).comp(0);
  }
  return res;
}

EmComponentSample em_components_at(const FieldTheory& ft,
                                   const EnergyMomentumSet& ems,
                                   const Bindings& env) {
  EmComponentSample out{};
  double up[4][4];   // t^{da} = t^d _| g^a
  double ddg[4][4];  // (dd_g^d) _| g^a
  for (int d = 0; d < 4; ++d)
    for (int a = 0; a < 4; ++a) {
      up[d][a] = evaluate(
          left_contract(ems.bold_t[d], ft.cotetrad.g[a], ft.metric).comp(0),
          env);
      ddg[d][a] = evaluate(
          left_contract(ems.dd_g[d], ft.cotetrad.g[a], ft.metric).comp(0),
          env);
    }
  for (int d = 0; d < 4; ++d)
    for (int a = 0; a < 4; ++a) {
      out.t[d][a] = kEta[d] * kEta[a] * up[d][a];
      out.asym_lhs[d][a] = up[d][a] - up[a][d];
      out.asym_rhs[d][a] = 2.0 * ddg[d][a];
    }
  return out;
}

}  // namespace gravcheck
