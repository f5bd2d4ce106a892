#include "gravcheck/tetrad.hpp"

#include <Eigen/Dense>

namespace gravcheck {

namespace {

ScalarField det3(const Mat4<ScalarField>& m, const int r[3], const int c[3]) {
  auto term = [&](int i, int j, int k) {
    return m[r[0]][c[i]] * (m[r[1]][c[j]] * m[r[2]][c[k]] -
                            m[r[1]][c[k]] * m[r[2]][c[j]]);
  };
  return term(0, 1, 2) - term(1, 0, 2) + term(2, 0, 1);
}

ScalarField det4(const Mat4<ScalarField>& m) {
  ScalarField acc = ScalarField::number(0.0);
  const int rows[3] = {1, 2, 3};
  for (int j = 0; j < 4; ++j) {
    int cols[3];
    for (int t = 0, s = 0; t < 4; ++t)
      if (t != j) cols[s++] = t;
    ScalarField d = m[0][j] * det3(m, rows, cols);
    acc = (j % 2 == 0) ? acc + d : acc - d;
  }
  return acc;
}

}  // namespace

Cotetrad make_cotetrad(ChartPtr chart, const Mat4<ScalarField>& frame) {
  Cotetrad c;
  c.chart = chart;
  c.frame = frame;
  c.det_frame = det4(frame);
  // e_a^mu = (-1)^{a+mu} (det of frame with row a, column mu removed) / det e
  for (int a = 0; a < 4; ++a)
    for (int mu = 0; mu < 4; ++mu) {
      Mat4<ScalarField> sub;
      int ri = 0;
      for (int r = 0; r < 4; ++r) {
        if (r == a) continue;
        int ci = 0;
        for (int col = 0; col < 4; ++col) {
          if (col == mu) continue;
          sub[ri][ci++] = frame[r][col];
        }
        ++ri;
      }
      const int id3[3] = {0, 1, 2};
      ScalarField minor = det3(sub, id3, id3);
      ScalarField cof = ((a + mu) % 2 == 0) ? minor : -minor;
      c.inverse_frame[a][mu] = cof / c.det_frame;
    }
  for (int a = 0; a < 4; ++a) {
    KForm f(1, chart);
    for (int mu = 0; mu < 4; ++mu) f.comp(mu) = frame[a][mu];
    c.g[a] = f;
  }
  return c;
}

MetricData build_metric(const Cotetrad& c) {
  MetricData m;
  m.chart = c.chart;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) {
      ScalarField gv = ScalarField::number(0.0);
      ScalarField hv = ScalarField::number(0.0);
      for (int a = 0; a < 4; ++a) {
        ScalarField low = c.frame[a][mu] * c.frame[a][nu];
        ScalarField up = c.inverse_frame[a][mu] * c.inverse_frame[a][nu];
        gv = kEta[a] > 0 ? gv + low : gv - low;
        hv = kEta[a] > 0 ? hv + up : hv - up;
      }
      m.g[mu][nu] = gv;
      m.ginv[mu][nu] = hv;
    }
  m.sqrt_abs_det = abs(c.det_frame);  // det g = -det(e)^2
  m.orientation = +1;
  return m;
}

std::array<Mat4<ScalarField>, 4> structure_coefficients(const Cotetrad& c) {
  std::array<Mat4<ScalarField>, 4> out;
  for (int a = 0; a < 4; ++a) {
    KForm dg = exterior_derivative(c.g[a]);
    for (int k = 0; k < 4; ++k)
      for (int l = 0; l < 4; ++l) out[a][k][l] = ScalarField::number(0.0);
    for (int k = 0; k < 4; ++k)
      for (int l = k + 1; l < 4; ++l) {
        // c^a_{kl} = -dg^a(e_k, e_l)
        ScalarField v = ScalarField::number(0.0);
        for (int p = 0; p < 6; ++p) {
          if (dg.comp(p).is_zero()) continue;
          auto I = combo_indices(2, p);
          v = v + dg.comp(p) * (c.inverse_frame[k][I[0]] *
                                    c.inverse_frame[l][I[1]] -
                                c.inverse_frame[k][I[1]] *
                                    c.inverse_frame[l][I[0]]);
        }
        out[a][k][l] = -v;
        out[a][l][k] = v;
      }
  }
  return out;
}

ConnectionForms levi_civita_connection(const Cotetrad& c,
                                       const MetricData& m) {
  std::array<KForm, 4> dg, dg_low;
  for (int a = 0; a < 4; ++a) {
    dg[a] = exterior_derivative(c.g[a]);
    dg_low[a] = kEta[a] > 0 ? dg[a] : -dg[a];
  }
  ConnectionForms w;
  Mat4<KForm> up;  // omega^{cd}
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) up[i][j] = KForm(1, c.chart);
  for (int cd = 0; cd < 4; ++cd)
    for (int dd = cd + 1; dd < 4; ++dd) {
      KForm acc = left_contract(c.g[dd], dg[cd], m) -
                  left_contract(c.g[cd], dg[dd], m);
      for (int a = 0; a < 4; ++a) {
        KForm inner = left_contract(c.g[dd], dg_low[a], m);  // 1-form
        KForm coeff = left_contract(c.g[cd], inner, m);      // scalar
        acc = acc + coeff.comp(0) * c.g[a];
      }
      up[cd][dd] = ScalarField::number(0.5) * acc;
      up[dd][cd] = -up[cd][dd];
    }
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      w.omega[a][b] = kEta[b] > 0 ? up[a][b] : -up[a][b];
  return w;
}

std::array<KForm, 4> cartan_torsion(const Cotetrad& c,
                                    const ConnectionForms& w) {
  std::array<KForm, 4> theta;
  for (int a = 0; a < 4; ++a) {
    KForm acc = exterior_derivative(c.g[a]);
    for (int b = 0; b < 4; ++b) acc = acc + wedge(w.omega[a][b], c.g[b]);
    theta[a] = acc;
  }
  return theta;
}

Curvature2Forms curvature_2forms(const ConnectionForms& w) {
  Curvature2Forms cur;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      KForm acc = exterior_derivative(w.omega[a][b]);
      for (int k = 0; k < 4; ++k)
        acc = acc + wedge(w.omega[a][k], w.omega[k][b]);
      cur.R[a][b] = acc;
    }
  return cur;
}

RicciData ricci_and_scalar(const Curvature2Forms& cur, const Cotetrad& c,
                           const MetricData& m) {
  RicciData out;
  for (int d = 0; d < 4; ++d) {
    KForm acc(1, c.chart);
    for (int b = 0; b < 4; ++b) {
      // g_b _| R^{bd}; lowering/raising with eta folds into one sign
      KForm rup = kEta[d] > 0 ? cur.R[b][d] : -cur.R[b][d];
      KForm gb = kEta[b] > 0 ? c.g[b] : -c.g[b];
      acc = acc + left_contract(gb, rup, m);
    }
    out.ricci_oneform[d] = acc;
  }
  for (int d = 0; d < 4; ++d)
    for (int b = 0; b < 4; ++b) {
      KForm gb = kEta[b] > 0 ? c.g[b] : -c.g[b];
      ScalarField rdb =
          left_contract(gb, out.ricci_oneform[d], m).comp(0);  // R^d_b
      out.ricci[d][b] = kEta[d] > 0 ? rdb : -rdb;              // R_{db}
    }
  ScalarField r = ScalarField::number(0.0);
  for (int a = 0; a < 4; ++a)
    r = kEta[a] > 0 ? r + out.ricci[a][a] : r - out.ricci[a][a];
  out.scalar = r;
  return out;
}

std::array<KForm, 4> teleparallel_torsion(const Cotetrad& c) {
  std::array<KForm, 4> f;
  for (int a = 0; a < 4; ++a) f[a] = exterior_derivative(c.g[a]);
  return f;
}

Cotetrad lorentz_transform(const Cotetrad& c, const Mat4<ScalarField>& lambda) {
  Mat4<ScalarField> frame;
  for (int a = 0; a < 4; ++a)
    for (int mu = 0; mu < 4; ++mu) {
      ScalarField acc = ScalarField::number(0.0);
      for (int b = 0; b < 4; ++b) acc = acc + lambda[a][b] * c.frame[b][mu];
      frame[a][mu] = acc;
    }
  return make_cotetrad(c.chart, frame);
}

std::array<std::array<std::array<double, 6>, 4>, 4> curvature_components_at(
    const Curvature2Forms& cur, const Cotetrad& c, const Bindings& env) {
  Eigen::Matrix4d e;
  for (int a = 0; a < 4; ++a)
    for (int mu = 0; mu < 4; ++mu) e(a, mu) = evaluate(c.frame[a][mu], env);
  Eigen::Matrix4d einv = e.inverse();  // einv(mu, a) = e_a^mu
  std::array<std::array<std::array<double, 6>, 4>, 4> out{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      auto comps = components_at(cur.R[a][b], env);
      for (int p = 0; p < 6; ++p) {
        auto cd = combo_indices(2, p);
        double acc = 0.0;
        for (int q = 0; q < 6; ++q) {
          auto mn = combo_indices(2, q);
          acc += comps[q] * (einv(mn[0], cd[0]) * einv(mn[1], cd[1]) -
                             einv(mn[0], cd[1]) * einv(mn[1], cd[0]));
        }
        out[a][b][p] = acc;
      }
    }
  return out;
}

}  // namespace gravcheck
