#include "gravcheck/oracle.hpp"

#include <algorithm>
#include <stdexcept>

namespace gravcheck {
namespace oracle {

namespace {

ScalarField num(double v) { return ScalarField::number(v); }

// Local multi-index tables; the oracle deliberately does not link against the
// forms module.
const std::vector<std::vector<int>>& combos(int grade) {
  static const std::vector<std::vector<int>> tables[5] = {
      {{}},
      {{0}, {1}, {2}, {3}},
      {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}},
      {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}},
      {{0, 1, 2, 3}}};
  return tables[grade];
}

int combo_pos(int grade, const std::vector<int>& sorted) {
  const auto& t = combos(grade);
  for (std::size_t p = 0; p < t.size(); ++p)
    if (t[p] == sorted) return static_cast<int>(p);
  throw std::invalid_argument("oracle: bad multi-index");
}

int sort_sign(std::vector<int>& seq) {
  int sign = 1;
  for (std::size_t i = 1; i < seq.size(); ++i)
    for (std::size_t j = i; j > 0 && seq[j - 1] >= seq[j]; --j) {
      if (seq[j - 1] == seq[j]) return 0;
      std::swap(seq[j - 1], seq[j]);
      sign = -sign;
    }
  return sign;
}

// Sign-adjusted component for an arbitrary index tuple.
ScalarField comp_at(const CompForm& a, std::vector<int> idx) {
  int sign = sort_sign(idx);
  if (sign == 0) return num(0.0);
  const ScalarField& c = a.comps[combo_pos(a.grade, idx)];
  return sign > 0 ? c : -c;
}

ScalarField det3(const M4<ScalarField>& m, const int r[3], const int c[3]) {
  auto term = [&](int i, int j, int k) {
    return m[r[0]][c[i]] * (m[r[1]][c[j]] * m[r[2]][c[k]] -
                            m[r[1]][c[k]] * m[r[2]][c[j]]);
  };
  return term(0, 1, 2) - term(1, 0, 2) + term(2, 0, 1);
}

}  // namespace

ChristoffelData christoffel_pipeline(const std::array<std::string, 4>& coords,
                                     const M4<ScalarField>& g) {
  ChristoffelData cd;
  cd.coords = coords;
  cd.g = g;

  // independent inverse: adjugate over determinant
  ScalarField det = num(0.0);
  for (int j = 0; j < 4; ++j) {
    int rows[3] = {1, 2, 3};
    int cols[3];
    for (int t = 0, s = 0; t < 4; ++t)
      if (t != j) cols[s++] = t;
    ScalarField d = g[0][j] * det3(g, rows, cols);
    det = (j % 2 == 0) ? det + d : det - d;
  }
  cd.sqrt_abs_det = sqrt(abs(det));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      int rows[3], cols[3];
      for (int t = 0, s = 0; t < 4; ++t)
        if (t != j) rows[s++] = t;
      for (int t = 0, s = 0; t < 4; ++t)
        if (t != i) cols[s++] = t;
      ScalarField minor = det3(g, rows, cols);
      cd.ginv[i][j] = ((i + j) % 2 == 0) ? minor / det : -minor / det;
    }

  // dg[r][m][n] = d g_{mn} / d x^r
  std::array<M4<ScalarField>, 4> dg;
  for (int r = 0; r < 4; ++r)
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n)
        dg[r][m][n] = differentiate(g[m][n], coords[r]);

  for (int l = 0; l < 4; ++l)
    for (int m = 0; m < 4; ++m)
      for (int n = m; n < 4; ++n) {
        ScalarField acc = num(0.0);
        for (int r = 0; r < 4; ++r)
          acc = acc + cd.ginv[l][r] * (dg[m][r][n] + dg[n][r][m] - dg[r][m][n]);
        cd.gamma[l][m][n] = num(0.5) * acc;
        cd.gamma[l][n][m] = cd.gamma[l][m][n];
      }

  // R^r_{s mn} = d_m Gamma^r_{ns} - d_n Gamma^r_{ms}
  //            + Gamma^r_{ml} Gamma^l_{ns} - Gamma^r_{nl} Gamma^l_{ms}
  for (int r = 0; r < 4; ++r)
    for (int s = 0; s < 4; ++s)
      for (int m = 0; m < 4; ++m) {
        cd.riemann[r][s][m][m] = num(0.0);
        for (int n = m + 1; n < 4; ++n) {
          ScalarField acc = differentiate(cd.gamma[r][n][s], coords[m]) -
                            differentiate(cd.gamma[r][m][s], coords[n]);
          for (int l = 0; l < 4; ++l)
            acc = acc + cd.gamma[r][m][l] * cd.gamma[l][n][s] -
                  cd.gamma[r][n][l] * cd.gamma[l][m][s];
          cd.riemann[r][s][m][n] = acc;
          cd.riemann[r][s][n][m] = -acc;
        }
      }

  for (int s = 0; s < 4; ++s)
    for (int n = 0; n < 4; ++n) {
      ScalarField acc = num(0.0);
      for (int l = 0; l < 4; ++l) acc = acc + cd.riemann[l][s][l][n];
      cd.ricci[s][n] = acc;
    }

  ScalarField rsc = num(0.0);
  for (int s = 0; s < 4; ++s)
    for (int n = 0; n < 4; ++n) rsc = rsc + cd.ginv[s][n] * cd.ricci[s][n];
  cd.scalar = rsc;

  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n)
      cd.einstein[m][n] = cd.ricci[m][n] - num(0.5) * cd.scalar * g[m][n];

  return cd;
}

std::array<ScalarField, 4> contracted_bianchi(const ChristoffelData& cd) {
  // G^m_n = g^{mr} G_{rn}
  M4<ScalarField> gmix;
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) {
      ScalarField acc = num(0.0);
      for (int r = 0; r < 4; ++r) acc = acc + cd.ginv[m][r] * cd.einstein[r][n];
      gmix[m][n] = acc;
    }
  std::array<ScalarField, 4> out;
  for (int n = 0; n < 4; ++n) {
    ScalarField acc = num(0.0);
    for (int m = 0; m < 4; ++m) {
      acc = acc + differentiate(gmix[m][n], cd.coords[m]);
      for (int l = 0; l < 4; ++l)
        acc = acc + cd.gamma[m][m][l] * gmix[l][n] -
              cd.gamma[l][m][n] * gmix[m][l];
    }
    out[n] = acc;
  }
  return out;
}

CompForm ext_d(const ChristoffelData& cd, const CompForm& a) {
  CompForm r;
  r.grade = a.grade + 1;
  r.comps.assign(combos(r.grade).size(), num(0.0));
  const auto& in = combos(a.grade);
  for (std::size_t p = 0; p < in.size(); ++p) {
    if (a.comps[p].is_zero()) continue;
    for (int mu = 0; mu < 4; ++mu) {
      if (std::find(in[p].begin(), in[p].end(), mu) != in[p].end()) continue;
      ScalarField df = differentiate(a.comps[p], cd.coords[mu]);
      if (df.is_zero()) continue;
      std::vector<int> idx;
      idx.push_back(mu);
      idx.insert(idx.end(), in[p].begin(), in[p].end());
      std::vector<int> sorted = idx;
      int sign = sort_sign(sorted);
      int pos = combo_pos(r.grade, sorted);
      r.comps[pos] = sign > 0 ? r.comps[pos] + df : r.comps[pos] - df;
    }
  }
  return r;
}

CompForm codifferential(const ChristoffelData& cd, const CompForm& a) {
  if (a.grade == 0) throw std::invalid_argument("oracle codifferential: grade 0");
  CompForm r;
  r.grade = a.grade - 1;
  r.comps.assign(combos(r.grade).size(), num(0.0));
  const auto& out = combos(r.grade);
  for (std::size_t p = 0; p < out.size(); ++p) {
    const auto& J = out[p];
    ScalarField acc = num(0.0);
    for (int nu = 0; nu < 4; ++nu)
      for (int rho = 0; rho < 4; ++rho) {
        if (cd.ginv[nu][rho].is_zero()) continue;
        // (nabla_nu a)_{rho J}
        std::vector<int> idx;
        idx.push_back(rho);
        idx.insert(idx.end(), J.begin(), J.end());
        ScalarField cov = differentiate(comp_at(a, idx), cd.coords[nu]);
        for (int s = 0; s < 4; ++s) {
          std::vector<int> swapped = idx;
          swapped[0] = s;
          cov = cov - cd.gamma[s][nu][rho] * comp_at(a, swapped);
          for (std::size_t q = 1; q < idx.size(); ++q) {
            std::vector<int> sw = idx;
            sw[q] = s;
            cov = cov - cd.gamma[s][nu][idx[q]] * comp_at(a, sw);
          }
        }
        acc = acc + cd.ginv[nu][rho] * cov;
      }
    r.comps[p] = -acc;
  }
  return r;
}

std::array<ScalarField, 4> rough_dalembertian_oneform(
    const ChristoffelData& cd, const std::array<ScalarField, 4>& a) {
  // first covariant derivative: D[nu][rho] = (nabla_nu a)_rho
  M4<ScalarField> D;
  for (int nu = 0; nu < 4; ++nu)
    for (int rho = 0; rho < 4; ++rho) {
      ScalarField acc = differentiate(a[rho], cd.coords[nu]);
      for (int s = 0; s < 4; ++s) acc = acc - cd.gamma[s][nu][rho] * a[s];
      D[nu][rho] = acc;
    }
  std::array<ScalarField, 4> out;
  for (int rho = 0; rho < 4; ++rho) {
    ScalarField acc = num(0.0);
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) {
        if (cd.ginv[m][n].is_zero()) continue;
        ScalarField second = differentiate(D[n][rho], cd.coords[m]);
        for (int s = 0; s < 4; ++s)
          second = second - cd.gamma[s][m][n] * D[s][rho] -
                   cd.gamma[s][m][rho] * D[n][s];
        acc = acc + cd.ginv[m][n] * second;
      }
    out[rho] = acc;
  }
  return out;
}

}  // namespace oracle
}  // namespace gravcheck
