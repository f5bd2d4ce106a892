#include "gravcheck/forms.hpp"

#include <algorithm>
#include <stdexcept>

namespace gravcheck {

namespace {

// Sorted multi-indices over {0,1,2,3}, lexicographic within each grade.
constexpr int kCombos1[4][1] = {{0}, {1}, {2}, {3}};
constexpr int kCombos2[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
constexpr int kCombos3[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
constexpr int kCombos4[1][4] = {{0, 1, 2, 3}};

ScalarField zero() { return ScalarField::number(0.0); }
ScalarField one() { return ScalarField::number(1.0); }

// Permutation sign of `seq` relative to ascending order; 0 on repetition.
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

// star(star(alpha)) on grade k equals kStarSquare[k] * alpha (Lorentzian).
constexpr double kStarSquare[5] = {-1.0, 1.0, -1.0, 1.0, -1.0};

ScalarField minor_det(const std::array<std::array<ScalarField, 4>, 4>& m,
                      std::span<const int> rows, std::span<const int> cols) {
  const int k = static_cast<int>(rows.size());
  if (k == 0) return one();
  if (k == 1) return m[rows[0]][cols[0]];
  // cofactor expansion along the first row
  ScalarField acc = zero();
  std::vector<int> sub_cols(k - 1);
  for (int j = 0; j < k; ++j) {
    for (int t = 0, s = 0; t < k; ++t)
      if (t != j) sub_cols[s++] = cols[t];
    ScalarField d =
        m[rows[0]][cols[j]] *
        minor_det(m, rows.subspan(1), std::span<const int>(sub_cols));
    acc = (j % 2 == 0) ? acc + d : acc - d;
  }
  return acc;
}

}  // namespace

ChartPtr make_chart(std::array<std::string, 4> coords) {
  auto c = std::make_shared<Chart>();
  c->coords = std::move(coords);
  return c;
}

int binom4(int k) {
  static constexpr int b[5] = {1, 4, 6, 4, 1};
  return b[k];
}

std::span<const int> combo_indices(int grade, int pos) {
  switch (grade) {
    case 0: return {};
    case 1: return kCombos1[pos];
    case 2: return kCombos2[pos];
    case 3: return kCombos3[pos];
    default: return kCombos4[pos];
  }
}

int combo_position(int grade, std::span<const int> sorted) {
  for (int p = 0; p < binom4(grade); ++p) {
    auto c = combo_indices(grade, p);
    if (std::equal(c.begin(), c.end(), sorted.begin(), sorted.end())) return p;
  }
  throw std::invalid_argument("combo_position: not a sorted multi-index");
}

KForm::KForm(int grade, ChartPtr chart)
    : grade_(grade), chart_(std::move(chart)), comps_(binom4(grade), zero()) {}

KForm KForm::scalar(ChartPtr chart, ScalarField f) {
  KForm k(0, std::move(chart));
  k.comps_[0] = std::move(f);
  return k;
}

KForm KForm::coordinate_differential(ChartPtr chart, int mu) {
  KForm k(1, std::move(chart));
  k.comps_[mu] = one();
  return k;
}

ScalarField KForm::component(std::span<const int> indices) const {
  std::vector<int> idx(indices.begin(), indices.end());
  int sign = sort_sign(idx);
  if (sign == 0) return zero();
  const ScalarField& c = comps_[combo_position(grade_, idx)];
  return sign > 0 ? c : -c;
}

bool KForm::is_zero() const {
  for (const auto& c : comps_)
    if (!c.is_zero()) return false;
  return true;
}

KForm operator+(const KForm& a, const KForm& b) {
  KForm r(a.grade(), a.chart());
  for (int i = 0; i < a.num_components(); ++i) r.comp(i) = a.comp(i) + b.comp(i);
  return r;
}

KForm operator-(const KForm& a, const KForm& b) {
  KForm r(a.grade(), a.chart());
  for (int i = 0; i < a.num_components(); ++i) r.comp(i) = a.comp(i) - b.comp(i);
  return r;
}

KForm operator-(const KForm& a) {
  KForm r(a.grade(), a.chart());
  for (int i = 0; i < a.num_components(); ++i) r.comp(i) = -a.comp(i);
  return r;
}

KForm operator*(const ScalarField& s, const KForm& a) {
  KForm r(a.grade(), a.chart());
  for (int i = 0; i < a.num_components(); ++i) r.comp(i) = s * a.comp(i);
  return r;
}

KForm operator*(double s, const KForm& a) {
  return ScalarField::number(s) * a;
}

MetricData minkowski_metric(ChartPtr chart) {
  MetricData m;
  m.chart = std::move(chart);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double v = i != j ? 0.0 : (i == 0 ? 1.0 : -1.0);
      m.g[i][j] = ScalarField::number(v);
      m.ginv[i][j] = ScalarField::number(v);
    }
  m.sqrt_abs_det = one();
  m.orientation = +1;
  return m;
}

KForm wedge(const KForm& a, const KForm& b) {
  int j = a.grade(), k = b.grade();
  if (j + k > 4) return KForm(4, a.chart());
  KForm r(j + k, a.chart());
  std::vector<int> merged(j + k);
  for (int pa = 0; pa < a.num_components(); ++pa) {
    if (a.comp(pa).is_zero()) continue;
    auto ia = combo_indices(j, pa);
    for (int pb = 0; pb < b.num_components(); ++pb) {
      if (b.comp(pb).is_zero()) continue;
      auto ib = combo_indices(k, pb);
      std::copy(ia.begin(), ia.end(), merged.begin());
      std::copy(ib.begin(), ib.end(), merged.begin() + j);
      std::vector<int> idx = merged;
      int sign = sort_sign(idx);
      if (sign == 0) continue;
      int pos = combo_position(j + k, idx);
      ScalarField term = a.comp(pa) * b.comp(pb);
      r.comp(pos) = sign > 0 ? r.comp(pos) + term : r.comp(pos) - term;
    }
  }
  return r;
}

KForm exterior_derivative(const KForm& a) {
  int k = a.grade();
  if (k == 4) return KForm(4, a.chart());
  KForm r(k + 1, a.chart());
  const auto& coords = a.chart()->coords;
  std::vector<int> idx(k + 1);
  for (int p = 0; p < a.num_components(); ++p) {
    if (a.comp(p).is_zero()) continue;
    auto I = combo_indices(k, p);
    for (int mu = 0; mu < 4; ++mu) {
      if (std::find(I.begin(), I.end(), mu) != I.end()) continue;
      ScalarField df = differentiate(a.comp(p), coords[mu]);
      if (df.is_zero()) continue;
      idx[0] = mu;
      std::copy(I.begin(), I.end(), idx.begin() + 1);
      std::vector<int> sorted = idx;
      int sign = sort_sign(sorted);
      int pos = combo_position(k + 1, sorted);
      r.comp(pos) = sign > 0 ? r.comp(pos) + df : r.comp(pos) - df;
    }
  }
  return r;
}

namespace {

// Contraction by the raised coordinate covector dx^i: components
// g^{i nu} beta_{nu, J}.
KForm contract_basis(int i, const KForm& beta, const MetricData& m) {
  int k = beta.grade();
  KForm r(k - 1, beta.chart());
  for (int p = 0; p < beta.num_components(); ++p) {
    if (beta.comp(p).is_zero()) continue;
    auto C = combo_indices(k, p);
    for (int q = 0; q < k; ++q) {
      if (m.ginv[i][C[q]].is_zero()) continue;
      std::vector<int> rest;
      rest.reserve(k - 1);
      for (int t = 0; t < k; ++t)
        if (t != q) rest.push_back(C[t]);
      int pos = combo_position(k - 1, rest);
      ScalarField term = m.ginv[i][C[q]] * beta.comp(p);
      r.comp(pos) = (q % 2 == 0) ? r.comp(pos) + term : r.comp(pos) - term;
    }
  }
  return r;
}

}  // namespace

KForm left_contract(const KForm& a, const KForm& b, const MetricData& m) {
  int j = a.grade(), k = b.grade();
  if (j > k)
    throw std::invalid_argument("left_contract: grade(a) exceeds grade(b)");
  KForm r(k - j, a.chart());
  for (int pa = 0; pa < a.num_components(); ++pa) {
    if (a.comp(pa).is_zero()) continue;
    auto I = combo_indices(j, pa);
    // (dx^{i1} ^ ... ^ dx^{ij}) _| beta applies the last factor innermost.
    KForm acc = b;
    for (int t = j - 1; t >= 0; --t) acc = contract_basis(I[t], acc, m);
    r = r + a.comp(pa) * acc;
  }
  return r;
}

KForm hodge_star(const KForm& a, const MetricData& m) {
  int k = a.grade();
  KForm r(4 - k, a.chart());
  std::vector<int> concat(4);
  for (int jp = 0; jp < binom4(4 - k); ++jp) {
    auto J = combo_indices(4 - k, jp);
    // complement of J in {0,1,2,3}
    std::vector<int> M;
    for (int i = 0; i < 4; ++i)
      if (std::find(J.begin(), J.end(), i) == J.end()) M.push_back(i);
    std::copy(M.begin(), M.end(), concat.begin());
    std::copy(J.begin(), J.end(), concat.begin() + k);
    std::vector<int> tmp = concat;
    int eps = sort_sign(tmp) * m.orientation;
    // alpha^M: raise all indices of the antisymmetric component array
    ScalarField raised = zero();
    for (int ip = 0; ip < binom4(k); ++ip) {
      if (a.comp(ip).is_zero()) continue;
      auto I = combo_indices(k, ip);
      ScalarField d = minor_det(m.ginv, std::span<const int>(M), I);
      raised = raised + d * a.comp(ip);
    }
    ScalarField c = m.sqrt_abs_det * raised;
    r.comp(jp) = eps >= 0 ? c : -c;
  }
  return r;
}

KForm hodge_star_inverse(const KForm& a, const MetricData& m) {
  // a = star(b) with b of grade 4-k, so star(a) = kStarSquare[4-k] * b.
  int k = a.grade();
  KForm s = hodge_star(a, m);
  return kStarSquare[4 - k] < 0 ? -s : s;
}

KForm codifferential(const KForm& a, const MetricData& m) {
  if (a.grade() == 0)
    throw std::invalid_argument("codifferential: undefined on grade 0");
  return hodge_star(exterior_derivative(hodge_star(a, m)), m);
}

KForm hodge_dalembertian(const KForm& a, const MetricData& m) {
  int k = a.grade();
  KForm acc(k, a.chart());
  if (k >= 1) acc = acc + exterior_derivative(codifferential(a, m));
  if (k <= 3) acc = acc + codifferential(exterior_derivative(a), m);
  return -acc;
}

ScalarField form_scalar_product(const KForm& a, const KForm& b,
                                const MetricData& m) {
  int k = a.grade();
  ScalarField acc = zero();
  for (int pa = 0; pa < binom4(k); ++pa) {
    if (a.comp(pa).is_zero()) continue;
    auto I = combo_indices(k, pa);
    for (int pb = 0; pb < binom4(k); ++pb) {
      if (b.comp(pb).is_zero()) continue;
      auto J = combo_indices(k, pb);
      acc = acc + a.comp(pa) * b.comp(pb) * minor_det(m.ginv, I, J);
    }
  }
  return acc;
}

std::vector<double> components_at(const KForm& a, const Bindings& env) {
  std::vector<double> out(a.num_components());
  for (int i = 0; i < a.num_components(); ++i)
    out[i] = evaluate(a.comp(i), env);
  return out;
}

}  // namespace gravcheck
