#ifndef GRAVCHECK_ENERGY_HPP
#define GRAVCHECK_ENERGY_HPP

#include <map>
#include <optional>

#include "gravcheck/gravfield.hpp"
#include "gravcheck/tape.hpp"

namespace gravcheck {

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights);

enum class ChartKind { Spherical, Cartesian };

/// Coordinate 2-sphere: fixed chart radius in a spherical chart, or a round
/// sphere about `center` in a Cartesian chart. Quadrature is Gauss-Legendre
/// in cos(theta) times periodic trapezoid in phi.
struct SphereSpec {
  double radius = 0.0;
  int n_theta = 32;
  int n_phi = 64;
  std::array<double, 3> center{0.0, 0.0, 0.0};
};

/// Frame data the integrators need about the ambient chart.
struct ChartFrame {
  ChartPtr chart;
  ChartKind kind = ChartKind::Spherical;
  double time_value = 0.0;                // the t = const slice
  std::map<std::string, double> params;   // parameter bindings
};

/// Surface integral of a 2-form over coordinate spheres; the form is
/// compiled once and reused across radii and quadrature orders.
class SphereFormIntegral {
public:
  SphereFormIntegral(const KForm& two_form, const ChartFrame& frame);
  double at(const SphereSpec& s) const;

private:
  ChartFrame frame_;
  std::unique_ptr<Tape> tape_;
  std::vector<std::string> symbols_;
};

/// Volume integral of a 3-form over the shell r1 <= r <= r2 at fixed time
/// (spherical charts), pulled back to (r, theta, phi).
class ShellFormIntegral {
public:
  ShellFormIntegral(const KForm& three_form, const ChartFrame& frame);
  double between(double r1, double r2, int n_r, const SphereSpec& s) const;

private:
  ChartFrame frame_;
  std::unique_ptr<Tape> tape_;
  std::vector<std::string> symbols_;
};

/// Foliation by t = const slices: normal 1-form n = N^2 dt and lapse N.
struct FoliationSpec {
  KForm n;        // grade 1
  ScalarField N;  // positive on the domain
};

/// Default foliation of a metric: N = (g^{tt})^{-1/2}, n = N^2 dt.
FoliationSpec default_foliation(const MetricData& m);

/// Splits A into the tangent part n _| (dt ^ A) and the orthogonal part
/// dt ^ (n _| A); the two sum back to A.
struct FoliationSplit {
  KForm tangent;
  KForm orthogonal;
};
FoliationSplit foliation_split(const KForm& a, const FoliationSpec& f,
                               const MetricData& m);

/// Tangential exterior derivative, n _| (dt ^ dA).
KForm tangential_derivative(const KForm& a, const FoliationSpec& f,
                            const MetricData& m);

/// Hodge dual of the slice metric acting on tangent forms,
/// star_m(A) = star_g((n/N) ^ A).
KForm slice_hodge(const KForm& a, const FoliationSpec& f, const MetricData& m);

/// The Hamiltonian boundary 2-form -N gbar_i ^ star_m(dbar gbar^i), whose
/// sphere integral is the quasi-local energy of the foliation formalism and
/// asymptotically the ADM energy.
KForm boundary_two_form(const FieldTheory& ft, const FoliationSpec& f);

/// Quasi-local momentum P^a = -integral of star(S^a) over the sphere.
double quasi_local_energy(const EnergyMomentumSet& ems, int index,
                          const ChartFrame& frame, const SphereSpec& s);

/// Boundary-term energy: sphere integral of boundary_two_form.
double boundary_term(const FieldTheory& ft, const FoliationSpec& f,
                     const ChartFrame& frame, const SphereSpec& s);

/// ADM-type surface energies on an asymptotically Cartesian chart.
struct AdmSample {
  double e_prime;          // direct boundary-term integral (h56 route)
  double e_components;     // (d_i h_ik - d_k h_ii) star_m gbar^k route
  double e_as_printed;     // the misprinted variant, reported only
  double e_textbook;       // 1/(16 pi) flat-normal surface integral oracle
};
AdmSample adm_energy(const FieldTheory& ft, const ChartFrame& frame,
                     const SphereSpec& s);

/// Least-squares fit E(r) = E_inf + c1/r + c2/r^2.
struct ExtrapolationResult {
  double e_inf = 0.0;
  double c1 = 0.0, c2 = 0.0;
  double residual_norm = 0.0;
  double condition = 0.0;
};
ExtrapolationResult extrapolate_to_infinity(
    const std::vector<std::pair<double, double>>& samples);

/// Calibration constant: raw boundary/quasi-local integrals divide by this
/// to land on the mass in geometric units (recorded in the convention sheet).
extern const double kAdmNormalization;

}  // namespace gravcheck

#endif
