#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

namespace elastinv {

using cdouble = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using CMat3 = Eigen::Matrix3cd;

inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Harmonic indexing
// ---------------------------------------------------------------------------

struct HarmonicIndex {
  int n = 0;
  int m = 0;

  bool valid() const noexcept { return n >= 0 && m >= -n && m <= n; }
  friend bool operator==(const HarmonicIndex&, const HarmonicIndex&) = default;
};

/// One-based flat index n^2 + n + m + 1, a bijection onto 1..(N+1)^2.
constexpr int flatten(HarmonicIndex idx) noexcept {
  return idx.n * idx.n + idx.n + idx.m + 1;
}

/// Zero-based storage offset n^2 + n + m.
constexpr int flat0(int n, int m) noexcept { return n * n + n + m; }

/// Number of (n, m) pairs with n <= N.
constexpr int harmonic_count(int N) noexcept { return (N + 1) * (N + 1); }

/// Inverse of flatten(); throws DomainError for i < 1.
HarmonicIndex unflatten(int i);

// ---------------------------------------------------------------------------
// Spherical coordinates
// ---------------------------------------------------------------------------

struct SphericalPoint {
  double r = 1.0;
  double theta = 0.0;  ///< polar angle in [0, pi]
  double phi = 0.0;    ///< azimuth in [0, 2 pi)
};

Vec3 to_cartesian(const SphericalPoint& p);
SphericalPoint to_spherical(const Vec3& x);

/// Local orthonormal frame (e_r, e_theta, e_phi) at the given angles.
struct SphericalFrame {
  Vec3 e_r, e_theta, e_phi;
};
SphericalFrame spherical_frame(double theta, double phi);

// ---------------------------------------------------------------------------
// Spherical Hankel functions of the first kind
// ---------------------------------------------------------------------------

struct HankelValue {
  cdouble value;
  cdouble derivative;
};

/// h_n^(1)(t) and its derivative by upward recurrence. Throws DomainError for
/// t <= 0 or n < 0. Values overflow to infinity for n >> t; use the ratio
/// routines below in that regime.
HankelValue spherical_hankel1(int n, double t);

/// h_0..h_nmax at t with derivatives.
std::vector<HankelValue> spherical_hankel1_all(int nmax, double t);

/// z_n(t) = t h_n'(t) / h_n(t), evaluated as t h_{n-1}/h_n - (n + 1) through
/// the ratio recurrence so that it stays finite for any n.
cdouble z_log_derivative(int n, double t);
std::vector<cdouble> z_log_derivative_all(int nmax, double t);

/// z_n(t) + n + 1 for n = 0..nmax, formed directly from t h_{n-1}/h_n. Use it
/// where z_n is combined with terms of size n, e.g. in Lambda_n.
std::vector<cdouble> z_shifted_all(int nmax, double t);

/// h_n(t) / h_n(t_ref) and z_n(t) for n = 0..nmax. Built from products of
/// consecutive ratios, so no intermediate Hankel value overflows.
struct HankelRatios {
  std::vector<cdouble> ratio;
  std::vector<cdouble> z;
};
HankelRatios hankel_ratios(int nmax, double t, double t_ref);

// ---------------------------------------------------------------------------
// Spherical harmonics
//
// Y_n^m(theta, phi) = P_n^m(cos theta) e^{i m phi}, orthonormal on the unit
// sphere, Condon-Shortley phase included in P_n^m, and
// Y_n^{-m} = (-1)^m conj(Y_n^m).
// ---------------------------------------------------------------------------

/// Normalized associated Legendre values for 0 <= m <= n <= N at one angle.
/// `p` = P_n^m, `dp` = dP_n^m/dtheta, `q` = P_n^m / sin(theta) for m >= 1
/// (computed without dividing, so it is finite at the poles).
class LegendreTable {
 public:
  LegendreTable() = default;
  LegendreTable(int N, double theta);

  int order() const noexcept { return N_; }
  double p(int n, int m) const { return p_[tri(n, m)]; }
  double dp(int n, int m) const { return dp_[tri(n, m)]; }
  double q(int n, int m) const { return q_[tri(n, m)]; }

 private:
  static constexpr int tri(int n, int m) noexcept { return n * (n + 1) / 2 + m; }

  int N_ = -1;
  std::vector<double> p_, dp_, q_;
};

cdouble sph_harmonic(HarmonicIndex idx, double theta, double phi);

/// Y_n^m and its first angular derivatives at one point, for all n <= N.
struct HarmonicSample {
  cdouble y;        ///< Y_n^m
  cdouble dtheta;   ///< dY/dtheta
  cdouble dphi;     ///< dY/dphi = i m Y
};
std::vector<HarmonicSample> sph_harmonics_all(int N, double theta, double phi);

/// T_n^m, V_n^m, W_n^m on the sphere of radius R, orthonormal in L^2(Gamma_R).
/// For n = 0 the tangential pair is returned as zero vectors and `degenerate`
/// is set.
struct VectorHarmonics {
  CVec3 T, V, W;
  bool degenerate = false;
};
VectorHarmonics vector_harmonics(HarmonicIndex idx, double theta, double phi,
                                 double R);

// ---------------------------------------------------------------------------
// Quadrature and point sets
// ---------------------------------------------------------------------------

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(int count);

/// Tensor rule on the unit sphere: (order+1) Gauss-Legendre nodes in cos(theta)
/// times (2 order + 2) equispaced azimuths. Integrates Y_n^m conj(Y_n'^m')
/// exactly for n, n' <= order. Weights sum to 4 pi.
class SphereQuadrature {
 public:
  explicit SphereQuadrature(int order);

  int order() const noexcept { return order_; }
  std::size_t size() const noexcept { return theta_.size(); }
  int theta_count() const noexcept { return order_ + 1; }
  int phi_count() const noexcept { return 2 * order_ + 2; }

  double theta(std::size_t k) const { return theta_[k]; }
  double phi(std::size_t k) const { return phi_[k]; }
  double weight(std::size_t k) const { return weight_[k]; }

 private:
  int order_;
  std::vector<double> theta_, phi_, weight_;
};

/// Roughly uniform points on the sphere of radius R (Fibonacci lattice with
/// half-step offsets; never hits the poles exactly).
std::vector<Vec3> fibonacci_sphere(int count, double R);

}  // namespace elastinv
