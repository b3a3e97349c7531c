#pragma once

#include <vector>

#include <Eigen/Core>

#include "elastinv/specfun.hpp"

namespace elastinv {

/// Homogeneous isotropic elastic medium with unit density.
struct Medium {
  double lambda = 2.0;
  double mu = 1.0;
  double omega = 1.0;

  Medium() = default;
  Medium(double lambda_, double mu_, double omega_);

  double kappa_p() const;  ///< omega / sqrt(lambda + 2 mu)
  double kappa_s() const;  ///< omega / sqrt(mu)
  Medium at_frequency(double omega_) const { return {lambda, mu, omega_}; }
};

/// Default modal truncation ceil(k + 4 k^{1/3} + 8), k = kappa_s R.
int default_truncation(const Medium& med, double R);

/// Per-(n, m) coefficient triples for n <= N, stored at flat0(n, m).
struct ModalTriples {
  int N = 0;
  std::vector<CVec3> blocks;

  ModalTriples() = default;
  explicit ModalTriples(int N_);

  CVec3& at(int n, int m) { return blocks[flat0(n, m)]; }
  const CVec3& at(int n, int m) const { return blocks[flat0(n, m)]; }
  std::size_t size() const noexcept { return blocks.size(); }
};

/// Trace coefficients (v1, v2, v3) in the (T, V, W) basis on Gamma_R.
struct DisplacementCoeffs : ModalTriples {
  double R = 1.0;
  DisplacementCoeffs() = default;
  DisplacementCoeffs(int N_, double R_) : ModalTriples(N_), R(R_) {}
};

/// Potential coefficients (phi, psi_2, psi_3) normalised on Gamma_R; the psi
/// entries of the n = 0 block are always zero.
struct PotentialCoeffs : ModalTriples {
  using ModalTriples::ModalTriples;
};

/// Coefficients of psi in the wave-function basis (alpha N + beta M).
struct WaveFunctionCoeffs {
  cdouble alpha, beta;
};
WaveFunctionCoeffs wave_function_coeffs(const Medium& med, double R, int n,
                                        const CVec3& potentials);

// ---------------------------------------------------------------------------
// Block algebra. All 3x3 matrices act on (T, V, W)-ordered displacement
// triples or on (phi, psi_2, psi_3) potential triples.
// ---------------------------------------------------------------------------

/// Lambda_n = z_n(kp R)(1 + z_n(ks R)) - n(n+1); Im Lambda_n < 0.
cdouble lambda_n(const Medium& med, double R, int n);

/// Matrix P_n with v_n = P_n (phi, psi_2, psi_3)^T.
CMat3 potential_to_displacement_matrix(const Medium& med, double R, int n);

DisplacementCoeffs potentials_to_displacement(const PotentialCoeffs& p,
                                              const Medium& med, double R);
PotentialCoeffs displacement_to_potentials(const DisplacementCoeffs& v,
                                           const Medium& med);

/// G_n with (w_T, w_V, w_W) = G_n (phi, psi_2, psi_3) / R^2 for the boundary
/// operator B v = mu d_r v + (lambda + mu)(div v) e_r. At n = 0 only the
/// (W, phi) entry is populated.
CMat3 dtn_matrix_G(const Medium& med, double R, int n);

/// M_n with b_n = M_n v_n, the exact modal Dirichlet-to-Neumann block.
CMat3 dtn_matrix_M(const Medium& med, double R, int n);

/// -(M_n + M_n^*) / 2.
CMat3 dtn_hermitian_part(const Medium& med, double R, int n);

/// Smallest N0 <= nmax such that -(M_n + M_n^*)/2 is positive definite for
/// every N0 <= n <= nmax, or -1 if the block at nmax is not.
int definiteness_onset(const Medium& med, double R, int nmax);

/// B v expanded from the potentials (w = G_n p / R^2 per block).
DisplacementCoeffs boundary_operator_series(const PotentialCoeffs& p,
                                            const Medium& med, double R);

/// Transparent boundary operator T: b_n = M_n v_n.
DisplacementCoeffs apply_T(const DisplacementCoeffs& v, const Medium& med);

/// Scalar DtN: (T1 phi)_n^m = z_n(kp R) phi_n^m / R.
std::vector<cdouble> apply_T1(const std::vector<cdouble>& phi, const Medium& med,
                              double R);

/// Tangential operator T2 acting on (T, V) coefficient pairs; the W slot of
/// each triple is ignored and returned as zero.
DisplacementCoeffs apply_T2(const DisplacementCoeffs& tangential,
                            const Medium& med);

// ---------------------------------------------------------------------------
// Radiating fields
// ---------------------------------------------------------------------------

/// Cartesian values (and optionally Jacobians) of the radiating basis fields
/// generated by unit potentials. Column 3 * flat0(n, m) + c holds the field
/// of potential component c in {phi, psi_2, psi_3}; the psi columns of n = 0
/// are zero. Jacobian column layout: J(i, j) = d v_i / d x_j at i + 3 j.
struct BasisValues {
  Eigen::Matrix<cdouble, 3, Eigen::Dynamic> value;
  Eigen::Matrix<cdouble, 9, Eigen::Dynamic> gradient;
};

class RadiatingBasis {
 public:
  RadiatingBasis(const Medium& med, double R, int N);

  int order() const noexcept { return N_; }
  int columns() const noexcept { return 3 * harmonic_count(N_); }
  const Medium& medium() const noexcept { return med_; }
  double radius() const noexcept { return R_; }

  /// Evaluates every basis field at x (x != 0). The gradient block is only
  /// filled when requested.
  void evaluate(const Vec3& x, bool with_gradient, BasisValues& out) const;

 private:
  Medium med_;
  double R_;
  int N_;
};

/// Stacks potential triples into the column layout used by RadiatingBasis.
Eigen::VectorXcd pack_potentials(const PotentialCoeffs& p);

struct FieldValue {
  CVec3 v;
  CMat3 gradient;      ///< J(i, j) = d v_i / d x_j
  bool inside_trace_sphere = false;
};

/// v = grad phi + curl psi of the radiating field with potentials p. Points
/// with r < R (1 - 1e-8) are evaluated but flagged, since the expansion is
/// only guaranteed outside the smallest sphere enclosing the obstacle.
FieldValue eval_radiating_field(const PotentialCoeffs& p, const Medium& med,
                                double R, const SphericalPoint& point,
                                bool with_gradient = true);

struct ScalarPotentialValue {
  cdouble phi;
  cdouble dphi_dr;
};
ScalarPotentialValue eval_scalar_potential(const PotentialCoeffs& p,
                                           const Medium& med, double R,
                                           const SphericalPoint& point);

/// The divergence-free vector potential psi.
CVec3 eval_vector_potential(const PotentialCoeffs& p, const Medium& med, double R,
                            const SphericalPoint& point);

/// B v = mu d_r v + (lambda + mu)(div v) e_r from a pointwise Jacobian.
CVec3 boundary_traction(const CMat3& gradient, const Vec3& e_r, const Medium& med);

// ---------------------------------------------------------------------------
// Projections onto the (T, V, W) basis by quadrature
// ---------------------------------------------------------------------------

/// Coefficients of a vector field sampled at the nodes of `quad` on Gamma_R.
DisplacementCoeffs project_tvw(const std::vector<CVec3>& samples,
                               const SphereQuadrature& quad, double R, int N);

/// Synthesises sum v_n^m (T, V, W) at one point of Gamma_R.
CVec3 synthesize_tvw(const DisplacementCoeffs& v, double theta, double phi);

/// Weighted H^s(Gamma_R) norm of a coefficient set.
double sobolev_norm(const ModalTriples& v, double s);

}  // namespace elastinv
