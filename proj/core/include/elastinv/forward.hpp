#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/QR>

#include "elastinv/geometry.hpp"
#include "elastinv/modal.hpp"

namespace elastinv {

enum class WaveKind { Compressional, Shear };

/// Plane wave d e^{i kp x.d} (compressional) or p e^{i ks x.d} (shear).
struct IncidentWave {
  WaveKind kind = WaveKind::Compressional;
  Vec3 direction = Vec3(0.0, 1.0, 0.0);
  Vec3 polarization = Vec3::Zero();  ///< shear only

  static IncidentWave compressional(const Vec3& d);
  static IncidentWave shear(const Vec3& d, const Vec3& p);
  void validate() const;  ///< throws ValidationError
};

struct IncidentValue {
  CVec3 u;
  CMat3 gradient;  ///< J(i, j) = d u_i / d x_j
};
IncidentValue incident_field(const IncidentWave& w, const Medium& med, const Vec3& x);

/// Six unit directions pointing from the cube face centres to the origin.
std::vector<Vec3> cube_face_directions();

struct SolverOptions {
  int order = -1;          ///< modal truncation; < 0 picks default_truncation
  int quad_order = -1;     ///< boundary rule order; < 0 picks order + 4
  double rcond = 1e-12;    ///< singular values below rcond * sigma_max are dropped
  double tolerance = 1e-2; ///< relative residual above which solve() throws
};

/// Outgoing expansion fitted to Dirichlet data on dD.
struct ScatteredSolution {
  PotentialCoeffs potentials;
  Eigen::VectorXcd packed;   ///< coefficients in solver column order
  double R = 1.0;
  int order = 0;
  double residual = 0.0;           ///< weighted RMS of fit - data on dD
  double relative_residual = 0.0;  ///< residual / weighted RMS of data
};

/// Weighted least-squares fit of the radiating basis to boundary data. The
/// factorization depends only on surface, medium and order, so one instance
/// serves any number of right-hand sides.
class ExteriorDirichletSolver {
 public:
  ExteriorDirichletSolver(const Surface& surface, const Medium& med, double R,
                          SolverOptions opt = {});

  const BoundarySample& boundary() const noexcept { return boundary_; }
  const Medium& medium() const noexcept { return med_; }
  double radius() const noexcept { return R_; }
  int order() const noexcept { return N_; }
  int unknowns() const noexcept { return static_cast<int>(cols_.size()); }
  int rank() const noexcept { return rank_; }
  /// sigma_max / smallest retained sigma of the equilibrated system.
  double condition() const noexcept { return condition_; }
  const SolverOptions& options() const noexcept { return opt_; }

  /// Data at the boundary nodes; throws SolverError above the tolerance.
  ScatteredSolution solve(const std::vector<CVec3>& data) const;

  /// Columns of `data` are stacked 3-vectors per boundary node. Returns packed
  /// coefficients; residuals and relative residuals per column if requested.
  Eigen::MatrixXcd solve_packed(const Eigen::MatrixXcd& data,
                                Eigen::VectorXd* residual = nullptr,
                                Eigen::VectorXd* relative = nullptr) const;

  /// Values of the basis at arbitrary points, 3 rows per point.
  Eigen::MatrixXcd field_matrix(const std::vector<Vec3>& points) const;

  /// d v / d nu at the boundary nodes for packed coefficients, 3 rows per node.
  Eigen::MatrixXcd normal_derivative(const Eigen::MatrixXcd& packed) const;

  PotentialCoeffs unpack(const Eigen::VectorXcd& packed) const;

 private:
  Medium med_;
  double R_;
  int N_;
  SolverOptions opt_;
  BoundarySample boundary_;
  std::vector<int> cols_;          // basis columns kept (n = 0 psi dropped)
  Eigen::VectorXd row_weight_;     // sqrt of surface weights, per row
  Eigen::VectorXd col_scale_;      // equilibration
  double weight_sum_ = 0.0;
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr_;
  Eigen::MatrixXcd svd_u_, svd_v_;
  Eigen::VectorXd sigma_;
  int rank_ = 0;
  double condition_ = 0.0;
  Eigen::MatrixXcd dnormal_;       // normal derivatives of kept columns
};

/// One-shot solve with data given as a function of the boundary point.
ScatteredSolution solve_exterior_dirichlet(
    const SurfaceParam& sp, const std::function<CVec3(const Vec3&)>& data,
    const Medium& med, double R, SolverOptions opt = {});

/// Total displacement at points on Gamma_R.
struct MeasurementSet {
  double R = 1.0;
  Medium medium;
  IncidentWave incident;
  std::vector<Vec3> points;
  std::vector<CVec3> u;
  double delta = 0.0;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return points.size(); }
  void validate() const;  ///< throws ValidationError
};

/// Incident data -u_inc on the boundary nodes of a solver.
Eigen::VectorXcd incident_dirichlet_data(const ExteriorDirichletSolver& solver,
                                         const IncidentWave& w);

MeasurementSet scattering_operator(const SurfaceParam& sp, const IncidentWave& w,
                                   const Medium& med, double R,
                                   const std::vector<Vec3>& points,
                                   SolverOptions opt = {});

/// u (1 + delta rand) per complex component, rand uniform in [-1, 1].
MeasurementSet add_noise(const MeasurementSet& ms, double delta, std::uint64_t seed);

}  // namespace elastinv
