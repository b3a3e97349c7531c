#pragma once

#include <vector>

#include <Eigen/Core>

#include "elastinv/forward.hpp"
#include "elastinv/geometry.hpp"

namespace elastinv {

/// d u / d nu of the total field u = u_inc + v at the solver's boundary nodes,
/// 3 rows per node. `packed` are the scattered-field coefficients.
Eigen::VectorXcd normal_derivative_total_field(const ExteriorDirichletSolver& solver,
                                               const Eigen::VectorXcd& packed,
                                               const IncidentWave& w);

/// q_i = nu_j {Re|Im} Y_n^m at every boundary node; rows are nodes, columns
/// the 6(N+1)^2 surface coefficients.
Eigen::MatrixXd perturbation_matrix(const SurfaceParam& sp, const BoundarySample& bs);

/// Rows 3k..3k+2 of column i hold u'_i(x_k), where u'_i is the radiating
/// solution with Dirichlet data -q_i d u / d nu on dD.
struct ShapeJacobian {
  Eigen::MatrixXcd J;
  Eigen::VectorXd residual;  ///< relative boundary residual per column
};

ShapeJacobian shape_jacobian(const ExteriorDirichletSolver& solver, const SurfaceParam& sp,
                             const Eigen::VectorXcd& packed, const IncidentWave& w,
                             const std::vector<Vec3>& points);

/// One column of the shape Jacobian; i is 1-based.
Eigen::VectorXcd domain_derivative(const ExteriorDirichletSolver& solver,
                                   const SurfaceParam& sp, const Eigen::VectorXcd& packed,
                                   const IncidentWave& w, int i,
                                   const std::vector<Vec3>& points);

/// u'(x_k) for the normal perturbation with data -h(x) d u / d nu.
Eigen::VectorXcd domain_derivative_for(const ExteriorDirichletSolver& solver,
                                       const Eigen::VectorXcd& packed, const IncidentWave& w,
                                       const Eigen::VectorXd& h_at_nodes,
                                       const std::vector<Vec3>& points);

struct ObjectiveResult {
  double f = 0.0;
  Eigen::VectorXd gradient;   ///< empty when not requested
  double max_residual = 0.0;  ///< worst relative boundary residual among the solves
};

/// f = 1/2 sum |F_k(C) - u_k|^2 over every measurement set, with the gradient
/// Re sum u'_i . conj(F_k - u_k). Sets sharing a medium, frequency and R share
/// one factorization. Forward failures propagate as SolverError/GeometryError.
ObjectiveResult objective_and_gradient(const SurfaceParam& C,
                                       const std::vector<MeasurementSet>& data,
                                       const SolverOptions& opt, bool with_gradient = true);

/// Predicted total field F(C) for each measurement set's incident wave and points.
std::vector<std::vector<CVec3>> predict(const SurfaceParam& C,
                                        const std::vector<MeasurementSet>& data,
                                        const SolverOptions& opt);

}  // namespace elastinv
