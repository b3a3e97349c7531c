#include "elastinv/derivative.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>
#include <tuple>

#include "elastinv/errors.hpp"

namespace elastinv {

Eigen::VectorXcd normal_derivative_total_field(const ExteriorDirichletSolver& solver,
                                               const Eigen::VectorXcd& packed,
                                               const IncidentWave& w) {
  Eigen::VectorXcd d = solver.normal_derivative(packed);
  const BoundarySample& bs = solver.boundary();
  for (std::size_t k = 0; k < bs.size(); ++k) {
    const IncidentValue inc = incident_field(w, solver.medium(), bs.points[k]);
    d.segment<3>(3 * k) += inc.gradient * bs.normals[k].cast<cdouble>();
  }
  return d;
}

Eigen::MatrixXd perturbation_matrix(const SurfaceParam& sp, const BoundarySample& bs) {
  const int block = harmonic_count(sp.N);
  Eigen::MatrixXd Q(static_cast<Eigen::Index>(bs.size()), 6 * block);
  for (std::size_t k = 0; k < bs.size(); ++k) {
    const auto Y = sph_harmonics_all(sp.N, bs.theta[k], bs.phi[k]);
    for (int j = 0; j < 3; ++j) {
      const double nu = bs.normals[k](j);
      for (int f = 0; f < block; ++f) {
        Q(k, 2 * j * block + f) = nu * Y[f].y.real();
        Q(k, (2 * j + 1) * block + f) = nu * Y[f].y.imag();
      }
    }
  }
  return Q;
}

namespace {

// Columns -q_i d u / d nu stacked per node.
Eigen::MatrixXcd derivative_data(const Eigen::MatrixXd& Q, const Eigen::VectorXcd& dnu) {
  Eigen::MatrixXcd B(dnu.size(), Q.cols());
  for (Eigen::Index k = 0; k < Q.rows(); ++k) {
    for (int i = 0; i < 3; ++i) B.row(3 * k + i) = -dnu(3 * k + i) * Q.row(k).cast<cdouble>();
  }
  return B;
}

}  // namespace

ShapeJacobian shape_jacobian(const ExteriorDirichletSolver& solver, const SurfaceParam& sp,
                             const Eigen::VectorXcd& packed, const IncidentWave& w,
                             const std::vector<Vec3>& points) {
  const Eigen::VectorXcd dnu = normal_derivative_total_field(solver, packed, w);
  const Eigen::MatrixXd Q = perturbation_matrix(sp, solver.boundary());
  ShapeJacobian out;
  const Eigen::MatrixXcd Y = solver.solve_packed(derivative_data(Q, dnu), nullptr, &out.residual);
  out.J = solver.field_matrix(points) * Y;
  return out;
}

Eigen::VectorXcd domain_derivative(const ExteriorDirichletSolver& solver,
                                   const SurfaceParam& sp, const Eigen::VectorXcd& packed,
                                   const IncidentWave& w, int i,
                                   const std::vector<Vec3>& points) {
  const CoefficientIndex c = decode_coefficient(i, sp.N);
  const BoundarySample& bs = solver.boundary();
  Eigen::VectorXd h(static_cast<Eigen::Index>(bs.size()));
  for (std::size_t k = 0; k < bs.size(); ++k) {
    const cdouble y = sph_harmonic(c.h, bs.theta[k], bs.phi[k]);
    h(k) = bs.normals[k](c.coord) * (c.imag ? y.imag() : y.real());
  }
  return domain_derivative_for(solver, packed, w, h, points);
}

Eigen::VectorXcd domain_derivative_for(const ExteriorDirichletSolver& solver,
                                       const Eigen::VectorXcd& packed, const IncidentWave& w,
                                       const Eigen::VectorXd& h_at_nodes,
                                       const std::vector<Vec3>& points) {
  const Eigen::VectorXcd dnu = normal_derivative_total_field(solver, packed, w);
  const Eigen::MatrixXcd B = derivative_data(h_at_nodes, dnu);
  return solver.field_matrix(points) * solver.solve_packed(B);
}

// ---------------------------------------------------------------------------

namespace {

using GroupKey = std::tuple<double, double, double, double>;

GroupKey key_of(const MeasurementSet& ms) {
  return {ms.medium.lambda, ms.medium.mu, ms.medium.omega, ms.R};
}

void check_residual(double rel, const ExteriorDirichletSolver& solver) {
  if (!(rel <= solver.options().tolerance)) {
    std::ostringstream os;
    os << "forward solve: relative boundary residual " << rel << " exceeds "
       << solver.options().tolerance << " at omega = " << solver.medium().omega;
    throw SolverError(os.str(), rel, solver.condition());
  }
}

template <class Fn>
void for_each_group(const SurfaceParam& C, const std::vector<MeasurementSet>& data,
                    const SolverOptions& opt, Fn&& fn) {
  std::map<GroupKey, std::vector<std::size_t>> groups;
  for (std::size_t s = 0; s < data.size(); ++s) groups[key_of(data[s])].push_back(s);
  const Surface surface(C);
  for (const auto& [key, members] : groups) {
    const MeasurementSet& first = data[members.front()];
    const ExteriorDirichletSolver solver(surface, first.medium, first.R, opt);
    fn(solver, members);
  }
}

}  // namespace

ObjectiveResult objective_and_gradient(const SurfaceParam& C,
                                       const std::vector<MeasurementSet>& data,
                                       const SolverOptions& opt, bool with_gradient) {
  if (data.empty()) throw ValidationError("objective_and_gradient: no data");
  ObjectiveResult out;
  if (with_gradient) out.gradient = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(C.C.size()));
  for_each_group(C, data, opt, [&](const ExteriorDirichletSolver& solver,
                                   const std::vector<std::size_t>& members) {
    Eigen::MatrixXd Q;
    if (with_gradient) Q = perturbation_matrix(C, solver.boundary());
    for (std::size_t s : members) {
      const MeasurementSet& ms = data[s];
      Eigen::VectorXd res, rel;
      const Eigen::VectorXcd x =
          solver.solve_packed(incident_dirichlet_data(solver, ms.incident), &res, &rel);
      check_residual(rel(0), solver);
      out.max_residual = std::max(out.max_residual, rel(0));
      const Eigen::MatrixXcd E = solver.field_matrix(ms.points);
      const Eigen::VectorXcd v = E * x;
      Eigen::VectorXcd misfit(v.size());
      for (std::size_t k = 0; k < ms.points.size(); ++k) {
        misfit.segment<3>(3 * k) = incident_field(ms.incident, ms.medium, ms.points[k]).u +
                                   v.segment<3>(3 * k) - ms.u[k];
      }
      out.f += 0.5 * misfit.squaredNorm();
      if (!with_gradient) continue;
      const Eigen::VectorXcd dnu = normal_derivative_total_field(solver, x, ms.incident);
      const Eigen::MatrixXcd Y = solver.solve_packed(derivative_data(Q, dnu));
      // Re sum_k u'_i(x_k) . conj(misfit_k), with u' = E Y.
      const Eigen::VectorXcd Em = E.adjoint() * misfit;
      out.gradient += (Y.transpose() * Em.conjugate()).real();
    }
  });
  return out;
}

std::vector<std::vector<CVec3>> predict(const SurfaceParam& C,
                                        const std::vector<MeasurementSet>& data,
                                        const SolverOptions& opt) {
  std::vector<std::vector<CVec3>> out(data.size());
  for_each_group(C, data, opt, [&](const ExteriorDirichletSolver& solver,
                                   const std::vector<std::size_t>& members) {
    for (std::size_t s : members) {
      const MeasurementSet& ms = data[s];
      Eigen::VectorXd res, rel;
      const Eigen::VectorXcd x =
          solver.solve_packed(incident_dirichlet_data(solver, ms.incident), &res, &rel);
      check_residual(rel(0), solver);
      const Eigen::VectorXcd v = solver.field_matrix(ms.points) * x;
      out[s].resize(ms.points.size());
      for (std::size_t k = 0; k < ms.points.size(); ++k) {
        out[s][k] = incident_field(ms.incident, ms.medium, ms.points[k]).u + v.segment<3>(3 * k);
      }
    }
  });
  return out;
}

}  // namespace elastinv
