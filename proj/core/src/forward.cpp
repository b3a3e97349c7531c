#include "elastinv/forward.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/SVD>

#include "elastinv/errors.hpp"

namespace elastinv {

namespace {

constexpr cdouble kI{0.0, 1.0};

bool is_unit(const Vec3& v) { return std::abs(v.norm() - 1.0) < 1e-10; }

}  // namespace

IncidentWave IncidentWave::compressional(const Vec3& d) {
  IncidentWave w;
  w.kind = WaveKind::Compressional;
  w.direction = d;
  w.validate();
  return w;
}

IncidentWave IncidentWave::shear(const Vec3& d, const Vec3& p) {
  IncidentWave w;
  w.kind = WaveKind::Shear;
  w.direction = d;
  w.polarization = p;
  w.validate();
  return w;
}

void IncidentWave::validate() const {
  if (!is_unit(direction)) throw ValidationError("IncidentWave: direction is not a unit vector");
  if (kind == WaveKind::Shear) {
    if (!is_unit(polarization)) {
      throw ValidationError("IncidentWave: polarization is not a unit vector");
    }
    if (std::abs(polarization.dot(direction)) > 1e-10) {
      throw ValidationError("IncidentWave: polarization not orthogonal to direction");
    }
  }
}

IncidentValue incident_field(const IncidentWave& w, const Medium& med, const Vec3& x) {
  w.validate();
  const bool p = w.kind == WaveKind::Compressional;
  const double k = p ? med.kappa_p() : med.kappa_s();
  const Vec3& a = p ? w.direction : w.polarization;
  const cdouble e = std::exp(kI * (k * x.dot(w.direction)));
  IncidentValue out;
  out.u = e * a.cast<cdouble>();
  out.gradient = (kI * k * e) * (a.cast<cdouble>() * w.direction.cast<cdouble>().transpose());
  return out;
}

std::vector<Vec3> cube_face_directions() {
  return {Vec3(-1, 0, 0), Vec3(1, 0, 0), Vec3(0, -1, 0),
          Vec3(0, 1, 0),  Vec3(0, 0, -1), Vec3(0, 0, 1)};
}

// ---------------------------------------------------------------------------

ExteriorDirichletSolver::ExteriorDirichletSolver(const Surface& surface,
                                                 const Medium& med, double R,
                                                 SolverOptions opt)
    : med_(med), R_(R), opt_(opt) {
  if (!(R > 0.0)) throw DomainError("ExteriorDirichletSolver: R must be positive");
  N_ = opt.order >= 0 ? opt.order : default_truncation(med, R);
  opt_.order = N_;
  if (opt_.quad_order < 0) opt_.quad_order = N_ + 4;
  boundary_ = sample_boundary(surface, opt_.quad_order);

  const RadiatingBasis basis(med, R, N_);
  for (int c = 0; c < basis.columns(); ++c) {
    if (c == 1 || c == 2) continue;  // psi at n = 0
    cols_.push_back(c);
  }
  const Eigen::Index K = static_cast<Eigen::Index>(boundary_.size());
  const Eigen::Index n = static_cast<Eigen::Index>(cols_.size());
  if (3 * K < n) {
    throw DomainError("ExteriorDirichletSolver: fewer boundary equations than unknowns");
  }

  Eigen::MatrixXcd A(3 * K, n);
  dnormal_.resize(3 * K, n);
  row_weight_.resize(3 * K);
  weight_sum_ = 0.0;
  BasisValues vals;
  for (Eigen::Index k = 0; k < K; ++k) {
    basis.evaluate(boundary_.points[k], true, vals);
    const Vec3& nu = boundary_.normals[k];
    const double sw = std::sqrt(boundary_.weights[k]);
    weight_sum_ += boundary_.weights[k];
    row_weight_.segment<3>(3 * k).setConstant(sw);
    for (Eigen::Index j = 0; j < n; ++j) {
      const int c = cols_[j];
      A.block<3, 1>(3 * k, j) = sw * vals.value.col(c);
      for (int i = 0; i < 3; ++i) {
        dnormal_(3 * k + i, j) = vals.gradient(i, c) * nu(0) +
                                 vals.gradient(i + 3, c) * nu(1) +
                                 vals.gradient(i + 6, c) * nu(2);
      }
    }
  }
  col_scale_.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double s = A.col(j).norm();
    col_scale_(j) = s > 0.0 ? 1.0 / s : 1.0;
    A.col(j) *= col_scale_(j);
  }

  qr_.compute(A);
  A.resize(0, 0);
  const Eigen::MatrixXcd Rm = qr_.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(Rm, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd_u_ = svd.matrixU();
  svd_v_ = svd.matrixV();
  sigma_ = svd.singularValues();
  const double smax = sigma_.size() > 0 ? sigma_(0) : 0.0;
  rank_ = 0;
  for (Eigen::Index i = 0; i < sigma_.size(); ++i) {
    if (sigma_(i) >= opt_.rcond * smax && sigma_(i) > 0.0) ++rank_;
  }
  condition_ = rank_ > 0 ? smax / sigma_(rank_ - 1) : INFINITY;
}

Eigen::MatrixXcd ExteriorDirichletSolver::solve_packed(const Eigen::MatrixXcd& data,
                                                       Eigen::VectorXd* residual,
                                                       Eigen::VectorXd* relative) const {
  const Eigen::Index m = row_weight_.size();
  const Eigen::Index n = static_cast<Eigen::Index>(cols_.size());
  if (data.rows() != m) {
    throw DomainError("ExteriorDirichletSolver: data has the wrong number of rows");
  }
  Eigen::MatrixXcd b = row_weight_.asDiagonal() * data;
  Eigen::VectorXd bnorm = b.colwise().norm().transpose();
  b.applyOnTheLeft(qr_.householderQ().adjoint());
  const Eigen::MatrixXcd z = svd_u_.adjoint() * b.topRows(n);

  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, data.cols());
  y.topRows(rank_) = sigma_.head(rank_).cwiseInverse().asDiagonal() * z.topRows(rank_);
  Eigen::MatrixXcd x = col_scale_.asDiagonal() * (svd_v_ * y);

  if (residual || relative) {
    Eigen::VectorXd res(data.cols()), rel(data.cols());
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
      const double r2 = b.col(c).tail(m - n).squaredNorm() +
                        z.col(c).tail(n - rank_).squaredNorm();
      res(c) = std::sqrt(r2 / weight_sum_);
      rel(c) = bnorm(c) > 0.0 ? std::sqrt(r2) / bnorm(c) : 0.0;
    }
    if (residual) *residual = res;
    if (relative) *relative = rel;
  }
  return x;
}

ScatteredSolution ExteriorDirichletSolver::solve(const std::vector<CVec3>& data) const {
  if (data.size() != boundary_.size()) {
    throw DomainError("ExteriorDirichletSolver: one data vector per boundary node expected");
  }
  Eigen::VectorXcd b(3 * static_cast<Eigen::Index>(data.size()));
  for (std::size_t k = 0; k < data.size(); ++k) b.segment<3>(3 * k) = data[k];
  Eigen::VectorXd res, rel;
  ScatteredSolution sol;
  sol.packed = solve_packed(b, &res, &rel);
  sol.potentials = unpack(sol.packed);
  sol.R = R_;
  sol.order = N_;
  sol.residual = res(0);
  sol.relative_residual = rel(0);
  if (sol.relative_residual > opt_.tolerance) {
    std::ostringstream os;
    os << "boundary fit did not converge: relative residual " << sol.relative_residual
       << " exceeds " << opt_.tolerance << " (order " << N_ << ", condition "
       << condition_ << ")";
    throw SolverError(os.str(), sol.relative_residual, condition_);
  }
  return sol;
}

Eigen::MatrixXcd ExteriorDirichletSolver::field_matrix(const std::vector<Vec3>& points) const {
  const RadiatingBasis basis(med_, R_, N_);
  const Eigen::Index n = static_cast<Eigen::Index>(cols_.size());
  Eigen::MatrixXcd E(3 * static_cast<Eigen::Index>(points.size()), n);
  BasisValues vals;
  for (std::size_t k = 0; k < points.size(); ++k) {
    basis.evaluate(points[k], false, vals);
    for (Eigen::Index j = 0; j < n; ++j) E.block<3, 1>(3 * k, j) = vals.value.col(cols_[j]);
  }
  return E;
}

Eigen::MatrixXcd ExteriorDirichletSolver::normal_derivative(const Eigen::MatrixXcd& packed) const {
  return dnormal_ * packed;
}

PotentialCoeffs ExteriorDirichletSolver::unpack(const Eigen::VectorXcd& packed) const {
  PotentialCoeffs p(N_);
  for (std::size_t j = 0; j < cols_.size(); ++j) {
    const int c = cols_[j];
    p.blocks[c / 3](c % 3) = packed(static_cast<Eigen::Index>(j));
  }
  return p;
}

ScatteredSolution solve_exterior_dirichlet(const SurfaceParam& sp,
                                           const std::function<CVec3(const Vec3&)>& data,
                                           const Medium& med, double R, SolverOptions opt) {
  const ExteriorDirichletSolver solver(Surface(sp), med, R, opt);
  std::vector<CVec3> g;
  g.reserve(solver.boundary().size());
  for (const Vec3& x : solver.boundary().points) g.push_back(data(x));
  return solver.solve(g);
}

// ---------------------------------------------------------------------------

void MeasurementSet::validate() const {
  if (!(R > 0.0)) throw ValidationError("MeasurementSet: R must be positive");
  if (points.empty()) throw ValidationError("MeasurementSet: no measurement points");
  if (points.size() != u.size()) {
    throw ValidationError("MeasurementSet: point and value counts differ");
  }
  for (const Vec3& x : points) {
    if (std::abs(x.norm() - R) > 1e-8 * R) {
      throw ValidationError("MeasurementSet: point off the measurement sphere");
    }
  }
  if (delta < 0.0) throw ValidationError("MeasurementSet: negative noise level");
  incident.validate();
}

Eigen::VectorXcd incident_dirichlet_data(const ExteriorDirichletSolver& solver,
                                         const IncidentWave& w) {
  const BoundarySample& bs = solver.boundary();
  Eigen::VectorXcd b(3 * static_cast<Eigen::Index>(bs.size()));
  for (std::size_t k = 0; k < bs.size(); ++k) {
    b.segment<3>(3 * k) = -incident_field(w, solver.medium(), bs.points[k]).u;
  }
  return b;
}

MeasurementSet scattering_operator(const SurfaceParam& sp, const IncidentWave& w,
                                   const Medium& med, double R,
                                   const std::vector<Vec3>& points, SolverOptions opt) {
  const ExteriorDirichletSolver solver(Surface(sp), med, R, opt);
  const Eigen::VectorXcd b = incident_dirichlet_data(solver, w);
  Eigen::VectorXd res, rel;
  const Eigen::VectorXcd x = solver.solve_packed(b, &res, &rel);
  if (rel(0) > solver.options().tolerance) {
    std::ostringstream os;
    os << "scattering_operator: relative boundary residual " << rel(0) << " exceeds "
       << solver.options().tolerance;
    throw SolverError(os.str(), rel(0), solver.condition());
  }
  const Eigen::VectorXcd v = solver.field_matrix(points) * x;
  MeasurementSet ms;
  ms.R = R;
  ms.medium = med;
  ms.incident = w;
  ms.points = points;
  ms.u.resize(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    ms.u[k] = incident_field(w, med, points[k]).u + v.segment<3>(3 * k);
  }
  return ms;
}

MeasurementSet add_noise(const MeasurementSet& ms, double delta, std::uint64_t seed) {
  if (delta < 0.0) throw ValidationError("add_noise: negative noise level");
  MeasurementSet out = ms;
  out.delta = delta;
  out.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (auto& u : out.u) {
    for (int j = 0; j < 3; ++j) u(j) *= 1.0 + delta * uni(rng);
  }
  return out;
}

}  // namespace elastinv
