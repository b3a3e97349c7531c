#include "elastinv/modal.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "elastinv/errors.hpp"

namespace elastinv {

namespace {

constexpr cdouble kI{0.0, 1.0};

double nu_of(int n) { return n * (n + 1.0); }

void require_radius(double R) {
  if (!(R > 0.0)) throw DomainError("trace radius must be positive");
}

// Angular factors of one (n, m) mode at one point; `ys` is (1/sin) dY/dphi,
// `ytt` and `yst` are the theta derivatives of `yt` and `ys`.
struct Angular {
  cdouble y, yt, ys, ytt, yst;
  Angular conj_signed(double sign) const {
    return {sign * std::conj(y), sign * std::conj(yt), sign * std::conj(ys),
            sign * std::conj(ytt), sign * std::conj(yst)};
  }
};

// Radial profile of one basis field in the (T, V, W) frame and its r-derivative.
struct Radial {
  cdouble aT, aV, aW, dT, dV, dW;
};

}  // namespace

Medium::Medium(double lambda_, double mu_, double omega_)
    : lambda(lambda_), mu(mu_), omega(omega_) {
  if (!(mu > 0.0)) throw DomainError("Medium: mu must be positive");
  if (!(lambda + mu > 0.0)) throw DomainError("Medium: lambda + mu must be positive");
  if (!(omega > 0.0)) throw DomainError("Medium: omega must be positive");
}

double Medium::kappa_p() const { return omega / std::sqrt(lambda + 2.0 * mu); }
double Medium::kappa_s() const { return omega / std::sqrt(mu); }

int default_truncation(const Medium& med, double R) {
  const double k = med.kappa_s() * R;
  return static_cast<int>(std::ceil(k + 4.0 * std::cbrt(k) + 8.0));
}

ModalTriples::ModalTriples(int N_) : N(N_) {
  if (N_ < 0) throw DomainError("ModalTriples: negative truncation order");
  blocks.assign(static_cast<std::size_t>(harmonic_count(N_)), CVec3::Zero());
}

WaveFunctionCoeffs wave_function_coeffs(const Medium& med, double R, int n,
                                        const CVec3& potentials) {
  if (n < 1) throw DegenerateModeError("wave_function_coeffs: psi is absent at n = 0");
  const double ks = med.kappa_s();
  const cdouble h = spherical_hankel1(n, ks * R).value;
  return {kI * ks * R * potentials(2) / (nu_of(n) * h),
          potentials(1) / (std::sqrt(nu_of(n)) * h)};
}

// ---------------------------------------------------------------------------

namespace {

// Lambda_n from e = z_n + n + 1, free of the O(n^2) cancellation.
cdouble lambda_shifted(cdouble ep, cdouble es, int n) {
  return -(n + 1.0) * es - static_cast<double>(n) * ep + ep * es;
}

}  // namespace

cdouble lambda_n(const Medium& med, double R, int n) {
  require_radius(R);
  return lambda_shifted(z_shifted_all(n, med.kappa_p() * R)[n],
                        z_shifted_all(n, med.kappa_s() * R)[n], n);
}

CMat3 potential_to_displacement_matrix(const Medium& med, double R, int n) {
  require_radius(R);
  const cdouble zp = z_log_derivative(n, med.kappa_p() * R);
  CMat3 P = CMat3::Zero();
  P(2, 0) = zp / R;
  if (n == 0) return P;
  const cdouble zs = z_log_derivative(n, med.kappa_s() * R);
  const double sq = std::sqrt(nu_of(n));
  const double ks = med.kappa_s();
  P(0, 0) = sq / R;
  P(0, 1) = (1.0 + zs) / R;
  P(1, 2) = ks * ks * R / sq;
  P(2, 1) = sq / R;
  return P;
}

DisplacementCoeffs potentials_to_displacement(const PotentialCoeffs& p,
                                              const Medium& med, double R) {
  DisplacementCoeffs v(p.N, R);
  for (int n = 0; n <= p.N; ++n) {
    const CMat3 P = potential_to_displacement_matrix(med, R, n);
    for (int m = -n; m <= n; ++m) {
      const CVec3& b = p.at(n, m);
      if (n == 0 && (b(1) != 0.0 || b(2) != 0.0)) {
        throw DegenerateModeError("potentials_to_displacement: psi modes at n = 0");
      }
      v.at(n, m) = P * b;
    }
  }
  return v;
}

PotentialCoeffs displacement_to_potentials(const DisplacementCoeffs& v,
                                           const Medium& med) {
  const double R = v.R;
  require_radius(R);
  const double kp = med.kappa_p() * R;
  const double ks = med.kappa_s() * R;
  const auto zp = z_log_derivative_all(v.N, kp);
  const auto zs = z_log_derivative_all(v.N, ks);
  const auto ep = z_shifted_all(v.N, kp);
  const auto es = z_shifted_all(v.N, ks);
  PotentialCoeffs p(v.N);
  {
    const CVec3& b = v.at(0, 0);
    if (b(0) != 0.0 || b(1) != 0.0) {
      throw DegenerateModeError("displacement_to_potentials: T/V data at n = 0");
    }
    p.at(0, 0) = CVec3(R * b(2) / zp[0], 0.0, 0.0);
  }
  for (int n = 1; n <= v.N; ++n) {
    const double sq = std::sqrt(nu_of(n));
    const cdouble lam = lambda_shifted(ep[n], es[n], n);
    for (int m = -n; m <= n; ++m) {
      const CVec3& b = v.at(n, m);
      p.at(n, m) = CVec3(R * ((1.0 + zs[n]) * b(2) - sq * b(0)) / lam,
                         R * (zp[n] * b(0) - sq * b(2)) / lam,
                         sq * b(1) / (med.kappa_s() * med.kappa_s() * R));
    }
  }
  return p;
}

CMat3 dtn_matrix_G(const Medium& med, double R, int n) {
  require_radius(R);
  const double mu = med.mu, lm = med.lambda + med.mu;
  const double kp = med.kappa_p() * R, ks = med.kappa_s() * R;
  const cdouble zp = z_log_derivative(n, kp);
  const double nu = nu_of(n);
  CMat3 G = CMat3::Zero();
  G(2, 0) = mu * (nu - kp * kp - 2.0 * zp) - lm * kp * kp;
  if (n == 0) return G;
  const cdouble zs = z_log_derivative(n, ks);
  const double sq = std::sqrt(nu);
  G(0, 0) = mu * sq * (zp - 1.0);
  G(0, 1) = mu * (nu - ks * ks - 1.0 - zs);
  G(1, 2) = mu * ks * ks * zs / sq;
  G(2, 1) = mu * sq * (zs - 1.0);
  return G;
}

CMat3 dtn_matrix_M(const Medium& med, double R, int n) {
  require_radius(R);
  const double mu = med.mu, l2m = med.lambda + 2.0 * med.mu;
  const double kp = med.kappa_p() * R, ks = med.kappa_s() * R;
  const cdouble zp = z_log_derivative(n, kp);
  const cdouble zs = z_log_derivative(n, ks);
  const double nu = nu_of(n);
  const cdouble lam = lambda_n(med, R, n);
  CMat3 M = CMat3::Zero();
  M(2, 2) = -l2m / R * kp * kp / lam * (1.0 + zs) - 2.0 * mu / R;
  if (n == 0) return M;
  const double sq = std::sqrt(nu);
  M(0, 0) = -(mu / R) * (1.0 + ks * ks * zp / lam);
  M(0, 2) = sq * (mu / R) * (1.0 + ks * ks / lam);
  M(1, 1) = (mu / R) * zs;
  M(2, 0) = sq * (mu / R + l2m / R * kp * kp / lam);
  return M;
}

CMat3 dtn_hermitian_part(const Medium& med, double R, int n) {
  const CMat3 M = dtn_matrix_M(med, R, n);
  return -0.5 * (M + M.adjoint());
}

int definiteness_onset(const Medium& med, double R, int nmax) {
  if (nmax < 1) throw DomainError("definiteness_onset: nmax must be >= 1");
  int onset = -1;
  for (int n = nmax; n >= 1; --n) {
    Eigen::SelfAdjointEigenSolver<CMat3> eig(dtn_hermitian_part(med, R, n),
                                             Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() <= 0.0) break;
    onset = n;
  }
  return onset;
}

DisplacementCoeffs boundary_operator_series(const PotentialCoeffs& p,
                                            const Medium& med, double R) {
  DisplacementCoeffs w(p.N, R);
  for (int n = 0; n <= p.N; ++n) {
    const CMat3 G = dtn_matrix_G(med, R, n) / (R * R);
    for (int m = -n; m <= n; ++m) w.at(n, m) = G * p.at(n, m);
  }
  return w;
}

DisplacementCoeffs apply_T(const DisplacementCoeffs& v, const Medium& med) {
  DisplacementCoeffs b(v.N, v.R);
  for (int n = 0; n <= v.N; ++n) {
    const CMat3 M = dtn_matrix_M(med, v.R, n);
    for (int m = -n; m <= n; ++m) {
      const CVec3& x = v.at(n, m);
      if (n == 0 && (x(0) != 0.0 || x(1) != 0.0)) {
        throw DegenerateModeError("apply_T: T/V data at n = 0");
      }
      b.at(n, m) = M * x;
    }
  }
  return b;
}

std::vector<cdouble> apply_T1(const std::vector<cdouble>& phi, const Medium& med,
                              double R) {
  require_radius(R);
  if (phi.empty()) return {};
  const int N = unflatten(static_cast<int>(phi.size())).n;
  if (harmonic_count(N) != static_cast<int>(phi.size())) {
    throw DomainError("apply_T1: coefficient count is not (N+1)^2");
  }
  const auto z = z_log_derivative_all(N, med.kappa_p() * R);
  std::vector<cdouble> out(phi.size());
  for (int n = 0; n <= N; ++n) {
    for (int m = -n; m <= n; ++m) out[flat0(n, m)] = z[n] * phi[flat0(n, m)] / R;
  }
  return out;
}

DisplacementCoeffs apply_T2(const DisplacementCoeffs& u, const Medium& med) {
  const double ks = med.kappa_s() * u.R;
  const auto z = z_log_derivative_all(u.N, ks);
  DisplacementCoeffs out(u.N, u.R);
  for (int n = 0; n <= u.N; ++n) {
    const cdouble one_z = 1.0 + z[n];
    if (std::abs(one_z) == 0.0) throw DomainError("apply_T2: 1 + z_n vanished");
    const cdouble sT = kI * ks / one_z;
    const cdouble sV = one_z / (kI * ks);
    for (int m = -n; m <= n; ++m) {
      const CVec3& x = u.at(n, m);
      if (n == 0 && (x(0) != 0.0 || x(1) != 0.0)) {
        throw DegenerateModeError("apply_T2: tangential data at n = 0");
      }
      out.at(n, m) = CVec3(sT * x(0), sV * x(1), 0.0);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

RadiatingBasis::RadiatingBasis(const Medium& med, double R, int N)
    : med_(med), R_(R), N_(N) {
  require_radius(R);
  if (N < 0) throw DomainError("RadiatingBasis: negative order");
}

void RadiatingBasis::evaluate(const Vec3& x, bool with_gradient,
                              BasisValues& out) const {
  const SphericalPoint sp = to_spherical(x);
  const double r = sp.r;
  if (!(r > 0.0)) throw DomainError("RadiatingBasis: cannot evaluate at the origin");
  const double kp = med_.kappa_p(), ks = med_.kappa_s();
  const HankelRatios hp = hankel_ratios(N_, kp * r, kp * R_);
  const HankelRatios hs = hankel_ratios(N_, ks * r, ks * R_);
  const LegendreTable leg(N_, sp.theta);
  const SphericalFrame f = spherical_frame(sp.theta, sp.phi);
  const double st = std::sin(sp.theta), ct = std::cos(sp.theta);
  const Eigen::Vector3cd er = f.e_r.cast<cdouble>();
  const Eigen::Vector3cd et = f.e_theta.cast<cdouble>();
  const Eigen::Vector3cd ep = f.e_phi.cast<cdouble>();

  const int cols = columns();
  out.value.setZero(3, cols);
  if (with_gradient) out.gradient.setZero(9, cols);

  // Radial profiles per n and potential component.
  std::vector<std::array<Radial, 3>> radial(static_cast<std::size_t>(N_) + 1);
  const double r2 = r * r;
  for (int n = 0; n <= N_; ++n) {
    const double nu = nu_of(n), sq = std::sqrt(nu);
    const cdouble Hp = hp.ratio[n], zp = hp.z[n];
    const cdouble Hs = hs.ratio[n], zs = hs.z[n];
    auto& rad = radial[n];
    rad[0] = {sq * Hp / r, 0.0, Hp * zp / r,
              sq * Hp * (zp - 1.0) / r2, 0.0,
              Hp * (nu - 2.0 * zp - kp * kp * r2) / r2};
    if (n == 0) {
      rad[1] = rad[2] = Radial{};
      continue;
    }
    rad[1] = {Hs * (1.0 + zs) / r, 0.0, sq * Hs / r,
              Hs * (nu - 1.0 - zs - ks * ks * r2) / r2, 0.0,
              sq * Hs * (zs - 1.0) / r2};
    rad[2] = {0.0, ks * ks * R_ * Hs / sq, 0.0,
              0.0, ks * ks * R_ * Hs * zs / (sq * r), 0.0};
  }

  auto fill = [&](int n, int m, const Angular& a) {
    const double cT = n >= 1 ? 1.0 / (R_ * std::sqrt(nu_of(n))) : 0.0;
    const double cW = 1.0 / R_;
    const cdouble im = kI * static_cast<double>(m);
    for (int c = 0; c < 3; ++c) {
      const Radial& q = radial[n][c];
      if (n == 0 && c > 0) continue;
      const cdouble vr = cW * q.aW * a.y;
      const cdouble vt = cT * (q.aT * a.yt + q.aV * a.ys);
      const cdouble vp = cT * (q.aT * a.ys - q.aV * a.yt);
      const int col = 3 * flat0(n, m) + c;
      out.value.col(col) = vr * er + vt * et + vp * ep;
      if (!with_gradient) continue;

      const CVec3 Dr = (cW * q.dW * a.y) * er +
                       (cT * (q.dT * a.yt + q.dV * a.ys)) * et +
                       (cT * (q.dT * a.ys - q.dV * a.yt)) * ep;
      const cdouble vr_t = cW * q.aW * a.yt;
      const cdouble vt_t = cT * (q.aT * a.ytt + q.aV * a.yst);
      const cdouble vp_t = cT * (q.aT * a.yst - q.aV * a.ytt);
      const CVec3 Dt = (vr_t - vt) * er + (vt_t + vr) * et + vp_t * ep;
      const CVec3 Dp = (im * vr - st * vp) * er + (im * vt - ct * vp) * et +
                       (im * vp + st * vr + ct * vt) * ep;
      Eigen::Map<CMat3> J(out.gradient.col(col).data());
      J = Dr * er.transpose() + (Dt / r) * et.transpose() +
          (Dp / (r * st)) * ep.transpose();
    }
  };

  for (int m = 0; m <= N_; ++m) {
    const cdouble e = std::polar(1.0, m * sp.phi);
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    for (int n = m; n <= N_; ++n) {
      const double p = leg.p(n, m), dp = leg.dp(n, m), q = leg.q(n, m);
      Angular a;
      a.y = p * e;
      a.yt = dp * e;
      a.ys = kI * static_cast<double>(m) * q * e;
      if (with_gradient) {
        a.ytt = (-ct / st * dp - nu_of(n) * p + m * m * q / st) * e;
        a.yst = kI * static_cast<double>(m) * ((dp - ct * q) / st) * e;
      }
      fill(n, m, a);
      if (m > 0) fill(n, -m, a.conj_signed(sign));
    }
  }
}

Eigen::VectorXcd pack_potentials(const PotentialCoeffs& p) {
  Eigen::VectorXcd x(3 * static_cast<Eigen::Index>(p.size()));
  for (std::size_t k = 0; k < p.size(); ++k) x.segment<3>(3 * k) = p.blocks[k];
  return x;
}

FieldValue eval_radiating_field(const PotentialCoeffs& p, const Medium& med,
                                double R, const SphericalPoint& point,
                                bool with_gradient) {
  const RadiatingBasis basis(med, R, p.N);
  BasisValues vals;
  basis.evaluate(to_cartesian(point), with_gradient, vals);
  const Eigen::VectorXcd x = pack_potentials(p);
  FieldValue out;
  out.v = vals.value * x;
  if (with_gradient) {
    const Eigen::Matrix<cdouble, 9, 1> g = vals.gradient * x;
    out.gradient = Eigen::Map<const CMat3>(g.data());
  } else {
    out.gradient.setZero();
  }
  out.inside_trace_sphere = point.r < R * (1.0 - 1e-8);
  return out;
}

ScalarPotentialValue eval_scalar_potential(const PotentialCoeffs& p,
                                           const Medium& med, double R,
                                           const SphericalPoint& point) {
  const double kp = med.kappa_p();
  const HankelRatios hp = hankel_ratios(p.N, kp * point.r, kp * R);
  const auto Y = sph_harmonics_all(p.N, point.theta, point.phi);
  ScalarPotentialValue out{0.0, 0.0};
  for (int n = 0; n <= p.N; ++n) {
    for (int m = -n; m <= n; ++m) {
      const cdouble term = hp.ratio[n] * p.at(n, m)(0) * Y[flat0(n, m)].y / R;
      out.phi += term;
      out.dphi_dr += term * hp.z[n] / point.r;
    }
  }
  return out;
}

CVec3 eval_vector_potential(const PotentialCoeffs& p, const Medium& med, double R,
                            const SphericalPoint& point) {
  const double ks = med.kappa_s(), r = point.r;
  const HankelRatios hs = hankel_ratios(p.N, ks * r, ks * R);
  CVec3 psi = CVec3::Zero();
  for (int n = 1; n <= p.N; ++n) {
    const double sq = std::sqrt(nu_of(n));
    for (int m = -n; m <= n; ++m) {
      const VectorHarmonics h = vector_harmonics({n, m}, point.theta, point.phi, R);
      const CVec3& b = p.at(n, m);
      const cdouble Hs = hs.ratio[n];
      psi += (R / r) * Hs * (1.0 + hs.z[n]) / sq * b(2) * h.T + Hs * b(1) * h.V +
             (R / r) * Hs * b(2) * h.W;
    }
  }
  return psi;
}

CVec3 boundary_traction(const CMat3& gradient, const Vec3& e_r, const Medium& med) {
  const CVec3 er = e_r.cast<cdouble>();
  return med.mu * (gradient * er) + (med.lambda + med.mu) * gradient.trace() * er;
}

// ---------------------------------------------------------------------------

DisplacementCoeffs project_tvw(const std::vector<CVec3>& samples,
                               const SphereQuadrature& quad, double R, int N) {
  if (samples.size() != quad.size()) {
    throw DomainError("project_tvw: sample count does not match quadrature");
  }
  DisplacementCoeffs out(N, R);
  for (std::size_t k = 0; k < quad.size(); ++k) {
    const double w = quad.weight(k) * R * R;
    const double th = quad.theta(k), ph = quad.phi(k);
    for (int n = 0; n <= N; ++n) {
      for (int m = -n; m <= n; ++m) {
        const VectorHarmonics h = vector_harmonics({n, m}, th, ph, R);
        CVec3& c = out.at(n, m);
        c(0) += w * samples[k].dot(h.T);  // dot() conjugates its argument's partner
        c(1) += w * samples[k].dot(h.V);
        c(2) += w * samples[k].dot(h.W);
      }
    }
  }
  // Eigen's dot(a, b) is a^H b; undo the conjugation of the samples.
  for (auto& c : out.blocks) c = c.conjugate().eval();
  return out;
}

CVec3 synthesize_tvw(const DisplacementCoeffs& v, double theta, double phi) {
  CVec3 out = CVec3::Zero();
  for (int n = 0; n <= v.N; ++n) {
    for (int m = -n; m <= n; ++m) {
      const VectorHarmonics h = vector_harmonics({n, m}, theta, phi, v.R);
      const CVec3& c = v.at(n, m);
      out += c(0) * h.T + c(1) * h.V + c(2) * h.W;
    }
  }
  return out;
}

double sobolev_norm(const ModalTriples& v, double s) {
  double acc = 0.0;
  for (int n = 0; n <= v.N; ++n) {
    const double wgt = std::pow(1.0 + nu_of(n), s);
    for (int m = -n; m <= n; ++m) acc += wgt * v.at(n, m).squaredNorm();
  }
  return std::sqrt(acc);
}

}  // namespace elastinv
