#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"

using namespace elastinv;

namespace {

constexpr cdouble kI{0.0, 1.0};
const Medium kMed(2.0, 1.0, 2.0);

DisplacementCoeffs random_trace(int N, double R, unsigned seed, bool tangential_only = false) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  DisplacementCoeffs v(N, R);
  for (int n = 0; n <= N; ++n) {
    for (int m = -n; m <= n; ++m) {
      for (int c = 0; c < 3; ++c) {
        if (n == 0 && c < 2) continue;
        if (tangential_only && c == 2) continue;
        v.at(n, m)(c) = cdouble(g(rng), g(rng));
      }
    }
  }
  return v;
}

double rel_diff(const ModalTriples& a, const ModalTriples& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a.blocks[i] - b.blocks[i]).squaredNorm();
    den += b.blocks[i].squaredNorm();
  }
  return std::sqrt(num / den);
}

cdouble inner(const ModalTriples& a, const ModalTriples& b) {
  cdouble s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += b.blocks[i].dot(a.blocks[i]);
  return s;
}

}  // namespace

TEST(Medium, DerivedWavenumbers) {
  EXPECT_NEAR(kMed.kappa_p(), 2.0 / 2.0, 1e-15);
  EXPECT_NEAR(kMed.kappa_s(), 2.0, 1e-15);
  EXPECT_LT(kMed.kappa_p(), kMed.kappa_s());
  EXPECT_THROW(Medium(2.0, 0.0, 1.0), DomainError);
  EXPECT_THROW(Medium(-2.0, 1.0, 1.0), DomainError);
  EXPECT_THROW(Medium(2.0, 1.0, 0.0), DomainError);
  EXPECT_EQ(default_truncation(kMed, 1.0), 16);
}

TEST(LambdaN, OrderZeroClosedForm) {
  const double kp = kMed.kappa_p(), ks = kMed.kappa_s(), R = 1.3;
  const cdouble expect(-kp * ks * R * R, -ks * R);
  EXPECT_LT(std::abs(lambda_n(kMed, R, 0) - expect), 1e-13);
}

TEST(LambdaN, NegativeImaginaryPart) {
  for (int n = 0; n <= 60; ++n) EXPECT_LT(lambda_n(kMed, 1.0, n).imag(), 0.0) << n;
}

TEST(LambdaN, LargeOrderLimit) {
  const double kp = kMed.kappa_p(), ks = kMed.kappa_s();
  const double limit = -(kp * kp + ks * ks) / 2.0;
  for (int n : {100, 400, 1600}) {
    EXPECT_NEAR(lambda_n(kMed, 1.0, n).real(), limit, 10.0 / n) << n;
  }
}

TEST(PotentialMaps, ZeroAndSingleMode) {
  const double R = 1.0;
  PotentialCoeffs p(3);
  const auto v0 = potentials_to_displacement(p, kMed, R);
  for (const auto& b : v0.blocks) EXPECT_EQ(b.norm(), 0.0);
  p.at(1, 0)(0) = 1.0;
  const auto v = potentials_to_displacement(p, kMed, R);
  EXPECT_NEAR(std::abs(v.at(1, 0)(0) - std::sqrt(2.0) / R), 0.0, 1e-15);
  EXPECT_EQ(std::abs(v.at(1, 0)(1)), 0.0);
  const cdouble z1 = 1.0 * oracle::hankel_derivative(1, 1.0) / oracle::hankel(1, 1.0);
  EXPECT_LT(std::abs(v.at(1, 0)(2) - z1 / R), 1e-12);
}

TEST(PotentialMaps, RoundTrip) {
  const int N = 30;
  for (double R : {0.7, 1.0, 2.5}) {
    const auto v = random_trace(N, R, 11);
    const auto p = displacement_to_potentials(v, kMed);
    const auto back = potentials_to_displacement(p, kMed, R);
    EXPECT_LT(rel_diff(back, v), 1e-12) << R;
    for (int m = -0; m <= 0; ++m) EXPECT_EQ(p.at(0, 0)(1), 0.0);
  }
}

TEST(PotentialMaps, SpecialBlocks) {
  const double R = 1.4;
  DisplacementCoeffs v(2, R);
  v.at(0, 0)(2) = 1.0;
  v.at(2, 1)(1) = 1.0;
  const auto p = displacement_to_potentials(v, kMed);
  EXPECT_LT(std::abs(p.at(0, 0)(0) - R / cdouble(-1.0, kMed.kappa_p() * R)), 1e-14);
  const double ks = kMed.kappa_s();
  EXPECT_LT(std::abs(p.at(2, 1)(2) - std::sqrt(6.0) / (ks * ks * R)), 1e-14);
  EXPECT_EQ(std::abs(p.at(2, 1)(0)), 0.0);
  EXPECT_EQ(std::abs(p.at(2, 1)(1)), 0.0);

  DisplacementCoeffs bad(1, R);
  bad.at(0, 0)(0) = 1.0;
  EXPECT_THROW(displacement_to_potentials(bad, kMed), DegenerateModeError);
  PotentialCoeffs badp(1);
  badp.at(0, 0)(2) = 1.0;
  EXPECT_THROW(potentials_to_displacement(badp, kMed, R), DegenerateModeError);
}

TEST(DtnG, SparsityAndEntries) {
  const double R = 1.0, mu = kMed.mu, lam = kMed.lambda;
  const int n = 1;
  const CMat3 G = dtn_matrix_G(kMed, R, n);
  // Rows (T, V, W), columns (phi, psi2, psi3).
  EXPECT_EQ(std::abs(G(0, 2)), 0.0);
  EXPECT_EQ(std::abs(G(1, 0)), 0.0);
  EXPECT_EQ(std::abs(G(1, 1)), 0.0);
  EXPECT_EQ(std::abs(G(2, 2)), 0.0);
  const double kp = kMed.kappa_p() * R, ks = kMed.kappa_s() * R, nu = 2.0, sq = std::sqrt(nu);
  const cdouble zp = kp * oracle::hankel_derivative(n, kp) / oracle::hankel(n, kp);
  const cdouble zs = ks * oracle::hankel_derivative(n, ks) / oracle::hankel(n, ks);
  EXPECT_LT(std::abs(G(1, 2) - mu * ks * ks * zs / sq), 1e-12);
  EXPECT_LT(std::abs(G(0, 0) - mu * sq * (zp - 1.0)), 1e-12);
  EXPECT_LT(std::abs(G(0, 1) - mu * (nu - ks * ks - 1.0 - zs)), 1e-12);
  EXPECT_LT(std::abs(G(2, 0) - (mu * (nu - kp * kp - 2.0 * zp) - (lam + mu) * kp * kp)), 1e-12);
  EXPECT_LT(std::abs(G(2, 1) - mu * sq * (zs - 1.0)), 1e-12);

  const CMat3 G0 = dtn_matrix_G(kMed, R, 0);
  CMat3 rest = G0;
  rest(2, 0) = 0.0;
  EXPECT_EQ(rest.norm(), 0.0);
  EXPECT_NE(std::abs(G0(2, 0)), 0.0);
}

TEST(DtnM, FactorizationThroughPotentials) {
  for (double R : {0.8, 1.0, 3.0}) {
    for (int n = 1; n <= 40; ++n) {
      const CMat3 P = potential_to_displacement_matrix(kMed, R, n);
      const CMat3 lhs = dtn_matrix_M(kMed, R, n) * P;
      const CMat3 rhs = dtn_matrix_G(kMed, R, n) / (R * R);
      EXPECT_LT((lhs - rhs).norm(), 1e-10 * rhs.norm()) << n << ' ' << R;
    }
    const cdouble m00 = dtn_matrix_M(kMed, R, 0)(2, 2);
    const cdouble p00 = potential_to_displacement_matrix(kMed, R, 0)(2, 0);
    const cdouble g00 = dtn_matrix_G(kMed, R, 0)(2, 0) / (R * R);
    EXPECT_LT(std::abs(m00 * p00 - g00), 1e-12 * std::abs(g00));
  }
}

TEST(DtnM, LargeOrderExpansion) {
  const double R = 1.0, mu = kMed.mu, w2 = kMed.omega * kMed.omega;
  const int n = 200;
  const CMat3 H = dtn_hermitian_part(kMed, R, n);
  const double lam = lambda_n(kMed, R, n).real();
  const double sq = std::sqrt(n * (n + 1.0));
  // (V, V), (T, T), (T, W) and (W, W) against the leading-order forms.
  EXPECT_NEAR(H(1, 1).real(), mu / R * (n + 1), 10.0 / n);
  EXPECT_NEAR(H(0, 0).real(), -(w2 * R / lam) * (n + 1), 5.0);
  EXPECT_NEAR(H(0, 2).real(), (mu / R + w2 * R / lam) * -sq, 5.0);
  EXPECT_NEAR(H(2, 2).real(), -(w2 * R / lam) * n, 5.0);
  EXPECT_LT(std::abs(H(0, 1)) + std::abs(H(1, 2)), 1e-12);
}

TEST(DtnM, PositiveDefiniteTail) {
  const int N0 = definiteness_onset(kMed, 1.0, 200);
  ASSERT_GE(N0, 1);
  for (int n = N0; n <= 200; ++n) {
    Eigen::SelfAdjointEigenSolver<CMat3> eig(dtn_hermitian_part(kMed, 1.0, n));
    EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0) << n;
  }
  // Onset is stable under the scan range.
  EXPECT_EQ(definiteness_onset(kMed, 1.0, 120), N0);
}

TEST(OperatorT, LinearAndMatchesTraction) {
  const double R = 1.0;
  const int N = 8;
  const auto p = oracle::random_potentials(N, 5, 0.7);
  const auto v = potentials_to_displacement(p, kMed, R);
  const cdouble alpha(0.3, -1.7);
  DisplacementCoeffs av = v;
  for (auto& b : av.blocks) b *= alpha;
  const auto Tv = apply_T(v, kMed);
  const auto Tav = apply_T(av, kMed);
  for (std::size_t i = 0; i < Tv.size(); ++i) {
    EXPECT_LT((Tav.blocks[i] - alpha * Tv.blocks[i]).norm(), 1e-12 * (1.0 + Tv.blocks[i].norm()));
  }

  // Traction from the analytic Cartesian gradient, projected by quadrature.
  const SphereQuadrature q(N + 4);
  std::vector<CVec3> traction, trace;
  for (std::size_t k = 0; k < q.size(); ++k) {
    const SphericalPoint sp{R, q.theta(k), q.phi(k)};
    const FieldValue f = eval_radiating_field(p, kMed, R, sp);
    traction.push_back(boundary_traction(f.gradient, spherical_frame(sp.theta, sp.phi).e_r, kMed));
    trace.push_back(f.v);
  }
  const auto b_grad = project_tvw(traction, q, R, N);
  const auto b_tbc = apply_T(project_tvw(trace, q, R, N), kMed);
  const auto b_series = boundary_operator_series(p, kMed, R);
  EXPECT_LT(rel_diff(b_tbc, b_grad), 1e-8);
  EXPECT_LT(rel_diff(b_series, b_grad), 1e-8);
}

TEST(OperatorT, BoundedFromHalfToMinusHalf) {
  double worst = 0.0;
  for (int N : {10, 20, 40}) {
    for (unsigned s = 0; s < 10; ++s) {
      const auto v = random_trace(N, 1.0, 100 + s);
      worst = std::max(worst, sobolev_norm(apply_T(v, kMed), -0.5) / sobolev_norm(v, 0.5));
    }
  }
  EXPECT_LT(worst, 10.0);
}

TEST(OperatorT1, ModeZeroAndSigns) {
  const double R = 1.2;
  std::vector<cdouble> phi(1, 1.0);
  const auto out = apply_T1(phi, kMed, R);
  EXPECT_LT(std::abs(out[0] - cdouble(-1.0, kMed.kappa_p() * R) / R), 1e-14);
  EXPECT_EQ(std::abs(apply_T1(std::vector<cdouble>(9, 0.0), kMed, R)[4]), 0.0);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<cdouble> u(harmonic_count(12));
    for (auto& c : u) c = cdouble(g(rng), g(rng));
    const auto Tu = apply_T1(u, kMed, R);
    cdouble s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += Tu[i] * std::conj(u[i]);
    EXPECT_LE(s.real(), 0.0);
    EXPECT_GE(s.imag(), 0.0);
  }
}

TEST(OperatorT2, SignsAndZero) {
  for (int trial = 0; trial < 200; ++trial) {
    const auto u = random_trace(10, 1.0, 500 + trial, true);
    const auto Tu = apply_T2(u, kMed);
    EXPECT_GE(inner(Tu, u).real(), 0.0);
  }
  const auto z = apply_T2(DisplacementCoeffs(4, 1.0), kMed);
  for (const auto& b : z.blocks) EXPECT_EQ(b.norm(), 0.0);
  DisplacementCoeffs bad(1, 1.0);
  bad.at(0, 0)(0) = 1.0;
  EXPECT_THROW(apply_T2(bad, kMed), DegenerateModeError);
}

TEST(OperatorT2, CurlIdentityForSingleWaveFunctions) {
  const double R = 1.0, ks = kMed.kappa_s() * R, h = 1e-5;
  const int n = 3, m = 2;
  for (int comp : {1, 2}) {
    PotentialCoeffs p(n);
    p.at(n, m)(comp) = cdouble(0.6, -0.4);
    const Vec3 x = to_cartesian({R, 1.0, 0.7});
    auto psi = [&](const Vec3& y) { return eval_vector_potential(p, kMed, R, to_spherical(y)); };
    CMat3 J;
    for (int j = 0; j < 3; ++j) J.col(j) = oracle::central_difference(psi, x, Vec3::Unit(j), h);
    const CVec3 curl(J(2, 1) - J(1, 2), J(0, 2) - J(2, 0), J(1, 0) - J(0, 1));
    const SphericalPoint sp = to_spherical(x);
    const CVec3 er = spherical_frame(sp.theta, sp.phi).e_r.cast<cdouble>();
    const CVec3 lhs = oracle::cross(curl, er);

    // Tangential trace of psi in (T, V): T = (1 + z_n) psi3 / sqrt(nu), V = psi2.
    const cdouble zs = z_log_derivative(n, ks);
    DisplacementCoeffs trace(n, R);
    trace.at(n, m) = CVec3((1.0 + zs) * p.at(n, m)(2) / std::sqrt(n * (n + 1.0)), p.at(n, m)(1), 0.0);
    const auto t2 = apply_T2(trace, kMed);
    const auto vh = vector_harmonics({n, m}, sp.theta, sp.phi, R);
    const CVec3 rhs = kI * kMed.kappa_s() * (t2.at(n, m)(0) * vh.T + t2.at(n, m)(1) * vh.V);
    EXPECT_LT((lhs - rhs).norm(), 1e-7 * rhs.norm()) << comp;
  }
}

TEST(RadiatingField, ZeroAndMonopole) {
  const double R = 1.0;
  const SphericalPoint pt{1.7, 0.6, 2.0};
  const FieldValue z = eval_radiating_field(PotentialCoeffs(3), kMed, R, pt);
  EXPECT_EQ(z.v.norm(), 0.0);

  PotentialCoeffs p(0);
  p.at(0, 0)(0) = cdouble(1.3, 0.2);
  const FieldValue f = eval_radiating_field(p, kMed, R, pt);
  const double kp = kMed.kappa_p();
  const cdouble vr = kp * oracle::hankel_derivative(0, kp * pt.r) / oracle::hankel(0, kp * R) *
                     p.at(0, 0)(0) / (R * std::sqrt(4.0 * kPi));
  const Vec3 er = spherical_frame(pt.theta, pt.phi).e_r;
  EXPECT_LT((f.v - vr * er.cast<cdouble>()).norm(), 1e-13);
  EXPECT_FALSE(f.inside_trace_sphere);
  EXPECT_TRUE(eval_radiating_field(p, kMed, R, {0.5, 1.0, 1.0}).inside_trace_sphere);
}

TEST(RadiatingField, SommerfeldDecay) {
  const auto p = oracle::random_potentials(5, 9, 0.5);
  const double kp = kMed.kappa_p();
  double prev = INFINITY;
  for (double r : {10.0, 100.0, 1000.0}) {
    const auto s = eval_scalar_potential(p, kMed, 1.0, {r, 0.8, 1.9});
    const double val = std::abs(r * (s.dphi_dr - cdouble(0.0, kp) * s.phi));
    EXPECT_LT(val, prev * 0.2) << r;
    prev = val;
  }
}

TEST(RadiatingField, GradientMatchesFiniteDifferences) {
  const double R = 1.0;
  const auto p = oracle::random_potentials(7, 21, 0.6);
  auto v = [&](const Vec3& y) { return eval_radiating_field(p, kMed, R, to_spherical(y), false).v; };
  for (const SphericalPoint sp : {SphericalPoint{1.0, 0.4, 0.3}, SphericalPoint{1.6, 2.5, 4.0}}) {
    const Vec3 x = to_cartesian(sp);
    const FieldValue f = eval_radiating_field(p, kMed, R, sp);
    CMat3 J;
    for (int j = 0; j < 3; ++j) J.col(j) = oracle::central_difference(v, x, Vec3::Unit(j), 1e-6 * R);
    EXPECT_LT((J - f.gradient).norm(), 1e-5 * f.gradient.norm());
    // Radial derivative alone.
    const Vec3 er = x.normalized();
    const CVec3 dr = oracle::central_difference(v, x, er, 1e-6 * R);
    EXPECT_LT((dr - f.gradient * er.cast<cdouble>()).norm(), 1e-5 * dr.norm());
  }
}

TEST(RadiatingField, SatisfiesNavierEquation) {
  const double R = 1.0;
  const auto p = oracle::random_potentials(6, 33, 0.6);
  auto v = [&](const Vec3& y) { return eval_radiating_field(p, kMed, R, to_spherical(y), false).v; };
  // First derivatives are analytic; differentiate them once more.
  auto grad = [&](const Vec3& y) { return eval_radiating_field(p, kMed, R, to_spherical(y)).gradient; };
  const Vec3 x(0.7, -0.9, 1.1);
  const double h = 1e-5;
  CVec3 lap = CVec3::Zero(), grad_div = CVec3::Zero();
  for (int j = 0; j < 3; ++j) {
    const CMat3 dJ = (grad(x + h * Vec3::Unit(j)) - grad(x - h * Vec3::Unit(j))) / (2 * h);
    lap += dJ.col(j);
    for (int i = 0; i < 3; ++i) grad_div(i) += 0.0;
    // d/dx_j of div v contributes to component j.
    grad_div(j) += dJ.trace();
  }
  const CVec3 res = kMed.mu * lap + (kMed.lambda + kMed.mu) * grad_div +
                    kMed.omega * kMed.omega * v(x);
  EXPECT_LT(res.norm(), 1e-7 * kMed.omega * kMed.omega * v(x).norm());
}

TEST(WaveFunctions, Coefficients) {
  EXPECT_THROW(wave_function_coeffs(kMed, 1.0, 0, CVec3::Zero()), DegenerateModeError);
  const int n = 2;
  const cdouble h = oracle::hankel(n, kMed.kappa_s());
  const auto c = wave_function_coeffs(kMed, 1.0, n, CVec3(0.0, 1.0, 2.0));
  EXPECT_LT(std::abs(c.beta - 1.0 / (std::sqrt(6.0) * h)), 1e-12 * std::abs(c.beta));
  EXPECT_LT(std::abs(c.alpha - kI * kMed.kappa_s() * 2.0 / (6.0 * h)), 1e-12 * std::abs(c.alpha));
}

TEST(Projection, SynthesisRoundTripAndNorm) {
  const int N = 6;
  const double R = 1.3;
  const auto v = random_trace(N, R, 77);
  const SphereQuadrature q(N + 1);
  std::vector<CVec3> samples;
  for (std::size_t k = 0; k < q.size(); ++k) samples.push_back(synthesize_tvw(v, q.theta(k), q.phi(k)));
  EXPECT_LT(rel_diff(project_tvw(samples, q, R, N), v), 1e-12);

  DisplacementCoeffs one(2, R);
  one.at(2, -1)(1) = 3.0;
  EXPECT_NEAR(sobolev_norm(one, 0.5), 3.0 * std::pow(7.0, 0.25), 1e-14);
}
