#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"

using namespace elastinv;

namespace {
constexpr cdouble kI{0.0, 1.0};
}

TEST(Hankel, ClosedFormOrderZero) {
  const auto h = spherical_hankel1(0, 1.0);
  EXPECT_NEAR(h.value.real(), std::sin(1.0), 1e-15);
  EXPECT_NEAR(h.value.imag(), -std::cos(1.0), 1e-15);
  const auto hp = spherical_hankel1(0, kPi);
  EXPECT_NEAR(hp.value.real(), 0.0, 1e-15);
  EXPECT_NEAR(hp.value.imag(), 1.0 / kPi, 1e-15);
}

TEST(Hankel, ClosedFormOrderOne) {
  for (double t : {0.3, 1.0, 4.5, 17.0}) {
    const cdouble expect = -std::exp(kI * t) * (t + kI) / (t * t);
    const auto h = spherical_hankel1(1, t);
    EXPECT_LT(std::abs(h.value - expect), 1e-12 * std::abs(expect)) << t;
  }
}

TEST(Hankel, MatchesStandardLibrary) {
  for (double t : {0.5, 2.0, 9.0, 25.0}) {
    const auto all = spherical_hankel1_all(20, t);
    for (int n = 0; n <= 20; ++n) {
      const cdouble h = oracle::hankel(n, t);
      const cdouble dh = oracle::hankel_derivative(n, t);
      EXPECT_LT(std::abs(all[n].value - h), 1e-10 * std::abs(h)) << n << ' ' << t;
      EXPECT_LT(std::abs(all[n].derivative - dh), 1e-10 * std::abs(dh)) << n << ' ' << t;
    }
  }
}

TEST(Hankel, RejectsNonPositiveArgument) {
  EXPECT_THROW(spherical_hankel1(0, 0.0), DomainError);
  EXPECT_THROW(spherical_hankel1(2, -1.0), DomainError);
  EXPECT_THROW(z_log_derivative(1, 0.0), DomainError);
  EXPECT_THROW(spherical_hankel1(-1, 1.0), DomainError);
}

TEST(LogDerivative, OrderZeroClosedForm) {
  for (double t : {0.1, 1.0, 7.0, 30.0}) {
    const cdouble z = z_log_derivative(0, t);
    EXPECT_NEAR(z.real(), -1.0, 1e-15);
    EXPECT_NEAR(z.imag(), t, 1e-13);
  }
}

TEST(LogDerivative, MatchesDefinition) {
  for (double t : {0.5, 3.0, 12.0}) {
    for (int n = 0; n <= 15; ++n) {
      const cdouble ref = t * oracle::hankel_derivative(n, t) / oracle::hankel(n, t);
      EXPECT_LT(std::abs(z_log_derivative(n, t) - ref), 1e-10 * std::abs(ref)) << n;
    }
  }
}

TEST(LogDerivative, BoundsOnGrid) {
  for (double t = 0.1; t <= 30.0; t *= 1.37) {
    const auto z = z_log_derivative_all(60, t);
    for (int n = 0; n <= 60; ++n) {
      EXPECT_GE(z[n].real(), -(n + 1.0) - 1e-12);
      EXPECT_LE(z[n].real(), -1.0 + 1e-12);
      EXPECT_GT(z[n].imag(), 0.0);
      EXPECT_LE(z[n].imag(), t * (1.0 + 1e-12));
    }
  }
  const cdouble z = z_log_derivative(5, 2.0);
  EXPECT_TRUE(z.real() >= -6.0 && z.real() <= -1.0);
  EXPECT_TRUE(z.imag() > 0.0 && z.imag() <= 2.0);
}

TEST(LogDerivative, LargeOrderExpansion) {
  const int n = 40;
  const double t = 1.0;
  const double re = z_log_derivative(n, t).real();
  // Leading correction t^2 / (2n - 1); the remainder is O(t^4 / n^3).
  EXPECT_NEAR(re, -(n + 1.0) + t * t / (2.0 * n - 1.0), 5.0 * std::pow(t, 4) / std::pow(n, 3));
  // The coarser form t^2/(2n) + t^4/(16n) agrees only to O(1/n^2).
  EXPECT_NEAR(re, -(n + 1.0) + t * t / (2.0 * n) + std::pow(t, 4) / (16.0 * n), 3.0 / (n * n));
}

TEST(HankelRatios, ConsistentWithDirectValues) {
  const double t = 2.3, tref = 3.1;
  const auto r = hankel_ratios(12, t, tref);
  for (int n = 0; n <= 12; ++n) {
    const cdouble ref = oracle::hankel(n, t) / oracle::hankel(n, tref);
    EXPECT_LT(std::abs(r.ratio[n] - ref), 1e-11 * std::abs(ref)) << n;
    EXPECT_LT(std::abs(r.z[n] - z_log_derivative(n, t)), 1e-12 * std::abs(r.z[n]));
  }
}

TEST(Harmonics, FlattenRoundTrip) {
  int expected = 1;
  for (int n = 0; n <= 40; ++n) {
    for (int m = -n; m <= n; ++m) {
      const HarmonicIndex h{n, m};
      EXPECT_EQ(flatten(h), expected);
      EXPECT_EQ(unflatten(flatten(h)), h);
      ++expected;
    }
  }
  EXPECT_EQ(expected - 1, harmonic_count(40));
  EXPECT_THROW(unflatten(0), DomainError);
}

TEST(Harmonics, KnownValues) {
  EXPECT_NEAR(sph_harmonic({0, 0}, 0.7, 2.1).real(), 1.0 / std::sqrt(4.0 * kPi), 1e-15);
  EXPECT_NEAR(sph_harmonic({1, 0}, 0.0, 0.0).real(), std::sqrt(3.0 / (4.0 * kPi)), 1e-15);
  EXPECT_THROW(sph_harmonic({1, 2}, 0.0, 0.0), DomainError);
}

TEST(Harmonics, MatchStandardLibrary) {
  for (double th : {0.0, 0.3, 1.2, 2.9, kPi}) {
    for (double ph : {0.0, 1.1, 4.0}) {
      const auto all = sph_harmonics_all(12, th, ph);
      for (int n = 0; n <= 12; ++n) {
        for (int m = -n; m <= n; ++m) {
          const cdouble ref = oracle::ylm(n, m, th, ph);
          EXPECT_LT(std::abs(all[flat0(n, m)].y - ref), 1e-12) << n << ' ' << m;
          EXPECT_LT(std::abs(sph_harmonic({n, m}, th, ph) - ref), 1e-12);
        }
      }
    }
  }
}

TEST(Harmonics, ThetaDerivativeByFiniteDifference) {
  const double th = 1.1, ph = 0.4, h = 1e-6;
  const auto all = sph_harmonics_all(10, th, ph);
  for (int n = 0; n <= 10; ++n) {
    for (int m = -n; m <= n; ++m) {
      const cdouble fd = (oracle::ylm(n, m, th + h, ph) - oracle::ylm(n, m, th - h, ph)) / (2 * h);
      EXPECT_LT(std::abs(all[flat0(n, m)].dtheta - fd), 1e-8) << n << ' ' << m;
    }
  }
}

TEST(Harmonics, OrthonormalUnderQuadrature) {
  const int N = 8;
  const SphereQuadrature q(N);
  Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(harmonic_count(N), harmonic_count(N));
  for (std::size_t k = 0; k < q.size(); ++k) {
    const auto Y = sph_harmonics_all(N, q.theta(k), q.phi(k));
    for (int i = 0; i < harmonic_count(N); ++i) {
      for (int j = 0; j < harmonic_count(N); ++j) G(i, j) += q.weight(k) * Y[i].y * std::conj(Y[j].y);
    }
  }
  EXPECT_LT((G - Eigen::MatrixXcd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff(), 1e-12);
  // |Y_2^1|^2 integrates to one.
  EXPECT_NEAR(G(flat0(2, 1), flat0(2, 1)).real(), 1.0, 1e-12);
}

TEST(Quadrature, WeightsAndGaussLegendre) {
  const SphereQuadrature q(10);
  double s = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) {
    EXPECT_GT(q.weight(k), 0.0);
    s += q.weight(k);
  }
  EXPECT_NEAR(s, 4.0 * kPi, 1e-12);
  const auto gl = gauss_legendre(7);
  double m6 = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) m6 += gl.weights[i] * std::pow(gl.nodes[i], 12);
  EXPECT_NEAR(m6, 2.0 / 13.0, 1e-14);
  EXPECT_THROW(gauss_legendre(0), DomainError);
}

TEST(VectorHarmonics, DegenerateOrderZero) {
  const double R = 2.0;
  const auto h = vector_harmonics({0, 0}, 0.8, 1.3, R);
  EXPECT_TRUE(h.degenerate);
  EXPECT_EQ(h.T.norm(), 0.0);
  EXPECT_EQ(h.V.norm(), 0.0);
  const Vec3 er = spherical_frame(0.8, 1.3).e_r;
  EXPECT_LT((h.W - (1.0 / (R * std::sqrt(4.0 * kPi))) * er.cast<cdouble>()).norm(), 1e-15);
}

TEST(VectorHarmonics, PointwiseStructure) {
  for (int n = 1; n <= 5; ++n) {
    for (int m = -n; m <= n; ++m) {
      const auto h = vector_harmonics({n, m}, 0.9, 2.2, 1.5);
      const Vec3 er = spherical_frame(0.9, 2.2).e_r;
      // V = T x e_r and T, V are tangential.
      const CVec3 cross = oracle::cross(h.T, er.cast<cdouble>());
      EXPECT_LT((cross - h.V).norm(), 1e-14);
      EXPECT_LT(std::abs(h.T.cwiseProduct(er.cast<cdouble>()).sum()), 1e-14);
      EXPECT_LT(std::abs(h.T.cwiseProduct(h.V).sum()), 1e-14);
    }
  }
}

TEST(VectorHarmonics, GramMatrixIsIdentity) {
  const int N = 4;
  const double R = 1.7;
  const SphereQuadrature q(N + 1);
  const int count = harmonic_count(N);
  // Basis ordering: (T, V, W) per (n, m), skipping T_0, V_0.
  std::vector<std::pair<int, int>> idx;
  for (int i = 0; i < count; ++i) {
    for (int c = 0; c < 3; ++c) {
      if (i == 0 && c < 2) continue;
      idx.emplace_back(i, c);
    }
  }
  Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(idx.size(), idx.size());
  for (std::size_t k = 0; k < q.size(); ++k) {
    std::vector<CVec3> f;
    for (auto [i, c] : idx) {
      const HarmonicIndex h = unflatten(i + 1);
      const auto vh = vector_harmonics(h, q.theta(k), q.phi(k), R);
      f.push_back(c == 0 ? vh.T : c == 1 ? vh.V : vh.W);
    }
    for (std::size_t a = 0; a < f.size(); ++a) {
      for (std::size_t b = 0; b < f.size(); ++b) {
        G(a, b) += q.weight(k) * R * R * f[b].dot(f[a]);
      }
    }
  }
  EXPECT_LT((G - Eigen::MatrixXcd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Points, FibonacciSphere) {
  const auto pts = fibonacci_sphere(100, 1.0);
  ASSERT_EQ(pts.size(), 100u);
  Vec3 c = Vec3::Zero();
  for (const auto& p : pts) {
    EXPECT_NEAR(p.norm(), 1.0, 1e-14);
    c += p;
  }
  EXPECT_LT(c.norm() / 100.0, 0.02);
  EXPECT_THROW(fibonacci_sphere(0, 1.0), DomainError);
}

TEST(Coordinates, RoundTrip) {
  const SphericalPoint p{2.0, 1.1, 5.0};
  const SphericalPoint q = to_spherical(to_cartesian(p));
  EXPECT_NEAR(q.r, p.r, 1e-14);
  EXPECT_NEAR(q.theta, p.theta, 1e-14);
  EXPECT_NEAR(q.phi, p.phi, 1e-14);
}
