#include <algorithm>
#include <cmath>

#include "elastinv/errors.hpp"
#include "elastinv/specfun.hpp"

namespace elastinv {

GaussLegendre gauss_legendre(int count) {
  if (count < 1) throw DomainError("gauss_legendre: need at least one node");
  GaussLegendre rule;
  if (count == 1) return {{0.0}, {2.0}};
  rule.nodes.resize(count);
  rule.weights.resize(count);
  const int half = (count + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= count; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = count * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= count; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = count * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[count - 1 - i] = x;
    rule.nodes[i] = -x;
    rule.weights[i] = w;
    rule.weights[count - 1 - i] = w;
  }
  return rule;
}

SphereQuadrature::SphereQuadrature(int order) : order_(order) {
  if (order < 0) throw DomainError("SphereQuadrature: negative order");
  const GaussLegendre gl = gauss_legendre(order + 1);
  const int nphi = 2 * order + 2;
  const double dphi = 2.0 * kPi / nphi;
  theta_.reserve(static_cast<std::size_t>(nphi) * (order + 1));
  phi_.reserve(theta_.capacity());
  weight_.reserve(theta_.capacity());
  for (int i = 0; i <= order; ++i) {
    // Descending cos(theta) so theta increases with i.
    const double x = gl.nodes[order - i];
    const double th = std::acos(x);
    for (int j = 0; j < nphi; ++j) {
      theta_.push_back(th);
      phi_.push_back(j * dphi);
      weight_.push_back(gl.weights[order - i] * dphi);
    }
  }
}

std::vector<Vec3> fibonacci_sphere(int count, double R) {
  if (count < 1) throw DomainError("fibonacci_sphere: need at least one point");
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  std::vector<Vec3> pts;
  pts.reserve(count);
  for (int k = 0; k < count; ++k) {
    const double z = 1.0 - (2.0 * k + 1.0) / count;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double ph = std::fmod(k * golden, 2.0 * kPi);
    pts.emplace_back(R * rho * std::cos(ph), R * rho * std::sin(ph), R * z);
  }
  return pts;
}

}  // namespace elastinv
