#include "elastinv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>

#include "elastinv/errors.hpp"

namespace elastinv {

namespace {

const double kSq2pi3 = std::sqrt(2.0 * kPi / 3.0);
const double kSq4pi3 = std::sqrt(4.0 * kPi / 3.0);

}  // namespace

SurfaceParam::SurfaceParam(int N_) : N(N_) {
  if (N_ < 0) throw ValidationError("SurfaceParam: negative order");
  C.assign(size_for(N_), 0.0);
}

SurfaceParam::SurfaceParam(int N_, std::vector<double> C_) : N(N_), C(std::move(C_)) {
  validate();
}

void SurfaceParam::validate() const {
  if (N < 0) throw ValidationError("SurfaceParam: negative order");
  if (C.size() != size_for(N)) {
    throw ValidationError("SurfaceParam: expected " + std::to_string(size_for(N)) +
                          " coefficients for N = " + std::to_string(N) + ", got " +
                          std::to_string(C.size()));
  }
  for (double c : C) {
    if (!std::isfinite(c)) throw ValidationError("SurfaceParam: non-finite coefficient");
  }
}

SurfaceParam SurfaceParam::padded(int N_new) const {
  if (N_new < N) throw ValidationError("SurfaceParam::padded: cannot shrink order");
  SurfaceParam out(N_new);
  const std::size_t old_block = block_size(), new_block = out.block_size();
  for (int blk = 0; blk < 6; ++blk) {
    std::copy_n(C.begin() + blk * old_block, old_block,
                out.C.begin() + blk * new_block);
  }
  return out;
}

CoefficientIndex decode_coefficient(int i, int N) {
  const int block = harmonic_count(N);
  if (i < 1 || i > 6 * block) {
    throw DomainError("decode_coefficient: index " + std::to_string(i) + " out of range");
  }
  const int k = i - 1;
  const int blk = k / block;
  CoefficientIndex c;
  c.coord = blk / 2;
  c.imag = (blk % 2) == 1;
  c.h = unflatten(k % block + 1);
  return c;
}

int encode_coefficient(const CoefficientIndex& c, int N) {
  if (c.coord < 0 || c.coord > 2 || !c.h.valid() || c.h.n > N) {
    throw DomainError("encode_coefficient: invalid index");
  }
  return (2 * c.coord + (c.imag ? 1 : 0)) * harmonic_count(N) + flatten(c.h);
}

// ---------------------------------------------------------------------------

Surface::Surface(SurfaceParam sp) : sp_(std::move(sp)) {
  sp_.validate();
  orientation_ = 1;
  const double v = volume();
  if (!(std::abs(v) > 0.0)) throw GeometryError("Surface: zero enclosed volume");
  orientation_ = v > 0.0 ? 1 : -1;
}

SurfacePoint Surface::eval_unoriented(double theta, double phi) const {
  const auto Y = sph_harmonics_all(sp_.N, theta, phi);
  SurfacePoint out;
  out.x.setZero();
  out.r_theta.setZero();
  out.r_phi.setZero();
  for (int j = 0; j < 3; ++j) {
    for (int n = 0; n <= sp_.N; ++n) {
      for (int m = -n; m <= n; ++m) {
        const double a = sp_.a(j, n, m), b = sp_.b(j, n, m);
        if (a == 0.0 && b == 0.0) continue;
        const HarmonicSample& y = Y[flat0(n, m)];
        out.x(j) += a * y.y.real() + b * y.y.imag();
        out.r_theta(j) += a * y.dtheta.real() + b * y.dtheta.imag();
        out.r_phi(j) += a * y.dphi.real() + b * y.dphi.imag();
      }
    }
  }
  const Vec3 cr = out.r_theta.cross(out.r_phi);
  out.jacobian = cr.norm();
  out.normal = out.jacobian > 0.0 ? Vec3(cr / out.jacobian) : Vec3::Zero();
  return out;
}

SurfacePoint Surface::eval(double theta, double phi) const {
  SurfacePoint p = eval_unoriented(theta, phi);
  const double scale = std::max(1.0, p.x.norm());
  if (!(p.jacobian > 1e-14 * scale * scale)) {
    throw GeometryError("Surface: degenerate tangents at theta = " +
                        std::to_string(theta) + ", phi = " + std::to_string(phi));
  }
  p.normal *= orientation_;
  return p;
}

Vec3 Surface::point(double theta, double phi) const { return eval_unoriented(theta, phi).x; }

double Surface::volume() const {
  const SphereQuadrature quad(sp_.N + 4);
  double v = 0.0;
  for (std::size_t k = 0; k < quad.size(); ++k) {
    const SurfacePoint p = eval_unoriented(quad.theta(k), quad.phi(k));
    // The rule carries a sin(theta) factor; the parametric integrand does not.
    v += quad.weight(k) / std::sin(quad.theta(k)) *
         p.x.dot(p.r_theta.cross(p.r_phi)) / 3.0;
  }
  return orientation_ * v;
}

SurfacePoint eval_surface(const SurfaceParam& sp, double theta, double phi) {
  return Surface(sp).eval(theta, phi);
}

double perturbation_q(int i, const SurfaceParam& sp, double theta, double phi,
                      const Vec3& normal) {
  const CoefficientIndex c = decode_coefficient(i, sp.N);
  const cdouble y = sph_harmonic(c.h, theta, phi);
  return normal(c.coord) * (c.imag ? y.imag() : y.real());
}

// ---------------------------------------------------------------------------

BoundarySample sample_boundary(const Surface& s, int order) {
  const SphereQuadrature quad(order);
  BoundarySample out;
  const std::size_t count = quad.size();
  out.points.reserve(count);
  out.normals.reserve(count);
  out.weights.reserve(count);
  out.theta.reserve(count);
  out.phi.reserve(count);
  Vec3 centroid = Vec3::Zero();
  double area = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double th = quad.theta(k), ph = quad.phi(k);
    const SurfacePoint p = s.eval(th, ph);
    const double w = quad.weight(k) / std::sin(th) * p.jacobian;
    out.points.push_back(p.x);
    out.normals.push_back(p.normal);
    out.weights.push_back(w);
    out.theta.push_back(th);
    out.phi.push_back(ph);
    centroid += w * p.x;
    area += w;
  }
  centroid /= area;
  for (std::size_t k = 0; k < count; ++k) {
    if (!((out.points[k] - centroid).dot(out.normals[k]) > 0.0)) {
      throw GeometryError("sample_boundary: surface is not star-shaped about its "
                          "centroid (possible self-intersection) near theta = " +
                          std::to_string(out.theta[k]) +
                          ", phi = " + std::to_string(out.phi[k]));
    }
  }
  return out;
}

BoundarySample sample_boundary(const SurfaceParam& sp, int order) {
  return sample_boundary(Surface(sp), order);
}

double surface_area(const SurfaceParam& sp, int order) {
  const BoundarySample s = sample_boundary(sp, order);
  double a = 0.0;
  for (double w : s.weights) a += w;
  return a;
}

double ray_radius(const Surface& s, const Vec3& dir_in) {
  const Vec3 dir = dir_in.normalized();
  // Coarse table for the starting parameters.
  const int coarse = std::max(12, 2 * s.param().N + 6);
  const SphereQuadrature quad(coarse);
  double best = -2.0, th = 0.0, ph = 0.0, rho = 0.0;
  for (std::size_t k = 0; k < quad.size(); ++k) {
    const Vec3 x = s.point(quad.theta(k), quad.phi(k));
    const double r = x.norm();
    if (r == 0.0) continue;
    const double c = x.dot(dir) / r;
    if (c > best) {
      best = c;
      th = quad.theta(k);
      ph = quad.phi(k);
      rho = r;
    }
  }
  // Levenberg-Marquardt on r(theta, phi) - rho dir = 0.
  double mu = 1e-6;
  auto residual = [&](double t, double p, double r) { return Vec3(s.point(t, p) - r * dir); };
  Vec3 F = residual(th, ph, rho);
  for (int iter = 0; iter < 100; ++iter) {
    const double fn = F.norm();
    if (fn < 1e-14 * std::max(1.0, rho)) break;
    const SurfacePoint p = s.eval_unoriented(th, ph);
    Eigen::Matrix3d J;
    J.col(0) = p.r_theta;
    J.col(1) = p.r_phi;
    J.col(2) = -dir;
    bool accepted = false;
    for (int tries = 0; tries < 30 && !accepted; ++tries) {
      const Eigen::Matrix3d A = J.transpose() * J + mu * Eigen::Matrix3d::Identity();
      const Eigen::Vector3d step = A.ldlt().solve(-J.transpose() * F);
      const Vec3 Fn = residual(th + step(0), ph + step(1), rho + step(2));
      if (Fn.norm() < fn) {
        th += step(0);
        ph += step(1);
        rho += step(2);
        F = Fn;
        mu = std::max(mu * 0.1, 1e-15);
        accepted = true;
      } else {
        mu *= 10.0;
      }
    }
    if (!accepted) break;
  }
  if (!(F.norm() < 1e-9 * std::max(1.0, std::abs(rho))) || !(rho > 0.0)) {
    throw GeometryError("ray_radius: no intersection found along the given direction");
  }
  return rho;
}

double max_radius(const Surface& s, int order) {
  const SphereQuadrature quad(order);
  double r = 0.0;
  for (std::size_t k = 0; k < quad.size(); ++k) {
    r = std::max(r, s.point(quad.theta(k), quad.phi(k)).norm());
  }
  return r;
}

// ---------------------------------------------------------------------------

SurfaceParam fit_surface(const std::function<Vec3(double, double)>& map, int N,
                         int quad_order) {
  if (quad_order < 0) quad_order = std::max(2 * N + 8, 32);
  const SphereQuadrature quad(quad_order);
  SurfaceParam sp(N);
  std::vector<CVec3> c(static_cast<std::size_t>(harmonic_count(N)), CVec3::Zero());
  for (std::size_t k = 0; k < quad.size(); ++k) {
    const Vec3 x = map(quad.theta(k), quad.phi(k));
    const auto Y = sph_harmonics_all(N, quad.theta(k), quad.phi(k));
    for (int i = 0; i < harmonic_count(N); ++i) {
      c[i] += quad.weight(k) * std::conj(Y[i].y) * x.cast<cdouble>();
    }
  }
  // x = sum c Y is real, so x = sum Re(c) Re Y - Im(c) Im Y.
  for (int j = 0; j < 3; ++j) {
    for (int n = 0; n <= N; ++n) {
      for (int m = -n; m <= n; ++m) {
        const cdouble v = c[flat0(n, m)](j);
        sp.a(j, n, m) = std::abs(v.real()) < 1e-15 ? 0.0 : v.real();
        sp.b(j, n, m) = std::abs(v.imag()) < 1e-15 ? 0.0 : -v.imag();
      }
    }
  }
  return sp;
}

SurfaceParam ellipsoid_param(double a, double b, double c, int N) {
  if (!(a > 0.0 && b > 0.0 && c > 0.0)) {
    throw ValidationError("ellipsoid_param: semi-axes must be positive");
  }
  if (N < 1) throw ValidationError("ellipsoid_param: order must be at least 1");
  SurfaceParam sp(N);
  sp.a(0, 1, -1) = kSq2pi3 * a;
  sp.a(0, 1, 1) = -kSq2pi3 * a;
  sp.b(1, 1, -1) = kSq2pi3 * b;
  sp.b(1, 1, 1) = kSq2pi3 * b;
  sp.a(2, 1, 0) = kSq4pi3 * c;
  return sp;
}

SurfaceParam sphere_param(double R0, int N) {
  if (!(R0 > 0.0)) throw ValidationError("sphere_param: radius must be positive");
  return ellipsoid_param(R0, R0, R0, N);
}

SurfaceParam bean_param(int N) {
  return fit_surface(
      [](double th, double ph) {
        const double st = std::sin(th), ct = std::cos(th);
        const double w = std::cos(kPi * ct);
        return Vec3(0.75 * (1.0 - 0.05 * w) * st * std::cos(ph),
                    0.75 * ((1.0 - 0.005 * w) * st * std::sin(ph) + 0.35 * w),
                    0.75 * ct);
      },
      N, std::max(2 * N + 8, 48));
}

SurfaceParam preset_param(const std::string& spec, int N) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        args.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ValidationError("preset_param: bad number '" + tok + "' in " + spec);
      }
    }
  }
  if (name == "sphere") {
    if (args.size() != 1) throw ValidationError("preset sphere expects sphere:R0");
    return sphere_param(args[0], std::max(N, 1));
  }
  if (name == "ellipsoid") {
    if (args.size() != 3) throw ValidationError("preset ellipsoid expects ellipsoid:a,b,c");
    return ellipsoid_param(args[0], args[1], args[2], std::max(N, 1));
  }
  if (name == "bean") {
    if (!args.empty()) throw ValidationError("preset bean takes no arguments");
    return bean_param(N);
  }
  throw ValidationError("unknown surface preset '" + spec + "'");
}

void write_cross_sections_csv(std::ostream& os, const Surface& s, int count) {
  if (count < 2) throw ValidationError("write_cross_sections_csv: need at least 2 rays");
  os << "plane,angle,u,v\n";
  os.precision(17);
  for (int plane = 1; plane <= 3; ++plane) {
    for (int k = 0; k < count; ++k) {
      const double t = 2.0 * kPi * k / (count - 1);
      const double c = std::cos(t), si = std::sin(t);
      Vec3 dir;
      if (plane == 1) dir = Vec3(0.0, c, si);
      else if (plane == 2) dir = Vec3(c, 0.0, si);
      else dir = Vec3(c, si, 0.0);
      const double rho = ray_radius(s, dir);
      os << plane << ',' << t << ',' << rho * c << ',' << rho * si << '\n';
    }
  }
}

}  // namespace elastinv
