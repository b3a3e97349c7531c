#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "elastinv/specfun.hpp"

namespace elastinv {

/// Surface coefficients C of length 6(N+1)^2, stored as six blocks
/// (a1, b1, a2, b2, a3, b3) of (N+1)^2 entries each. Component j of the map is
/// r_j = sum a_j Re Y_n^m + b_j Im Y_n^m, with the block entry at flat0(n, m).
struct SurfaceParam {
  int N = 0;
  std::vector<double> C;

  SurfaceParam() = default;
  explicit SurfaceParam(int N_);
  SurfaceParam(int N_, std::vector<double> C_);

  static std::size_t size_for(int N) { return 6u * harmonic_count(N); }
  std::size_t block_size() const { return static_cast<std::size_t>(harmonic_count(N)); }

  double& a(int j, int n, int m) { return C[(2 * j) * block_size() + flat0(n, m)]; }
  double& b(int j, int n, int m) { return C[(2 * j + 1) * block_size() + flat0(n, m)]; }
  double a(int j, int n, int m) const { return C[(2 * j) * block_size() + flat0(n, m)]; }
  double b(int j, int n, int m) const { return C[(2 * j + 1) * block_size() + flat0(n, m)]; }

  /// Same surface at a higher (or equal) order, new entries zero.
  SurfaceParam padded(int N_new) const;

  void validate() const;  ///< length check; throws ValidationError
};

/// Decoded coefficient index: coordinate j in {0,1,2}, Re/Im part, (n, m).
struct CoefficientIndex {
  int coord = 0;
  bool imag = false;
  HarmonicIndex h;
};
/// i is 1-based in 1..6(N+1)^2.
CoefficientIndex decode_coefficient(int i, int N);
int encode_coefficient(const CoefficientIndex& c, int N);

struct SurfacePoint {
  Vec3 x;
  Vec3 r_theta, r_phi;
  Vec3 normal;          ///< unit, outward
  double jacobian = 0;  ///< |r_theta x r_phi|
};

/// Evaluated surface with a fixed outward orientation.
class Surface {
 public:
  explicit Surface(SurfaceParam sp);

  const SurfaceParam& param() const noexcept { return sp_; }
  /// +1 when r_theta x r_phi points outward, -1 otherwise.
  int orientation() const noexcept { return orientation_; }

  /// Throws GeometryError where the tangents are degenerate.
  SurfacePoint eval(double theta, double phi) const;
  Vec3 point(double theta, double phi) const;
  /// Raw tangents and r_theta x r_phi direction; never throws.
  SurfacePoint eval_unoriented(double theta, double phi) const;

  /// Enclosed volume by the divergence theorem.
  double volume() const;

 private:
  SurfaceParam sp_;
  int orientation_ = 1;
};

SurfacePoint eval_surface(const SurfaceParam& sp, double theta, double phi);

/// nu_j times Re or Im of Y_n^m for the decoded coefficient i.
double perturbation_q(int i, const SurfaceParam& sp, double theta, double phi,
                      const Vec3& normal);

/// Boundary nodes on dD with outward normals and surface weights; parameter
/// angles come from a SphereQuadrature of the given order.
struct BoundarySample {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  std::vector<double> weights;
  std::vector<double> theta, phi;
  std::size_t size() const noexcept { return points.size(); }
};

/// Throws GeometryError when the surface fails the star-shape test at a node
/// (non-positive (x - centroid) . normal or vanishing Jacobian).
BoundarySample sample_boundary(const SurfaceParam& sp, int order);
BoundarySample sample_boundary(const Surface& s, int order);

double surface_area(const SurfaceParam& sp, int order);

/// Distance from the origin to the surface along unit direction dir. Throws
/// GeometryError if no intersection is found.
double ray_radius(const Surface& s, const Vec3& dir);

/// Largest |x| over a sampling grid of the given order.
double max_radius(const Surface& s, int order);

/// Least-squares fit of a parametric map onto spherical harmonics up to N.
SurfaceParam fit_surface(const std::function<Vec3(double, double)>& map, int N,
                         int quad_order = -1);

// Presets.
SurfaceParam sphere_param(double R0, int N);
SurfaceParam ellipsoid_param(double a, double b, double c, int N);
/// Bean-like test body. Stays well defined for all angles.
SurfaceParam bean_param(int N);
/// "sphere:R0", "ellipsoid:a,b,c", "bean"; throws ValidationError.
SurfaceParam preset_param(const std::string& spec, int N);

/// Cross sections in the planes x1 = 0, x2 = 0, x3 = 0 as CSV rows
/// plane,angle,u,v with `count` rays per plane.
void write_cross_sections_csv(std::ostream& os, const Surface& s, int count = 181);

}  // namespace elastinv
