#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Geometry>

#include <elastinv/elastinv.hpp>

namespace oracle {

using elastinv::cdouble;
using elastinv::CVec3;
using elastinv::Vec3;

/// h_n^(1)(t) from the standard library's spherical Bessel functions.
cdouble hankel(int n, double t);
cdouble hankel_derivative(int n, double t);
/// j_n(t) and j_n'(t).
double bessel_j(int n, double t);
double bessel_j_derivative(int n, double t);

/// Y_n^m from std::sph_legendre, Condon-Shortley phase.
cdouble ylm(int n, int m, double theta, double phi);

/// Rigid sphere of radius a centred at the origin, plane P wave along d.
/// Mode-by-mode coefficients of the scattered trace on the sphere of radius R
/// in the (T, V, W) basis, from L, M, N vector wave functions.
elastinv::DisplacementCoeffs rigid_sphere_trace(const elastinv::Medium& med, double a,
                                                const Vec3& d, double R, int N);

/// Scattered field at x (|x| = R) synthesised from the trace coefficients.
CVec3 rigid_sphere_field(const elastinv::DisplacementCoeffs& trace, const Vec3& x);

/// Bilinear cross product (Eigen's cross conjugates complex operands).
CVec3 cross(const CVec3& a, const CVec3& b);

/// Central finite difference of a vector-valued function.
CVec3 central_difference(const std::function<CVec3(const Vec3&)>& f, const Vec3& x,
                         const Vec3& dir, double h);

/// Random potential coefficients with unit-variance complex Gaussian entries
/// (psi entries zero at n = 0), damped by decay^n.
elastinv::PotentialCoeffs random_potentials(int N, unsigned seed, double decay = 1.0);

}  // namespace oracle
