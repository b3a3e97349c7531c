#include "elastinv/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "elastinv/errors.hpp"

namespace elastinv {

namespace {

constexpr cdouble kI{0.0, 1.0};

void require_positive_argument(double t, const char* who) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw DomainError(std::string(who) + ": argument must be positive, got " +
                      std::to_string(t));
  }
}

void require_order(int n, const char* who) {
  if (n < 0) {
    throw DomainError(std::string(who) + ": negative order " + std::to_string(n));
  }
}

// s_n = h_n / h_{n-1} for n = 1..nmax.
std::vector<cdouble> consecutive_ratios(int nmax, double t) {
  std::vector<cdouble> s(static_cast<std::size_t>(nmax) + 1);
  if (nmax >= 1) {
    s[1] = cdouble(1.0 / t, -1.0);
    for (int n = 1; n < nmax; ++n) {
      s[n + 1] = (2.0 * n + 1.0) / t - 1.0 / s[n];
    }
  }
  return s;
}

// z_n = t / s_n - (n + 1). The imaginary part is taken from the Wronskian,
// Im z_n = 1 / (t |h_n|^2), with log|h_n| accumulated from the ratios so it
// keeps full relative accuracy deep into the evanescent regime.
std::vector<cdouble> z_from_ratios(const std::vector<cdouble>& s, double t) {
  const std::size_t count = s.size();
  std::vector<cdouble> z(count);
  z[0] = cdouble(-1.0, t);
  double log_h = -std::log(t);
  for (std::size_t n = 1; n < count; ++n) {
    log_h += std::log(std::abs(s[n]));
    const double re = (t / s[n]).real() - (static_cast<double>(n) + 1.0);
    z[n] = cdouble(re, std::exp(-std::log(t) - 2.0 * log_h));
  }
  return z;
}

}  // namespace

HarmonicIndex unflatten(int i) {
  if (i < 1) throw DomainError("unflatten: index must be >= 1");
  const int k = i - 1;
  int n = static_cast<int>(std::sqrt(static_cast<double>(k)));
  while (n * n > k) --n;
  while ((n + 1) * (n + 1) <= k) ++n;
  return {n, k - n * n - n};
}

Vec3 to_cartesian(const SphericalPoint& p) {
  const double s = std::sin(p.theta);
  return {p.r * s * std::cos(p.phi), p.r * s * std::sin(p.phi),
          p.r * std::cos(p.theta)};
}

SphericalPoint to_spherical(const Vec3& x) {
  SphericalPoint p;
  p.r = x.norm();
  if (p.r == 0.0) return {0.0, 0.0, 0.0};
  p.theta = std::acos(std::clamp(x.z() / p.r, -1.0, 1.0));
  p.phi = std::atan2(x.y(), x.x());
  if (p.phi < 0.0) p.phi += 2.0 * kPi;
  return p;
}

SphericalFrame spherical_frame(double theta, double phi) {
  const double st = std::sin(theta), ct = std::cos(theta);
  const double sp = std::sin(phi), cp = std::cos(phi);
  return {Vec3(st * cp, st * sp, ct), Vec3(ct * cp, ct * sp, -st),
          Vec3(-sp, cp, 0.0)};
}

std::vector<HankelValue> spherical_hankel1_all(int nmax, double t) {
  require_order(nmax, "spherical_hankel1");
  require_positive_argument(t, "spherical_hankel1");
  const cdouble e = std::exp(kI * t);
  std::vector<cdouble> h(static_cast<std::size_t>(nmax) + 2);
  h[0] = -kI * e / t;
  h[1] = -e * (t + kI) / (t * t);
  for (int n = 1; n <= nmax; ++n) {
    h[n + 1] = (2.0 * n + 1.0) / t * h[n] - h[n - 1];
  }
  std::vector<HankelValue> out(static_cast<std::size_t>(nmax) + 1);
  out[0] = {h[0], -h[1]};
  for (int n = 1; n <= nmax; ++n) {
    out[n] = {h[n], h[n - 1] - (n + 1.0) / t * h[n]};
  }
  return out;
}

HankelValue spherical_hankel1(int n, double t) {
  return spherical_hankel1_all(n, t)[n];
}

std::vector<cdouble> z_log_derivative_all(int nmax, double t) {
  require_order(nmax, "z_log_derivative");
  require_positive_argument(t, "z_log_derivative");
  return z_from_ratios(consecutive_ratios(nmax, t), t);
}

std::vector<cdouble> z_shifted_all(int nmax, double t) {
  require_order(nmax, "z_shifted_all");
  require_positive_argument(t, "z_shifted_all");
  const auto s = consecutive_ratios(nmax, t);
  std::vector<cdouble> e = z_from_ratios(s, t);
  e[0] = cdouble(0.0, t);
  for (int n = 1; n <= nmax; ++n) e[n] = cdouble((t / s[n]).real(), e[n].imag());
  return e;
}

cdouble z_log_derivative(int n, double t) { return z_log_derivative_all(n, t)[n]; }

HankelRatios hankel_ratios(int nmax, double t, double t_ref) {
  require_order(nmax, "hankel_ratios");
  require_positive_argument(t, "hankel_ratios");
  require_positive_argument(t_ref, "hankel_ratios");
  const auto s = consecutive_ratios(nmax, t);
  const auto s_ref = consecutive_ratios(nmax, t_ref);
  HankelRatios out;
  out.ratio.resize(static_cast<std::size_t>(nmax) + 1);
  out.z = z_from_ratios(s, t);
  out.ratio[0] = (t_ref / t) * std::exp(kI * (t - t_ref));
  for (int n = 1; n <= nmax; ++n) out.ratio[n] = out.ratio[n - 1] * (s[n] / s_ref[n]);
  return out;
}

// ---------------------------------------------------------------------------

LegendreTable::LegendreTable(int N, double theta) : N_(N) {
  require_order(N, "LegendreTable");
  const std::size_t size = static_cast<std::size_t>(tri(N, N)) + 1;
  p_.assign(size, 0.0);
  dp_.assign(size, 0.0);
  q_.assign(size, 0.0);

  const double x = std::cos(theta);
  const double s = std::sin(theta);
  const double p00 = 1.0 / std::sqrt(4.0 * kPi);

  auto run_n = [&](std::vector<double>& v, int m, double start) {
    v[tri(m, m)] = start;
    double prev2 = 0.0, prev1 = start;
    for (int n = m + 1; n <= N; ++n) {
      const double nn = n, mm = m;
      const double a = std::sqrt((4.0 * nn * nn - 1.0) / (nn * nn - mm * mm));
      const double b = std::sqrt(((nn - 1.0) * (nn - 1.0) - mm * mm) /
                                 (4.0 * (nn - 1.0) * (nn - 1.0) - 1.0));
      const double cur = a * (x * prev1 - b * prev2);
      v[tri(n, m)] = cur;
      prev2 = prev1;
      prev1 = cur;
    }
  };

  run_n(p_, 0, p00);
  // c_m sin^{m-1}(theta) seeds q = P_m^m / sin(theta).
  double c = p00;
  double sin_pow = 1.0;
  for (int m = 1; m <= N; ++m) {
    c *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m));
    if (m > 1) sin_pow *= s;
    run_n(q_, m, c * sin_pow);
    for (int n = m; n <= N; ++n) p_[tri(n, m)] = s * q_[tri(n, m)];
  }

  for (int n = 0; n <= N; ++n) {
    for (int m = 0; m <= n; ++m) {
      const double up = (m + 1 <= n) ? p_[tri(n, m + 1)] : 0.0;
      // P_n^{-1} = -P_n^1 under the Condon-Shortley convention.
      const double down = (m >= 1) ? p_[tri(n, m - 1)] : (n >= 1 ? -p_[tri(n, 1)] : 0.0);
      dp_[tri(n, m)] =
          0.5 * (std::sqrt(static_cast<double>((n - m) * (n + m + 1))) * up -
                 std::sqrt(static_cast<double>((n + m) * (n - m + 1))) * down);
    }
  }
}

std::vector<HarmonicSample> sph_harmonics_all(int N, double theta, double phi) {
  const LegendreTable leg(N, theta);
  std::vector<HarmonicSample> out(static_cast<std::size_t>(harmonic_count(N)));
  for (int m = 0; m <= N; ++m) {
    const cdouble e = std::polar(1.0, m * phi);
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    for (int n = m; n <= N; ++n) {
      HarmonicSample h;
      h.y = leg.p(n, m) * e;
      h.dtheta = leg.dp(n, m) * e;
      h.dphi = kI * static_cast<double>(m) * h.y;
      out[flat0(n, m)] = h;
      if (m > 0) {
        out[flat0(n, -m)] = {sign * std::conj(h.y), sign * std::conj(h.dtheta),
                             sign * std::conj(h.dphi)};
      }
    }
  }
  return out;
}

cdouble sph_harmonic(HarmonicIndex idx, double theta, double phi) {
  if (!idx.valid()) throw DomainError("sph_harmonic: invalid (n, m)");
  const LegendreTable leg(idx.n, theta);
  const int am = std::abs(idx.m);
  cdouble y = leg.p(idx.n, am) * std::polar(1.0, am * phi);
  if (idx.m < 0) y = ((am % 2 == 0) ? 1.0 : -1.0) * std::conj(y);
  return y;
}

VectorHarmonics vector_harmonics(HarmonicIndex idx, double theta, double phi,
                                 double R) {
  if (!idx.valid()) throw DomainError("vector_harmonics: invalid (n, m)");
  if (!(R > 0.0)) throw DomainError("vector_harmonics: radius must be positive");
  const LegendreTable leg(idx.n, theta);
  const int am = std::abs(idx.m);
  const cdouble e = std::polar(1.0, am * phi);
  cdouble y = leg.p(idx.n, am) * e;
  cdouble yt = leg.dp(idx.n, am) * e;
  // (1/sin theta) dY/dphi, evaluated through q to stay finite at the poles.
  cdouble ys = kI * static_cast<double>(am) * leg.q(idx.n, am) * e;
  if (idx.m < 0) {
    const double sign = (am % 2 == 0) ? 1.0 : -1.0;
    y = sign * std::conj(y);
    yt = sign * std::conj(yt);
    ys = sign * std::conj(ys);
  }
  const SphericalFrame f = spherical_frame(theta, phi);
  VectorHarmonics out;
  out.W = (y / R) * f.e_r.cast<cdouble>();
  if (idx.n == 0) {
    out.T.setZero();
    out.V.setZero();
    out.degenerate = true;
    return out;
  }
  const double c = 1.0 / (R * std::sqrt(idx.n * (idx.n + 1.0)));
  out.T = c * (yt * f.e_theta.cast<cdouble>() + ys * f.e_phi.cast<cdouble>());
  out.V = c * (ys * f.e_theta.cast<cdouble>() - yt * f.e_phi.cast<cdouble>());
  return out;
}

}  // namespace elastinv
