#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "airy.hpp"
#include "coin.hpp"
#include "engine.hpp"
#include "errors.hpp"
#include "observables.hpp"
#include "phase.hpp"
#include "state.hpp"

namespace qwalk {

// One component's initial data for the long-wavelength limit: a Gaussian of
// width w seated at the origin with amplitude a0, plus Gaussians at the two
// neighbouring sites with the amplitudes the first coupled step put there.
struct GaussianSeed {
  double w = 0.65;
  Amplitude a0{};
  Amplitude a_plus{};   // amplitude at n = +1 after one step
  Amplitude a_minus{};  // amplitude at n = -1 after one step
};

// Extracts the (u, d) seeds from a delta-localized state and the state one
// linear-schedule step later.
inline std::pair<GaussianSeed, GaussianSeed> seed_fields(
    const WalkState& initial, const WalkState& after_one_step, double w) {
  if (w <= 0.0) throw param_error("seed: width w must be > 0");
  if (initial.t() != 0 || std::abs(initial.prob(0) - 1.0) > 1e-12)
    throw param_error("seed: initial state must be delta-localized at n=0");
  GaussianSeed su{w, initial.u(0), after_one_step.u(1), after_one_step.u(-1)};
  GaussianSeed sd{w, initial.d(0), after_one_step.d(1), after_one_step.d(-1)};
  return {su, sd};
}

// Everything reconstruct() needs: the two component seeds and the walk
// parameters they were generated with.
struct ContinuumSetup {
  GaussianSeed u_seed, d_seed;
  double rho = 0.5;
  PhaseSpec phi0{};
};

inline ContinuumSetup continuum_setup(const CoinParams& params, Amplitude u0,
                                      Amplitude d0, double w) {
  if (params.phi0.is_zero())
    throw param_error("continuum: phi0 must be nonzero");
  WalkState initial(Lattice::line(2), u0, d0);
  WalkState stepped = step(EngineKind::timedep_coin(), params, initial);
  auto [su, sd] = seed_fields(initial, stepped, w);
  return {su, sd, params.rho, params.phi0};
}

// Parameters of the kernel integral
//   Z(alpha, beta, gamma; s) = Integral dq exp[i alpha q - (i/3) beta q^3
//                                              - (1 + s i gamma) q^2]
// s = sign = +-1 selects the branch.
struct ZParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  int sign = +1;
};

namespace detail {

inline ZParams z_params_trig(double xi_prime, double w, double rho,
                             double phi0, double sin_pt, double cos_pt,
                             int sign) {
  const double sr = std::sqrt(rho);
  ZParams zp;
  zp.alpha = xi_prime / w - (sr / (phi0 * w)) * sin_pt;
  zp.beta = -(sr / (2.0 * phi0 * w * w * w)) * sin_pt;
  zp.gamma = (sr / (2.0 * phi0 * w * w)) * (cos_pt - 1.0);
  zp.sign = sign;
  return zp;
}

}  // namespace detail

inline ZParams z_params(double xi_prime, double tau, double w, double rho,
                        double phi0, int sign = +1) {
  if (w <= 0.0) throw param_error("z_params: width w must be > 0");
  if (phi0 == 0.0) throw param_error("z_params: phi0 must be nonzero");
  if (rho < 0.0 || rho > 1.0)
    throw param_error("z_params: rho must lie in [0, 1]");
  if (sign != 1 && sign != -1)
    throw param_error("z_params: sign must be +1 or -1");
  return detail::z_params_trig(xi_prime, w, rho, phi0, std::sin(phi0 * tau),
                               std::cos(phi0 * tau), sign);
}

// Below this |beta| the closed form is ill-conditioned (|beta|^{-1/3} and the
// Airy argument diverge while the integral tends to a plain Gaussian), so
// evaluation switches to quadrature.
inline constexpr double kZBetaMin = 1e-3;

// Direct numerical evaluation of Z.  The integrand is damped by e^{-q^2}
// (< 1e-18 beyond |q| = 6.5), so the integral is truncated there and done by
// composite Simpson, doubling the grid from 2^12 to at most 2^18 intervals
// until two successive estimates agree to 1e-8 relative (with an absolute
// floor that tolerates underflowing magnitudes).
inline Amplitude z_quadrature(const ZParams& zp) {
  constexpr double kQMax = 6.5;
  constexpr int kStartLevel = 11;  // trapezoid seed; first Simpson uses 2^12
  constexpr int kMaxLevel = 18;
  const std::complex<double> damp(-1.0, -zp.sign * zp.gamma);
  const auto f = [&](double q) {
    const double q2 = q * q;
    return std::exp(std::complex<double>(0.0, zp.alpha * q -
                                                  zp.beta * q2 * q / 3.0) +
                    damp * q2);
  };
  std::int64_t n = std::int64_t{1} << kStartLevel;
  double h = 2.0 * kQMax / static_cast<double>(n);
  Amplitude trap = 0.5 * (f(-kQMax) + f(kQMax));
  for (std::int64_t i = 1; i < n; ++i)
    trap += f(-kQMax + h * static_cast<double>(i));
  trap *= h;
  Amplitude last{}, prev{};
  bool have_prev = false;
  for (int level = kStartLevel + 1; level <= kMaxLevel; ++level) {
    Amplitude mids{};
    for (std::int64_t i = 0; i < n; ++i)
      mids += f(-kQMax + h * (static_cast<double>(i) + 0.5));
    const Amplitude trap2 = 0.5 * trap + 0.5 * h * mids;
    const Amplitude simpson = (4.0 * trap2 - trap) / 3.0;
    trap = trap2;
    n *= 2;
    h *= 0.5;
    if (have_prev) {
      prev = last;
      last = simpson;
      const double scale = std::max(std::abs(simpson), 1e-4);
      if (std::abs(last - prev) <= 1e-8 * scale) return last;
    } else {
      last = simpson;
      have_prev = true;
    }
  }
  throw accuracy_error("z_quadrature: no convergence at the finest grid",
                       last, prev);
}

// Closed form of Z through the Airy function:
//   Z = 2 pi |beta|^{-1/3} Ai(a) e^{b}
//   a = (1 - alpha beta - gamma^2 + s 2 i gamma) / |beta|^{4/3}
//   b = (2 - 3 alpha beta - 6 gamma^2) / (3 beta^2)
//       - s i gamma (3 alpha beta + 2 gamma^2 - 6) / (3 beta^2)
// evaluated as 2 pi |beta|^{-1/3} Ai_scaled(a) e^{b - zeta(a)} so the huge
// e^{b} and the Airy decay e^{-zeta} cancel before exponentiation.
inline Amplitude z_closed(const ZParams& zp) {
  if (std::abs(zp.beta) < kZBetaMin)
    throw domain_error("z_closed: |beta| below cutoff; use z_quadrature");
  const double s = static_cast<double>(zp.sign);
  const double ab = zp.alpha * zp.beta;
  const double g2 = zp.gamma * zp.gamma;
  const double b13 = std::cbrt(std::abs(zp.beta));
  const double b43 = b13 * b13 * b13 * b13;
  const std::complex<double> a((1.0 - ab - g2) / b43,
                               s * 2.0 * zp.gamma / b43);
  const double inv3b2 = 1.0 / (3.0 * zp.beta * zp.beta);
  const std::complex<double> b(
      (2.0 - 3.0 * ab - 6.0 * g2) * inv3b2,
      -s * zp.gamma * (3.0 * ab + 2.0 * g2 - 6.0) * inv3b2);
  const std::complex<double> expo = b - airy_zeta(a);
  if (expo.real() > 700.0)
    throw range_error("z_closed: exponent overflows");
  return 2.0 * M_PI / b13 * airy_ai_scaled(a) * std::exp(expo);
}

// Closed form where it is well-conditioned, quadrature otherwise.
inline Amplitude z_eval(const ZParams& zp) {
  return std::abs(zp.beta) >= kZBetaMin ? z_closed(zp) : z_quadrature(zp);
}

// Uniform evaluation grid xi = xi_min, xi_min + dxi, ..., xi_max.
struct XiGrid {
  double xi_min = -80.5;
  double xi_max = 80.5;
  double dxi = 0.25;

  std::int64_t count() const {
    if (dxi <= 0.0) throw param_error("grid: dxi must be > 0");
    const double steps = (xi_max - xi_min) / dxi;
    const std::int64_t n = std::llround(steps);
    if (n < 0 || std::abs(steps - static_cast<double>(n)) > 1e-9)
      throw param_error("grid: span must be a whole multiple of dxi");
    return n + 1;
  }
  double xi(std::int64_t i) const {
    return xi_min + dxi * static_cast<double>(i);
  }
};

// The propagated fields and density on one time slice.  density is
// renormalized to unit trapezoid integral over the grid.
struct ContinuumSlice {
  std::int64_t tau = 0;
  XiGrid grid{};
  std::vector<Amplitude> Uplus, Uminus, Dplus, Dminus;
  std::vector<Amplitude> u, d;
  std::vector<double> density;
};

namespace detail {

// Component field assembly on the extended-by-one-site grid tables:
//   F+-(xi) = { a0 Z+-(+-xi) +- [a_plus Z+-(+-(xi-1)) + a_minus
//               Z+-(+-(xi+1))] } e^{+-2 i w^2 gamma}
// zp_tab/zm_tab hold Z+(x) and Z-(-x) on the extended grid; `off` is the
// index shift of one lattice unit.
inline void assemble_component(const GaussianSeed& seed,
                               const std::vector<Amplitude>& zp_tab,
                               const std::vector<Amplitude>& zm_tab,
                               std::int64_t count, std::int64_t off,
                               Amplitude ephase, std::vector<Amplitude>& plus,
                               std::vector<Amplitude>& minus) {
  plus.resize(count);
  minus.resize(count);
  for (std::int64_t i = 0; i < count; ++i) {
    const std::int64_t j = i + off;  // extended-grid index of xi_i
    const Amplitude shf_p =
        seed.a_plus * zp_tab[j - off] + seed.a_minus * zp_tab[j + off];
    const Amplitude shf_m =
        seed.a_plus * zm_tab[j - off] + seed.a_minus * zm_tab[j + off];
    plus[i] = (seed.a0 * zp_tab[j] + shf_p) * ephase;
    minus[i] = (seed.a0 * zm_tab[j] - shf_m) * std::conj(ephase);
  }
}

}  // namespace detail

// Propagates the seeds to integer time tau and evaluates the fields and the
// renormalized density on the grid.  The slice phase angle phi0*tau is
// reduced exactly for rational phases, so times that are whole periods
// reproduce the tau = 0 kernel parameters exactly.
inline ContinuumSlice reconstruct(const ContinuumSetup& setup,
                                  std::int64_t tau, const XiGrid& grid) {
  if (tau < 0) throw param_error("reconstruct: tau must be >= 0");
  if (setup.phi0.is_zero())
    throw param_error("reconstruct: phi0 must be nonzero");
  if (setup.u_seed.w != setup.d_seed.w)
    throw param_error("reconstruct: component seed widths differ");
  const double w = setup.u_seed.w;
  if (w <= 0.0) throw param_error("reconstruct: width w must be > 0");
  const std::int64_t count = grid.count();

  const double sin_pt = setup.phi0.sin_angle(tau);
  const double cos_pt = setup.phi0.cos_angle(tau);
  const double phi0 = setup.phi0.value();

  // One lattice unit must be a whole number of grid steps so the shifted
  // seeds land on table entries.
  const double off_steps = 1.0 / grid.dxi;
  const std::int64_t off = std::llround(off_steps);
  if (std::abs(off_steps - static_cast<double>(off)) > 1e-9)
    throw param_error("reconstruct: 1/dxi must be a whole number of steps");

  // Z tables on the grid extended one lattice unit each way:
  // zp[j] = Z+(x_j), zm[j] = Z-(-x_j).
  const std::int64_t ext = count + 2 * off;
  std::vector<Amplitude> zp(ext), zm(ext);
  for (std::int64_t j = 0; j < ext; ++j) {
    const double x = grid.xi(j - off);
    zp[j] = z_eval(detail::z_params_trig(x, w, setup.rho, phi0, sin_pt,
                                         cos_pt, +1));
    zm[j] = z_eval(detail::z_params_trig(-x, w, setup.rho, phi0, sin_pt,
                                         cos_pt, -1));
  }

  const double gamma =
      (std::sqrt(setup.rho) / (2.0 * phi0 * w * w)) * (cos_pt - 1.0);
  const double ang = 2.0 * w * w * gamma;
  const Amplitude ephase(std::cos(ang), std::sin(ang));

  ContinuumSlice slice;
  slice.tau = tau;
  slice.grid = grid;
  detail::assemble_component(setup.u_seed, zp, zm, count, off, ephase,
                             slice.Uplus, slice.Uminus);
  detail::assemble_component(setup.d_seed, zp, zm, count, off, ephase,
                             slice.Dplus, slice.Dminus);

  const double parity = tau % 2 == 0 ? 1.0 : -1.0;
  slice.u.resize(count);
  slice.d.resize(count);
  slice.density.resize(count);
  for (std::int64_t i = 0; i < count; ++i) {
    slice.u[i] = slice.Uplus[i] + parity * slice.Uminus[i];
    slice.d[i] = slice.Dplus[i] + parity * slice.Dminus[i];
    slice.density[i] = std::norm(slice.u[i]) + std::norm(slice.d[i]);
  }

  // Trapezoid renormalization to unit integral.
  double integral = 0.0;
  for (std::int64_t i = 0; i < count; ++i) {
    const double wgt = (i == 0 || i == count - 1) ? 0.5 : 1.0;
    integral += wgt * slice.density[i];
  }
  integral *= grid.dxi;
  if (!(integral > 0.0) || !std::isfinite(integral))
    throw domain_error("reconstruct: density integral not positive");
  for (auto& p : slice.density) p /= integral;
  return slice;
}

// Density moments by the grid's trapezoid rule.
struct ContinuumMoments {
  double mean = 0.0;
  double sigma = 0.0;
  double sigma2 = 0.0;
};

inline ContinuumMoments continuum_moments(const ContinuumSlice& slice) {
  const std::int64_t count = slice.grid.count();
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::int64_t i = 0; i < count; ++i) {
    const double wgt = (i == 0 || i == count - 1) ? 0.5 : 1.0;
    const double x = slice.grid.xi(i);
    const double pw = wgt * slice.density[static_cast<std::size_t>(i)];
    m0 += pw;
    m1 += pw * x;
    m2 += pw * x * x;
  }
  const double mean = m1 / m0;
  const double var = std::max(m2 / m0 - mean * mean, 0.0);
  return {mean, std::sqrt(var), var};
}

inline double continuum_sigma2(const ContinuumSlice& slice) {
  return continuum_moments(slice).sigma2;
}

// L1 distance between an exact site distribution and the slice density read
// at the parity-allowed integer sites inside the grid, with the density
// converted to per-site mass (sites are spaced 2 apart, so each carries
// 2 * density).
inline double l1_discrepancy(const Distribution& exact,
                             const ContinuumSlice& slice) {
  const XiGrid& grid = slice.grid;
  const std::int64_t count = grid.count();
  const std::int64_t n_lo =
      static_cast<std::int64_t>(std::ceil(grid.xi_min - 1e-9));
  const std::int64_t n_hi =
      static_cast<std::int64_t>(std::floor(grid.xi_max + 1e-9));
  double l1 = 0.0;
  for (std::int64_t n = n_lo; n <= n_hi; ++n) {
    if ((n - slice.tau) % 2 != 0) continue;  // parity-forbidden site
    const double steps = (static_cast<double>(n) - grid.xi_min) / grid.dxi;
    const std::int64_t j = std::llround(steps);
    if (j < 0 || j >= count ||
        std::abs(steps - static_cast<double>(j)) > 1e-9)
      throw param_error("l1: integer sites must lie on the grid");
    const std::int64_t k = n - exact.offset;
    const double pn =
        (k >= 0 && k < exact.size()) ? exact.p[static_cast<std::size_t>(k)]
                                     : 0.0;
    l1 += std::abs(pn - 2.0 * slice.density[static_cast<std::size_t>(j)]);
  }
  return l1;
}

}  // namespace qwalk
