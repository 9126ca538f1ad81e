#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

#include "errors.hpp"

namespace qwalk {

// zeta(z) = (2/3) z^{3/2} (principal branch), the exponent scale of Ai.
// Exposed so callers combining Ai with their own exponentials can cancel
// against exactly the same value airy_ai_scaled used.
inline std::complex<double> airy_zeta(std::complex<double> z) {
  return (2.0 / 3.0) * std::pow(z, 1.5);
}

namespace detail {

// --- double-double helpers (Dekker/Knuth), enough for the Maclaurin sums ---
struct dd {
  double hi = 0.0, lo = 0.0;
};

inline dd quick_two_sum(double a, double b) {
  double s = a + b;
  return {s, b - (s - a)};
}
inline dd two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}
inline dd two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}
inline dd dd_add(dd x, dd y) {
  dd s = two_sum(x.hi, y.hi);
  return quick_two_sum(s.hi, s.lo + x.lo + y.lo);
}
inline dd dd_sub(dd x, dd y) { return dd_add(x, {-y.hi, -y.lo}); }
inline dd dd_mul(dd x, dd y) {
  dd p = two_prod(x.hi, y.hi);
  return quick_two_sum(p.hi, p.lo + (x.hi * y.lo + x.lo * y.hi));
}
inline dd dd_div(dd x, double c) {
  double q0 = x.hi / c;
  dd r = dd_sub(x, two_prod(q0, c));
  return quick_two_sum(q0, (r.hi + r.lo) / c);
}

struct cdd {
  dd re, im;
};

inline cdd cdd_from(std::complex<double> z) {
  return {{z.real(), 0.0}, {z.imag(), 0.0}};
}
inline cdd cdd_add(cdd a, cdd b) {
  return {dd_add(a.re, b.re), dd_add(a.im, b.im)};
}
inline cdd cdd_mul(cdd a, cdd b) {
  return {dd_sub(dd_mul(a.re, b.re), dd_mul(a.im, b.im)),
          dd_add(dd_mul(a.re, b.im), dd_mul(a.im, b.re))};
}
inline cdd cdd_div(cdd a, double c) {
  return {dd_div(a.re, c), dd_div(a.im, c)};
}
inline double cdd_mag(cdd a) { return std::abs(a.re.hi) + std::abs(a.im.hi); }

// Ai(z) = c1 f(z) - c2 g(z) from the two power-series solutions; summed in
// double-double because near |z| = 9 the partial sums exceed the result by
// up to ~3e16, which plain doubles cannot absorb.
//   c1 = Ai(0) = 3^{-2/3} / Gamma(2/3),  c2 = -Ai'(0) = 3^{-1/3} / Gamma(1/3)
inline std::complex<double> airy_maclaurin(std::complex<double> z) {
  constexpr dd c1{0.35502805388781722, 2.0523363243621199e-17};
  constexpr dd c2{0.25881940379280682, -2.5222431116108321e-17};
  const cdd zc = cdd_from(z);
  const cdd z3 = cdd_mul(cdd_mul(zc, zc), zc);

  // f: t_{k+1} = t_k z^3 / ((3k+2)(3k+3)), t_0 = 1
  // g: t_{k+1} = t_k z^3 / ((3k+3)(3k+4)), t_0 = z
  cdd tf{{1.0, 0.0}, {0.0, 0.0}};
  cdd tg = zc;
  cdd f = tf, g = tg;
  double peak = 1.0;
  for (int k = 0; k < 300; ++k) {
    const double dk = static_cast<double>(k);
    tf = cdd_div(cdd_mul(tf, z3), (3.0 * dk + 2.0) * (3.0 * dk + 3.0));
    tg = cdd_div(cdd_mul(tg, z3), (3.0 * dk + 3.0) * (3.0 * dk + 4.0));
    f = cdd_add(f, tf);
    g = cdd_add(g, tg);
    const double mag = cdd_mag(tf) + cdd_mag(tg);
    peak = std::max(peak, mag);
    if (mag < 1e-35 * peak) break;
  }
  const dd re = dd_sub(dd_mul(c1, f.re), dd_mul(c2, g.re));
  const dd im = dd_sub(dd_mul(c1, f.im), dd_mul(c2, g.im));
  return {re.hi + re.lo, im.hi + im.lo};
}

// e^{zeta} Ai(z) for |arg z| <= 2*pi/3 via the Poincare expansion
//   Ai(z) ~ e^{-zeta} / (2 sqrt(pi) z^{1/4}) * sum_k (-1)^k u_k zeta^{-k},
// truncated at the smallest term.
inline std::complex<double> airy_asym_scaled(std::complex<double> z) {
  constexpr double kInvTwoSqrtPi = 0.28209479177387814;
  const std::complex<double> zeta = airy_zeta(z);
  std::complex<double> term(1.0, 0.0);
  std::complex<double> sum = term;
  double prev_mag = 1.0;
  for (int k = 1; k <= 60; ++k) {
    const double dk = static_cast<double>(k);
    const double uk = (6.0 * dk - 5.0) * (6.0 * dk - 3.0) * (6.0 * dk - 1.0) /
                      (216.0 * dk * (2.0 * dk - 1.0));
    term *= -uk / zeta;
    const double mag = std::abs(term);
    if (mag >= prev_mag) break;  // asymptotic tail starts growing
    sum += term;
    prev_mag = mag;
    if (mag < 1e-18 * std::abs(sum)) break;
  }
  return sum * kInvTwoSqrtPi / std::pow(z, 0.25);
}

inline constexpr double kAirySeriesRadius = 9.0;

}  // namespace detail

// e^{zeta(z)} Ai(z), which stays representable along the whole
// anti-Stokes-to-oscillatory range where plain Ai over/underflows.
inline std::complex<double> airy_ai_scaled(std::complex<double> z) {
  if (std::signbit(z.imag()))
    return std::conj(airy_ai_scaled(std::conj(z)));
  if (std::abs(z) <= detail::kAirySeriesRadius)
    return detail::airy_maclaurin(z) * std::exp(airy_zeta(z));
  const double theta = std::arg(z);
  if (theta <= 2.0 * M_PI / 3.0) return detail::airy_asym_scaled(z);
  // Left wedge: Ai(z) = -w Ai(w z) - w^2 Ai(w^2 z) with w = e^{2 pi i / 3}
  // rotates both arguments into the direct sector.  In scaled form, using
  // zeta(w z) = zeta(z) and zeta(w^2 z) = -zeta(z) (valid for
  // arg z in (2pi/3, pi]):
  //   As(z) = -w As(w z) - w^2 As(w^2 z) e^{2 zeta(z)},  Re zeta <= 0 here.
  const std::complex<double> w1(-0.5, std::sqrt(3.0) / 2.0);
  const std::complex<double> w2 = std::conj(w1);
  return -w1 * detail::airy_asym_scaled(w1 * z) -
         w2 * detail::airy_asym_scaled(w2 * z) *
             std::exp(2.0 * airy_zeta(z));
}

// Ai(z) on the whole complex plane.  Throws range_error where the result
// overflows a double (use airy_ai_scaled there instead).
inline std::complex<double> airy_ai(std::complex<double> z) {
  if (std::signbit(z.imag())) return std::conj(airy_ai(std::conj(z)));
  if (std::abs(z) <= detail::kAirySeriesRadius)
    return detail::airy_maclaurin(z);
  const std::complex<double> zeta = airy_zeta(z);
  if (-zeta.real() > 705.0)
    throw range_error("airy: |Ai(z)| overflows; use airy_ai_scaled");
  return airy_ai_scaled(z) * std::exp(-zeta);
}

}  // namespace qwalk
