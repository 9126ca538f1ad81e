#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "engine.hpp"
#include "errors.hpp"
#include "state.hpp"

namespace qwalk {

// Per-site probabilities over a contiguous site range [offset, offset+size-1]
// at time t, with the component split: p[i] = pu[i] + pd[i].
struct Distribution {
  std::int64_t t = 0;
  std::int64_t offset = 0;
  std::vector<double> p, pu, pd;

  std::int64_t size() const { return static_cast<std::int64_t>(p.size()); }
  std::int64_t site(std::int64_t i) const { return offset + i; }
};

inline Distribution distribution(const WalkState& state) {
  Distribution d;
  d.t = state.t();
  d.offset = state.lo();
  const std::int64_t n = state.hi() - state.lo() + 1;
  d.p.reserve(n);
  d.pu.reserve(n);
  d.pd.reserve(n);
  for (std::int64_t k = state.lo(); k <= state.hi(); ++k) {
    const double pu = std::norm(state.u(k));
    const double pd = std::norm(state.d(k));
    d.pu.push_back(pu);
    d.pd.push_back(pd);
    d.p.push_back(pu + pd);
  }
  return d;
}

// First two moments of a site distribution, in lattice units.
struct MomentStats {
  std::int64_t t = 0;
  double mean = 0.0;
  double sigma = 0.0;
  double sigma2 = 0.0;
};

inline MomentStats moments(const Distribution& dist) {
  double m1 = 0.0, m2 = 0.0;
  for (std::int64_t i = 0; i < dist.size(); ++i) {
    const double n = static_cast<double>(dist.site(i));
    m1 += n * dist.p[i];
    m2 += n * n * dist.p[i];
  }
  const double var = std::max(m2 - m1 * m1, 0.0);
  return {dist.t, m1, std::sqrt(var), var};
}

inline MomentStats moments(const WalkState& state) {
  double m1 = 0.0, m2 = 0.0;
  for (std::int64_t n = state.lo(); n <= state.hi(); ++n) {
    const double p = state.prob(n);
    m1 += static_cast<double>(n) * p;
    m2 += static_cast<double>(n) * static_cast<double>(n) * p;
  }
  const double var = std::max(m2 - m1 * m1, 0.0);
  return {state.t(), m1, std::sqrt(var), var};
}

// One stats-series row: moments plus the origin occupation and the norm.
struct StatsRow {
  std::int64_t t = 0;
  double mean = 0.0;
  double sigma = 0.0;
  double sigma2 = 0.0;
  double p0 = 0.0;
  double total_prob = 0.0;
};

inline StatsRow stats_row(const WalkState& state) {
  const MomentStats m = moments(state);
  return {m.t, m.mean, m.sigma, m.sigma2, state.prob(0), state.total_norm()};
}

// [P0(T), P0(2T), ..., P0(MT)] read off a trajectory recorded at multiples
// of T.
inline std::vector<double> return_probability(const Trajectory& traj,
                                              std::int64_t T, std::int64_t M) {
  if (T < 1) throw param_error("return_probability: T must be >= 1");
  if (M < 0) throw param_error("return_probability: M must be >= 0");
  if (traj.stride < 1 || T % traj.stride != 0)
    throw param_error(
        "return_probability: T must be a multiple of the recording stride");
  if (traj.states.empty() || traj.states.back().t() < T * M)
    throw param_error("return_probability: trajectory shorter than T*M");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(M));
  for (std::int64_t m = 1; m <= M; ++m)
    out.push_back(
        traj.states[static_cast<std::size_t>(m * T / traj.stride)].prob(0));
  return out;
}

namespace detail {

// Topographic prominence of a strict local maximum at i, inside the window:
// walk outward on each side while values stay <= s[i], take the minimum seen,
// and measure the drop to the higher of the two side minima.
inline double prominence(const std::vector<double>& s, std::int64_t t0,
                         std::int64_t t1, std::int64_t i) {
  double lmin = s[static_cast<std::size_t>(i)];
  for (std::int64_t j = i - 1; j >= t0; --j) {
    const double v = s[static_cast<std::size_t>(j)];
    if (v > s[static_cast<std::size_t>(i)]) break;
    lmin = std::min(lmin, v);
  }
  double rmin = s[static_cast<std::size_t>(i)];
  for (std::int64_t j = i + 1; j <= t1; ++j) {
    const double v = s[static_cast<std::size_t>(j)];
    if (v > s[static_cast<std::size_t>(i)]) break;
    rmin = std::min(rmin, v);
  }
  return s[static_cast<std::size_t>(i)] - std::max(lmin, rmin);
}

}  // namespace detail

// Times (series indices) of the peaks of a per-step series inside [t0, t1]:
// strict local maxima whose prominence exceeds 2% of the window's range.
inline std::vector<std::int64_t> sigma_peak_times(
    const std::vector<double>& series, std::int64_t t0, std::int64_t t1) {
  if (t0 < 0 || t1 >= static_cast<std::int64_t>(series.size()) || t0 > t1)
    throw param_error("peaks: window empty or outside the series");
  const auto [mn, mx] =
      std::minmax_element(series.begin() + t0, series.begin() + t1 + 1);
  const double threshold = 0.02 * (*mx - *mn);
  std::vector<std::int64_t> times;
  for (std::int64_t i = t0 + 1; i < t1; ++i) {
    const double v = series[static_cast<std::size_t>(i)];
    if (v > series[static_cast<std::size_t>(i - 1)] &&
        v > series[static_cast<std::size_t>(i + 1)] &&
        detail::prominence(series, t0, t1, i) > threshold)
      times.push_back(i);
  }
  return times;
}

inline std::int64_t count_sigma_peaks(const std::vector<double>& series,
                                      std::int64_t t0, std::int64_t t1) {
  return static_cast<std::int64_t>(sigma_peak_times(series, t0, t1).size());
}

// Recurrence diagnostics of one rational-phase run: the approximate period p,
// the numerator q (= expected peak count per period), the measured peaks, and
// the origin-return probabilities at multiples of p.
struct QuasiperiodReport {
  std::int64_t p = 0;
  std::int64_t q = 0;
  std::vector<std::int64_t> peak_times;
  std::int64_t peak_count = 0;
  std::vector<double> return_probs;
};

// Reduced rational phase in the even-denominator form.  Fractions q/p (of a
// full turn) map to an equivalent representative in [0, 1/2) first; an odd
// reduced denominator then maps through (2q-p)/(2p).  The flag records
// whether the representative differs from the input, i.e. agreement of the
// two walks relies on the phase-negation symmetry.
struct CanonicalPhase {
  std::int64_t q = 0;
  std::int64_t p = 1;
  bool symmetry_equivalent = false;
};

inline CanonicalPhase canonical_phase(std::int64_t q, std::int64_t p) {
  if (p < 1) throw param_error("canonical_phase: denominator must be >= 1");
  if (std::gcd(q < 0 ? -q : q, p) != 1)
    throw param_error("canonical_phase: fraction must be in lowest terms");
  auto reduce = [](std::int64_t num, std::int64_t den) {
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    return std::pair<std::int64_t, std::int64_t>{num / g, den / g};
  };
  // Value modulo 1/2: ((2q mod p) / p) / 2, brought into [0, 1/2).
  const std::int64_t N = (((2 * q) % p) + p) % p;
  auto [q2, p2] = reduce(N, 2 * p);
  CanonicalPhase out;
  if (q2 == 0) {
    out.q = 0;
    out.p = 1;
  } else if (p2 % 2 == 0) {
    out.q = q2;
    out.p = p2;
  } else {
    auto [q3, p3] = reduce(2 * q2 - p2, 2 * p2);
    out.q = q3;
    out.p = p3;
  }
  out.symmetry_equivalent = out.q != q || out.p != p;
  return out;
}

}  // namespace qwalk
