#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "coin.hpp"
#include "errors.hpp"

namespace qwalk {

enum class Component { U, D };

// Second-order single-component recurrence equivalent to the coupled
// linear-schedule walk:
//   a_n(t+1) = e^{-i*phi0*sgn} * { a_n(t-1)
//              + sqrt(rho) * [ a_{n-1}(t) e^{-i*t*phi0}
//                            - a_{n+1}(t) e^{+i*t*phi0} ] }
// with sgn = +1 for the u component and -1 for d.  `prev` and `cur` are the
// slices at t-1 and t on a common site indexing; the result is the slice at
// t+1.  Off-array neighbors are treated as zero, so the caller must size the
// slices to cover the support through t+1.
inline std::vector<Amplitude> decoupled_step(
    const std::vector<Amplitude>& prev, const std::vector<Amplitude>& cur,
    std::int64_t t, const CoinParams& params, Component component) {
  if (prev.size() != cur.size())
    throw param_error("decoupled_step: slice lengths differ");
  if (t < 1) throw param_error("decoupled_step: t must be >= 1");
  const std::int64_t sgn = component == Component::U ? +1 : -1;
  const Amplitude pre = params.phi0.phase_factor(-sgn);   // e^{-i*phi0*sgn}
  const Amplitude fwd = params.phi0.phase_factor(-t);     // e^{-i*t*phi0}
  const Amplitude bwd = params.phi0.phase_factor(t);      // e^{+i*t*phi0}
  const double sr = std::sqrt(params.rho);
  const std::int64_t n = static_cast<std::int64_t>(cur.size());
  std::vector<Amplitude> next(cur.size());
  for (std::int64_t i = 0; i < n; ++i) {
    Amplitude left = i > 0 ? cur[i - 1] : Amplitude(0.0);
    Amplitude right = i + 1 < n ? cur[i + 1] : Amplitude(0.0);
    next[i] = pre * (prev[i] + sr * (left * fwd - right * bwd));
  }
  return next;
}

}  // namespace qwalk
