#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

#include "errors.hpp"
#include "phase.hpp"

namespace qwalk {

using Amplitude = std::complex<double>;

// How the coin matrix depends on the step index t:
//   Static         C
//   Linear         diag(e^{-i*phi0*t}, e^{+i*phi0*t}) * C
//   InverseLinear  diag(e^{+i*phi0*t}, e^{-i*phi0*t}) * C
enum class Schedule { Static, Linear, InverseLinear };

struct CoinParams {
  double rho = 0.5;
  PhaseSpec phi0 = PhaseSpec::zero();
  Schedule schedule = Schedule::Static;
};

// 2x2 unitary on the {u,d} coin space, rows = output component.
struct UnitaryCoin {
  Amplitude uu, ud;
  Amplitude du, dd;
};

// [[sqrt(rho), sqrt(1-rho)], [sqrt(1-rho), -sqrt(rho)]]; rho=1/2 is the
// balanced coin.
inline UnitaryCoin coin_matrix(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0))
    throw param_error("rho: must lie in [0, 1]");
  double c = std::sqrt(rho);
  double s = std::sqrt(1.0 - rho);
  return {Amplitude(c), Amplitude(s), Amplitude(s), Amplitude(-c)};
}

// Coin for the step producing the state at time t (t >= 1).
inline UnitaryCoin time_coin(const CoinParams& params, std::int64_t t) {
  if (t < 1) throw param_error("time_coin: t must be >= 1");
  UnitaryCoin c = coin_matrix(params.rho);
  if (params.schedule == Schedule::Static) return c;
  Amplitude up = params.phi0.phase_factor(-t);  // e^{-i*phi0*t}
  Amplitude dn = params.phi0.phase_factor(t);   // e^{+i*phi0*t}
  if (params.schedule == Schedule::InverseLinear) std::swap(up, dn);
  return {up * c.uu, up * c.ud, dn * c.du, dn * c.dd};
}

}  // namespace qwalk
