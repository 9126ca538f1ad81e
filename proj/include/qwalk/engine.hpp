#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "coin.hpp"
#include "decoupled.hpp"
#include "errors.hpp"
#include "lattice.hpp"
#include "phase.hpp"
#include "state.hpp"

namespace qwalk {

// Evolution families.  One step produces the state at time t from t-1:
//   Standard     shift . coin
//   TimeDepCoin  shift . (linear-schedule coin at index t)
//   Gqw          shift . coin . site-phase e^{i*phi0*n^s}
//   Control      shift . (inverse-linear coin at t) . site-phase e^{i*phi0*n}
//   Decoupled    the second-order recurrence of decoupled_step, seeded from
//                one coupled linear-schedule step
struct EngineKind {
  enum class Family { Standard, TimeDepCoin, Gqw, Control, Decoupled };

  Family family = Family::Standard;
  int s = 1;  // Gqw site-phase exponent; the other families ignore it

  static EngineKind standard() { return {Family::Standard, 1}; }
  static EngineKind timedep_coin() { return {Family::TimeDepCoin, 1}; }
  static EngineKind gqw(int s = 1) {
    if (s != 1 && s != 2)
      throw param_error("engine: site-phase exponent must be 1 or 2");
    return {Family::Gqw, s};
  }
  static EngineKind control() { return {Family::Control, 1}; }
  static EngineKind decoupled() { return {Family::Decoupled, 1}; }

  friend bool operator==(const EngineKind&, const EngineKind&) = default;
};

inline std::string engine_name(const EngineKind& e) {
  switch (e.family) {
    case EngineKind::Family::Standard:
      return "standard";
    case EngineKind::Family::TimeDepCoin:
      return "timedep";
    case EngineKind::Family::Gqw:
      return e.s == 2 ? "gqw2" : "gqw";
    case EngineKind::Family::Control:
      return "control";
    case EngineKind::Family::Decoupled:
      return "decoupled";
  }
  return {};
}

inline EngineKind parse_engine(const std::string& name) {
  if (name == "standard") return EngineKind::standard();
  if (name == "timedep") return EngineKind::timedep_coin();
  if (name == "gqw") return EngineKind::gqw(1);
  if (name == "gqw2") return EngineKind::gqw(2);
  if (name == "control") return EngineKind::control();
  if (name == "decoupled") return EngineKind::decoupled();
  throw usage_error("engine: unknown engine '" + name +
                    "' (standard|timedep|gqw|gqw2|control|decoupled)");
}

namespace detail {

inline std::int64_t pow_s(std::int64_t n, int s) { return s == 2 ? n * n : n; }

// e^{i*phi0*n^s} evaluator; caches the p-th roots of unity for small rational
// denominators so the hot loop avoids per-site trigonometry.  Table entries
// come from the same unit_root used by phase_factor, so both paths agree
// bit for bit.
class SitePhase {
 public:
  SitePhase(const PhaseSpec& phi0, int s) : phi0_(phi0), s_(s) {
    if (phi0.is_rational() && phi0.p() <= 65536) {
      table_.reserve(static_cast<std::size_t>(phi0.p()));
      for (std::int64_t r = 0; r < phi0.p(); ++r)
        table_.push_back(phi0.unit_root(r));
    }
  }

  Amplitude operator()(std::int64_t n) const {
    std::int64_t k = pow_s(n, s_);
    if (!table_.empty())
      return table_[static_cast<std::size_t>(phi0_.residue(k))];
    return phi0_.phase_factor(k);
  }

 private:
  PhaseSpec phi0_;
  int s_;
  std::vector<Amplitude> table_;
};

// One step of a coupled engine, ping-ponging through the scratch buffers.
// Scratch must be lattice-sized; its contents are irrelevant (the target
// window is cleaned before writing, everything else stays masked by the
// state's window).
inline void step_inplace(const EngineKind& engine, const CoinParams& params,
                         WalkState& st, std::vector<Amplitude>& su,
                         std::vector<Amplitude>& sd) {
  const Lattice& lat = st.lattice();
  const std::int64_t t = st.t() + 1;

  UnitaryCoin c{};
  switch (engine.family) {
    case EngineKind::Family::Standard:
    case EngineKind::Family::Gqw:
      c = coin_matrix(params.rho);
      break;
    case EngineKind::Family::TimeDepCoin:
      c = time_coin({params.rho, params.phi0, Schedule::Linear}, t);
      break;
    case EngineKind::Family::Control:
      c = time_coin({params.rho, params.phi0, Schedule::InverseLinear}, t);
      break;
    case EngineKind::Family::Decoupled:
      throw param_error("step: decoupled engine evolves via decoupled_step");
  }

  const bool has_site_phase = engine.family == EngineKind::Family::Gqw ||
                              engine.family == EngineKind::Family::Control;
  const int s = engine.family == EngineKind::Family::Control ? 1 : engine.s;
  if (s != 1 && s != 2)
    throw param_error("engine: site-phase exponent must be 1 or 2");
  std::optional<SitePhase> site_phase;
  if (has_site_phase) site_phase.emplace(params.phi0, s);

  const Amplitude zero(0.0);
  if (lat.kind() == LatticeKind::Line) {
    const std::int64_t half = lat.half();
    if ((st.hi() == half && (st.u(half) != zero || st.d(half) != zero)) ||
        (st.lo() == -half && (st.u(-half) != zero || st.d(-half) != zero)))
      throw extent_error(
          "step: amplitude reached the line boundary; allocate a larger "
          "extent");
    const std::int64_t lo2 = std::max(st.lo() - 1, -half);
    const std::int64_t hi2 = std::min(st.hi() + 1, half);
    for (std::int64_t i = lat.index(lo2); i <= lat.index(hi2); ++i) {
      su[i] = zero;
      sd[i] = zero;
    }
    const auto& u = st.raw_u();
    const auto& d = st.raw_d();
    for (std::int64_t n = st.lo(); n <= st.hi(); ++n) {
      const auto i = lat.index(n);
      Amplitude au = u[i], ad = d[i];
      if (has_site_phase) {
        const Amplitude f = (*site_phase)(n);
        au *= f;
        ad *= f;
      }
      // The skipped edge writes are exact zeros (the boundary check above).
      if (n + 1 <= half) su[i + 1] = c.uu * au + c.ud * ad;
      if (n - 1 >= -half) sd[i - 1] = c.du * au + c.dd * ad;
    }
    st.raw_u().swap(su);
    st.raw_d().swap(sd);
    st.set_window(lo2, hi2);
    st.shrink_window();
  } else {
    const std::int64_t N = lat.size();
    const auto& u = st.raw_u();
    const auto& d = st.raw_d();
    for (std::int64_t i = 0; i < N; ++i) {
      Amplitude au = u[i], ad = d[i];
      if (has_site_phase) {
        const Amplitude f = (*site_phase)(lat.site(i));
        au *= f;
        ad *= f;
      }
      su[(i + 1) % N] = c.uu * au + c.ud * ad;
      sd[(i + N - 1) % N] = c.du * au + c.dd * ad;
    }
    st.raw_u().swap(su);
    st.raw_d().swap(sd);
    st.set_window(-lat.half(), lat.half());
  }

  st.set_time(t);
  if (engine.family == EngineKind::Family::Gqw)
    st.set_gauge(Gauge::Wojcik);
  else
    st.set_gauge(Gauge::Plain);
}

}  // namespace detail

// Conditional displacement: u moves one site right, d one site left; wraps on
// a circle.  Time and gauge are untouched; norm is preserved exactly.
inline WalkState shift(const WalkState& state) {
  const Lattice& lat = state.lattice();
  WalkState out = state;
  std::vector<Amplitude> nu(lat.size(), Amplitude(0.0));
  std::vector<Amplitude> nd(lat.size(), Amplitude(0.0));
  const Amplitude zero(0.0);
  if (lat.kind() == LatticeKind::Line) {
    const std::int64_t half = lat.half();
    if ((state.hi() == half &&
         (state.u(half) != zero || state.d(half) != zero)) ||
        (state.lo() == -half &&
         (state.u(-half) != zero || state.d(-half) != zero)))
      throw extent_error(
          "shift: amplitude reached the line boundary; allocate a larger "
          "extent");
    for (std::int64_t n = state.lo(); n <= state.hi(); ++n) {
      if (n + 1 <= half) nu[lat.index(n + 1)] = state.u(n);
      if (n - 1 >= -half) nd[lat.index(n - 1)] = state.d(n);
    }
    out.raw_u() = std::move(nu);
    out.raw_d() = std::move(nd);
    out.set_window(std::max(state.lo() - 1, -half),
                   std::min(state.hi() + 1, half));
    out.shrink_window();
  } else {
    const std::int64_t N = lat.size();
    for (std::int64_t i = 0; i < N; ++i) {
      nu[(i + 1) % N] = state.raw_u()[i];
      nd[(i + N - 1) % N] = state.raw_d()[i];
    }
    out.raw_u() = std::move(nu);
    out.raw_d() = std::move(nd);
    out.set_window(-lat.half(), lat.half());
  }
  return out;
}

// Multiplies both components at site n by e^{i*phi0*n^s}; per-site
// probability and norm are exactly unchanged.
inline WalkState position_phase(const WalkState& state, const PhaseSpec& phi0,
                                int s = 1) {
  if (s != 1 && s != 2)
    throw param_error("position_phase: exponent must be 1 or 2");
  detail::SitePhase site_phase(phi0, s);
  WalkState out = state;
  auto& u = out.raw_u();
  auto& d = out.raw_d();
  for (std::int64_t n = state.lo(); n <= state.hi(); ++n) {
    const Amplitude f = site_phase(n);
    const auto i = state.lattice().index(n);
    u[i] *= f;
    d[i] *= f;
  }
  return out;
}

inline WalkState position_phase(const WalkState& state, double phi0,
                                int s = 1) {
  return position_phase(state, PhaseSpec::real(phi0), s);
}

// One step (state at t-1 -> state at t) of any coupled engine.
inline WalkState step(const EngineKind& engine, const CoinParams& params,
                      const WalkState& state) {
  WalkState out = state;
  std::vector<Amplitude> su(state.lattice().size(), Amplitude(0.0));
  std::vector<Amplitude> sd(state.lattice().size(), Amplitude(0.0));
  detail::step_inplace(engine, params, out, su, sd);
  return out;
}

// A run's recorded states, one every `stride` steps (t = 0, stride, ...,
// steps).
struct Trajectory {
  EngineKind engine{};
  CoinParams params{};
  std::int64_t stride = 1;
  std::vector<WalkState> states;
};

namespace detail {

inline std::vector<Amplitude> dense_u(const WalkState& s) {
  std::vector<Amplitude> v(s.lattice().size(), Amplitude(0.0));
  for (std::int64_t n = s.lo(); n <= s.hi(); ++n)
    v[s.lattice().index(n)] = s.u(n);
  return v;
}

inline std::vector<Amplitude> dense_d(const WalkState& s) {
  std::vector<Amplitude> v(s.lattice().size(), Amplitude(0.0));
  for (std::int64_t n = s.lo(); n <= s.hi(); ++n)
    v[s.lattice().index(n)] = s.d(n);
  return v;
}

inline void run_decoupled(
    const CoinParams& params, const WalkState& initial, std::int64_t steps,
    std::int64_t stride,
    const std::function<void(const WalkState&)>& observe) {
  if (initial.lattice().kind() != LatticeKind::Line)
    throw param_error("run: decoupled engine is line-only");
  observe(initial);
  if (steps == 0) return;
  // Second-order recurrence: the slice at t=1 comes from one coupled step.
  WalkState seed = step(EngineKind::timedep_coin(), params, initial);
  if (1 % stride == 0) observe(seed);
  std::vector<Amplitude> u_prev = dense_u(initial), u_cur = dense_u(seed);
  std::vector<Amplitude> d_prev = dense_d(initial), d_cur = dense_d(seed);
  const Lattice& lat = initial.lattice();
  for (std::int64_t T = 2; T <= steps; ++T) {
    auto u_next = decoupled_step(u_prev, u_cur, T - 1, params, Component::U);
    auto d_next = decoupled_step(d_prev, d_cur, T - 1, params, Component::D);
    u_prev = std::move(u_cur);
    u_cur = std::move(u_next);
    d_prev = std::move(d_cur);
    d_cur = std::move(d_next);
    if (T % stride == 0)
      observe(WalkState::from_slices(lat, T, u_cur, d_cur, Gauge::Plain));
  }
}

}  // namespace detail

// Streams the recorded states (t = 0, stride, ..., steps) to `observe`.
inline void run(const EngineKind& engine, const CoinParams& params,
                const WalkState& initial, std::int64_t steps,
                std::int64_t stride,
                const std::function<void(const WalkState&)>& observe) {
  if (steps < 0) throw param_error("run: steps must be >= 0");
  if (stride < 1) throw param_error("run: stride must be >= 1");
  if (steps % stride != 0) throw param_error("run: stride must divide steps");
  if (std::abs(initial.total_norm() - 1.0) > 1e-12)
    throw param_error("run: initial state not normalized");
  if (initial.lattice().kind() == LatticeKind::Line &&
      initial.lattice().half() < initial.t() + steps)
    throw param_error("run: line extent smaller than the planned steps");
  if (engine.family == EngineKind::Family::Decoupled) {
    detail::run_decoupled(params, initial, steps, stride, observe);
    return;
  }
  WalkState st = initial;
  observe(st);
  std::vector<Amplitude> su(st.lattice().size(), Amplitude(0.0));
  std::vector<Amplitude> sd(st.lattice().size(), Amplitude(0.0));
  for (std::int64_t t = 1; t <= steps; ++t) {
    detail::step_inplace(engine, params, st, su, sd);
    if (t % stride == 0) observe(st);
  }
}

inline Trajectory run(const EngineKind& engine, const CoinParams& params,
                      const WalkState& initial, std::int64_t steps,
                      std::int64_t stride = 1) {
  Trajectory traj{engine, params, stride, {}};
  run(engine, params, initial, steps, stride,
      [&traj](const WalkState& s) { traj.states.push_back(s); });
  return traj;
}

}  // namespace qwalk
