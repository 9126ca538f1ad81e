#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "coin.hpp"
#include "errors.hpp"
#include "lattice.hpp"
#include "phase.hpp"

namespace qwalk {

// Which description the amplitudes live in.  The two are connected site by
// site through gauge_transform; probabilities agree on a line, amplitudes do
// not.  Plain is the time-dependent-coin description, Wojcik the
// position-phase one.
enum class Gauge { Plain, Wojcik };

// Two complex amplitude sequences (u, d) over a lattice at integer time t.
// Invariants: total norm 1 (checked at construction, preserved by unitary
// steps); on a Line, amplitudes outside |n| <= t are exactly zero.  The
// active window [lo, hi] bounds the possibly-nonzero sites so that long runs
// on a wide line skip the zero tail; everything outside it is exact 0.
class WalkState {
 public:
  // Product initial state delta_{n,0} (x) (u0, d0).
  WalkState(const Lattice& lattice, Amplitude u0, Amplitude d0,
            Gauge gauge = Gauge::Plain)
      : lattice_(lattice),
        u_(lattice.size(), Amplitude(0.0)),
        d_(lattice.size(), Amplitude(0.0)),
        gauge_(gauge) {
    double n2 = std::norm(u0) + std::norm(d0);
    if (std::abs(n2 - 1.0) > 1e-12)
      throw param_error("initial: |u0|^2 + |d0|^2 must be 1 within 1e-12");
    u_[lattice.index(0)] = u0;
    d_[lattice.index(0)] = d0;
  }

  // The u0 = 1/sqrt(2), d0 = i/sqrt(2) initial condition that keeps the
  // balanced walk left-right symmetric.
  static WalkState symmetric(const Lattice& lattice) {
    return WalkState(lattice, Amplitude(1.0 / std::sqrt(2.0), 0.0),
                     Amplitude(0.0, 1.0 / std::sqrt(2.0)));
  }

  // Assembles a state from full lattice-sized component slices (engine
  // plumbing; no normalization check).  The window spans the whole lattice
  // and is then tightened.
  static WalkState from_slices(const Lattice& lattice, std::int64_t t,
                               std::vector<Amplitude> u,
                               std::vector<Amplitude> d, Gauge gauge) {
    if (u.size() != static_cast<std::size_t>(lattice.size()) ||
        d.size() != u.size())
      throw param_error("state: slices must match the lattice size");
    WalkState out(lattice, Amplitude(1.0, 0.0), Amplitude(0.0, 0.0), gauge);
    out.u_ = std::move(u);
    out.d_ = std::move(d);
    out.t_ = t;
    out.lo_ = -lattice.half();
    out.hi_ = lattice.half();
    out.shrink_window();
    return out;
  }

  const Lattice& lattice() const { return lattice_; }
  std::int64_t t() const { return t_; }
  Gauge gauge() const { return gauge_; }

  // Sites outside the active window read as exact zero; the backing arrays
  // may hold stale values there (the stepping code ping-pongs buffers and
  // only cleans the window it writes).
  Amplitude u(std::int64_t n) const {
    return in_window(n) ? u_[lattice_.index(n)] : Amplitude(0.0);
  }
  Amplitude d(std::int64_t n) const {
    return in_window(n) ? d_[lattice_.index(n)] : Amplitude(0.0);
  }
  double prob(std::int64_t n) const {
    if (!in_window(n)) return 0.0;
    auto i = lattice_.index(n);
    return std::norm(u_[i]) + std::norm(d_[i]);
  }

  double total_norm() const {
    double s = 0.0;
    for (std::int64_t n = lo_; n <= hi_; ++n) s += prob(n);
    return s;
  }

  // Active window, inclusive site bounds.
  std::int64_t lo() const { return lo_; }
  std::int64_t hi() const { return hi_; }

  // --- engine plumbing; callers outside the stepping code should not need
  // these ---
  std::vector<Amplitude>& raw_u() { return u_; }
  std::vector<Amplitude>& raw_d() { return d_; }
  const std::vector<Amplitude>& raw_u() const { return u_; }
  const std::vector<Amplitude>& raw_d() const { return d_; }
  void set_time(std::int64_t t) { t_ = t; }
  void set_gauge(Gauge g) { gauge_ = g; }
  void set_window(std::int64_t lo, std::int64_t hi) {
    lo_ = lo;
    hi_ = hi;
  }
  // Edge amplitudes below this floor cannot move any observable: their
  // squared modulus underflows to exact zero, and unitarity bounds their
  // total future influence by the trimmed norm (< 1e-290 even over 1e6
  // steps).  Trimming them keeps localized walks out of denormal-speed
  // arithmetic and caps the window radius where the tail hits the floor.
  static constexpr double kEdgeFloor = 1e-300;

  // Drop negligible edges so the window stays tight once tails underflow.
  void shrink_window() {
    const auto negligible = [this](std::int64_t n) {
      const auto i = static_cast<std::size_t>(lattice_.index(n));
      return std::abs(u_[i].real()) < kEdgeFloor &&
             std::abs(u_[i].imag()) < kEdgeFloor &&
             std::abs(d_[i].real()) < kEdgeFloor &&
             std::abs(d_[i].imag()) < kEdgeFloor;
    };
    while (lo_ < hi_ && negligible(lo_)) ++lo_;
    while (hi_ > lo_ && negligible(hi_)) --hi_;
  }

 private:
  bool in_window(std::int64_t n) const { return n >= lo_ && n <= hi_; }

  Lattice lattice_;
  std::int64_t t_ = 0;
  std::vector<Amplitude> u_, d_;
  Gauge gauge_ = Gauge::Plain;
  std::int64_t lo_ = 0, hi_ = 0;
};

// Site-local phase map between the two descriptions: Plain -> Wojcik
// multiplies (u_n, d_n) by e^{+i*n*t*phi0}, Wojcik -> Plain by the inverse.
// Per-site probabilities are exactly unchanged; the gauge tag flips.
inline WalkState gauge_transform(const WalkState& state,
                                 const PhaseSpec& phi0) {
  WalkState out = state;
  std::int64_t t = state.t();
  std::int64_t sgn = state.gauge() == Gauge::Plain ? +1 : -1;
  auto& u = out.raw_u();
  auto& d = out.raw_d();
  for (std::int64_t n = state.lo(); n <= state.hi(); ++n) {
    Amplitude f = phi0.phase_factor(sgn * n * t);
    auto i = state.lattice().index(n);
    u[i] *= f;
    d[i] *= f;
  }
  out.set_gauge(state.gauge() == Gauge::Plain ? Gauge::Wojcik : Gauge::Plain);
  return out;
}

}  // namespace qwalk
