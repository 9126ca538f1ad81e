#pragma once

#include <cstdint>

#include "errors.hpp"

namespace qwalk {

enum class LatticeKind { Line, Circle };

// Site range n in {-half, ..., +half}.  A Line never wraps and must be
// allocated at least as large as the planned number of steps (support grows
// by one site per step).  A Circle wraps +half -> -half.
class Lattice {
 public:
  static Lattice line(std::int64_t extent) {
    if (extent < 0) throw param_error("lattice: line extent must be >= 0");
    return Lattice(LatticeKind::Line, extent);
  }

  static Lattice circle(std::int64_t half) {
    if (half < 1) throw param_error("lattice: circle needs at least 3 sites");
    return Lattice(LatticeKind::Circle, half);
  }

  LatticeKind kind() const { return kind_; }
  std::int64_t half() const { return half_; }
  std::int64_t size() const { return 2 * half_ + 1; }

  // Array index of site n.
  std::int64_t index(std::int64_t n) const { return n + half_; }
  // Site of array index i.
  std::int64_t site(std::int64_t i) const { return i - half_; }

  friend bool operator==(const Lattice& a, const Lattice& b) {
    return a.kind_ == b.kind_ && a.half_ == b.half_;
  }

 private:
  Lattice(LatticeKind kind, std::int64_t half) : kind_(kind), half_(half) {}

  LatticeKind kind_;
  std::int64_t half_;
};

}  // namespace qwalk
