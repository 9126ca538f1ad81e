#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace qwalk {

// Bad physical or structural parameter (rho outside [0,1], mismatched slice
// lengths, a stride that does not divide the step count, ...).
class param_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed user configuration (unknown key, unnormalized initial state,
// non-coprime rational phase).  Distinct from param_error so a front end can
// map it to its usage exit code.
class usage_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A line walk was asked to step with amplitude sitting on the outermost
// allocated site: the lattice was sized smaller than the number of steps.
class extent_error : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// An adaptive scheme hit its refinement cap before meeting its tolerance.
// Carries the last two estimates so the caller can judge the stall.
class accuracy_error : public std::runtime_error {
 public:
  accuracy_error(const std::string& msg, std::complex<double> last,
                 std::complex<double> previous)
      : std::runtime_error(msg), last_(last), previous_(previous) {}
  std::complex<double> last() const { return last_; }
  std::complex<double> previous() const { return previous_; }

 private:
  std::complex<double> last_;
  std::complex<double> previous_;
};

// Input where an exponential factor of the algorithm would overflow the
// floating-point range.
class range_error : public std::range_error {
 public:
  using std::range_error::range_error;
};

// Input in a region an algorithm deliberately does not cover; the message
// names the fallback to use instead.
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Filesystem failure while reading or writing results.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qwalk
