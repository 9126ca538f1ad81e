#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <numeric>
#include <string>

#include "errors.hpp"

namespace qwalk {

// Per-step phase phi0: either an exact rational multiple of a full turn
// (phi0 = 2*pi*q/p with q/p in lowest terms) or a free real value in radians.
// The rational form keeps integer arithmetic available so that any multiple
// k*phi0 is reduced mod 2*pi exactly; revival times then land exactly on
// sin(k*phi0) = 0 instead of drifting with t.
class PhaseSpec {
 public:
  // Zero phase, represented as the exact rational 0/1.
  PhaseSpec() = default;

  static PhaseSpec rational(std::int64_t q, std::int64_t p) {
    if (p < 1) throw param_error("phi0: denominator must be >= 1");
    if (p > kMaxDenominator)
      throw param_error("phi0: denominator too large for exact reduction");
    if (std::gcd(q < 0 ? -q : q, p) != 1)
      throw param_error("phi0: q/p must be in lowest terms");
    PhaseSpec s;
    s.form_ = Form::Rational;
    s.q_ = q;
    s.p_ = p;
    return s;
  }

  static PhaseSpec real(double radians) {
    PhaseSpec s;
    s.form_ = Form::Real;
    s.value_ = radians;
    return s;
  }

  // 2*pi*(sqrt(5)-1)/2, the inverse-golden-ratio turn used for the
  // irrational-phase localization runs.
  static PhaseSpec golden() {
    PhaseSpec s;
    s.form_ = Form::Golden;
    s.value_ = 2.0 * std::numbers::pi * (std::sqrt(5.0) - 1.0) / 2.0;
    return s;
  }

  static PhaseSpec zero() { return PhaseSpec(); }

  // Accepts "a/b" (meaning 2*pi*a/b), the name "golden", or a bare real
  // number of radians.
  static PhaseSpec parse(const std::string& text) {
    if (text == "golden") return golden();
    auto slash = text.find('/');
    if (slash != std::string::npos) {
      std::size_t qlen = 0, plen = 0;
      std::int64_t q = 0, p = 0;
      try {
        q = std::stoll(text.substr(0, slash), &qlen);
        p = std::stoll(text.substr(slash + 1), &plen);
      } catch (const std::exception&) {
        throw usage_error("phi0: malformed rational '" + text + "'");
      }
      if (qlen != slash || plen != text.size() - slash - 1)
        throw usage_error("phi0: malformed rational '" + text + "'");
      try {
        return rational(q, p);
      } catch (const param_error& e) {
        throw usage_error(e.what());
      }
    }
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (end == nullptr || *end != '\0' || text.empty())
      throw usage_error("phi0: cannot parse '" + text + "'");
    return real(v);
  }

  bool is_rational() const { return form_ == Form::Rational; }
  bool is_zero() const { return is_rational() && q_ == 0; }

  std::int64_t q() const {
    require_rational();
    return q_;
  }
  std::int64_t p() const {
    require_rational();
    return p_;
  }

  // phi0 in radians.
  double value() const {
    if (form_ == Form::Rational)
      return 2.0 * std::numbers::pi * static_cast<double>(q_) /
             static_cast<double>(p_);
    return value_;
  }

  // k*phi0 reduced to [0, 2*pi); exact reduction in the rational case.
  double angle(std::int64_t k) const {
    if (form_ == Form::Rational)
      return 2.0 * std::numbers::pi * static_cast<double>(residue(k)) /
             static_cast<double>(p_);
    return std::fmod(value_ * static_cast<double>(k),
                     2.0 * std::numbers::pi);
  }

  double sin_angle(std::int64_t k) const {
    if (form_ == Form::Rational) {
      std::int64_t r = residue(k);
      if (r == 0) return 0.0;             // exact revival
      if (2 * r == p_) return 0.0;        // half turn
      return std::sin(2.0 * std::numbers::pi * static_cast<double>(r) /
                      static_cast<double>(p_));
    }
    return std::sin(value_ * static_cast<double>(k));
  }

  double cos_angle(std::int64_t k) const {
    if (form_ == Form::Rational) {
      std::int64_t r = residue(k);
      if (r == 0) return 1.0;
      if (2 * r == p_) return -1.0;
      return std::cos(2.0 * std::numbers::pi * static_cast<double>(r) /
                      static_cast<double>(p_));
    }
    return std::cos(value_ * static_cast<double>(k));
  }

  // exp(i*k*phi0).
  std::complex<double> phase_factor(std::int64_t k) const {
    if (form_ == Form::Rational) return unit_root(residue(k));
    return {std::cos(value_ * static_cast<double>(k)),
            std::sin(value_ * static_cast<double>(k))};
  }

  // (q*k) mod p in [0, p); rational form only.
  std::int64_t residue(std::int64_t k) const {
    require_rational();
    std::int64_t r = ((q_ % p_) * (k % p_)) % p_;
    return r < 0 ? r + p_ : r;
  }

  // exp(2*pi*i*r/p) for a residue r in [0, p); rational form only.  Equal to
  // phase_factor(k) whenever r == residue(k), so callers may cache the p
  // roots instead of recomputing per site.
  std::complex<double> unit_root(std::int64_t r) const {
    require_rational();
    if (r == 0) return {1.0, 0.0};
    if (2 * r == p_) return {-1.0, 0.0};
    double a = 2.0 * std::numbers::pi * static_cast<double>(r) /
               static_cast<double>(p_);
    return {std::cos(a), std::sin(a)};
  }

  // Round-trippable source form: "q/p", "golden", or 17-digit radians.
  std::string to_string() const {
    switch (form_) {
      case Form::Rational: {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%lld/%lld",
                      static_cast<long long>(q_), static_cast<long long>(p_));
        return buf;
      }
      case Form::Golden:
        return "golden";
      case Form::Real: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", value_);
        return buf;
      }
    }
    return {};
  }

  friend bool operator==(const PhaseSpec& a, const PhaseSpec& b) {
    if (a.form_ != b.form_) return false;
    if (a.form_ == Form::Rational) return a.q_ == b.q_ && a.p_ == b.p_;
    return a.value_ == b.value_;
  }

 private:
  enum class Form { Rational, Real, Golden };

  // Denominators above sqrt(INT64_MAX)/3 would overflow the residue product.
  static constexpr std::int64_t kMaxDenominator = 1'000'000'000;

  void require_rational() const {
    if (form_ != Form::Rational)
      throw param_error("phi0: not in rational form");
  }

  Form form_ = Form::Rational;
  std::int64_t q_ = 0;
  std::int64_t p_ = 1;
  double value_ = 0.0;
};

}  // namespace qwalk
