#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "oracles.hpp"
#include "qwalk/airy.hpp"
#include "qwalk/errors.hpp"

using qwalk::airy_ai;
using qwalk::airy_ai_scaled;
using qwalk::airy_zeta;
using C = std::complex<double>;

namespace {

double rel_err(C got, C want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

}  // namespace

TEST_CASE("zeta is two thirds of z^(3/2)") {
  REQUIRE(airy_zeta(C(4.0, 0.0)) == C(16.0 / 3.0, 0.0));
  const C z(1.0, 2.0);
  const C w = std::sqrt(z);
  REQUIRE(std::abs(airy_zeta(z) - 2.0 / 3.0 * w * w * w) < 1e-15);
}

TEST_CASE("Ai at the origin and on the real axis") {
  REQUIRE(rel_err(airy_ai(C(0.0, 0.0)), C(0.35502805388781722, 0.0)) < 1e-15);
  REQUIRE(rel_err(airy_ai(C(1.0, 0.0)), C(0.13529241631288141, 0.0)) < 1e-12);
  REQUIRE(rel_err(airy_ai(C(-1.0, 0.0)), C(0.53556088329235207, 0.0)) < 1e-12);
  REQUIRE(rel_err(airy_ai(C(6.0, 0.0)), C(9.9476943602528888e-06, 0.0)) <
          1e-12);
  REQUIRE(rel_err(airy_ai(C(-6.0, 0.0)), C(-0.3291451736298231, 0.0)) < 1e-12);
  REQUIRE(rel_err(airy_ai(C(-9.5, 0.0)), C(0.31910324771912818, 0.0)) < 1e-11);
  REQUIRE(rel_err(airy_ai(C(40.0, 0.0)), C(6.3657426585529149e-75, 0.0)) <
          1e-11);
  REQUIRE(rel_err(airy_ai(C(-40.0, 0.0)), C(-0.045933923437957248, 0.0)) <
          1e-11);
}

TEST_CASE("Ai at reference points across the plane") {
  struct Row {
    C z, ai;
  };
  const std::vector<Row> table{
      {{1.0, 1.0}, {0.060458308371838146, -0.15188956587718141}},
      {{2.5, -3.0}, {0.024528926446248926, -0.048233447476776554}},
      {{-5.0, 2.0}, {16.753205015984385, 0.49797930280112601}},
      {{12.0, 5.0}, {2.1001897847642028e-13, 7.8727254711601257e-13}},
      {{-30.0, 1.0}, {-9.5132285111182444, 27.219090796320121}},
      {{0.0, 25.0}, {-4.5850502490012108e+24, -1.7920504625684325e+24}},
      {{0.0, -25.0}, {-4.5850502490012108e+24, 1.7920504625684325e+24}},
      {{-35.0, -35.0}, {1.4403638030658386e+92, -4.2855416446698492e+91}},
      {{28.28, 28.28}, {4.7969237534192623e-30, 9.4770438788870539e-30}},
  };
  for (const auto& row : table) {
    INFO("z = " << row.z.real() << " + " << row.z.imag() << "i");
    REQUIRE(rel_err(airy_ai(row.z), row.ai) < 1e-11);
  }
}

TEST_CASE("Ai around the series/asymptotics handover ring") {
  // |z| = 9 at angles k*pi/12; values from an independent quadrature.
  struct Row {
    C z, ai;
  };
  const std::vector<Row> ring{
      {{8.6933324366016151, 2.3293714059226867},
       {7.6309766552460926e-09, -6.0352533864323417e-09}},
      {{6.3639610306789276, 6.3639610306789276},
       {-7.3025955331104182e-05, 0.00014886315959550077}},
      {{2.3293714059226867, 8.6933324366016151},
       {-51.122226312928532, 151.56320747197532}},
      {{-2.3293714059226867, 8.6933324366016151},
       {1329015.7422947963, -2381050.1282421919}},
      {{-6.3639610306789276, 6.3639610306789276},
       {2726557.7698893407, 39563.6692643731}},
      {{-8.6933324366016151, 2.3293714059226867},
       {-156.81886653850191, -31.508445861726923}},
  };
  for (const auto& row : ring) {
    INFO("z = " << row.z.real() << " + " << row.z.imag() << "i");
    REQUIRE(rel_err(airy_ai(row.z), row.ai) < 1e-11);
    // Just inside and just outside the handover radius: both paths live.
    const C inner = row.z * (8.9 / 9.0);
    const C outer = row.z * (9.1 / 9.0);
    REQUIRE(rel_err(airy_ai(inner), oracles::airy_oracle(inner)) < 1e-9);
    REQUIRE(rel_err(airy_ai(outer), oracles::airy_oracle(outer)) < 1e-9);
  }
}

TEST_CASE("Ai agrees with saddle-point quadrature on fresh rings") {
  const double kPi = 3.14159265358979323846;
  for (double r : {7.0, 9.5, 12.0, 20.0}) {
    for (int k = -11; k <= 12; ++k) {
      const double theta = kPi * static_cast<double>(k) / 12.0;
      const C z = std::polar(r, theta);
      INFO("r=" << r << " theta=" << theta);
      REQUIRE(rel_err(airy_ai(z), oracles::airy_oracle(z)) < 1e-9);
    }
  }
}

TEST_CASE("conjugation symmetry") {
  for (const C z : {C(3.0, 4.0), C(-2.0, 7.0), C(-8.0, 1.0), C(10.0, 0.5)}) {
    const C a = airy_ai(z);
    const C b = airy_ai(std::conj(z));
    REQUIRE(a.real() == b.real());
    REQUIRE(a.imag() == -b.imag());
  }
}

TEST_CASE("scaled Ai matches references and the unscaled value") {
  struct Row {
    C z, ai;
  };
  const std::vector<Row> table{
      {{-1200.0, 60.0}, {0.034300875975651957, -0.033454760268932598}},
      {{-1197.0, -59.0}, {0.034316720117403589, 0.033482074498899887}},
      {{300.0, 10.0}, {0.067768943812837643, -0.00056447742986210313}},
  };
  for (const auto& row : table) {
    INFO("z = " << row.z.real() << " + " << row.z.imag() << "i");
    REQUIRE(rel_err(airy_ai_scaled(row.z), row.ai) < 1e-10);
  }
  // Inside the series disc the scaled value is just Ai * e^{zeta}.
  for (const C z : {C(2.0, 1.0), C(-3.0, 4.0), C(5.0, -5.0)}) {
    const C expect = airy_ai(z) * std::exp(airy_zeta(z));
    REQUIRE(rel_err(airy_ai_scaled(z), expect) < 1e-13);
  }
}

TEST_CASE("unscaled Ai refuses exponent overflow, underflows to zero") {
  // Deep in the oscillatory region the unscaled modulus overflows the double
  // range; the scaled variant still works there.
  REQUIRE_THROWS_AS(airy_ai(C(-1200.0, 60.0)), qwalk::range_error);
  REQUIRE_NOTHROW(airy_ai_scaled(C(-1200.0, 60.0)));
  // Far on the positive axis the true value underflows; that is exact-zero
  // territory, not an error.
  REQUIRE(airy_ai(C(900.0, 0.0)) == C(0.0, 0.0));
}
