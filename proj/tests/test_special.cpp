// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "taudnn/rng.hpp"
#include "taudnn/special.hpp"

using namespace taudnn;

TEST_SUITE_BEGIN("special");

// Reference values computed with 40-digit arithmetic.
TEST_CASE("gamma function known values") {
    CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(gamma_fn(2.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(gamma_fn(6.0) == doctest::Approx(120.0).epsilon(1e-13));
    CHECK(gamma_fn(0.5) == doctest::Approx(1.7724538509055160273).epsilon(1e-14));
    CHECK(gamma_fn(0.25) == doctest::Approx(3.6256099082219083119).epsilon(1e-14));
    CHECK(gamma_fn(1.1) == doctest::Approx(0.95135076986687318363).epsilon(1e-14));
    CHECK(gamma_fn(1.5) == doctest::Approx(0.88622692545275801365).epsilon(1e-14));
    CHECK(gamma_fn(1.6) == doctest::Approx(0.89351534928769026144).epsilon(1e-14));
    CHECK(gamma_fn(1.7) == doctest::Approx(0.90863873285329044998).epsilon(1e-14));
    CHECK(gamma_fn(2.5) == doctest::Approx(1.3293403881791370205).epsilon(1e-14));
}

TEST_CASE("gamma recursion property") {
    SplitMix64 rng(3);
    for (int i = 0; i < 50; ++i) {
        const double x = rng.uniform(0.1, 4.0);
        CHECK(gamma_fn(x + 1.0) ==
              doctest::Approx(x * gamma_fn(x)).epsilon(1e-12));
    }
}

TEST_CASE("gamma domain errors") {
    CHECK_THROWS_AS(gamma_fn(0.0), std::domain_error);
    CHECK_THROWS_AS(gamma_fn(-1.0), std::domain_error);
}

TEST_CASE("bessel known values") {
    CHECK(bessel_i(0, 0.0) == 1.0);
    CHECK(bessel_i(1, 0.0) == 0.0);
    CHECK(bessel_i(0, 0.5) == doctest::Approx(1.0634833707413235193).epsilon(1e-14));
    CHECK(bessel_i(1, 0.5) == doctest::Approx(0.25789430539089631636).epsilon(1e-14));
    CHECK(bessel_i(0, 1.0) == doctest::Approx(1.2660658777520083356).epsilon(1e-14));
    CHECK(bessel_i(1, 1.0) == doctest::Approx(0.56515910399248502721).epsilon(1e-14));
    CHECK(bessel_i(0, 2.0) == doctest::Approx(2.2795853023360672674).epsilon(1e-14));
    CHECK(bessel_i(1, 2.0) == doctest::Approx(1.5906368546373290634).epsilon(1e-14));
    CHECK(bessel_i(0, 0.37) == doctest::Approx(1.0345189536380983975).epsilon(1e-14));
}

TEST_CASE("bessel derivative identity dI0/dx = I1") {
    const double h = 1e-6;
    for (double x : {0.3, 0.8, 1.7}) {
        const double fd = (bessel_i(0, x + h) - bessel_i(0, x - h)) / (2 * h);
        CHECK(fd == doctest::Approx(bessel_i(1, x)).epsilon(1e-8));
    }
}

TEST_CASE("bessel monotone and bounded below") {
    CHECK(bessel_i(0, 0.5) > 1.0);
    CHECK(bessel_i(0, 1.0) > bessel_i(0, 0.5));
    CHECK(bessel_i(0, 2.0) > bessel_i(0, 1.0));
    CHECK(bessel_i(1, 1.0) > bessel_i(1, 0.5));
}

TEST_CASE("bessel argument checks") {
    CHECK_THROWS_AS(bessel_i(2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(bessel_i(-1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(bessel_i(0, -0.5), std::domain_error);
}

TEST_SUITE_END();
