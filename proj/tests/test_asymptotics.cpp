#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "semiscat/asymptotics.hpp"

using namespace semiscat;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("gamma: integer and half-integer values") {
    CHECK_THAT(gamma_fn(1.0), WithinRel(1.0, 1e-12));
    CHECK_THAT(gamma_fn(2.0), WithinRel(1.0, 1e-12));
    CHECK_THAT(gamma_fn(5.0), WithinRel(24.0, 1e-12));
    CHECK_THAT(gamma_fn(1.5), WithinRel(std::sqrt(std::numbers::pi) / 2.0, 1e-12));
    CHECK_THROWS_AS(gamma_fn(0.0), DomainError);
    CHECK_THROWS_AS(gamma_fn(-2.0), DomainError);
}

TEST_CASE("gamma: functional equation on a grid") {
    for (int i = 0; i <= 99; ++i) {
        const double z = 0.1 + 9.9 * i / 99.0;
        const double lhs = gamma_fn(z + 1.0);
        CHECK(std::abs(lhs - z * gamma_fn(z)) / lhs <= 1e-12);
    }
    CHECK_THAT(gamma_fn(2.2), WithinRel(1.2 * gamma_fn(1.2), 1e-13));
}

TEST_CASE("gamma: agreement with the C library on (0, 30]") {
    for (int i = 1; i <= 300; ++i) {
        const double z = 0.1 * i;
        CHECK_THAT(gamma_fn(z), WithinRel(std::tgamma(z), 1e-12));
    }
}

TEST_CASE("gamma coefficient: paper figure constant and closed form") {
    // The plotted horizontal line is 2^-3.2 Gamma(2.2), printed as 0.1199.
    CHECK_THAT(std::abs(gamma_coefficient(1.2, +1)), WithinAbs(0.1199, 5e-5));
    CHECK_THAT(std::abs(gamma_coefficient(0.5, +1)),
               WithinRel(std::sqrt(std::numbers::pi) * std::pow(2.0, -3.5), 1e-12));
    for (double a : {0.3, 0.5, 1.2, 2.0}) {
        CHECK(gamma_coefficient(a, -1) == std::conj(gamma_coefficient(a, +1)));
        CHECK_THAT(std::abs(gamma_coefficient(a, +1)), WithinRel(LeadingOrderR(a).modulus_constant, 1e-15));
    }
}

TEST_CASE("phase constant lies in (0, pi/2) for alpha in (0,1)") {
    for (double a : {0.1, 0.5, 0.99}) {
        const LeadingOrderR lo(a);
        CHECK(lo.phase_constant > 0.0);
        CHECK(lo.phase_constant < std::numbers::pi / 2.0);
    }
}

TEST_CASE("predicted R: modulus and phase") {
    const auto r = predicted_R(0.5, 1e-4);
    CHECK_THAT(std::abs(r), WithinRel(std::sqrt(std::numbers::pi) * std::pow(2.0, -3.5) * 1e-2, 1e-12));
    CHECK_THAT(std::arg(r), WithinAbs(std::numbers::pi / 4.0, 1e-12));

    const auto r2 = predicted_R(1.2, 5e-4);
    CHECK_THAT(std::abs(r2), WithinAbs(1.309e-5, 2e-8));

    for (double h : {1.0, 0.3, 1e-2, 1e-5}) {
        CHECK_THAT(std::arg(predicted_R(0.8, h)), WithinAbs(0.8 * std::numbers::pi / 2.0, 1e-12));
    }
}

TEST_CASE("rescaling law is exact by construction across an h grid") {
    for (double a : {0.3, 0.5, 1.2}) {
        const auto c = predicted_R_rescaled(a);
        for (double h : {1e-1, 1e-2, 1e-3, 1e-4, 3.7e-5}) {
            CHECK(predicted_R(a, h) == c * std::pow(h, a));  // bitwise
        }
    }
}

TEST_CASE("proven range flag") {
    CHECK(predicted_R_proven(0.5));
    CHECK_FALSE(predicted_R_proven(1.2));
    CHECK_FALSE(predicted_R_proven(1.0));
}
