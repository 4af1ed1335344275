#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "semiscat/potential.hpp"

using namespace semiscat;

TEST_CASE("pure power region and zero tails") {
    ConormalPotential1D pot(0.5, 0.5, 1.0);
    CHECK(eval_potential(pot, -1.0) == 0.0);
    CHECK(eval_potential(pot, 0.0) == 0.0);
    CHECK(eval_potential(pot, 0.25) == 0.5);  // 0.25^0.5 exactly
    CHECK(eval_potential(pot, 1.0) == 0.0);
    CHECK(eval_potential(pot, 2.3) == 0.0);

    ConormalPotential1D steep(1.2, 0.8, 1.0);
    CHECK_THAT(eval_potential(steep, 0.5), Catch::Matchers::WithinRel(std::pow(0.5, 1.2), 1e-14));
    CHECK_THAT(eval_potential(steep, 0.5), Catch::Matchers::WithinAbs(0.435275, 1e-6));
}

TEST_CASE("derivative: power rule, smooth origin for alpha > 1, singular otherwise") {
    ConormalPotential1D quad(2.0, 0.5, 1.0);
    CHECK(eval_potential_derivative(quad, 0.0) == 0.0);

    ConormalPotential1D pot(0.5, 0.5, 1.0);
    CHECK_THAT(eval_potential_derivative(pot, 0.25), Catch::Matchers::WithinRel(1.0, 1e-14));
    CHECK_THROWS_AS(eval_potential_derivative(pot, 0.0), SingularDerivative);
    CHECK(eval_potential_derivative(pot, -0.3) == 0.0);
}

TEST_CASE("holder exponent caps at 1") {
    CHECK(holder_exponent(0.5) == 0.5);
    CHECK(holder_exponent(1.2) == 1.0);
    CHECK(holder_exponent(3.0) == 1.0);
    CHECK_THROWS_AS(holder_exponent(0.0), DomainError);
}

TEST_CASE("continuity across 0, x0, x1") {
    for (double alpha : {0.3, 0.5, 1.2, 2.5}) {
        ConormalPotential1D pot(alpha, 0.5, 1.0);
        for (double c : {0.0, pot.x0, pot.x1}) {
            double prev = eval_potential(pot, c);
            for (double d = 1e-3; d >= 1e-9; d *= 0.1) {
                const double jump =
                    std::max(std::abs(eval_potential(pot, c + d) - eval_potential(pot, c)),
                             std::abs(eval_potential(pot, c - d) - eval_potential(pot, c)));
                CHECK(jump <= std::max(2.0 * std::pow(d, std::min(alpha, 1.0)), 1e-12));
                prev = jump;
            }
            (void)prev;
        }
    }
}

TEST_CASE("Hoelder bound at the kink for alpha <= 1") {
    for (double alpha : {0.3, 0.5, 0.9}) {
        ConormalPotential1D pot(alpha, 0.5, 1.0);
        for (int i = 1; i <= 50; ++i) {
            const double x = pot.x0 * i / 50.0;
            CHECK(eval_potential(pot, x) <= std::pow(x, alpha) * (1.0 + 1e-14));
            for (int j = i + 1; j <= 50; ++j) {
                const double y = pot.x0 * j / 50.0;
                CHECK(std::abs(eval_potential(pot, y) - eval_potential(pot, x)) <=
                      std::pow(y - x, alpha) * (1.0 + 1e-12));
            }
        }
    }
}

TEST_CASE("sup V < 1 on a dense grid") {
    for (double alpha : {0.05, 0.3, 0.5, 1.2, 3.0}) {
        ConormalPotential1D pot(alpha, 0.5, 1.0);
        double sup = 0.0;
        for (int i = 0; i <= 20000; ++i) {
            const double x = -0.1 + 1.3 * i / 20000.0;
            sup = std::max(sup, eval_potential(pot, x));
        }
        CHECK(sup < 1.0);
        CHECK(potential_sup(pot) < 1.0);
        CHECK(sup <= potential_sup(pot) + 1e-12);
    }
}

TEST_CASE("central differences converge to the derivative at second order") {
    ConormalPotential1D pot(0.7, 0.5, 1.0);
    for (double x : {0.1, 0.3, 0.6, 0.8, 0.95}) {
        const double exact = eval_potential_derivative(pot, x);
        double err_coarse = 0.0, err_fine = 0.0;
        const double d1 = 1e-3, d2 = 5e-4;
        err_coarse = std::abs((eval_potential(pot, x + d1) - eval_potential(pot, x - d1)) / (2 * d1) - exact);
        err_fine = std::abs((eval_potential(pot, x + d2) - eval_potential(pot, x - d2)) / (2 * d2) - exact);
        // Second order: quartering the error when halving the step, with slack.
        CHECK(err_fine <= err_coarse / 3.0 + 1e-12);
    }
}

TEST_CASE("taper is C2 at the junctions (no spurious kink reflection source)") {
    ConormalPotential1D pot(1.2, 0.5, 1.0);
    auto second_diff = [&](double x, double d) {
        return (eval_potential(pot, x + d) - 2 * eval_potential(pot, x) + eval_potential(pot, x - d)) /
               (d * d);
    };
    // Second difference stays bounded and consistent across x0 and x1.
    for (double c : {pot.x0, pot.x1}) {
        const double a = second_diff(c, 1e-4), b = second_diff(c, 5e-5);
        CHECK(std::abs(a - b) <= 1e-2 * (1.0 + std::abs(a)));
    }
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(ConormalPotential1D(-1.0, 0.5, 1.0), DomainError);
    CHECK_THROWS_AS(ConormalPotential1D(0.5, 1.5, 2.0), DomainError);
    CHECK_THROWS_AS(ConormalPotential1D(0.5, 0.5, 0.4), DomainError);
}
