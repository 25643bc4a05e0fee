#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>

#include "infoqm/analysis.hpp"
#include "infoqm/error.hpp"
#include "infoqm/numerics.hpp"
#include "infoqm/oscillator.hpp"

using namespace infoqm;

namespace {

struct ReferenceRow {
    int n;
    double alpha, beta, lambda, energy;
};

constexpr ReferenceRow kReference[] = {
    {0, 0.561903, 0.165957, -1.34046, 0.836186},   {1, 0.8846183, 0.182575, -1.18673, 2.69296},
    {2, 1.483947, 0.265717, -0.675132, 3.01642},   {3, 2.374767, 0.271151, -0.650844, 4.71831},
    {4, 3.3791495, 0.312319, -0.488143, 5.00752},  {5, 4.5328009, 0.309387, -0.498664, 6.76468},
    {6, 5.7558755, 0.334322, -0.413460, 7.03368},  {7, 7.07846158, 0.330258, -0.426725, 8.81483},
};

}  // namespace

TEST_SUITE("oscillator") {

TEST_CASE("alpha from beta") {
    CHECK(std::abs(alpha_from_beta(0, 0.5) - 0.25 * std::log(std::numbers::pi)) < 1e-14);
    CHECK(std::abs(alpha_from_beta(0, 0.165957) - 0.561903) < 1e-5);
    CHECK(std::abs(alpha_from_beta(2, 0.265717) - 1.483947) < 1e-5);
    CHECK_THROWS_AS(alpha_from_beta(0, 0.0), DomainError);
    CHECK_THROWS_AS(alpha_from_beta(0, -1.0), DomainError);
    CHECK_THROWS_AS(alpha_from_beta(21, 0.3), DomainError);
}

TEST_CASE("closure residual") {
    CHECK(std::abs(beta_closure_residual(0, 0, 0.165957)) < 1e-4);
    CHECK(std::abs(beta_closure_residual(7, 1, 0.330258)) < 1e-4);
    CHECK(beta_closure_residual(0, 0, 1e-4) < 0.0);
}

TEST_CASE("lambda and energy") {
    CHECK(lambda_from_beta(0.5) == 0.0);
    CHECK(std::abs(lambda_from_beta(0.165957) + 1.34046) < 1e-5);
    CHECK(std::abs(lambda_from_beta(0.182575) + 1.18673) < 1e-5);
    for (int idx : {0, 1, 7}) {
        const ReferenceRow& p = kReference[idx];
        OscillatorState s{p.n, p.n % 2, p.alpha, p.beta, p.lambda, 0.0};
        CHECK(std::abs(energy(s) - p.energy) < 5e-5);
    }
}

TEST_CASE("solved states reproduce the table") {
    for (const ReferenceRow& p : kReference) {
        const OscillatorState s = solve_state(p.n);
        CHECK(s.k == p.n % 2);
        CHECK(std::abs(s.alpha - p.alpha) <= 2e-5);
        CHECK(std::abs(s.beta - p.beta) <= 2e-5);
        CHECK(std::abs(s.lambda - p.lambda) <= 1e-4);
        CHECK(std::abs(s.energy - p.energy) <= 1e-4);
        CHECK(2.0 * s.alpha > 1.0);
        CHECK(s.beta > 0.0);
        CHECK(s.lambda < 0.0);
        CHECK(std::abs(s.lambda * 4.0 * s.beta - (4.0 * s.beta * s.beta - 1.0)) < 1e-10);
    }
}

TEST_CASE("high-precision reference values") {
    // Same relations solved with 30-digit arithmetic.
    const OscillatorState s0 = solve_state(0);
    CHECK(std::abs(s0.beta - 0.165956654055) < 1e-11);
    CHECK(std::abs(s0.alpha - 0.561902837542) < 1e-11);
    CHECK(std::abs(s0.lambda + 1.34046079829) < 1e-10);
    const OscillatorState s1 = solve_state(1);
    CHECK(std::abs(s1.beta - 0.182574756343) < 1e-11);
    CHECK(std::abs(s1.energy - 2.69296481965) < 1e-10);
}

TEST_CASE("every level up to 20 has a unique root") {
    double previous = -1.0;
    for (int n = 0; n <= kMaxOscillatorLevel; ++n) {
        const OscillatorState s = solve_state(n);
        CHECK(std::abs(beta_closure_residual(n, s.k, s.beta)) < 1e-10);
        CHECK(s.beta < admissible_beta_limit(n));
        CHECK(s.energy > previous);
        previous = s.energy;
    }
    CHECK_THROWS_AS(solve_state(-1), DomainError);
    CHECK_THROWS_AS(solve_state(21), DomainError);
}

TEST_CASE("solve_state is deterministic") {
    for (int n : {0, 3, 6}) {
        const OscillatorState a = solve_state(n);
        const OscillatorState b = solve_state(n);
        CHECK(std::memcmp(&a.beta, &b.beta, sizeof(double)) == 0);
        CHECK(std::memcmp(&a.energy, &b.energy, sizeof(double)) == 0);
    }
}

TEST_CASE("table shape") {
    CHECK(table(7).size() == 8);
    CHECK(table(0).size() == 1);
    const TableRow r3 = table(3)[3];
    CHECK(std::abs(r3.alpha - 2.374767) < 2e-5);
    CHECK(std::abs(r3.beta - 0.271151) < 2e-5);
    CHECK(std::abs(r3.lambda + 0.650844) < 1e-4);
    CHECK(std::abs(r3.energy - 4.71831) < 1e-4);
    CHECK_THROWS_AS(table(-1), DomainError);
    CHECK_THROWS_AS(table(21), DomainError);
    const auto serial = table(12, 1);
    const auto threaded = table(12, 4);
    for (std::size_t i = 0; i < serial.size(); ++i) CHECK(serial[i].beta == threaded[i].beta);
}

TEST_CASE("state evaluation") {
    const OscillatorState s0 = solve_state(0);
    CHECK(std::abs(psi_eval(s0, 0.0) - std::exp(-0.561903)) < 1e-6);
    CHECK(psi_eval(solve_state(1), 0.0) == 0.0);
    const Grid1D g(-12.0, 12.0, 4001);
    for (int n = 0; n <= 7; ++n) {
        const OscillatorState s = solve_state(n);
        const std::vector<double> f = g.sample([&s](double x) { const double p = psi_eval(s, x); return p * p; });
        CHECK(std::abs(integrate(std::span<const double>(f), QuadratureRule::trapezoid(g)) - 1.0) < 1e-8);
    }
}

TEST_CASE("analytic derivatives agree with finite differences") {
    for (int n : {0, 1, 4, 7}) {
        const OscillatorState s = solve_state(n);
        for (double x : {-2.3, -0.4, 0.9, 3.1}) {
            const double h = 1e-5;
            const double d1 = (psi_eval(s, x + h) - psi_eval(s, x - h)) / (2 * h);
            const double d2 = (psi_derivative(s, x + h) - psi_derivative(s, x - h)) / (2 * h);
            CHECK(std::abs(psi_derivative(s, x) - d1) < 1e-7);
            CHECK(std::abs(psi_second_derivative(s, x) - d2) < 1e-7);
        }
    }
}

TEST_CASE("residual examples") {
    const OscillatorState s0 = solve_state(0);
    for (double x = -5.0; x <= 5.0; x += 0.25)
        CHECK(std::abs(eigen_residual(s0, x)) < 1e-4 * std::abs(psi_eval(s0, x)) + 1e-10);
    CHECK(std::abs(eigen_residual(solve_state(2), 1.3)) < 1e-4);
    const OscillatorState s1 = solve_state(1);
    const double expect = -2.0 * s1.beta * psi_eval(s1, 0.7);
    CHECK(std::abs(eigen_residual(s1, 0.7) - expect) < 1e-4 * std::abs(expect));
}

TEST_CASE("residual identity on the probe grid") {
    const Grid1D probe(-8.0, 8.0, 801);
    for (int n = 0; n <= 7; ++n) {
        const OscillatorState s = solve_state(n);
        double peak = 0.0;
        for (double x : probe.points()) peak = std::max(peak, std::abs(psi_eval(s, x)));
        for (double x : probe.points())
            CHECK(std::abs(eigen_residual(s, x) + 2.0 * s.k * s.beta * psi_eval(s, x)) <= 1e-6 * peak);
    }
}

TEST_CASE("linear states solve the linear problem") {
    for (int n = 0; n <= 5; ++n) {
        const OscillatorState s = linear_state(n);
        CHECK(s.energy == n + 0.5);
        for (double x : {-1.5, 0.2, 2.4}) CHECK(std::abs(linear_residual(s, x)) < 1e-12);
    }
}

TEST_CASE("energy identity") {
    const Grid1D g = default_analysis_grid();
    // <H> for odd levels from a 30-digit quadrature of the same states.
    const double odd_reference[] = {2.32781530697, 4.1760116876, 6.1459044687, 8.15431220136};
    for (int n = 0; n <= 7; ++n) {
        const OscillatorState s = solve_state(n);
        const double h = energy_expectation(s, g);
        CHECK(std::abs(h - (s.energy - 2.0 * s.k * s.beta)) < 1e-5);
        if (n % 2) CHECK(std::abs(h - odd_reference[n / 2]) < 1e-8);
        else CHECK(std::abs(h - s.energy) < 1e-8);
    }
}

TEST_CASE("state information") {
    CHECK(std::abs(state_information(solve_state(0)) + 1.62380567508) < 1e-10);
    CHECK(std::abs(state_information(solve_state(1)) + 3.26923631622) < 1e-10);
    OscillatorState lin{0, 0, 0.25 * std::log(std::numbers::pi), 0.5, 0.0, 0.5};
    CHECK(std::abs(state_information(lin) + (0.5 * std::log(std::numbers::pi) + 0.5)) < 1e-14);
    const Grid1D g = default_analysis_grid();
    for (int n = 0; n <= 7; ++n) {
        const OscillatorState s = solve_state(n);
        CHECK(std::abs(state_information_quadrature(s, g) - state_information(s)) < 1e-8);
    }
}

}
