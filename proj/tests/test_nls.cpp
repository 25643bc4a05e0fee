#include <doctest.h>

#include <cmath>
#include <numbers>

#include "infoqm/error.hpp"
#include "infoqm/nls.hpp"
#include "infoqm/oscillator.hpp"

using namespace infoqm;

namespace {

double l2_distance(const Grid1D& g, const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc * g.spacing());
}

GridProblem default_problem(double b) { return GridProblem::harmonic(Grid1D(-12.0, 12.0, 2048), b); }

}  // namespace

TEST_SUITE("nls") {

TEST_CASE("validation") {
    GridProblem p = default_problem(0.0);
    p.eps_log = 1e-10;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p.eps_log = 1e-100;
    p.potential.pop_back();
    CHECK_THROWS_AS(p.validate(), ValidationError);

    const GridProblem q = default_problem(0.0);
    FlowConfig cfg = FlowConfig::defaults_for(q);
    CHECK(cfg.tau * q.max_abs_potential() < 1.0);
    cfg.tau = 1.0 / q.max_abs_potential();
    CHECK_THROWS_AS(cfg.validate(q), ValidationError);
    cfg = FlowConfig::defaults_for(q);
    cfg.max_iters = 2000000;
    CHECK_THROWS_AS(cfg.validate(q), ValidationError);
    cfg = FlowConfig::defaults_for(q);
    const std::vector<double> wrong(10, 1.0);
    CHECK_THROWS_AS(gradient_flow_ground_state(q, cfg, std::span<const double>(wrong)), ValidationError);
    std::vector<double> sign_change = random_positive_init(q.grid, 0, 0);
    sign_change[100] = -1.0;
    CHECK_THROWS_AS(gradient_flow_ground_state(q, cfg, std::span<const double>(sign_change)), ValidationError);
}

TEST_CASE("linear harmonic ground state") {
    const GridProblem p = default_problem(0.0);
    const GroundStateSolution s = gradient_flow_ground_state(p, FlowConfig::defaults_for(p));
    CHECK(std::abs(s.mu - 0.5) < 1e-3);
    const std::vector<double> exact =
        p.grid.sample([](double x) { return std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x); });
    CHECK(l2_distance(p.grid, s.psi, exact) < 1e-4);
    CHECK(std::abs(grid_norm2(p.grid, s.psi) - 1.0) < 1e-10);
    for (std::size_t i = 1; i + 1 < s.psi.size(); ++i) REQUIRE(s.psi[i] > 0.0);
    CHECK(s.diagnostics.energy_increases == 0);
}

TEST_CASE("particle in a box") {
    const Grid1D g(0.0, std::numbers::pi, 801);
    const GridProblem p{g, std::vector<double>(g.size(), 0.0), 0.0, 1e-100};
    const GroundStateSolution s = gradient_flow_ground_state(p, FlowConfig::defaults_for(p));
    CHECK(std::abs(s.mu - 0.5) < 1e-5);
    const std::vector<double> exact = g.sample([](double x) { return std::sqrt(2.0 / std::numbers::pi) * std::sin(x); });
    CHECK(l2_distance(g, s.psi, exact) < 1e-5);
}

TEST_CASE("fixed coefficient at the table lambda") {
    const OscillatorState s0 = solve_state(0);
    const GridProblem p = default_problem(s0.lambda);
    const GroundStateSolution s = gradient_flow_ground_state(p, FlowConfig::defaults_for(p));
    const std::vector<double> exact = p.grid.sample([&s0](double x) { return psi_eval(s0, x); });
    CHECK(l2_distance(p.grid, s.psi, exact) < 1e-3);
    CHECK(std::abs(s.mu - s0.lambda) < 1e-4);
}

TEST_CASE("explicit scheme agrees and reports instability") {
    const GridProblem p = GridProblem::harmonic(Grid1D(-8.0, 8.0, 161), 0.0);
    FlowConfig cfg = FlowConfig::defaults_for(p);
    cfg.scheme = FlowScheme::explicit_euler;
    cfg.tau = 0.4 * p.grid.spacing() * p.grid.spacing();
    cfg.tol_flow = 1e-7;
    const GroundStateSolution ex = gradient_flow_ground_state(p, cfg);
    const GroundStateSolution im = gradient_flow_ground_state(p, FlowConfig::defaults_for(p));
    CHECK(std::abs(ex.mu - im.mu) < 1e-7);
    cfg.tau = 0.03;
    CHECK_THROWS_AS(gradient_flow_ground_state(p, cfg), InstabilityError);
}

TEST_CASE("iteration cap") {
    const GridProblem p = default_problem(0.0);
    FlowConfig cfg = FlowConfig::defaults_for(p);
    cfg.max_iters = 5;
    CHECK_THROWS_AS(gradient_flow_ground_state(p, cfg), ConvergenceError);
}

TEST_CASE("norm is conserved and energy does not rise along the flow") {
    const GridProblem p = default_problem(-1.0);
    FlowConfig cfg = FlowConfig::defaults_for(p);
    std::vector<double> psi = random_positive_init(p.grid, 3, 0);
    double last = INFINITY;
    for (int step = 0; step < 30; ++step) {
        cfg.max_iters = 1;
        cfg.tol_flow = 1e300;
        const GroundStateSolution s = gradient_flow_ground_state(p, cfg, std::span<const double>(psi));
        CHECK(std::abs(grid_norm2(p.grid, s.psi) - 1.0) < 1e-12);
        const double e = flow_energy(p, s.psi);
        CHECK(e <= last + 1e-12);
        last = e;
        psi = s.psi;
    }
    cfg = FlowConfig::defaults_for(p);
    CHECK(gradient_flow_ground_state(p, cfg).diagnostics.energy_increases == 0);
}

TEST_CASE("flow gradient matches finite differences of the energy") {
    const GridProblem p = GridProblem::harmonic(Grid1D(-8.0, 8.0, 257), -0.8);
    const std::vector<double> psi = random_positive_init(p.grid, 11, 0);
    const std::vector<double> grad = flow_gradient(p, psi);
    const CounterRng rng(5);
    for (std::uint64_t dir = 0; dir < 10; ++dir) {
        std::vector<double> v(psi.size(), 0.0);
        for (std::size_t i = 1; i + 1 < v.size(); ++i) v[i] = 2.0 * rng.uniform(dir, i) - 1.0;
        double analytic = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) analytic += grad[i] * v[i];
        analytic *= p.grid.spacing();
        const double h = 1e-5 * std::sqrt(grid_norm2(p.grid, psi) / grid_norm2(p.grid, v));
        std::vector<double> up = psi, down = psi;
        for (std::size_t i = 0; i < v.size(); ++i) {
            up[i] += h * v[i];
            down[i] -= h * v[i];
        }
        const double numeric = (flow_energy(p, up) - flow_energy(p, down)) / (2.0 * h);
        CHECK(std::abs(analytic - numeric) <= 1e-6 * std::abs(analytic));
    }
}

TEST_CASE("self-consistent lambda") {
    const GridProblem p = default_problem(0.0);
    const FlowConfig cfg = FlowConfig::defaults_for(p);
    const SelfConsistentResult r = self_consistent_lambda(p, cfg, -3.0, -0.5);
    const OscillatorState s0 = solve_state(0);
    CHECK(std::abs(r.lambda - (-1.34046)) < 1e-3);
    CHECK(std::abs(r.solution.mu - r.lambda) < 1e-6);
    const std::vector<double> exact = p.grid.sample([&s0](double x) { return psi_eval(s0, x); });
    CHECK(l2_distance(p.grid, r.solution.psi, exact) < 1e-3);

    // -psi''/2 + V psi - lambda (1 + ln psi^2) psi with central differences.
    const double h = p.grid.spacing();
    double res = 0.0;
    const auto& psi = r.solution.psi;
    for (std::size_t i = 1; i + 1 < psi.size(); ++i) {
        const double d2 = (psi[i - 1] - 2.0 * psi[i] + psi[i + 1]) / (h * h);
        const double v = -0.5 * d2 + p.potential[i] * psi[i] -
                         r.lambda * (1.0 + std::log(std::max(psi[i] * psi[i], p.eps_log))) * psi[i];
        res += v * v;
    }
    CHECK(std::sqrt(res * h) <= 1e-4);
}

TEST_CASE("lambda is grid-converged") {
    const GridProblem coarse = GridProblem::harmonic(Grid1D(-12.0, 12.0, 1024), 0.0);
    const GridProblem fine = GridProblem::harmonic(Grid1D(-12.0, 12.0, 4096), 0.0);
    const double a = self_consistent_lambda(coarse, FlowConfig::defaults_for(coarse), -3.0, -0.5).lambda;
    const double b = self_consistent_lambda(fine, FlowConfig::defaults_for(fine), -3.0, -0.5).lambda;
    CHECK(std::abs(a - b) < 1e-3);
}

TEST_CASE("bracket without a sign change") {
    const GridProblem p = default_problem(0.0);
    CHECK_THROWS_AS(self_consistent_lambda(p, FlowConfig::defaults_for(p), -0.5, -0.1), BracketError);
    CHECK_THROWS_AS(self_consistent_lambda(p, FlowConfig::defaults_for(p), -0.5, -3.0), BracketError);
}

TEST_CASE("log floor does not move lambda") {
    GridProblem p = default_problem(0.0);
    const FlowConfig cfg = FlowConfig::defaults_for(p);
    const double base = self_consistent_lambda(p, cfg, -3.0, -0.5).lambda;
    for (double eps : {1e-98, 1e-102}) {
        p.eps_log = eps;
        CHECK(std::abs(self_consistent_lambda(p, cfg, -3.0, -0.5).lambda - base) < 1e-8);
    }
}

TEST_CASE("uniqueness probe") {
    const GridProblem p = default_problem(0.0);
    const FlowConfig cfg = FlowConfig::defaults_for(p);
    const UniquenessReport linear = uniqueness_probe(p, cfg, 5, std::nullopt);
    for (const auto& f : linear.failures) CHECK(f.empty());
    for (double mu : linear.values) CHECK(std::abs(mu - 0.5) < 1e-3);
    CHECK(linear.max_value_spread < 1e-6);
    CHECK_THROWS_AS(uniqueness_probe(p, cfg, 1, std::nullopt), ValidationError);

    const UniquenessReport failing = uniqueness_probe(p, cfg, 2, std::array<double, 2>{-0.5, -0.1});
    CHECK_FALSE(failing.failures[0].empty());
    CHECK_FALSE(failing.failures[1].empty());
}

TEST_CASE("seeded starts are reproducible") {
    const Grid1D g(-12.0, 12.0, 512);
    CHECK(random_positive_init(g, 7, 2) == random_positive_init(g, 7, 2));
    CHECK(random_positive_init(g, 7, 2) != random_positive_init(g, 7, 3));
    CHECK(random_positive_init(g, 7, 2) != random_positive_init(g, 8, 2));
    for (double v : random_positive_init(g, 1, 0)) CHECK(v >= 0.0);
}

}
