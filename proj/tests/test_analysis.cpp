#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "infoqm/analysis.hpp"
#include "infoqm/error.hpp"

using namespace infoqm;

namespace {

const BasisSet& log7() {
    static const BasisSet b = log_basis(7, default_analysis_grid());
    return b;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("inner products of closed-form states") {
    const BasisSet& b = log7();
    const Grid1D& g = b.grid;
    CHECK(std::abs(inner_product(g, b.members[0], g, b.members[0]) - 1.0) < 1e-8);
    CHECK(std::abs(inner_product(g, b.members[0], g, b.members[1])) < 1e-10);
    // 30-digit quadrature of the same closed forms.
    CHECK(std::abs(inner_product(g, b.members[0], g, b.members[2]) - 0.161186841568843) < 1e-10);
}

TEST_CASE("inner product rejects mismatched grids") {
    const Grid1D a(-5.0, 5.0, 101), c(-5.0, 5.0, 103);
    const std::vector<double> fa(101, 1.0), fc(103, 1.0);
    CHECK_THROWS_AS(inner_product(a, fa, c, fc), ValidationError);
    CHECK_THROWS_AS(inner_product(a, fa, a, fc), ValidationError);
}

TEST_CASE("linear eigenbasis is orthonormal") {
    const GramReport r = gram_matrix(linear_basis(5, default_analysis_grid()));
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) CHECK(std::abs(r.matrix[i][j] - (i == j ? 1.0 : 0.0)) < 1e-8);
}

TEST_CASE("log family Gram matrix") {
    const GramReport r = gram_matrix(log7(), 3);
    REQUIRE(r.matrix.size() == 8);
    CHECK(r.grid_points == 8001);
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(std::abs(r.matrix[i][i] - 1.0) < 1e-8);
        for (std::size_t j = 0; j < 8; ++j) {
            CHECK(r.matrix[i][j] == r.matrix[j][i]);
            if ((i + j) % 2) CHECK(std::abs(r.matrix[i][j]) < 1e-10);
        }
    }
    CHECK(r.matrix[0][2] > 0.1);
}

TEST_CASE("Gram entries are symmetric when computed independently") {
    const BasisSet& b = log7();
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = i + 1; j < 8; ++j)
            CHECK(std::abs(inner_product(b.grid, b.members[i], b.grid, b.members[j]) -
                           inner_product(b.grid, b.members[j], b.grid, b.members[i])) < 1e-12);
}

TEST_CASE("single member and invalid bases") {
    const BasisSet one = log_basis(0, default_analysis_grid());
    const GramReport r = gram_matrix(one);
    REQUIRE(r.matrix.size() == 1);
    CHECK(std::abs(r.matrix[0][0] - 1.0) < 1e-8);
    BasisSet empty{default_analysis_grid(), {}, {}};
    CHECK_THROWS_AS(gram_matrix(empty), ValidationError);
    BasisSet bad = one;
    bad.members[0][5] = NAN;
    CHECK_THROWS_AS(gram_matrix(bad), ValidationError);
}

TEST_CASE("orthogonality multiplier") {
    const Grid1D g = default_analysis_grid();
    CHECK(std::abs(mu0_estimate(solve_state(0), solve_state(1), g)) < 1e-8);
    CHECK(std::abs(mu0_estimate(solve_state(1), solve_state(2), g)) < 1e-8);
    CHECK(std::abs(mu0_estimate(linear_state(0), linear_state(1), g, ResidualKind::linear)) < 1e-10);
}

TEST_CASE("multiplier equals -2 k beta times the overlap") {
    const BasisSet& b = log7();
    const GramReport gram = gram_matrix(b);
    for (int m = 0; m <= 7; ++m)
        for (int n = 0; n <= 7; ++n) {
            const OscillatorState sn = solve_state(n);
            const double expect = -2.0 * sn.k * sn.beta * gram.matrix[m][n];
            CHECK(std::abs(mu0_estimate(solve_state(m), sn, b.grid) - expect) < 1e-8);
        }
}

TEST_CASE("energy ordering") {
    std::vector<OscillatorState> states;
    for (int n = 0; n <= 7; ++n) states.push_back(solve_state(n));
    CHECK(energy_ordering_check(states));
    std::vector<OscillatorState> shuffled = states;
    std::swap(shuffled[2], shuffled[5]);
    CHECK_FALSE(energy_ordering_check(shuffled));
    CHECK(energy_ordering_check(std::span<const OscillatorState>(states.data(), 1)));
    CHECK(energy_ordering_check({}));
}

TEST_CASE("projection of a span member") {
    const BasisSet& b = log7();
    const std::vector<int> orders{1, 2, 3, 4, 5, 6, 7, 8};
    const ProjectionReport r = completeness_projection(b.members[3], "psi3", b, orders);
    REQUIRE(r.residuals.size() == 8);
    CHECK(r.residuals[2] > 0.1);
    for (std::size_t i = 3; i < 8; ++i) CHECK(r.residuals[i] < 1e-8);
    CHECK(std::abs(r.coefficients[3][3] - 1.0) < 1e-8);
    for (double c : r.condition_numbers) CHECK(c >= 1.0);
}

TEST_CASE("projection of x exp(-x^2/2)") {
    const BasisSet& b = log7();
    const std::vector<double> target = b.grid.sample([](double x) { return x * std::exp(-0.5 * x * x); });
    const std::vector<int> orders{2, 4, 8};
    const ProjectionReport r = completeness_projection(target, "x gauss", b, orders);
    // Dense least-squares on the same grid.
    const double oracle[] = {0.520896128252, 0.07481959286, 0.00553790071649};
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(r.residuals[i] / oracle[i] - 1.0) < 1e-8);
}

TEST_CASE("projection edge cases") {
    const BasisSet& b = log7();
    const ProjectionReport empty = completeness_projection(b.members[0], "psi0", b, {});
    CHECK(empty.orders.empty());
    CHECK(empty.residuals.empty());
    const std::vector<int> too_big{9};
    CHECK_THROWS_AS(completeness_projection(b.members[0], "psi0", b, too_big), ValidationError);
    const std::vector<double> short_target(10, 0.0);
    const std::vector<int> one{1};
    CHECK_THROWS_AS(completeness_projection(short_target, "t", b, one), ValidationError);
}

TEST_CASE("ill-conditioned basis keeps the partial report") {
    BasisSet b = log_basis(2, default_analysis_grid());
    b.members.push_back(b.members[0]);
    b.labels.push_back("dup");
    const std::vector<int> orders{2, 3, 4};
    try {
        completeness_projection(b.members[1], "psi1", b, orders);
        FAIL("expected IllConditionedError");
    } catch (const IllConditionedError& e) {
        CHECK(e.partial.orders == std::vector<int>{2, 3});
        CHECK(e.partial.residuals.size() == 2);
    }
}

}
