#include <doctest.h>

#include <cmath>
#include <numbers>

#include "infoqm/error.hpp"
#include "infoqm/series.hpp"

using namespace infoqm;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace

TEST_SUITE("series") {

TEST_CASE("polynomial re-expansion") {
    const std::vector<double> x2{0.0, 0.0, 1.0};
    CHECK(poly_taylor_coeffs(x2, 0.0).coefficients == std::vector<double>{0.0, 0.0, 1.0});
    CHECK(poly_taylor_coeffs(x2, 1.0).coefficients == std::vector<double>{1.0, 2.0, 1.0});
    const std::vector<double> h3{0.0, -12.0, 0.0, 8.0};
    CHECK(poly_taylor_coeffs(h3, 0.0).coefficients == h3);

    const std::vector<double> p{1.5, -2.0, 0.25, 3.0, -0.5, 0.125};
    const PowerSeries1D s = poly_taylor_coeffs(p, 0.7);
    for (int k = 0; k < 20; ++k) {
        const double x = -2.0 + 0.2 * k;
        double direct = 0.0;
        for (std::size_t i = p.size(); i-- > 0;) direct = direct * x + p[i];
        CHECK(std::abs(s(x) - direct) <= 1e-12 * std::max(1.0, std::abs(direct)));
    }
    CHECK_THROWS_AS(poly_taylor_coeffs(std::vector<double>(34, 1.0), 0.0), ValidationError);
}

TEST_CASE("remainder scan for exp") {
    const DerivativeOracle f = [](int, double x) { return std::exp(x); };
    const std::vector<int> orders{2, 4, 8};
    const RemainderReport r = taylor_remainder_scan(f, 0.0, orders, Grid1D(-1.0, 1.0, 201));
    REQUIRE(r.sup_remainders.size() == 3);
    for (std::size_t i = 0; i < orders.size(); ++i) {
        double tn = 0.0;
        for (int m = 0; m <= orders[i]; ++m) tn += 1.0 / factorial(m);
        CHECK(std::abs(r.sup_remainders[i] - (std::numbers::e - tn)) < 1e-13);
    }
    CHECK(r.sup_remainders[0] < std::numbers::e / 6.0);
    CHECK(r.sup_remainders[1] < r.sup_remainders[0]);
    CHECK(r.sup_remainders[2] < r.sup_remainders[1]);
}

TEST_CASE("remainder of a cubic vanishes at order 3") {
    const DerivativeOracle f = [](int k, double x) {
        switch (k) {
        case 0: return 2.0 + x - 3.0 * x * x + 0.5 * x * x * x;
        case 1: return 1.0 - 6.0 * x + 1.5 * x * x;
        case 2: return -6.0 + 3.0 * x;
        case 3: return 3.0;
        default: return 0.0;
        }
    };
    const std::vector<int> orders{3};
    CHECK(taylor_remainder_scan(f, 0.0, orders, Grid1D(-2.0, 2.0, 41)).sup_remainders[0] < 1e-13);
}

TEST_CASE("geometric decay for 1/(1+x)") {
    const DerivativeOracle f = [](int k, double x) {
        return (k % 2 ? -1.0 : 1.0) * factorial(k) / std::pow(1.0 + x, k + 1);
    };
    const std::vector<int> orders{2, 3, 4, 5, 6, 7, 8};
    const RemainderReport r = taylor_remainder_scan(f, 0.0, orders, Grid1D(-0.5, 0.5, 101));
    for (std::size_t i = 1; i < orders.size(); ++i)
        CHECK(r.sup_remainders[i] / r.sup_remainders[i - 1] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("remainders are nonincreasing for entire functions") {
    const std::vector<int> orders{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    const Grid1D probe(-1.5, 1.5, 121);
    const DerivativeOracle e = [](int, double x) { return std::exp(x); };
    const DerivativeOracle ch = [](int k, double x) { return k % 2 ? std::sinh(x) : std::cosh(x); };
    const DerivativeOracle c = [](int k, double x) {
        const double v[] = {std::cos(x), -std::sin(x), -std::cos(x), std::sin(x)};
        return v[k % 4];
    };
    for (const DerivativeOracle& f : {e, ch, c}) {
        const RemainderReport r = taylor_remainder_scan(f, 0.0, orders, probe);
        for (std::size_t i = 1; i < orders.size(); ++i) CHECK(r.sup_remainders[i] <= r.sup_remainders[i - 1]);
    }
    // Off-center expansions of oscillating functions need not be monotone.
    const RemainderReport shifted = taylor_remainder_scan(c, 0.2, orders, probe);
    CHECK(shifted.sup_remainders[3] > shifted.sup_remainders[2]);
}

TEST_CASE("binomial series examples") {
    const SeriesSum g = binomial_series_eval(1.0, -1.0, 0.5, 60);
    CHECK(std::abs(g.partial_sum - 2.0 / 3.0) < 1e-8);
    CHECK(g.convergent);
    const SeriesSum sq = binomial_series_eval(1.0, 2.0, 0.3, 3);
    CHECK(sq.partial_sum == doctest::Approx(1.69).epsilon(1e-15));
    CHECK(sq.convergent);
    CHECK_FALSE(binomial_series_eval(2.0, -1.0, 0.8, 10).convergent);
    CHECK(binomial_coefficient(-1.0, 5) == -1.0);
    CHECK(binomial_coefficient(0.5, 2) == doctest::Approx(-0.125));
    CHECK_THROWS_AS(binomial_series_eval(1.0, -1.0, 0.5, 201), ValidationError);
    CHECK_THROWS_AS(binomial_series_eval(1.0, -1.0, 0.5, -1), ValidationError);
}

TEST_CASE("convergence predicate agrees with the partial sums") {
    const auto inside = series_probe([](int n) { return binomial_series_eval(1.0, -1.0, 0.9, n); }, 200);
    CHECK(inside.back().cauchy_diff < 1e-8);
    CHECK(binomial_series_eval(1.0, -1.0, 0.9, 200).convergent);
    const auto outside = series_probe([](int n) { return binomial_series_eval(1.0, -1.0, 1.1, n); }, 200);
    CHECK(outside.back().cauchy_diff > 1e7);
    for (std::size_t i = 1; i < outside.size(); ++i) CHECK(outside[i].cauchy_diff > outside[i - 1].cauchy_diff);
    CHECK_FALSE(binomial_series_eval(1.0, -1.0, 1.1, 200).convergent);
}

TEST_CASE("two-variable series") {
    const SeriesSum e = two_var_series_eval(TwoVarSeries::exp_xy, 1.0, 1.0, 30);
    CHECK(std::abs(e.partial_sum - std::numbers::e) < 1e-9);
    CHECK(e.convergent);
    CHECK(two_var_series_eval(TwoVarSeries::exp_xy, 10.0, 10.0, 5).convergent);
    const SeriesSum b = two_var_series_eval(TwoVarSeries::binomial_xy, 0.5, 0.5, 60, -1.0);
    CHECK(std::abs(b.partial_sum - 0.8) < 1e-8);
    CHECK_FALSE(two_var_series_eval(TwoVarSeries::binomial_xy, 2.0, 1.0, 10, -1.0).convergent);
}

TEST_CASE("series_probe rows") {
    const auto rows = series_probe([](int n) { return binomial_series_eval(1.0, -1.0, 0.5, n); }, 3);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].n == 0);
    CHECK(rows[0].partial_sum == 1.0);
    CHECK(rows[3].partial_sum == 0.625);
    CHECK(rows[3].cauchy_diff == 0.125);
}

TEST_CASE("taylor2 coefficients") {
    const PowerSeries2D e = taylor2_coeffs([](double x, double y) { return std::exp(x * y); }, 4, 0.02);
    CHECK(std::abs(e.coefficients[1][1] - 1.0) < 1e-6);
    CHECK(std::abs(e.coefficients[2][2] - 0.5) < 1e-6);
    CHECK(std::abs(e.coefficients[1][0]) < 1e-6);
    CHECK(std::abs(e.coefficients[0][0] - 1.0) < 1e-12);

    const PowerSeries2D m = taylor2_coeffs([](double x, double y) { return x * x * y; }, 4, 0.02);
    for (int i = 0; i <= 4; ++i)
        for (int j = 0; i + j <= 4; ++j)
            CHECK(std::abs(m.coefficients[i][j] - (i == 2 && j == 1 ? 1.0 : 0.0)) < 1e-6);

    const PowerSeries2D g = taylor2_coeffs([](double x, double y) { return 1.0 / (1.0 + x * y); }, 4, 0.02);
    CHECK(std::abs(g.coefficients[1][1] + 1.0) < 1e-6);
    CHECK(std::abs(g.coefficients[2][2] - 1.0) < 1e-6);
}

TEST_CASE("taylor2 recovers polynomial coefficients") {
    auto poly = [](double x, double y) {
        return 0.3 - 1.2 * x + 0.7 * y + 2.0 * x * x - 0.4 * x * y + 1.1 * y * y + 0.9 * x * x * x -
               0.6 * x * x * y + 0.2 * x * y * y * y - 1.5 * y * y * y * y;
    };
    const PowerSeries2D p = taylor2_coeffs(poly, 4, 0.02);
    const double expect[5][5] = {{0.3, 0.7, 1.1, 0.0, -1.5},
                                 {-1.2, -0.4, 0.0, 0.2, 0.0},
                                 {2.0, -0.6, 0.0, 0.0, 0.0},
                                 {0.9, 0.0, 0.0, 0.0, 0.0},
                                 {0.0, 0.0, 0.0, 0.0, 0.0}};
    for (int i = 0; i <= 4; ++i)
        for (int j = 0; i + j <= 4; ++j) CHECK(std::abs(p.coefficients[i][j] - expect[i][j]) < 1e-6);
    CHECK(std::abs(p(0.1, -0.2) - poly(0.1, -0.2)) < 1e-6);
}

TEST_CASE("taylor2 validation") {
    auto f = [](double x, double y) { return x + y; };
    CHECK_THROWS_AS(taylor2_coeffs(f, 2, 1e-7), ValidationError);
    CHECK_THROWS_AS(taylor2_coeffs(f, 2, 0.2), ValidationError);
    CHECK_THROWS_AS(taylor2_coeffs(f, 7, 0.05), ValidationError);
}

TEST_CASE("radial stationary points") {
    ExpFamilyDensity2D::Coefficients gauss{};
    gauss[2][0] = 1.0;
    gauss[0][2] = 1.0;
    const ExpFamilyDensity2D g = ExpFamilyDensity2D::normalized(gauss, -4.0, 4.0, -4.0, 4.0);
    for (double theta : {0.0, 0.7, 2.0}) {
        const RadialStationaryPoint p = radial_stationary_point(g, theta, 3.0);
        CHECK(p.r == 0.0);
        CHECK(p.kind == RadialKind::max);
    }

    ExpFamilyDensity2D::Coefficients ring{};
    ring[4][0] = 1.0;
    ring[0][4] = 1.0;
    ring[2][2] = 2.0;
    ring[2][0] = -1.0;
    ring[0][2] = -1.0;
    const ExpFamilyDensity2D r = ExpFamilyDensity2D::normalized(ring, -3.0, 3.0, -3.0, 3.0);
    const RadialStationaryPoint p = radial_stationary_point(r, 0.0, 2.5);
    CHECK(std::abs(p.r - 1.0 / std::sqrt(2.0)) < 1e-10);
    CHECK(p.kind == RadialKind::max);

    const ExpFamilyDensity2D flat = ExpFamilyDensity2D::normalized({}, -1.0, 1.0, -1.0, 1.0);
    CHECK_THROWS_AS(radial_stationary_point(flat, 0.0, 0.5), NotFoundError);

    ExpFamilyDensity2D::Coefficients tilt{};
    tilt[1][0] = 1.0;
    const ExpFamilyDensity2D t = ExpFamilyDensity2D::normalized(tilt, -1.0, 1.0, -1.0, 1.0);
    CHECK_THROWS_AS(radial_stationary_point(t, 0.0, 0.5), NotFoundError);
    CHECK_THROWS_AS(radial_stationary_point(g, 0.0, 10.0), DomainError);
}

}
