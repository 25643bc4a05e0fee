#include "infoqm/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "infoqm/error.hpp"

namespace infoqm {

double PowerSeries1D::operator()(double x) const {
    double acc = 0.0;
    const double t = x - center;
    for (std::size_t i = coefficients.size(); i-- > 0;) acc = acc * t + coefficients[i];
    return acc;
}

PowerSeries1D poly_taylor_coeffs(std::span<const double> poly, double x0) {
    if (poly.size() > static_cast<std::size_t>(kMaxTaylorPolyDegree) + 1)
        throw ValidationError("poly_taylor_coeffs: degree above 32");
    PowerSeries1D out;
    out.center = x0;
    out.coefficients.assign(poly.begin(), poly.end());
    if (out.coefficients.empty()) out.coefficients.push_back(0.0);
    // Repeated synthetic division by (x - x0): after pass k, entry k holds
    // p^{(k)}(x0) / k!.
    auto& c = out.coefficients;
    const std::size_t n = c.size();
    for (std::size_t k = 0; k + 1 < n; ++k)
        for (std::size_t i = n - 1; i > k; --i) c[i - 1] += x0 * c[i];
    return out;
}

RemainderReport taylor_remainder_scan(const DerivativeOracle& f, double x0,
                                      std::span<const int> orders, const Grid1D& probe) {
    RemainderReport report;
    if (orders.empty()) return report;
    const int top = *std::max_element(orders.begin(), orders.end());
    if (*std::min_element(orders.begin(), orders.end()) < 0)
        throw ValidationError("taylor_remainder_scan: orders must be non-negative");

    std::vector<double> coef(static_cast<std::size_t>(top) + 1);
    double factorial = 1.0;
    for (int i = 0; i <= top; ++i) {
        if (i > 0) factorial *= i;
        coef[static_cast<std::size_t>(i)] = f(i, x0) / factorial;
    }
    const std::vector<double> xs = probe.points();
    std::vector<double> values(xs.size());
    for (std::size_t p = 0; p < xs.size(); ++p) values[p] = f(0, xs[p]);

    for (int order : orders) {
        double sup = 0.0;
        for (std::size_t p = 0; p < xs.size(); ++p) {
            const double t = xs[p] - x0;
            double partial = 0.0;
            for (int i = order; i >= 0; --i) partial = partial * t + coef[static_cast<std::size_t>(i)];
            sup = std::max(sup, std::abs(values[p] - partial));
        }
        report.orders.push_back(order);
        report.sup_remainders.push_back(sup);
    }
    return report;
}

double binomial_coefficient(double k, int m) {
    double c = 1.0;
    for (int l = 0; l < m; ++l) c *= (k - l) / (l + 1);
    return c;
}

namespace {

void check_terms(int n_terms) {
    if (n_terms < 0 || n_terms > kMaxSeriesTerms)
        throw ValidationError("series: term count must be in [0, 200], got " +
                              std::to_string(n_terms));
}

SeriesSum binomial_sum(double k, double z, int n_terms) {
    double term = 1.0;
    double sum = 1.0;
    double last = 1.0;
    for (int m = 1; m <= n_terms; ++m) {
        term *= (k - (m - 1)) / m * z;
        sum += term;
        last = std::abs(term);
    }
    return {sum, std::abs(z) < 1.0, last};
}

}  // namespace

SeriesSum binomial_series_eval(double a, double k, double x, int n_terms) {
    check_terms(n_terms);
    return binomial_sum(k, a * x, n_terms);
}

SeriesSum two_var_series_eval(TwoVarSeries kind, double x, double y, int n_terms, double k) {
    check_terms(n_terms);
    const double z = x * y;
    if (kind == TwoVarSeries::binomial_xy) return binomial_sum(k, z, n_terms);
    double term = 1.0;
    double sum = 1.0;
    double last = 1.0;
    for (int m = 1; m <= n_terms; ++m) {
        term *= z / m;
        sum += term;
        last = std::abs(term);
    }
    return {sum, true, last};
}

std::vector<SeriesProbeRow> series_probe(const std::function<SeriesSum(int)>& eval, int n_max) {
    check_terms(n_max);
    std::vector<SeriesProbeRow> rows;
    double prev = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        const double s = eval(n).partial_sum;
        rows.push_back({n, s, std::abs(s - prev)});
        prev = s;
    }
    return rows;
}

double PowerSeries2D::operator()(double x, double y) const {
    double acc = 0.0;
    double xp = 1.0;
    for (int i = 0; i <= order; ++i) {
        double yp = 1.0;
        for (int j = 0; i + j <= order; ++j) {
            acc += coefficients[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * xp * yp;
            yp *= y;
        }
        xp *= x;
    }
    return acc;
}

namespace {

/// Second-order central stencil for the m-th derivative on integer offsets
/// -p..p (unit step).
std::vector<double> central_stencil(int m) {
    const int p = (m + 1) / 2;
    const int size = 2 * p + 1;
    Eigen::MatrixXd vander(size, size);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);
    for (int q = 0; q < size; ++q)
        for (int k = 0; k < size; ++k) vander(q, k) = std::pow(static_cast<double>(k - p), q);
    double factorial = 1.0;
    for (int l = 2; l <= m; ++l) factorial *= l;
    rhs[m] = factorial;
    const Eigen::VectorXd w = vander.fullPivLu().solve(rhs);
    return {w.data(), w.data() + size};
}

double mixed_derivative(const std::function<double(double, double)>& f, int i, int j, double h,
                        const std::vector<double>& wx, const std::vector<double>& wy) {
    const int px = static_cast<int>(wx.size() / 2);
    const int py = static_cast<int>(wy.size() / 2);
    double acc = 0.0;
    for (int k = -px; k <= px; ++k) {
        const double cx = wx[static_cast<std::size_t>(k + px)];
        if (cx == 0.0) continue;
        for (int l = -py; l <= py; ++l) {
            const double cy = wy[static_cast<std::size_t>(l + py)];
            if (cy == 0.0) continue;
            acc += cx * cy * f(k * h, l * h);
        }
    }
    return acc / std::pow(h, i + j);
}

}  // namespace

PowerSeries2D taylor2_coeffs(const std::function<double(double, double)>& f, int order, double h) {
    if (order < 0 || order > kMaxTaylor2Order)
        throw ValidationError("taylor2_coeffs: order must be in [0, 6]");
    if (!(h > 1e-6 && h < 1e-1)) throw ValidationError("taylor2_coeffs: step must lie in (1e-6, 1e-1)");

    std::vector<std::vector<double>> stencils;
    for (int m = 0; m <= order; ++m) stencils.push_back(central_stencil(m));

    PowerSeries2D out;
    out.order = order;
    out.coefficients.assign(static_cast<std::size_t>(order) + 1,
                            std::vector<double>(static_cast<std::size_t>(order) + 1, 0.0));
    double fact_i = 1.0;
    for (int i = 0; i <= order; ++i) {
        if (i > 0) fact_i *= i;
        double fact_j = 1.0;
        for (int j = 0; i + j <= order; ++j) {
            if (j > 0) fact_j *= j;
            const auto& wx = stencils[static_cast<std::size_t>(i)];
            const auto& wy = stencils[static_cast<std::size_t>(j)];
            const double coarse = mixed_derivative(f, i, j, h, wx, wy);
            const double fine = mixed_derivative(f, i, j, 0.5 * h, wx, wy);
            const double extrapolated = fine + (fine - coarse) / 3.0;
            out.coefficients[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                extrapolated / (fact_i * fact_j);
        }
    }
    return out;
}

RadialStationaryPoint radial_stationary_point(const ExpFamilyDensity2D& d, double theta,
                                              double r_max) {
    if (!(r_max > 0.0) || !std::isfinite(r_max) || !std::isfinite(theta))
        throw ValidationError("radial_stationary_point: need finite theta and r_max > 0");
    const double c = std::cos(theta), s = std::sin(theta);
    const double x_end = r_max * c, y_end = r_max * s;
    if (x_end < d.x_lo() || x_end > d.x_hi() || y_end < d.y_lo() || y_end > d.y_hi() ||
        0.0 < d.x_lo() || 0.0 > d.x_hi() || 0.0 < d.y_lo() || 0.0 > d.y_hi())
        throw DomainError("radial_stationary_point: ray leaves the density's rectangle");

    // ln rho(r) = const + sum_{n>=1} q_n r^n along the ray.
    std::array<double, kMaxTotalDegree2D + 1> q{};
    for (int i = 0; i <= kMaxTotalDegree2D; ++i)
        for (int j = 0; i + j <= kMaxTotalDegree2D; ++j)
            if (i + j > 0) q[static_cast<std::size_t>(i + j)] -= d.coefficient(i, j) * std::pow(c, i) * std::pow(s, j);

    double scale = 0.0;
    for (int n = 1; n <= kMaxTotalDegree2D; ++n)
        scale = std::max(scale, std::abs(q[static_cast<std::size_t>(n)]) * std::pow(r_max, n));
    if (scale < 1e-13) throw NotFoundError("radial_stationary_point: ln rho is constant along the ray");

    auto value = [&](double r) {
        double acc = 0.0;
        for (int n = kMaxTotalDegree2D; n >= 1; --n) acc = (acc + q[static_cast<std::size_t>(n)]) * r;
        return acc;
    };
    auto slope = [&](double r) {
        double acc = 0.0;
        for (int n = kMaxTotalDegree2D; n >= 1; --n) acc = acc * r + n * q[static_cast<std::size_t>(n)];
        return acc;
    };
    auto curvature = [&](double r) {
        double acc = 0.0;
        for (int n = kMaxTotalDegree2D; n >= 2; --n)
            acc = acc * r + n * (n - 1) * q[static_cast<std::size_t>(n)];
        return acc;
    };

    const double slope_tol = 1e-12 * scale / r_max;
    std::vector<double> candidates;
    if (std::abs(slope(0.0)) <= slope_tol) candidates.push_back(0.0);
    for (const RootBracket& b : scan_sign_changes(slope, 0.0, r_max, 2000)) {
        if (b.lo == 0.0 && b.f_lo == 0.0) continue;
        candidates.push_back(find_root(slope, curvature, b, 1e-13 * r_max));
    }
    if (candidates.empty())
        throw NotFoundError("radial_stationary_point: no stationary point in [0, r_max]");

    const double best = *std::max_element(candidates.begin(), candidates.end(),
                                           [&](double a, double b) { return value(a) < value(b); });
    const double curv = curvature(best);
    const double curv_tol = 1e-10 * scale / (r_max * r_max);
    RadialKind kind = RadialKind::saddle_along_ray;
    if (curv < -curv_tol) kind = RadialKind::max;
    else if (curv > curv_tol) kind = RadialKind::min;
    return {best, kind};
}

}  // namespace infoqm
