#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "infoqm/maxent.hpp"
#include "infoqm/numerics.hpp"

namespace infoqm {

/// sum_i c_i (x - center)^i
struct PowerSeries1D {
    double center = 0.0;
    std::vector<double> coefficients;
    double radius = std::numeric_limits<double>::infinity();

    double operator()(double x) const;
};

inline constexpr int kMaxTaylorPolyDegree = 32;

/// Re-expands a polynomial given in powers of x about x0.
PowerSeries1D poly_taylor_coeffs(std::span<const double> poly, double x0);

/// f^{(order)}(x)
using DerivativeOracle = std::function<double(int order, double x)>;

struct RemainderReport {
    std::vector<int> orders;
    /// sup over the probe grid of |f - T_N| for each N in `orders`.
    std::vector<double> sup_remainders;
};

/// Sup-norm Taylor remainders about x0 for every truncation order listed.
RemainderReport taylor_remainder_scan(const DerivativeOracle& f, double x0,
                                      std::span<const int> orders, const Grid1D& probe);

struct SeriesSum {
    double partial_sum;
    /// Analytic predicate, not an empirical test.
    bool convergent;
    /// |S_N - S_{N-1}|, the last Cauchy difference.
    double last_difference;
};

inline constexpr int kMaxSeriesTerms = 200;

/// Generalized binomial coefficient C(k, m) for real k.
double binomial_coefficient(double k, int m);

/// sum_{m<=N} C(k, m) (a x)^m; convergent iff |a x| < 1.
SeriesSum binomial_series_eval(double a, double k, double x, int n_terms);

enum class TwoVarSeries { binomial_xy, exp_xy };

/// binomial_xy: sum C(k, m) (x y)^m, convergent iff |x y| < 1.
/// exp_xy: sum (x y)^m / m!, convergent everywhere. `k` is ignored for exp_xy.
SeriesSum two_var_series_eval(TwoVarSeries kind, double x, double y, int n_terms,
                              double k = -1.0);

/// Partial sums S_0..S_N of a series probe, for the CSV emitter.
struct SeriesProbeRow {
    int n;
    double partial_sum;
    double cauchy_diff;
};
std::vector<SeriesProbeRow> series_probe(const std::function<SeriesSum(int)>& eval, int n_max);

/// Coefficients a_ij for i + j <= N.
struct PowerSeries2D {
    int order = 0;
    /// coefficients[i][j] multiplies x^i y^j; zero when i + j > order.
    std::vector<std::vector<double>> coefficients;

    double operator()(double x, double y) const;
};

inline constexpr int kMaxTaylor2Order = 6;

/// a_ij = (1/(i! j!)) d^{i+j} f / dx^i dy^j at the origin by nested central
/// differences of step h, Richardson-extrapolated against step h/2.
PowerSeries2D taylor2_coeffs(const std::function<double(double, double)>& f, int order, double h);

enum class RadialKind { max, min, saddle_along_ray };

struct RadialStationaryPoint {
    double r;
    RadialKind kind;
};

/// Stationary point of ln rho along the ray (r cos theta, r sin theta),
/// 0 <= r <= r_max. When several exist the one with the largest density is
/// returned. NotFoundError when there is none or when ln rho is constant
/// along the ray.
RadialStationaryPoint radial_stationary_point(const ExpFamilyDensity2D& d, double theta,
                                              double r_max);

}  // namespace infoqm
