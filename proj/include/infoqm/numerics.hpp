#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace infoqm {

/// Uniform grid on [x_min, x_max] including both endpoints.
class Grid1D {
public:
    Grid1D(double x_min, double x_max, std::size_t n_points);

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    std::size_t size() const { return n_points_; }
    double spacing() const { return spacing_; }

    /// i-th abscissa; computed so that the grid is mirror-symmetric whenever
    /// the interval is.
    double operator[](std::size_t i) const;

    std::vector<double> points() const;

    template <class F>
    std::vector<double> sample(F&& f) const {
        std::vector<double> out(n_points_);
        for (std::size_t i = 0; i < n_points_; ++i) out[i] = f((*this)[i]);
        return out;
    }

    bool operator==(const Grid1D&) const = default;

private:
    double x_min_;
    double x_max_;
    std::size_t n_points_;
    double spacing_;
};

enum class QuadratureKind { trapezoid, simpson, gauss_hermite };

/// Nodes and weights of a fixed quadrature rule. For gauss_hermite the
/// weight function e^{-u^2} is folded into the weights, so the rule
/// integrates f(u) e^{-u^2} from samples of f alone.
struct QuadratureRule {
    QuadratureKind kind;
    std::vector<double> nodes;
    std::vector<double> weights;

    static QuadratureRule trapezoid(const Grid1D& grid);
    /// Composite Simpson; an even point count closes with a 3/8 panel.
    static QuadratureRule simpson(const Grid1D& grid);
    /// Golub-Welsch nodes for the physicists' weight, n in [1, 200].
    static QuadratureRule gauss_hermite(std::size_t n);
};

/// Tanh-sinh rule on a finite interval, possibly made of several panels.
/// Besides nodes it keeps the exact distance of each node to both edges of
/// its panel, which stays accurate where `hi - node` would round to zero;
/// integrands with endpoint zeros or integrable singularities need it.
struct EndpointRule {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> from_lo;
    std::vector<double> from_hi;
    std::vector<double> left_edge;
    std::vector<double> right_edge;

    /// Distance from node k to `point`, exact when `point` is a panel edge.
    double distance(std::size_t k, double point) const;

    static EndpointRule tanh_sinh(double lo, double hi, int level = 7);
    /// Concatenated tanh-sinh panels split at the given interior points.
    static EndpointRule tanh_sinh_split(double lo, double hi, std::span<const double> cuts,
                                        int level = 7);

    std::size_t size() const { return nodes.size(); }
};

/// Quadrature of samples taken at `rule.nodes`. Throws NumericError on a
/// non-finite sample and ValidationError on a size mismatch.
double integrate(std::span<const double> samples, const QuadratureRule& rule);

template <class F>
double integrate(F&& f, const QuadratureRule& rule) {
    std::vector<double> s(rule.nodes.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = f(rule.nodes[i]);
    return integrate(std::span<const double>(s), rule);
}

inline constexpr int kMaxHermiteOrder = 64;

/// Physicists' Hermite polynomial H_n(u) by three-term recurrence.
double hermite_eval(int n, double u);
/// H_n'(u) = 2n H_{n-1}(u).
double hermite_deriv(int n, double u);

/// Power-form coefficients of H_n (index i multiplies u^i).
std::vector<double> hermite_coefficients(int n);

struct RootBracket {
    double lo;
    double hi;
    double f_lo;
    double f_hi;

    /// Evaluates f at both ends; throws BracketError without a sign change.
    static RootBracket make(const std::function<double(double)>& f, double lo, double hi);
};

inline constexpr int kRootMaxIterations = 200;

/// Bisection to a bracket narrower than `tol`; ConvergenceError when the
/// iteration cap is hit first.
double find_root(const std::function<double(double)>& f, const RootBracket& bracket, double tol);

/// Bisection followed by a Newton polish that is only accepted while it
/// stays inside the final bracket and lowers |f|.
double find_root(const std::function<double(double)>& f,
                 const std::function<double(double)>& df, const RootBracket& bracket,
                 double tol);

/// Brackets of every sign change of f over `panels` equal panels of [lo, hi].
std::vector<RootBracket> scan_sign_changes(const std::function<double(double)>& f, double lo,
                                           double hi, std::size_t panels);

/// Counter-based generator: the value depends only on (seed, stream, counter),
/// never on call order.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const;
    /// Uniform double in [0, 1).
    double uniform(std::uint64_t stream, std::uint64_t counter) const;

private:
    std::uint64_t seed_;
};

}  // namespace infoqm
