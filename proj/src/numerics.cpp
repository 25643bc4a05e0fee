#include "infoqm/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "infoqm/error.hpp"

namespace infoqm {

Grid1D::Grid1D(double x_min, double x_max, std::size_t n_points)
    : x_min_(x_min), x_max_(x_max), n_points_(n_points), spacing_(0.0) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max))
        throw ValidationError("Grid1D: need finite x_min < x_max");
    if (n_points < 3) throw ValidationError("Grid1D: need at least 3 points");
    spacing_ = (x_max - x_min) / static_cast<double>(n_points - 1);
}

double Grid1D::operator[](std::size_t i) const {
    // Fill the lower half from x_min and the upper half from x_max so that
    // symmetric intervals give exactly mirrored abscissae.
    if (2 * i < n_points_ - 1) return x_min_ + static_cast<double>(i) * spacing_;
    if (2 * i == n_points_ - 1) return 0.5 * (x_min_ + x_max_);
    return x_max_ - static_cast<double>(n_points_ - 1 - i) * spacing_;
}

std::vector<double> Grid1D::points() const {
    return sample([](double x) { return x; });
}

QuadratureRule QuadratureRule::trapezoid(const Grid1D& grid) {
    QuadratureRule rule{QuadratureKind::trapezoid, grid.points(),
                        std::vector<double>(grid.size(), grid.spacing())};
    rule.weights.front() *= 0.5;
    rule.weights.back() *= 0.5;
    return rule;
}

QuadratureRule QuadratureRule::simpson(const Grid1D& grid) {
    const std::size_t n = grid.size();
    const double h = grid.spacing();
    QuadratureRule rule{QuadratureKind::simpson, grid.points(), std::vector<double>(n, 0.0)};
    auto& w = rule.weights;

    std::size_t intervals = n - 1;
    std::size_t simpson_end = (intervals % 2 == 0) ? intervals : intervals - 3;
    for (std::size_t i = 0; i + 2 <= simpson_end; i += 2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    if (simpson_end != intervals) {
        // Simpson's 3/8 rule on the last three intervals.
        const std::size_t i = simpson_end;
        w[i] += 3.0 * h / 8.0;
        w[i + 1] += 9.0 * h / 8.0;
        w[i + 2] += 9.0 * h / 8.0;
        w[i + 3] += 3.0 * h / 8.0;
    }
    return rule;
}

QuadratureRule QuadratureRule::gauss_hermite(std::size_t n) {
    if (n < 1 || n > 200) throw ValidationError("gauss_hermite: n must be in [1, 200]");
    QuadratureRule rule{QuadratureKind::gauss_hermite, std::vector<double>(n),
                        std::vector<double>(n)};
    if (n == 1) {
        rule.nodes[0] = 0.0;
        rule.weights[0] = std::sqrt(std::numbers::pi);
        return rule;
    }
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    Eigen::VectorXd sub(static_cast<Eigen::Index>(n - 1));
    for (std::size_t k = 1; k < n; ++k)
        sub[static_cast<Eigen::Index>(k - 1)] = std::sqrt(static_cast<double>(k) / 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const auto& vals = solver.eigenvalues();
    const auto& vecs = solver.eigenvectors();
    for (std::size_t i = 0; i < n; ++i) {
        const auto col = static_cast<Eigen::Index>(i);
        rule.nodes[i] = vals[col];
        rule.weights[i] = std::sqrt(std::numbers::pi) * vecs(0, col) * vecs(0, col);
    }
    // Eigenvalues come back ascending; symmetrize to remove solver noise.
    for (std::size_t i = 0; i < n / 2; ++i) {
        const std::size_t j = n - 1 - i;
        const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        const double wt = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.nodes[i] = -x;
        rule.nodes[j] = x;
        rule.weights[i] = rule.weights[j] = wt;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

EndpointRule EndpointRule::tanh_sinh(double lo, double hi, int level) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
        throw ValidationError("tanh_sinh: need finite lo < hi");
    if (level < 2 || level > 10) throw ValidationError("tanh_sinh: level must be in [2, 10]");

    const double half = 0.5 * (hi - lo);
    const double h = std::ldexp(1.0, -level);
    const double pi_2 = 0.5 * std::numbers::pi;
    // Beyond |u| = 300 both the weights and the endpoint gaps fall below
    // 1e-260 relative to the interval.
    const double t_max = std::asinh(300.0 / pi_2);
    const auto k_max = static_cast<long>(std::floor(t_max / h));

    EndpointRule rule;
    rule.lo = lo;
    rule.hi = hi;
    const std::size_t n = static_cast<std::size_t>(2 * k_max + 1);
    rule.nodes.reserve(n);
    rule.weights.reserve(n);
    rule.from_lo.reserve(n);
    rule.from_hi.reserve(n);
    rule.left_edge.assign(n, lo);
    rule.right_edge.assign(n, hi);
    for (long k = -k_max; k <= k_max; ++k) {
        const double t = static_cast<double>(k) * h;
        const double u = pi_2 * std::sinh(t);
        // 1 + tanh(u) and 1 - tanh(u) without cancellation.
        const double e = std::exp(-2.0 * std::abs(u));
        const double small = 2.0 * e / (1.0 + e);
        const double large = 2.0 / (1.0 + e);
        const double one_plus = u < 0 ? small : large;
        const double one_minus = u < 0 ? large : small;
        const double sech = 2.0 * std::sqrt(e) / (1.0 + e);
        rule.from_lo.push_back(half * one_plus);
        rule.from_hi.push_back(half * one_minus);
        rule.nodes.push_back(u < 0 ? lo + half * one_plus : hi - half * one_minus);
        rule.weights.push_back(half * h * pi_2 * std::cosh(t) * sech * sech);
    }
    return rule;
}

EndpointRule EndpointRule::tanh_sinh_split(double lo, double hi, std::span<const double> cuts,
                                           int level) {
    std::vector<double> edges{lo};
    std::vector<double> interior(cuts.begin(), cuts.end());
    std::sort(interior.begin(), interior.end());
    for (double c : interior)
        if (c > edges.back() && c < hi) edges.push_back(c);
    edges.push_back(hi);

    if (edges.size() == 2) return tanh_sinh(lo, hi, level);
    EndpointRule out;
    out.lo = lo;
    out.hi = hi;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        EndpointRule panel = tanh_sinh(edges[p], edges[p + 1], level);
        out.nodes.insert(out.nodes.end(), panel.nodes.begin(), panel.nodes.end());
        out.weights.insert(out.weights.end(), panel.weights.begin(), panel.weights.end());
        out.from_lo.insert(out.from_lo.end(), panel.from_lo.begin(), panel.from_lo.end());
        out.from_hi.insert(out.from_hi.end(), panel.from_hi.begin(), panel.from_hi.end());
        out.left_edge.insert(out.left_edge.end(), panel.left_edge.begin(), panel.left_edge.end());
        out.right_edge.insert(out.right_edge.end(), panel.right_edge.begin(),
                              panel.right_edge.end());
    }
    return out;
}

double EndpointRule::distance(std::size_t k, double point) const {
    if (point == left_edge[k]) return from_lo[k];
    if (point == right_edge[k]) return from_hi[k];
    return std::abs(nodes[k] - point);
}

double integrate(std::span<const double> samples, const QuadratureRule& rule) {
    if (samples.size() != rule.weights.size())
        throw ValidationError("integrate: " + std::to_string(samples.size()) +
                              " samples for a rule with " +
                              std::to_string(rule.weights.size()) + " nodes");
    double sum = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i]))
            throw NumericError("integrate: non-finite sample at node " + std::to_string(i));
        sum += rule.weights[i] * samples[i];
    }
    return sum;
}

namespace {

void check_hermite_order(int n) {
    if (n < 0 || n > kMaxHermiteOrder)
        throw DomainError("hermite: order " + std::to_string(n) + " outside [0, 64]");
}

}  // namespace

double hermite_eval(int n, double u) {
    check_hermite_order(n);
    if (n == 0) return 1.0;
    double prev = 1.0;
    double cur = 2.0 * u;
    for (int k = 1; k < n; ++k) {
        const double next = 2.0 * u * cur - 2.0 * k * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

double hermite_deriv(int n, double u) {
    check_hermite_order(n);
    if (n == 0) return 0.0;
    return 2.0 * n * hermite_eval(n - 1, u);
}

std::vector<double> hermite_coefficients(int n) {
    check_hermite_order(n);
    std::vector<double> prev{1.0};
    if (n == 0) return prev;
    std::vector<double> cur{0.0, 2.0};
    for (int k = 1; k < n; ++k) {
        std::vector<double> next(cur.size() + 1, 0.0);
        for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] += 2.0 * cur[i];
        for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= 2.0 * k * prev[i];
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

RootBracket RootBracket::make(const std::function<double(double)>& f, double lo, double hi) {
    if (!(lo < hi)) throw BracketError("bracket: need lo < hi");
    RootBracket b{lo, hi, f(lo), f(hi)};
    if (!std::isfinite(b.f_lo) || !std::isfinite(b.f_hi))
        throw NumericError("bracket: non-finite function value at an endpoint");
    if (b.f_lo * b.f_hi > 0.0)
        throw BracketError("bracket: no sign change on [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
    return b;
}

namespace {

struct Bisected {
    double lo, hi, f_lo, f_hi;
    bool exact;
    double root;
};

Bisected bisect(const std::function<double(double)>& f, const RootBracket& b, double tol) {
    if (!(tol > 0.0)) throw ValidationError("find_root: tol must be positive");
    if (!(b.lo < b.hi) || b.f_lo * b.f_hi > 0.0)
        throw BracketError("find_root: bracket has no sign change");
    if (b.f_lo == 0.0) return {b.lo, b.lo, 0.0, 0.0, true, b.lo};
    if (b.f_hi == 0.0) return {b.hi, b.hi, 0.0, 0.0, true, b.hi};

    double lo = b.lo, hi = b.hi, f_lo = b.f_lo, f_hi = b.f_hi;
    for (int it = 0; it < kRootMaxIterations; ++it) {
        if (hi - lo < tol) return {lo, hi, f_lo, f_hi, false, 0.0};
        const double mid = lo + 0.5 * (hi - lo);
        const double f_mid = f(mid);
        if (!std::isfinite(f_mid)) throw NumericError("find_root: non-finite value");
        if (f_mid == 0.0) return {mid, mid, 0.0, 0.0, true, mid};
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    if (hi - lo < tol) return {lo, hi, f_lo, f_hi, false, 0.0};
    throw ConvergenceError("find_root: bracket still wider than tol after " +
                           std::to_string(kRootMaxIterations) + " bisections");
}

}  // namespace

double find_root(const std::function<double(double)>& f, const RootBracket& bracket, double tol) {
    const Bisected r = bisect(f, bracket, tol);
    if (r.exact) return r.root;
    return r.lo + 0.5 * (r.hi - r.lo);
}

double find_root(const std::function<double(double)>& f,
                 const std::function<double(double)>& df, const RootBracket& bracket,
                 double tol) {
    const Bisected r = bisect(f, bracket, tol);
    if (r.exact) return r.root;
    double x = r.lo + 0.5 * (r.hi - r.lo);
    double fx = f(x);
    for (int it = 0; it < 8 && fx != 0.0; ++it) {
        const double d = df(x);
        if (d == 0.0 || !std::isfinite(d)) break;
        const double xn = x - fx / d;
        if (!(xn >= r.lo && xn <= r.hi)) break;
        const double fn = f(xn);
        if (!(std::abs(fn) < std::abs(fx))) break;
        x = xn;
        fx = fn;
    }
    return x;
}

std::vector<RootBracket> scan_sign_changes(const std::function<double(double)>& f, double lo,
                                           double hi, std::size_t panels) {
    if (!(lo < hi) || panels == 0) throw ValidationError("scan_sign_changes: bad interval");
    std::vector<RootBracket> out;
    const double step = (hi - lo) / static_cast<double>(panels);
    double x_prev = lo;
    double f_prev = f(lo);
    for (std::size_t i = 1; i <= panels; ++i) {
        const double x = (i == panels) ? hi : lo + static_cast<double>(i) * step;
        const double fx = f(x);
        if (!std::isfinite(fx)) throw NumericError("scan_sign_changes: non-finite value");
        // An exact zero is owned by the panel it closes.
        if ((f_prev != 0.0 && f_prev * fx < 0.0) || (fx == 0.0 && f_prev != 0.0) ||
            (i == 1 && f_prev == 0.0))
            out.push_back({x_prev, x, f_prev, fx});
        x_prev = x;
        f_prev = fx;
    }
    return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t CounterRng::bits(std::uint64_t stream, std::uint64_t counter) const {
    return splitmix64(seed_ ^ splitmix64(stream ^ splitmix64(counter)));
}

double CounterRng::uniform(std::uint64_t stream, std::uint64_t counter) const {
    return static_cast<double>(bits(stream, counter) >> 11) * 0x1.0p-53;
}

}  // namespace infoqm
