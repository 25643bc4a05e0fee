#include "infoqm/maxent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include <Eigen/Dense>

#include "infoqm/error.hpp"

namespace infoqm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kLevel1D = 6;
constexpr int kLevel2D = 5;
constexpr double kWindowSigmas = 12.0;
constexpr double kMaxTailMass = 1e-12;
constexpr int kWindowAttempts = 4;

double ipow(double x, int n) {
    double r = 1.0;
    for (int k = 0; k < n; ++k) r *= x;
    return r;
}

/// sum_{i>=1} a_i x^i by Horner.
double poly_tail(const std::vector<double>& a, double x) {
    double acc = 0.0;
    for (std::size_t i = a.size(); i-- > 1;) acc = (acc + a[i]) * x;
    return acc;
}

double poly_tail_slope(const std::vector<double>& a, double x) {
    double acc = 0.0;
    for (std::size_t i = a.size(); i-- > 1;) acc = acc * x + static_cast<double>(i) * a[i];
    return acc;
}

/// Range of x^i over [lo, hi] with possibly infinite ends.
std::pair<double, double> power_range(int order, double lo, double hi) {
    auto pw = [order](double x) {
        if (std::isinf(x)) return (order % 2 == 0 || x > 0) ? kInf : -kInf;
        return ipow(x, order);
    };
    if (order % 2 == 1) return {pw(lo), pw(hi)};
    const double a = pw(lo), b = pw(hi);
    const double mn = (lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(a, b);
    return {mn, std::max(a, b)};
}

bool positive_definite(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() > 0.0;
}

void check_feasibility_1d(const MomentSpec1D& spec) {
    std::map<int, double> c;
    for (const auto& mc : spec.constraints) c[mc.order] = mc.value;
    c[0] = 1.0;
    for (const auto& mc : spec.constraints) {
        const auto [mn, mx] = power_range(mc.order, spec.lo, spec.hi);
        if (!(mc.value > mn && mc.value < mx))
            throw InfeasibleError("moment of order " + std::to_string(mc.order) + " = " +
                                  std::to_string(mc.value) +
                                  " lies outside the open range of x^" +
                                  std::to_string(mc.order) + " on the support");
    }
    auto has = [&](std::initializer_list<int> orders) {
        return std::all_of(orders.begin(), orders.end(), [&](int o) { return c.count(o) > 0; });
    };
    const double a = spec.lo, b = spec.hi;
    if (has({1, 2})) {
        if (!(c[2] - c[1] * c[1] > 0.0))
            throw InfeasibleError("variance c2 - c1^2 must be positive");
        if (spec.bounded() && !(-c[2] + (a + b) * c[1] - a * b > 0.0))
            throw InfeasibleError("E[(b - x)(x - a)] must be positive on a bounded support");
    }
    if (has({2, 4}) && !(c[4] - c[2] * c[2] > 0.0))
        throw InfeasibleError("c4 - c2^2 must be positive");
    if (has({1, 2, 3, 4})) {
        Eigen::Matrix3d hankel;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) hankel(i, j) = c[i + j];
        if (!positive_definite(hankel))
            throw InfeasibleError("moment Hankel matrix is not positive definite");
        if (spec.bounded()) {
            auto loc = [&](int k) { return -c[k + 2] + (a + b) * c[k + 1] - a * b * c[k]; };
            Eigen::Matrix2d localized;
            localized << loc(0), loc(1), loc(1), loc(2);
            if (!positive_definite(localized))
                throw InfeasibleError("localized Hankel matrix is not positive definite");
        }
    }
}

std::array<double, 2> initial_window(const MomentSpec1D& spec) {
    if (spec.bounded()) return {spec.lo, spec.hi};
    std::map<int, double> c;
    for (const auto& mc : spec.constraints) c[mc.order] = mc.value;
    double center = c.count(1) ? c[1] : 0.0;
    if (std::isfinite(spec.lo)) center = std::max(center, spec.lo);
    if (std::isfinite(spec.hi)) center = std::min(center, spec.hi);
    double scale = 0.0;
    if (c.count(2)) {
        scale = std::sqrt(c.count(1) ? c[2] - c[1] * c[1] : c[2]);
    } else {
        for (const auto& [order, value] : c)
            if (order % 2 == 0) {
                scale = std::pow(value, 1.0 / order);
                break;
            }
    }
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw InfeasibleError("cannot derive a scale for the unbounded support");
    double lo = std::isfinite(spec.lo) ? spec.lo : center - kWindowSigmas * scale;
    double hi = std::isfinite(spec.hi) ? spec.hi : center + kWindowSigmas * scale;
    if (!(lo < hi)) {
        if (std::isfinite(spec.lo)) hi = spec.lo + kWindowSigmas * scale;
        else lo = spec.hi - kWindowSigmas * scale;
    }
    return {lo, hi};
}

EndpointRule make_rule(double lo, double hi, const EndpointFactors& factors) {
    const std::vector<double> cuts = factors.locations();
    return EndpointRule::tanh_sinh_split(lo, hi, cuts, kLevel1D);
}

double log_factors(const EndpointRule& rule, std::size_t k, const EndpointFactors& f) {
    double acc = 0.0;
    for (const auto& z : f.zeros) {
        const double d = rule.distance(k, z.location);
        if (d == 0.0) return -kInf;
        acc += z.multiplicity * std::log(d);
    }
    for (const auto& s : f.singularities) acc -= s.exponent * std::log(rule.distance(k, s.location));
    return acc;
}

/// Dual objective pieces over a fixed node set: ln N(a), the moments of the
/// normalized density and (optionally) their covariance.
struct DualValues {
    double log_norm = 0.0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

struct NodeSet {
    std::vector<double> weight;
    std::vector<double> log_base;
    /// features[f][k]: value of the f-th constrained monomial at node k.
    std::vector<std::vector<double>> features;
};

DualValues evaluate_dual(const NodeSet& nodes, const std::vector<double>& exponent, bool with_cov) {
    const std::size_t n = nodes.weight.size();
    const std::size_t m = nodes.features.size();
    double peak = -kInf;
    for (std::size_t k = 0; k < n; ++k)
        if (nodes.weight[k] > 0.0) peak = std::max(peak, exponent[k]);
    if (!std::isfinite(peak)) throw NumericError("dual evaluation: density vanishes on the window");

    std::vector<double> p(n);
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        p[k] = nodes.weight[k] * std::exp(exponent[k] - peak);
        total += p[k];
    }
    DualValues out;
    out.log_norm = peak + std::log(total);
    out.mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    for (std::size_t f = 0; f < m; ++f) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += p[k] * nodes.features[f][k];
        out.mean[static_cast<Eigen::Index>(f)] = acc / total;
    }
    if (with_cov) {
        out.cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
        for (std::size_t f = 0; f < m; ++f)
            for (std::size_t g = f; g < m; ++g) {
                const double mf = out.mean[static_cast<Eigen::Index>(f)];
                const double mg = out.mean[static_cast<Eigen::Index>(g)];
                double acc = 0.0;
                for (std::size_t k = 0; k < n; ++k)
                    acc += p[k] * (nodes.features[f][k] - mf) * (nodes.features[g][k] - mg);
                out.cov(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(g)) = acc / total;
                out.cov(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(f)) = acc / total;
            }
    }
    return out;
}

struct NewtonResult {
    Eigen::VectorXd multipliers;
    double log_norm;
    double max_residual;
    int iterations;
};

/// Minimizes ln N(a) + a.c over the constrained multipliers.
NewtonResult newton_dual(const NodeSet& nodes, const Eigen::VectorXd& targets, Eigen::VectorXd a,
                         double tol) {
    const std::size_t n = nodes.weight.size();
    const std::size_t m = nodes.features.size();
    auto exponents = [&](const Eigen::VectorXd& coef) {
        std::vector<double> e(nodes.log_base);
        for (std::size_t f = 0; f < m; ++f) {
            const double c = coef[static_cast<Eigen::Index>(f)];
            if (c == 0.0) continue;
            for (std::size_t k = 0; k < n; ++k) e[k] -= c * nodes.features[f][k];
        }
        return e;
    };
    for (int it = 0; it <= kMaxNewtonIterations; ++it) {
        const DualValues dv = evaluate_dual(nodes, exponents(a), true);
        const Eigen::VectorXd grad = targets - dv.mean;
        const double residual = grad.cwiseAbs().maxCoeff();
        if (residual <= 0.5 * tol) return {a, dv.log_norm, residual, it};
        if (it == kMaxNewtonIterations) break;

        Eigen::LDLT<Eigen::MatrixXd> ldlt(dv.cov);
        Eigen::VectorXd step = ldlt.solve(-grad);
        if (ldlt.info() != Eigen::Success || !step.allFinite())
            throw NumericError("Newton: moment covariance is singular");

        const double objective = dv.log_norm + a.dot(targets);
        const double slope = grad.dot(step);
        double t = 1.0;
        Eigen::VectorXd trial = a + step;
        // Below rounding level in ln N the Armijo test is noise; the full
        // Newton step is then taken as is.
        const bool at_rounding = -slope <= 1e-13 * (1.0 + std::abs(objective));
        for (int ls = 0; ls < 60 && !at_rounding; ++ls) {
            trial = a + t * step;
            const double value = evaluate_dual(nodes, exponents(trial), false).log_norm +
                                 trial.dot(targets);
            if (std::isfinite(value) && value <= objective + 1e-4 * t * slope) break;
            t *= 0.5;
        }
        if ((trial - a).cwiseAbs().maxCoeff() == 0.0) break;
        a = trial;
    }
    throw ConvergenceError("maxent Newton iteration did not reach tolerance within " +
                           std::to_string(kMaxNewtonIterations) + " iterations");
}

}  // namespace

bool MomentSpec1D::bounded() const {
    return std::isfinite(lo) && std::isfinite(hi);
}

int MomentSpec1D::top_order() const {
    int top = 0;
    for (const auto& c : constraints) top = std::max(top, c.order);
    return top;
}

void MomentSpec1D::validate() const {
    if (std::isnan(lo) || std::isnan(hi) || !(lo < hi))
        throw ValidationError("moment spec: support needs lo < hi");
    if (lo == kInf || hi == -kInf) throw ValidationError("moment spec: inverted infinite support");
    for (std::size_t k = 0; k < constraints.size(); ++k) {
        const auto& c = constraints[k];
        if (c.order < 1) throw ValidationError("moment spec: orders must be positive");
        if (!std::isfinite(c.value)) throw ValidationError("moment spec: non-finite moment value");
        if (k > 0 && !(constraints[k - 1].order < c.order))
            throw ValidationError("moment spec: orders must be distinct and sorted");
    }
    if (!bounded()) {
        const int top = top_order();
        if (top == 0 || top % 2 != 0)
            throw ValidationError(
                "moment spec: unbounded support needs an even highest constrained order");
    }
}

void MomentSpec2D::validate() const {
    for (double v : {x_lo, x_hi, y_lo, y_hi})
        if (!std::isfinite(v)) throw ValidationError("2D moment spec: rectangle must be finite");
    if (!(x_lo < x_hi) || !(y_lo < y_hi))
        throw ValidationError("2D moment spec: degenerate rectangle");
    for (std::size_t k = 0; k < constraints.size(); ++k) {
        const auto& c = constraints[k];
        if (c.i < 0 || c.j < 0 || c.i + c.j < 1)
            throw ValidationError("2D moment spec: need i, j >= 0 and i + j >= 1");
        if (c.i + c.j > kMaxTotalDegree2D)
            throw ValidationError("2D moment spec: total degree above 4");
        if (!std::isfinite(c.value)) throw ValidationError("2D moment spec: non-finite value");
        for (std::size_t l = 0; l < k; ++l)
            if (constraints[l].i == c.i && constraints[l].j == c.j)
                throw ValidationError("2D moment spec: duplicate (i, j)");
    }
}

void EndpointFactors::validate(double lo, double hi) const {
    auto inside = [&](double x) { return std::isfinite(x) && x >= lo && x <= hi; };
    for (const auto& z : zeros) {
        if (!inside(z.location)) throw ValidationError("factor: zero location outside support");
        if (!(z.multiplicity > 0.0) || !std::isfinite(z.multiplicity))
            throw ValidationError("factor: zero multiplicity must be positive");
    }
    for (const auto& s : singularities) {
        if (!inside(s.location))
            throw ValidationError("factor: singularity location outside support");
        if (!(s.exponent > 0.0 && s.exponent < 1.0))
            throw ValidationError("factor: singularity exponent must lie in (0, 1)");
    }
    for (double loc : locations()) {
        double net = 0.0;
        for (const auto& s : singularities)
            if (s.location == loc) net += s.exponent;
        for (const auto& z : zeros)
            if (z.location == loc) net -= z.multiplicity;
        if (net >= 1.0)
            throw NumericError("factor: non-integrable singularity at " + std::to_string(loc));
    }
}

std::vector<double> EndpointFactors::locations() const {
    std::vector<double> out;
    for (const auto& z : zeros) out.push_back(z.location);
    for (const auto& s : singularities) out.push_back(s.location);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

ExpFamilyDensity1D::ExpFamilyDensity1D(std::vector<double> multipliers, double support_lo,
                                       double support_hi, EndpointFactors factors,
                                       std::optional<std::array<double, 2>> window)
    : multipliers_(std::move(multipliers)),
      support_lo_(support_lo),
      support_hi_(support_hi),
      factors_(std::move(factors)) {
    if (multipliers_.empty()) multipliers_.push_back(0.0);
    for (double a : multipliers_)
        if (!std::isfinite(a)) throw ValidationError("density: non-finite multiplier");
    if (std::isnan(support_lo) || std::isnan(support_hi) || !(support_lo < support_hi))
        throw ValidationError("density: support needs lo < hi");
    factors_.validate(support_lo, support_hi);
    std::array<double, 2> win{support_lo, support_hi};
    if (window) win = *window;
    if (!std::isfinite(win[0]) || !std::isfinite(win[1]))
        throw ValidationError("density: unbounded support needs a finite integration window");
    if (win[0] < support_lo || win[1] > support_hi || !(win[0] < win[1]))
        throw ValidationError("density: window must lie inside the support");
    rule_ = make_rule(win[0], win[1], factors_);
}

ExpFamilyDensity1D ExpFamilyDensity1D::normalized(std::vector<double> multipliers,
                                                  double support_lo, double support_hi,
                                                  EndpointFactors factors,
                                                  std::optional<std::array<double, 2>> window) {
    if (multipliers.empty()) multipliers.push_back(0.0);
    multipliers[0] = 0.0;
    ExpFamilyDensity1D d(multipliers, support_lo, support_hi, std::move(factors), window);
    d.multipliers_[0] = std::log(d.total_mass());
    d.diagnostics.normalization_error = std::abs(d.total_mass() - 1.0);
    return d;
}

double ExpFamilyDensity1D::log_kernel(double x) const {
    return -multipliers_[0] - poly_tail(multipliers_, x);
}

double ExpFamilyDensity1D::log_factors_at_node(std::size_t k) const {
    return log_factors(rule_, k, factors_);
}

double ExpFamilyDensity1D::moment(int order) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < rule_.size(); ++k) {
        const double rho = std::exp(log_factors_at_node(k) + log_kernel(rule_.nodes[k]));
        acc += rule_.weights[k] * rho * ipow(rule_.nodes[k], order);
    }
    return acc;
}

double ExpFamilyDensity1D::total_mass() const {
    return moment(0);
}

DensityValue density_eval(const ExpFamilyDensity1D& d, double x) {
    if (std::isnan(x) || x < d.support_lo() || x > d.support_hi())
        throw DomainError("density_eval: x outside the support");
    double log_z = 0.0;
    for (const auto& z : d.factors().zeros) {
        const double dist = std::abs(x - z.location);
        if (dist == 0.0) return {0.0, false};
        log_z += z.multiplicity * std::log(dist);
    }
    for (const auto& s : d.factors().singularities) {
        const double dist = std::abs(x - s.location);
        if (dist == 0.0) return {kInf, true};
        log_z -= s.exponent * std::log(dist);
    }
    return {std::exp(log_z + d.log_kernel(x)), false};
}

namespace {

double average_log(const ExpFamilyDensity1D& d, bool include_factors) {
    const EndpointRule& rule = d.rule();
    double acc = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
        const double log_base = d.log_factors_at_node(k);
        const double log_kernel = d.log_kernel(rule.nodes[k]);
        const double rho = std::exp(log_base + log_kernel);
        if (rho == 0.0) continue;
        const double log_rho = include_factors ? log_base + log_kernel : log_kernel;
        acc += rule.weights[k] * rho * log_rho;
    }
    if (!std::isfinite(acc)) throw NumericError("information: integral is not finite");
    return acc;
}

}  // namespace

double information(const ExpFamilyDensity1D& d) {
    return average_log(d, true);
}

double modified_information(const ExpFamilyDensity1D& d) {
    return average_log(d, false);
}

GradientCheck moment_gradient_check(const ExpFamilyDensity1D& d, int order, double h) {
    if (!(h >= 1e-10)) throw ValidationError("moment_gradient_check: step must be >= 1e-10");
    if (order < 1) throw ValidationError("moment_gradient_check: order must be positive");
    auto log_norm = [&](double shift) {
        std::vector<double> a = d.multipliers();
        if (a.size() <= static_cast<std::size_t>(order)) a.resize(order + 1, 0.0);
        a[0] = 0.0;
        a[order] += shift;
        const ExpFamilyDensity1D probe(a, d.support_lo(), d.support_hi(), d.factors(),
                                       std::array<double, 2>{d.window_lo(), d.window_hi()});
        return std::log(probe.total_mass());
    };
    const double numeric = -(log_norm(h) - log_norm(-h)) / (2.0 * h);
    return {d.moment(order), numeric};
}

ExpFamilyDensity1D fit_multipliers_1d(const MomentSpec1D& spec, const FitOptions1D& options) {
    spec.validate();
    if (!(options.tol > 0.0)) throw ValidationError("fit: tol must be positive");
    options.factors.validate(spec.lo, spec.hi);
    check_feasibility_1d(spec);

    const int top = spec.top_order();
    std::vector<double> a(static_cast<std::size_t>(top) + 1, 0.0);
    std::array<double, 2> window = initial_window(spec);
    if (options.init) {
        for (std::size_t i = 1; i < options.init->size() && i < a.size(); ++i)
            a[i] = (*options.init)[i];
    } else if (!spec.bounded()) {
        // Gaussian matched to the window scale.
        const double center = 0.5 * (window[0] + window[1]);
        const double sigma = (window[1] - window[0]) / (2.0 * kWindowSigmas);
        std::map<int, double> c;
        for (const auto& mc : spec.constraints) c[mc.order] = mc.value;
        if (c.count(2)) a[2] = 0.5 / (sigma * sigma);
        if (c.count(1) && c.count(2)) a[1] = -center / (sigma * sigma);
        if (top > 2) a[top] = 1e-3 / ipow(sigma, top);
    }

    const std::size_t m = spec.constraints.size();
    Eigen::VectorXd targets(static_cast<Eigen::Index>(m));
    Eigen::VectorXd start(static_cast<Eigen::Index>(m));
    for (std::size_t f = 0; f < m; ++f) {
        targets[static_cast<Eigen::Index>(f)] = spec.constraints[f].value;
        start[static_cast<Eigen::Index>(f)] = a[static_cast<std::size_t>(spec.constraints[f].order)];
    }

    for (int attempt = 0; attempt < kWindowAttempts; ++attempt) {
        const EndpointRule rule = make_rule(window[0], window[1], options.factors);
        NodeSet nodes;
        nodes.weight = rule.weights;
        nodes.log_base.resize(rule.size());
        for (std::size_t k = 0; k < rule.size(); ++k)
            nodes.log_base[k] = log_factors(rule, k, options.factors);
        for (const auto& mc : spec.constraints) {
            std::vector<double> feature(rule.size());
            for (std::size_t k = 0; k < rule.size(); ++k)
                feature[k] = ipow(rule.nodes[k], mc.order);
            nodes.features.push_back(std::move(feature));
        }

        FitDiagnostics diag;
        std::vector<double> fitted(a.size(), 0.0);
        if (m == 0) {
            fitted[0] = evaluate_dual(nodes, nodes.log_base, false).log_norm;
        } else {
            const NewtonResult nr = newton_dual(nodes, targets, start, options.tol);
            for (std::size_t f = 0; f < m; ++f)
                fitted[static_cast<std::size_t>(spec.constraints[f].order)] =
                    nr.multipliers[static_cast<Eigen::Index>(f)];
            fitted[0] = nr.log_norm;
            diag.iterations = nr.iterations;
            diag.max_moment_residual = nr.max_residual;
            start = nr.multipliers;
        }

        ExpFamilyDensity1D density(fitted, spec.lo, spec.hi, options.factors, window);
        diag.normalization_error = std::abs(density.total_mass() - 1.0);

        // Tail beyond each open window edge: rho(edge) / |d ln rho / dx|.
        double tail = 0.0;
        auto edge_tail = [&](double edge, double outward) {
            const double slope = -poly_tail_slope(fitted, edge) * outward;
            if (!(slope < 0.0)) return kInf;
            double log_z = 0.0;
            for (const auto& z : options.factors.zeros)
                log_z += z.multiplicity * std::log(std::abs(edge - z.location));
            for (const auto& s : options.factors.singularities)
                log_z -= s.exponent * std::log(std::abs(edge - s.location));
            return std::exp(log_z + density.log_kernel(edge)) / -slope;
        };
        if (!std::isfinite(spec.lo)) tail += edge_tail(window[0], -1.0);
        if (!std::isfinite(spec.hi)) tail += edge_tail(window[1], 1.0);
        diag.tail_mass = tail;

        if (tail < kMaxTailMass) {
            density.diagnostics = diag;
            return density;
        }
        const double center = 0.5 * (window[0] + window[1]);
        const double half = 0.5 * (window[1] - window[0]);
        if (!std::isfinite(spec.lo)) window[0] = center - 1.5 * half;
        if (!std::isfinite(spec.hi)) window[1] = center + 1.5 * half;
    }
    throw NumericError("fit: tail mass outside the integration window stays above 1e-12");
}

// ---------------------------------------------------------------------------
// Two variables

ExpFamilyDensity2D::ExpFamilyDensity2D(const Coefficients& a, double x_lo, double x_hi,
                                       double y_lo, double y_hi)
    : a_(a),
      x_lo_(x_lo),
      x_hi_(x_hi),
      y_lo_(y_lo),
      y_hi_(y_hi),
      x_rule_(EndpointRule::tanh_sinh(x_lo, x_hi, kLevel2D)),
      y_rule_(EndpointRule::tanh_sinh(y_lo, y_hi, kLevel2D)) {
    for (int i = 0; i <= kMaxTotalDegree2D; ++i)
        for (int j = 0; j <= kMaxTotalDegree2D; ++j) {
            if (i + j > kMaxTotalDegree2D && a_[i][j] != 0.0)
                throw ValidationError("2D density: coefficient above total degree 4");
            if (!std::isfinite(a_[i][j])) throw ValidationError("2D density: non-finite coefficient");
        }
}

ExpFamilyDensity2D ExpFamilyDensity2D::normalized(const Coefficients& a, double x_lo,
                                                  double x_hi, double y_lo, double y_hi) {
    for (double v : {x_lo, x_hi, y_lo, y_hi})
        if (!std::isfinite(v)) throw ValidationError("2D density: rectangle must be finite");
    if (!(x_lo < x_hi) || !(y_lo < y_hi)) throw ValidationError("2D density: degenerate rectangle");
    Coefficients c = a;
    c[0][0] = 0.0;
    ExpFamilyDensity2D d(c, x_lo, x_hi, y_lo, y_hi);
    d.a_[0][0] = std::log(d.total_mass());
    d.diagnostics.normalization_error = std::abs(d.total_mass() - 1.0);
    return d;
}

double ExpFamilyDensity2D::log_density(double x, double y) const {
    double acc = 0.0;
    double xp = 1.0;
    for (int i = 0; i <= kMaxTotalDegree2D; ++i) {
        double yp = 1.0;
        for (int j = 0; i + j <= kMaxTotalDegree2D; ++j) {
            acc += a_[i][j] * xp * yp;
            yp *= y;
        }
        xp *= x;
    }
    return -acc;
}

double ExpFamilyDensity2D::density(double x, double y) const {
    return std::exp(log_density(x, y));
}

double ExpFamilyDensity2D::moment(int i, int j) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < x_rule_.size(); ++k) {
        const double x = x_rule_.nodes[k];
        const double xi = ipow(x, i);
        double row = 0.0;
        for (std::size_t l = 0; l < y_rule_.size(); ++l) {
            const double y = y_rule_.nodes[l];
            row += y_rule_.weights[l] * std::exp(log_density(x, y)) * ipow(y, j);
        }
        acc += x_rule_.weights[k] * xi * row;
    }
    return acc;
}

double ExpFamilyDensity2D::total_mass() const {
    return moment(0, 0);
}

namespace {

void check_feasibility_2d(const MomentSpec2D& spec) {
    std::map<std::pair<int, int>, double> c;
    for (const auto& mc : spec.constraints) c[{mc.i, mc.j}] = mc.value;
    for (const auto& mc : spec.constraints) {
        const auto [xl, xh] = power_range(mc.i, spec.x_lo, spec.x_hi);
        const auto [yl, yh] = power_range(mc.j, spec.y_lo, spec.y_hi);
        const double products[] = {xl * yl, xl * yh, xh * yl, xh * yh};
        const double mn = *std::min_element(std::begin(products), std::end(products));
        const double mx = *std::max_element(std::begin(products), std::end(products));
        if (!(mc.value > mn && mc.value < mx))
            throw InfeasibleError("moment (" + std::to_string(mc.i) + "," + std::to_string(mc.j) +
                                  ") outside the open range on the rectangle");
    }
    auto has = [&](int i, int j) { return c.count({i, j}) > 0; };
    if (has(2, 0) && has(0, 2) && has(1, 1)) {
        const double mx = has(1, 0) ? c[{1, 0}] : 0.0;
        const double my = has(0, 1) ? c[{0, 1}] : 0.0;
        const bool centered = has(1, 0) && has(0, 1);
        const double vx = c[{2, 0}] - (centered ? mx * mx : 0.0);
        const double vy = c[{0, 2}] - (centered ? my * my : 0.0);
        const double cxy = c[{1, 1}] - (centered ? mx * my : 0.0);
        if (!(vx > 0.0 && vy > 0.0 && cxy * cxy < vx * vy))
            throw InfeasibleError("second-moment matrix is not positive definite");
    }
}

}  // namespace

ExpFamilyDensity2D fit_multipliers_2d(const MomentSpec2D& spec, double tol) {
    spec.validate();
    if (!(tol > 0.0)) throw ValidationError("fit 2D: tol must be positive");
    check_feasibility_2d(spec);

    const EndpointRule xr = EndpointRule::tanh_sinh(spec.x_lo, spec.x_hi, kLevel2D);
    const EndpointRule yr = EndpointRule::tanh_sinh(spec.y_lo, spec.y_hi, kLevel2D);
    NodeSet nodes;
    const std::size_t n = xr.size() * yr.size();
    nodes.weight.resize(n);
    nodes.log_base.assign(n, 0.0);
    for (std::size_t k = 0; k < xr.size(); ++k)
        for (std::size_t l = 0; l < yr.size(); ++l)
            nodes.weight[k * yr.size() + l] = xr.weights[k] * yr.weights[l];
    for (const auto& mc : spec.constraints) {
        std::vector<double> feature(n);
        for (std::size_t k = 0; k < xr.size(); ++k) {
            const double xi = ipow(xr.nodes[k], mc.i);
            for (std::size_t l = 0; l < yr.size(); ++l)
                feature[k * yr.size() + l] = xi * ipow(yr.nodes[l], mc.j);
        }
        nodes.features.push_back(std::move(feature));
    }

    ExpFamilyDensity2D::Coefficients coef{};
    FitDiagnostics diag;
    const std::size_t m = spec.constraints.size();
    if (m > 0) {
        Eigen::VectorXd targets(static_cast<Eigen::Index>(m));
        for (std::size_t f = 0; f < m; ++f)
            targets[static_cast<Eigen::Index>(f)] = spec.constraints[f].value;
        const NewtonResult nr =
            newton_dual(nodes, targets, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m)), tol);
        for (std::size_t f = 0; f < m; ++f)
            coef[spec.constraints[f].i][spec.constraints[f].j] =
                nr.multipliers[static_cast<Eigen::Index>(f)];
        diag.iterations = nr.iterations;
        diag.max_moment_residual = nr.max_residual;
    }
    ExpFamilyDensity2D d =
        ExpFamilyDensity2D::normalized(coef, spec.x_lo, spec.x_hi, spec.y_lo, spec.y_hi);
    diag.normalization_error = d.diagnostics.normalization_error;
    d.diagnostics = diag;
    return d;
}

}  // namespace infoqm
