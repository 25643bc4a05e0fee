#include "infoqm/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "infoqm/error.hpp"
#include "infoqm/numerics.hpp"
#include "infoqm/parallel.hpp"

namespace infoqm {

namespace {

constexpr double kBetaScanLo = 1e-4;
constexpr double kBetaScanHi = 2.0;
constexpr std::size_t kBetaScanPanels = 2000;
constexpr double kBetaTol = 1e-12;

void check_level(int n) {
    if (n < 0 || n > kMaxOscillatorLevel)
        throw DomainError("oscillator: level " + std::to_string(n) + " outside [0, 20]");
}

void check_beta(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("oscillator: beta must be positive");
}

/// ln(2^n n! sqrt(pi))
double log_hermite_norm(int n) {
    return n * std::numbers::ln2 + std::lgamma(n + 1.0) + 0.5 * std::log(std::numbers::pi);
}

}  // namespace

double alpha_from_beta(int n, double beta) {
    check_level(n);
    check_beta(beta);
    return 0.5 * (log_hermite_norm(n) - 0.5 * std::log(2.0 * beta));
}

double beta_closure_residual(int n, int k, double beta) {
    const double alpha = alpha_from_beta(n, beta);
    return 8.0 * beta * beta * (n + k + alpha) - (2.0 * alpha - 1.0);
}

double lambda_from_beta(double beta) {
    check_beta(beta);
    return (4.0 * beta * beta - 1.0) / (4.0 * beta);
}

double energy(const OscillatorState& s) {
    return s.lambda * (1.0 - 2.0 * s.alpha - (2.0 * s.n + 1.0) / 2.0);
}

double admissible_beta_limit(int n) {
    check_level(n);
    return 0.5 * std::exp(2.0 * (log_hermite_norm(n) - 1.0));
}

OscillatorState solve_state(int n) {
    check_level(n);
    const int k = n % 2;
    const double hi = std::min(kBetaScanHi, admissible_beta_limit(n));
    auto g = [n, k](double beta) { return beta_closure_residual(n, k, beta); };
    auto dg = [n, k](double beta) {
        const double alpha = alpha_from_beta(n, beta);
        return 16.0 * beta * (n + k + alpha) - 2.0 * beta + 1.0 / (2.0 * beta);
    };
    const auto brackets = scan_sign_changes(g, kBetaScanLo, hi, kBetaScanPanels);
    if (brackets.size() != 1)
        throw StructureError("solve_state(" + std::to_string(n) + "): found " +
                             std::to_string(brackets.size()) +
                             " sign changes of the beta closure, expected exactly one");

    OscillatorState s;
    s.n = n;
    s.k = k;
    s.beta = find_root(g, dg, brackets.front(), kBetaTol);
    s.alpha = alpha_from_beta(n, s.beta);
    s.lambda = lambda_from_beta(s.beta);
    s.energy = energy(s);
    return s;
}

OscillatorState linear_state(int n) {
    check_level(n);
    OscillatorState s;
    s.n = n;
    s.k = n % 2;
    s.beta = 0.5;
    s.alpha = alpha_from_beta(n, 0.5);
    s.lambda = 0.0;
    s.energy = n + 0.5;
    return s;
}

double psi_eval(const OscillatorState& s, double x) {
    const double scale = std::sqrt(2.0 * s.beta);
    return hermite_eval(s.n, scale * x) * std::exp(-s.alpha - s.beta * x * x);
}

double psi_derivative(const OscillatorState& s, double x) {
    const double scale = std::sqrt(2.0 * s.beta);
    const double u = scale * x;
    const double h = hermite_eval(s.n, u);
    const double dh = hermite_deriv(s.n, u);
    return (scale * dh - 2.0 * s.beta * x * h) * std::exp(-s.alpha - s.beta * x * x);
}

double psi_second_derivative(const OscillatorState& s, double x) {
    const double scale = std::sqrt(2.0 * s.beta);
    const double u = scale * x;
    const double h = hermite_eval(s.n, u);
    const double dh = hermite_deriv(s.n, u);
    const double d2h = s.n >= 2 ? 4.0 * s.n * (s.n - 1) * hermite_eval(s.n - 2, u) : 0.0;
    const double b = s.beta;
    return (2.0 * b * d2h - 4.0 * b * x * scale * dh + (4.0 * b * b * x * x - 2.0 * b) * h) *
           std::exp(-s.alpha - b * x * x);
}

double eigen_residual(const OscillatorState& s, double x) {
    const double psi = psi_eval(s, x);
    const double log_ratio = -2.0 * s.alpha - 2.0 * s.beta * x * x;
    return -0.5 * psi_second_derivative(s, x) + 0.5 * x * x * psi -
           s.lambda * (1.0 + log_ratio) * psi;
}

double linear_residual(const OscillatorState& s, double x) {
    const double psi = psi_eval(s, x);
    return -0.5 * psi_second_derivative(s, x) + 0.5 * x * x * psi - s.energy * psi;
}

std::vector<TableRow> table(int n_max, unsigned threads) {
    if (n_max < 0 || n_max > kMaxOscillatorLevel)
        throw DomainError("table: n_max outside [0, 20]");
    std::vector<TableRow> rows(static_cast<std::size_t>(n_max) + 1);
    parallel_for(rows.size(), threads, [&rows](std::size_t i) {
        const OscillatorState s = solve_state(static_cast<int>(i));
        rows[i] = {s.n, s.k, s.alpha, s.beta, s.lambda, s.energy};
    });
    return rows;
}

double state_information(const OscillatorState& s) {
    return -2.0 * s.alpha - (2.0 * s.n + 1.0) / 2.0;
}

}  // namespace infoqm
