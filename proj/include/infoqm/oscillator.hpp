#pragma once

#include <vector>

namespace infoqm {

/// Closed-form state psi_n(x) = H_n(sqrt(2 beta) x) exp(-alpha - beta x^2) of
/// the logarithmic nonlinear eigenproblem with V(x) = x^2 / 2.
struct OscillatorState {
    int n = 0;
    /// Parity index, n mod 2 for solved states.
    int k = 0;
    double alpha = 0.0;
    double beta = 0.5;
    double lambda = 0.0;
    double energy = 0.0;
};

inline constexpr int kMaxOscillatorLevel = 20;

/// alpha = 1/2 ln(2^n n! sqrt(pi) / sqrt(2 beta)), the normalization of psi_n.
double alpha_from_beta(int n, double beta);

/// g(beta) = 8 beta^2 (n + k + alpha(beta)) - (2 alpha(beta) - 1); its root in
/// the admissible region 2 alpha > 1 is beta_n.
double beta_closure_residual(int n, int k, double beta);

/// lambda = (4 beta^2 - 1) / (4 beta), which cancels the x^2 terms.
double lambda_from_beta(double beta);

/// E_n = lambda (1 - 2 alpha - (2n + 1)/2).
double energy(const OscillatorState& s);

/// Largest beta with 2 alpha(beta) >= 1.
double admissible_beta_limit(int n);

/// Solves for beta_n by a 2000-panel sign scan of beta_closure_residual over
/// (1e-4, min(2, admissible limit)] and bisection with Newton polish to 1e-12.
/// StructureError unless exactly one sign change is found.
OscillatorState solve_state(int n);

/// Linear oscillator eigenstate (beta = 1/2, lambda = 0, energy n + 1/2).
OscillatorState linear_state(int n);

double psi_eval(const OscillatorState& s, double x);
double psi_derivative(const OscillatorState& s, double x);
double psi_second_derivative(const OscillatorState& s, double x);

/// -psi''/2 + x^2 psi/2 - lambda [1 + ln(psi^2 / Z_n^2)] psi with Z_n the
/// Hermite factor, so the log term is -2 alpha - 2 beta x^2 at every x.
double eigen_residual(const OscillatorState& s, double x);

/// -psi''/2 + x^2 psi/2 - E psi, the residual of the linear problem.
double linear_residual(const OscillatorState& s, double x);

struct TableRow {
    int n;
    int k;
    double alpha;
    double beta;
    double lambda;
    double energy;
};

/// Rows n = 0..n_max; per-n solves fan out over up to `threads` workers.
std::vector<TableRow> table(int n_max, unsigned threads = 1);

/// <ln(psi^2 / Z_n^2)> = -2 alpha - (2n + 1)/2.
double state_information(const OscillatorState& s);

}  // namespace infoqm
