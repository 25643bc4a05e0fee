#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "infoqm/numerics.hpp"

namespace infoqm {

/// Discretized -psi''/2 + V psi - b [1 + ln psi^2] psi on a uniform grid with
/// hard walls (psi = 0 at both ends).
struct GridProblem {
    Grid1D grid;
    std::vector<double> potential;
    /// Coefficient of the logarithmic term; the self-consistent solve tunes it.
    double b = 0.0;
    /// ln psi^2 is evaluated as ln max(psi^2, eps_log).
    double eps_log = 1e-100;

    static GridProblem harmonic(const Grid1D& grid, double b);
    void validate() const;
    double max_abs_potential() const;
};

enum class FlowScheme {
    /// Backward Euler in the kinetic, potential and frozen log terms, then
    /// renormalize. Positivity preserving.
    semi_implicit,
    /// psi <- normalize(psi - tau * gradient); needs tau well below h^2.
    explicit_euler,
};

struct FlowConfig {
    double tau = 1e-3;
    double tol_flow = 1e-8;
    int max_iters = 200000;
    std::uint64_t seed = 0;
    FlowScheme scheme = FlowScheme::semi_implicit;

    /// tau = min(0.05, 0.5 / max|V|), the other fields at their defaults.
    static FlowConfig defaults_for(const GridProblem& p);
    /// tau * max|V| < 1 and max_iters <= 1e6.
    void validate(const GridProblem& p) const;
};

struct FlowDiagnostics {
    /// || H psi - b (1 + ln psi^2) psi - (mu - b) psi ||_2
    double stationarity_residual = 0.0;
    /// Energy sampled every 100 steps; count of samples that went up.
    int energy_increases = 0;
    double max_energy_increase = 0.0;
    double final_energy = 0.0;
};

struct GroundStateSolution {
    std::vector<double> psi;
    /// <psi, H psi - b ln(psi^2) psi>; stationarity reads
    /// H psi - b (1 + ln psi^2) psi = (mu - b) psi.
    double mu = 0.0;
    double b = 0.0;
    int iterations = 0;
    double flow_norm = 0.0;
    FlowDiagnostics diagnostics;
};

inline constexpr int kEnergyCheckInterval = 100;

/// Normalized gradient flow to the nodeless ground state for a fixed b.
/// ConvergenceError after max_iters; InstabilityError if psi loses
/// positivity.
GroundStateSolution gradient_flow_ground_state(const GridProblem& p, const FlowConfig& cfg,
                                               std::optional<std::span<const double>> init = {});

/// Discrete H psi (interior rows; zero at the walls).
std::vector<double> apply_hamiltonian(const GridProblem& p, std::span<const double> psi);

/// E_b[psi] = <psi, H psi>/2 - (b/2) sum psi^2 ln psi^2 h.
double flow_energy(const GridProblem& p, std::span<const double> psi);

/// H psi - b (1 + ln psi^2) psi, the L2 gradient of flow_energy.
std::vector<double> flow_gradient(const GridProblem& p, std::span<const double> psi);

/// sum psi^2 h
double grid_norm2(const Grid1D& grid, std::span<const double> psi);

/// Positive initial guess built from (seed, index) alone.
std::vector<double> random_positive_init(const Grid1D& grid, std::uint64_t seed,
                                         std::uint64_t index);

struct SelfConsistentResult {
    double lambda = 0.0;
    GroundStateSolution solution;
    int outer_iterations = 0;
};

inline constexpr double kLambdaTol = 1e-10;

/// Finds b with mu(b) = b by bisection over [b_lo, b_hi]; BracketError when
/// mu - b does not change sign there.
SelfConsistentResult self_consistent_lambda(const GridProblem& tmpl, const FlowConfig& cfg,
                                            double b_lo, double b_hi,
                                            std::optional<std::span<const double>> init = {});

struct UniquenessReport {
    /// Self-consistent lambda per init (or mu when b is held fixed).
    std::vector<double> values;
    /// Empty for successful runs, the error text otherwise.
    std::vector<std::string> failures;
    double max_value_spread = 0.0;
    /// Max pairwise L2 distance between states, up to sign.
    double max_state_distance = 0.0;
    std::vector<std::vector<double>> states;
};

/// Repeats the solve from `n_inits` seeded random positive guesses. With a
/// lambda bracket it runs self_consistent_lambda, otherwise a fixed-b flow.
UniquenessReport uniqueness_probe(const GridProblem& p, const FlowConfig& cfg, int n_inits,
                                  std::optional<std::array<double, 2>> lambda_bracket,
                                  unsigned threads = 1);

}  // namespace infoqm
