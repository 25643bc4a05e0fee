#include "infoqm/nls.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "infoqm/error.hpp"
#include "infoqm/parallel.hpp"

namespace infoqm {

namespace {

double log_density(const GridProblem& p, double psi) {
    return std::log(std::max(psi * psi, p.eps_log));
}

void normalize(const Grid1D& grid, std::vector<double>& psi) {
    const double norm = std::sqrt(grid_norm2(grid, psi));
    if (!(norm > 0.0) || !std::isfinite(norm)) throw InstabilityError("flow: state norm collapsed");
    for (double& v : psi) v /= norm;
}

/// Solves the tridiagonal system with constant off-diagonal `off` in place.
void solve_tridiagonal(std::vector<double>& diag, double off, std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double m = off / diag[i - 1];
        diag[i] -= m * off;
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - off * rhs[i + 1]) / diag[i];
}

std::vector<double> default_init(const Grid1D& grid) {
    const double length = grid.x_max() - grid.x_min();
    const double center = 0.5 * (grid.x_min() + grid.x_max());
    const double width = length / 8.0;
    return grid.sample([&](double x) {
        const double wall = std::sin(std::numbers::pi * (x - grid.x_min()) / length);
        const double t = (x - center) / width;
        return std::max(wall, 0.0) * std::exp(-0.5 * t * t);
    });
}

double mu_of(const GridProblem& p, std::span<const double> psi) {
    const std::vector<double> h_psi = apply_hamiltonian(p, psi);
    double acc = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i)
        acc += psi[i] * (h_psi[i] - p.b * log_density(p, psi[i]) * psi[i]);
    return acc * p.grid.spacing();
}

}  // namespace

GridProblem GridProblem::harmonic(const Grid1D& grid, double b) {
    return GridProblem{grid, grid.sample([](double x) { return 0.5 * x * x; }), b, 1e-100};
}

void GridProblem::validate() const {
    if (potential.size() != grid.size())
        throw ValidationError("grid problem: potential has " + std::to_string(potential.size()) +
                              " samples for " + std::to_string(grid.size()) + " grid points");
    for (double v : potential)
        if (!std::isfinite(v)) throw ValidationError("grid problem: non-finite potential");
    if (!(eps_log >= 1e-300 && eps_log <= 1e-20))
        throw ValidationError("grid problem: eps_log must lie in [1e-300, 1e-20]");
    if (!std::isfinite(b)) throw ValidationError("grid problem: non-finite b");
}

double GridProblem::max_abs_potential() const {
    double m = 0.0;
    for (double v : potential) m = std::max(m, std::abs(v));
    return m;
}

FlowConfig FlowConfig::defaults_for(const GridProblem& p) {
    FlowConfig cfg;
    const double vmax = p.max_abs_potential();
    cfg.tau = vmax > 0.0 ? std::min(0.05, 0.5 / vmax) : 0.05;
    return cfg;
}

void FlowConfig::validate(const GridProblem& p) const {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("flow: tau must be positive");
    if (!(tau * p.max_abs_potential() < 1.0))
        throw ValidationError("flow: tau * max|V| must stay below 1");
    if (!(tol_flow > 0.0)) throw ValidationError("flow: tol_flow must be positive");
    if (max_iters < 1 || max_iters > 1000000)
        throw ValidationError("flow: max_iters must lie in [1, 1e6]");
}

double grid_norm2(const Grid1D& grid, std::span<const double> psi) {
    double acc = 0.0;
    for (double v : psi) acc += v * v;
    return acc * grid.spacing();
}

std::vector<double> apply_hamiltonian(const GridProblem& p, std::span<const double> psi) {
    const std::size_t n = p.grid.size();
    if (psi.size() != n) throw ValidationError("apply_hamiltonian: size mismatch");
    const double kin = 0.5 / (p.grid.spacing() * p.grid.spacing());
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i)
        out[i] = -kin * (psi[i - 1] - 2.0 * psi[i] + psi[i + 1]) + p.potential[i] * psi[i];
    return out;
}

double flow_energy(const GridProblem& p, std::span<const double> psi) {
    const std::vector<double> h_psi = apply_hamiltonian(p, psi);
    double quad = 0.0;
    double entropic = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        quad += psi[i] * h_psi[i];
        entropic += psi[i] * psi[i] * log_density(p, psi[i]);
    }
    return 0.5 * p.grid.spacing() * (quad - p.b * entropic);
}

std::vector<double> flow_gradient(const GridProblem& p, std::span<const double> psi) {
    std::vector<double> g = apply_hamiltonian(p, psi);
    for (std::size_t i = 1; i + 1 < psi.size(); ++i)
        g[i] -= p.b * (1.0 + log_density(p, psi[i])) * psi[i];
    return g;
}

std::vector<double> random_positive_init(const Grid1D& grid, std::uint64_t seed,
                                         std::uint64_t index) {
    const CounterRng rng(seed);
    const double length = grid.x_max() - grid.x_min();
    const double center =
        0.5 * (grid.x_min() + grid.x_max()) + (2.0 * rng.uniform(index, 0) - 1.0) * length / 10.0;
    const double width = length / 16.0 * (0.5 + 1.5 * rng.uniform(index, 1));
    std::vector<double> psi(grid.size(), 0.0);
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        const double x = grid[i];
        const double wall = std::sin(std::numbers::pi * (x - grid.x_min()) / length);
        const double t = (x - center) / width;
        const double noise = 0.5 + rng.uniform(index, 2 + i);
        psi[i] = std::max(wall, 1e-12) * std::exp(-0.5 * t * t) * noise + 1e-12;
    }
    return psi;
}

GroundStateSolution gradient_flow_ground_state(const GridProblem& p, const FlowConfig& cfg,
                                               std::optional<std::span<const double>> init) {
    p.validate();
    cfg.validate(p);
    const std::size_t n = p.grid.size();
    const double h = p.grid.spacing();
    const double kin = 0.5 / (h * h);

    std::vector<double> psi;
    if (init) {
        if (init->size() != n) throw ValidationError("flow: initial state has the wrong size");
        psi.assign(init->begin(), init->end());
    } else {
        psi = default_init(p.grid);
    }
    psi.front() = psi.back() = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (!(psi[i] > 0.0) || !std::isfinite(psi[i]))
            throw ValidationError("flow: initial state must be positive in the interior");
    normalize(p.grid, psi);

    GroundStateSolution sol;
    sol.b = p.b;
    double last_energy = flow_energy(p, psi);
    std::vector<double> next(n), diag(n - 2), rhs(n - 2), eff(n - 2);

    for (int it = 1; it <= cfg.max_iters; ++it) {
        if (cfg.scheme == FlowScheme::semi_implicit) {
            double shift = 0.0;
            for (std::size_t i = 1; i + 1 < n; ++i) {
                eff[i - 1] = p.potential[i] - p.b * (1.0 + log_density(p, psi[i]));
                shift = std::max(shift, -eff[i - 1]);
            }
            for (std::size_t i = 0; i + 2 < n; ++i) {
                diag[i] = 1.0 + cfg.tau * (2.0 * kin + eff[i] + shift);
                rhs[i] = psi[i + 1];
            }
            solve_tridiagonal(diag, -cfg.tau * kin, rhs);
            next.front() = next.back() = 0.0;
            std::copy(rhs.begin(), rhs.end(), next.begin() + 1);
        } else {
            const std::vector<double> grad = flow_gradient(p, psi);
            for (std::size_t i = 0; i < n; ++i) next[i] = psi[i] - cfg.tau * grad[i];
            next.front() = next.back() = 0.0;
        }
        for (std::size_t i = 1; i + 1 < n; ++i)
            if (!(next[i] > 0.0) || !std::isfinite(next[i]))
                throw InstabilityError("flow: state lost positivity at step " + std::to_string(it) +
                                       "; reduce tau");
        normalize(p.grid, next);

        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) change = std::max(change, std::abs(next[i] - psi[i]));
        psi.swap(next);
        sol.flow_norm = change / cfg.tau;
        sol.iterations = it;

        if (it % kEnergyCheckInterval == 0) {
            const double e = flow_energy(p, psi);
            const double rise = e - last_energy;
            if (rise > 1e-12 * (1.0 + std::abs(e))) {
                ++sol.diagnostics.energy_increases;
                sol.diagnostics.max_energy_increase = std::max(sol.diagnostics.max_energy_increase, rise);
            }
            last_energy = e;
        }
        if (sol.flow_norm < cfg.tol_flow) break;
    }
    if (!(sol.flow_norm < cfg.tol_flow))
        throw ConvergenceError("flow: no convergence in " + std::to_string(cfg.max_iters) +
                               " steps (last flow norm " + std::to_string(sol.flow_norm) + ")");

    sol.mu = mu_of(p, psi);
    const std::vector<double> grad = flow_gradient(p, psi);
    double res = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double r = grad[i] - (sol.mu - p.b) * psi[i];
        res += r * r;
    }
    sol.diagnostics.stationarity_residual = std::sqrt(res * h);
    sol.diagnostics.final_energy = flow_energy(p, psi);
    sol.psi = std::move(psi);
    return sol;
}

SelfConsistentResult self_consistent_lambda(const GridProblem& tmpl, const FlowConfig& cfg,
                                            double b_lo, double b_hi,
                                            std::optional<std::span<const double>> init) {
    if (!(b_lo < b_hi)) throw BracketError("self_consistent_lambda: need b_lo < b_hi");
    std::vector<double> warm;
    if (init) warm.assign(init->begin(), init->end());
    GroundStateSolution last;
    int evaluations = 0;

    auto solve_at = [&](double b) {
        GridProblem p = tmpl;
        p.b = b;
        GroundStateSolution sol = warm.empty()
                                      ? gradient_flow_ground_state(p, cfg)
                                      : gradient_flow_ground_state(p, cfg, std::span<const double>(warm));
        warm = sol.psi;
        ++evaluations;
        return sol;
    };

    // Both ends start from the same guess so the bracket signs do not depend
    // on evaluation order.
    const std::vector<double> start = warm;
    const GroundStateSolution lo_sol = solve_at(b_lo);
    warm = start;
    const GroundStateSolution hi_sol = solve_at(b_hi);
    const RootBracket bracket{b_lo, b_hi, lo_sol.mu - b_lo, hi_sol.mu - b_hi};
    if (bracket.f_lo * bracket.f_hi > 0.0)
        throw BracketError("self_consistent_lambda: mu(b) - b has the same sign at b = " +
                           std::to_string(b_lo) + " and b = " + std::to_string(b_hi));
    warm = lo_sol.psi;

    auto residual = [&](double b) {
        last = solve_at(b);
        return last.mu - b;
    };
    const double lambda = find_root(residual, bracket, kLambdaTol);
    // Final solve at the returned lambda so state and lambda agree exactly.
    last = solve_at(lambda);
    return {lambda, std::move(last), evaluations};
}

UniquenessReport uniqueness_probe(const GridProblem& p, const FlowConfig& cfg, int n_inits,
                                  std::optional<std::array<double, 2>> lambda_bracket,
                                  unsigned threads) {
    if (n_inits < 2) throw ValidationError("uniqueness_probe: need at least two initializations");
    const auto count = static_cast<std::size_t>(n_inits);
    UniquenessReport report;
    report.values.assign(count, std::nan(""));
    report.failures.assign(count, "");
    report.states.assign(count, {});

    parallel_for(count, threads, [&](std::size_t i) {
        const std::vector<double> init = random_positive_init(p.grid, cfg.seed, i);
        try {
            if (lambda_bracket) {
                SelfConsistentResult r = self_consistent_lambda(
                    p, cfg, (*lambda_bracket)[0], (*lambda_bracket)[1], std::span<const double>(init));
                report.values[i] = r.lambda;
                report.states[i] = std::move(r.solution.psi);
            } else {
                GroundStateSolution s = gradient_flow_ground_state(p, cfg, std::span<const double>(init));
                report.values[i] = s.mu;
                report.states[i] = std::move(s.psi);
            }
        } catch (const Error& e) {
            report.failures[i] = e.what();
        }
    });

    for (std::size_t i = 0; i < count; ++i) {
        if (!report.failures[i].empty()) continue;
        for (std::size_t j = i + 1; j < count; ++j) {
            if (!report.failures[j].empty()) continue;
            report.max_value_spread =
                std::max(report.max_value_spread, std::abs(report.values[i] - report.values[j]));
            double minus = 0.0, plus = 0.0;
            for (std::size_t k = 0; k < report.states[i].size(); ++k) {
                const double a = report.states[i][k], b = report.states[j][k];
                minus += (a - b) * (a - b);
                plus += (a + b) * (a + b);
            }
            const double dist = std::sqrt(std::min(minus, plus) * p.grid.spacing());
            report.max_state_distance = std::max(report.max_state_distance, dist);
        }
    }
    return report;
}

}  // namespace infoqm
