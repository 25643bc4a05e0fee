#include "infoqm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "infoqm/parallel.hpp"

namespace infoqm {

namespace {

std::vector<double> sample_state(const OscillatorState& s, const Grid1D& grid) {
    return grid.sample([&s](double x) { return psi_eval(s, x); });
}

double trapezoid(const Grid1D& grid, const std::vector<double>& f) {
    return integrate(std::span<const double>(f), QuadratureRule::trapezoid(grid));
}

}  // namespace

void BasisSet::validate() const {
    if (members.empty()) throw ValidationError("basis: at least one member is required");
    if (labels.size() != members.size())
        throw ValidationError("basis: label count does not match member count");
    for (std::size_t m = 0; m < members.size(); ++m) {
        if (members[m].size() != grid.size())
            throw ValidationError("basis: member '" + labels[m] + "' has the wrong sample count");
        for (double v : members[m])
            if (!std::isfinite(v)) throw ValidationError("basis: member '" + labels[m] + "' is not finite");
    }
}

Grid1D default_analysis_grid() { return Grid1D(-14.0, 14.0, 8001); }

BasisSet log_basis(int n_max, const Grid1D& grid) {
    if (n_max < 0 || n_max > kMaxOscillatorLevel) throw DomainError("log_basis: n_max outside [0, 20]");
    BasisSet b{grid, {}, {}};
    for (int n = 0; n <= n_max; ++n) {
        b.members.push_back(sample_state(solve_state(n), grid));
        b.labels.push_back(std::to_string(n));
    }
    return b;
}

BasisSet linear_basis(int n_max, const Grid1D& grid) {
    if (n_max < 0 || n_max > kMaxOscillatorLevel) throw DomainError("linear_basis: n_max outside [0, 20]");
    BasisSet b{grid, {}, {}};
    for (int n = 0; n <= n_max; ++n) {
        b.members.push_back(sample_state(linear_state(n), grid));
        b.labels.push_back(std::to_string(n));
    }
    return b;
}

double inner_product(const Grid1D& gf, std::span<const double> f, const Grid1D& gg,
                     std::span<const double> g) {
    if (!(gf == gg)) throw ValidationError("inner_product: functions live on different grids");
    if (f.size() != gf.size() || g.size() != gg.size())
        throw ValidationError("inner_product: sample count does not match the grid");
    std::vector<double> prod(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) prod[i] = f[i] * g[i];
    return trapezoid(gf, prod);
}

GramReport gram_matrix(const BasisSet& basis, unsigned threads) {
    basis.validate();
    const std::size_t m = basis.size();
    GramReport r;
    r.grid_points = basis.grid.size();
    r.x_min = basis.grid.x_min();
    r.x_max = basis.grid.x_max();
    r.matrix.assign(m, std::vector<double>(m, 0.0));
    parallel_for(m, threads, [&](std::size_t i) {
        for (std::size_t j = i; j < m; ++j)
            r.matrix[i][j] = inner_product(basis.grid, basis.members[i], basis.grid, basis.members[j]);
    });
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < i; ++j) r.matrix[i][j] = r.matrix[j][i];
    return r;
}

double mu0_estimate(const OscillatorState& lower, const OscillatorState& upper, const Grid1D& grid,
                    ResidualKind kind) {
    const std::vector<double> lo = sample_state(lower, grid);
    const std::vector<double> res = grid.sample([&](double x) {
        return kind == ResidualKind::nonlinear ? eigen_residual(upper, x) : linear_residual(upper, x);
    });
    return inner_product(grid, lo, grid, res);
}

bool energy_ordering_check(std::span<const OscillatorState> states) {
    for (std::size_t i = 1; i < states.size(); ++i)
        if (!(states[i - 1].energy < states[i].energy)) return false;
    return true;
}

double energy_expectation(const OscillatorState& s, const Grid1D& grid) {
    const std::vector<double> f = grid.sample([&s](double x) {
        const double psi = psi_eval(s, x);
        return psi * (-0.5 * psi_second_derivative(s, x) + 0.5 * x * x * psi);
    });
    return trapezoid(grid, f);
}

double state_information_quadrature(const OscillatorState& s, const Grid1D& grid) {
    const std::vector<double> f = grid.sample([&s](double x) {
        const double psi = psi_eval(s, x);
        return psi * psi * (-2.0 * s.alpha - 2.0 * s.beta * x * x);
    });
    return trapezoid(grid, f);
}

ProjectionReport completeness_projection(std::span<const double> target, const std::string& label,
                                         const BasisSet& basis, std::span<const int> orders) {
    ProjectionReport report;
    report.target = label;
    if (orders.empty()) return report;
    basis.validate();
    const Grid1D& grid = basis.grid;
    if (target.size() != grid.size())
        throw ValidationError("completeness_projection: target sample count does not match the grid");
    for (int order : orders)
        if (order < 1 || static_cast<std::size_t>(order) > basis.size())
            throw ValidationError("completeness_projection: order " + std::to_string(order) +
                                  " outside [1, " + std::to_string(basis.size()) + "]");

    const GramReport gram = gram_matrix(basis);
    std::vector<double> rhs(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i)
        rhs[i] = inner_product(grid, basis.members[i], grid, target);

    for (int order : orders) {
        const auto m = static_cast<Eigen::Index>(order);
        Eigen::MatrixXd g(m, m);
        Eigen::VectorXd b(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            b(i) = rhs[static_cast<std::size_t>(i)];
            for (Eigen::Index j = 0; j < m; ++j)
                g(i, j) = gram.matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g, Eigen::EigenvaluesOnly);
        const double lo = eig.eigenvalues().minCoeff();
        const double hi = eig.eigenvalues().maxCoeff();
        const double cond = lo > 0.0 ? hi / lo : INFINITY;
        if (!(cond <= kMaxGramCondition))
            throw IllConditionedError("completeness_projection: Gram condition number " +
                                          std::to_string(cond) + " at order " + std::to_string(order),
                                      report);
        const Eigen::VectorXd c = g.ldlt().solve(b);

        std::vector<double> resid(target.begin(), target.end());
        for (Eigen::Index j = 0; j < m; ++j) {
            const auto& member = basis.members[static_cast<std::size_t>(j)];
            for (std::size_t i = 0; i < resid.size(); ++i) resid[i] -= c(j) * member[i];
        }
        for (double& v : resid) v *= v;

        report.orders.push_back(order);
        report.coefficients.emplace_back(c.data(), c.data() + m);
        report.residuals.push_back(std::sqrt(std::max(0.0, trapezoid(grid, resid))));
        report.condition_numbers.push_back(cond);
    }
    return report;
}

}  // namespace infoqm
