#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "infoqm/error.hpp"
#include "infoqm/numerics.hpp"
#include "infoqm/oscillator.hpp"

namespace infoqm {

/// Real functions sampled on one shared grid.
struct BasisSet {
    Grid1D grid;
    std::vector<std::vector<double>> members;
    std::vector<std::string> labels;

    void validate() const;
    std::size_t size() const { return members.size(); }
};

/// Grid used by the analysis defaults and the CLI: [-14, 14], 8001 points.
Grid1D default_analysis_grid();

/// Closed-form states n = 0..n_max solved by solve_state.
BasisSet log_basis(int n_max, const Grid1D& grid);
/// Linear oscillator eigenfunctions n = 0..n_max.
BasisSet linear_basis(int n_max, const Grid1D& grid);

/// Trapezoid quadrature of f g. ValidationError when the grids differ or the
/// sample counts do not match the grid.
double inner_product(const Grid1D& gf, std::span<const double> f, const Grid1D& gg,
                     std::span<const double> g);

struct GramReport {
    std::vector<std::vector<double>> matrix;
    std::string quadrature = "trapezoid";
    std::size_t grid_points = 0;
    double x_min = 0.0;
    double x_max = 0.0;
};

GramReport gram_matrix(const BasisSet& basis, unsigned threads = 1);

enum class ResidualKind {
    /// eigen_residual: the logarithmic equation.
    nonlinear,
    /// linear_residual: H - E.
    linear,
};

/// <psi_lower, R(psi_upper)> on the grid.
double mu0_estimate(const OscillatorState& lower, const OscillatorState& upper, const Grid1D& grid,
                    ResidualKind kind = ResidualKind::nonlinear);

/// True iff energies increase strictly in the given order.
bool energy_ordering_check(std::span<const OscillatorState> states);

/// <psi, -psi''/2 + x^2 psi/2> with the analytic second derivative.
double energy_expectation(const OscillatorState& s, const Grid1D& grid);

/// <ln(psi^2 / Z_n^2)> by quadrature; cross-check of state_information.
double state_information_quadrature(const OscillatorState& s, const Grid1D& grid);

struct ProjectionReport {
    std::string target;
    /// Truncation orders: order m uses the first m basis members.
    std::vector<int> orders;
    /// Gram-system coefficients per order.
    std::vector<std::vector<double>> coefficients;
    std::vector<double> residuals;
    std::vector<double> condition_numbers;
};

inline constexpr double kMaxGramCondition = 1e12;

/// Gram condition number above kMaxGramCondition. `partial` holds every order
/// completed before the failing one.
class IllConditionedError : public NumericError {
public:
    IllConditionedError(const std::string& what, ProjectionReport partial)
        : NumericError(what), partial(std::move(partial)) {}

    ProjectionReport partial;
};

/// Least-squares projection of `target` onto the leading members of the
/// basis, solved through the Gram system, with the L2 norm of the pointwise
/// residual per order.
ProjectionReport completeness_projection(std::span<const double> target, const std::string& label,
                                         const BasisSet& basis, std::span<const int> orders);

}  // namespace infoqm
