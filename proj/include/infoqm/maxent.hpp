#pragma once

#include <array>
#include <optional>
#include <vector>

#include "infoqm/numerics.hpp"

namespace infoqm {

struct MomentConstraint {
    int order;
    double value;
};

/// Moment constraints <x^i> = c_i on a support [lo, hi]; either end may be
/// infinite.
struct MomentSpec1D {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<MomentConstraint> constraints;

    bool bounded() const;
    int top_order() const;
    /// Throws ValidationError for unsorted/duplicate orders, non-finite
    /// values, or an unbounded support whose top order is not even.
    void validate() const;
};

struct MomentConstraint2D {
    int i;
    int j;
    double value;
};

/// Constraints <x^i y^j> = c_ij on the rectangle [x_lo, x_hi] x [y_lo, y_hi].
struct MomentSpec2D {
    double x_lo = 0.0;
    double x_hi = 1.0;
    double y_lo = 0.0;
    double y_hi = 1.0;
    std::vector<MomentConstraint2D> constraints;

    void validate() const;
};

inline constexpr int kMaxTotalDegree2D = 4;

/// |x - location|^multiplicity
struct ZeroFactor {
    double location;
    double multiplicity;
};

/// |x - location|^(-exponent), exponent in (0, 1)
struct SingularityFactor {
    double location;
    double exponent;
};

/// Prescribed zeros and singularities multiplying the exponential family.
struct EndpointFactors {
    std::vector<ZeroFactor> zeros;
    std::vector<SingularityFactor> singularities;

    bool trivial() const { return zeros.empty() && singularities.empty(); }
    /// Locations must lie in [lo, hi]; multiplicities positive; exponents in
    /// (0, 1). A location whose net singular exponent reaches 1 is not
    /// integrable and raises NumericError.
    void validate(double lo, double hi) const;
    /// Sorted distinct factor locations.
    std::vector<double> locations() const;
};

struct FitDiagnostics {
    int iterations = 0;
    double max_moment_residual = 0.0;
    double normalization_error = 0.0;
    /// Estimated mass outside the integration window (0 for bounded support).
    double tail_mass = 0.0;
};

/// rho(x) = Z(x) S(x) exp(-a_0 - sum_{i>=1} a_i x^i) on a support that may be
/// unbounded; integrals run over a finite window that covers all but a
/// negligible tail.
class ExpFamilyDensity1D {
public:
    /// Builds the density and sets a_0 so that it integrates to one.
    /// `multipliers[i]` is a_i; entry 0 is ignored.
    static ExpFamilyDensity1D normalized(std::vector<double> multipliers, double support_lo,
                                         double support_hi, EndpointFactors factors = {},
                                         std::optional<std::array<double, 2>> window = {});

    /// Takes a_0 as given, without renormalizing.
    ExpFamilyDensity1D(std::vector<double> multipliers, double support_lo, double support_hi,
                       EndpointFactors factors = {},
                       std::optional<std::array<double, 2>> window = {});

    const std::vector<double>& multipliers() const { return multipliers_; }
    double a0() const { return multipliers_.front(); }
    double support_lo() const { return support_lo_; }
    double support_hi() const { return support_hi_; }
    double window_lo() const { return rule_.lo; }
    double window_hi() const { return rule_.hi; }
    const EndpointFactors& factors() const { return factors_; }
    const EndpointRule& rule() const { return rule_; }

    /// -a_0 - sum a_i x^i
    double log_kernel(double x) const;
    /// ln Z + ln S at quadrature node k, using exact endpoint distances.
    double log_factors_at_node(std::size_t k) const;

    /// <x^order> by the reference quadrature.
    double moment(int order) const;
    /// Integral of the density over the window.
    double total_mass() const;

    FitDiagnostics diagnostics;

private:
    std::vector<double> multipliers_;
    double support_lo_;
    double support_hi_;
    EndpointFactors factors_;
    EndpointRule rule_;
};

struct DensityValue {
    double value;
    /// True at a singularity location, where value is +infinity.
    bool singular;
};

struct FitOptions1D {
    double tol = 1e-10;
    /// Starting multipliers indexed by order (entry 0 ignored).
    std::optional<std::vector<double>> init;
    EndpointFactors factors;
};

inline constexpr int kMaxNewtonIterations = 100;

/// Maximum-entropy multipliers matching every constraint within `tol`, by
/// damped Newton iteration on the convex dual ln N(a) + sum a_i c_i.
/// Throws InfeasibleError, ConvergenceError or ValidationError.
ExpFamilyDensity1D fit_multipliers_1d(const MomentSpec1D& spec, const FitOptions1D& options = {});

DensityValue density_eval(const ExpFamilyDensity1D& d, double x);

/// <ln rho>; zeros of the density contribute rho ln rho = 0.
double information(const ExpFamilyDensity1D& d);

/// <ln(rho / (Z S))>; identical to information() when the factors are trivial.
double modified_information(const ExpFamilyDensity1D& d);

struct GradientCheck {
    double analytic;
    double numeric;
};

/// <x^order> against -d ln N / d a_order by a central difference of step h.
GradientCheck moment_gradient_check(const ExpFamilyDensity1D& d, int order, double h);

/// Coefficients a_ij of rho(x, y) = exp(-sum a_ij x^i y^j), i + j <= 4;
/// coefficient (0, 0) is the normalization.
class ExpFamilyDensity2D {
public:
    using Coefficients = std::array<std::array<double, kMaxTotalDegree2D + 1>, kMaxTotalDegree2D + 1>;

    static ExpFamilyDensity2D normalized(const Coefficients& a, double x_lo, double x_hi,
                                         double y_lo, double y_hi);

    double coefficient(int i, int j) const { return a_[i][j]; }
    const Coefficients& coefficients() const { return a_; }
    double x_lo() const { return x_lo_; }
    double x_hi() const { return x_hi_; }
    double y_lo() const { return y_lo_; }
    double y_hi() const { return y_hi_; }

    double log_density(double x, double y) const;
    double density(double x, double y) const;
    double moment(int i, int j) const;
    double total_mass() const;

    FitDiagnostics diagnostics;

private:
    ExpFamilyDensity2D(const Coefficients& a, double x_lo, double x_hi, double y_lo, double y_hi);

    Coefficients a_{};
    double x_lo_, x_hi_, y_lo_, y_hi_;
    EndpointRule x_rule_;
    EndpointRule y_rule_;
};

ExpFamilyDensity2D fit_multipliers_2d(const MomentSpec2D& spec, double tol = 1e-10);

}  // namespace infoqm
