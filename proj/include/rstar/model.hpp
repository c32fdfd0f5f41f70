#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

namespace rstar {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Parameter split into the scalar interest component psi and the nuisance
/// block lambda. `interest_index` says which coordinate of the model's
/// natural parameter vector (regression coefficients, then sigma for
/// location-scale) psi occupies; lambda holds the remaining coordinates in
/// their natural order.
struct ParameterVector {
    double psi = 0.0;
    Vector lambda;
    int interest_index = 0;

    int dim() const { return 1 + static_cast<int>(lambda.size()); }
};

struct Dataset {
    Vector y;  // responses, length n
    Matrix X;  // covariates, n x p (intercept column included when requested)

    int n() const { return static_cast<int>(y.size()); }
    int ncols() const { return static_cast<int>(X.cols()); }
};

enum class Family { linear_exponential, location_scale };

enum class ErrorDensity { normal, student_t, logistic };

/// Model family contract. The linear exponential family is realized as the
/// Bernoulli-logistic GLM with canonical link; location-scale is
/// y_i = x_i' beta + sigma * eps_i with eps from a known density. A fixed
/// sigma turns the latter into a pure location family (used for the
/// exact-normal degenerate checks).
struct ModelSpec {
    Family family = Family::linear_exponential;
    ErrorDensity error_density = ErrorDensity::normal;
    double t_dof = 5.0;
    std::optional<double> fixed_sigma;

    static ModelSpec logistic_regression();
    static ModelSpec locscale_normal();
    static ModelSpec locscale_t(double dof);
    static ModelSpec locscale_logistic();
    static ModelSpec normal_known_sigma(double sigma);

    bool scale_is_free() const {
        return family == Family::location_scale && !fixed_sigma.has_value();
    }

    /// Dimension of the natural parameter vector for a design with `ncols` columns.
    int param_dim(int ncols) const { return ncols + (scale_is_free() ? 1 : 0); }

    std::string name() const;
};

/// Natural-order coordinates (coefficients, then sigma if free) from the split form.
Vector full_from_split(const ParameterVector& theta);

/// Split form from natural-order coordinates.
ParameterVector split_from_full(const Vector& full, int interest_index);

/// Checks Dataset shape and numeric rank; throws data_error on violation.
/// Binary responses are additionally required for the logistic family.
void validate_dataset(const ModelSpec& model, const Dataset& data);

Vector linear_predictor(const ModelSpec& model, const Dataset& data, const Vector& full);

/// Log-likelihood l(theta; y). Throws invalid_parameter_error when theta is
/// outside the admissible domain (non-finite entries, sigma <= 0).
double loglik(const ModelSpec& model, const Dataset& data, const ParameterVector& theta);

/// Analytic gradient in (psi, lambda) order.
Vector grad(const ModelSpec& model, const Dataset& data, const ParameterVector& theta);

/// Analytic Hessian in (psi, lambda) order, symmetric by construction.
Matrix hessian(const ModelSpec& model, const Dataset& data, const ParameterVector& theta);

}  // namespace rstar
