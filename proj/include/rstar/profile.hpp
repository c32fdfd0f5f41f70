#pragma once

#include <vector>

#include "rstar/estimator.hpp"

namespace rstar {

/// Derivatives of the profile log-likelihood and of the nuisance
/// log-determinant along psi, evaluated at the maximum.
///
/// zeta[k-1] holds d^k l_p / d psi^k. j_p = -zeta2 is the profile curvature,
/// kappa_k = zeta_k / (-zeta2)^(k/2) the standardized (quasi-cumulant) form,
/// gamma_k the same stencils applied to log|j_ll(psi, lambda_hat_psi)|.
struct ProfileCurve {
    double psi_hat = 0.0;
    double zeta[4] = {0, 0, 0, 0};
    double j_p = 0.0;
    double kappa3 = 0.0;
    double kappa4 = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double step = 0.0;
    /// Relative change of kappa3 when the stencil step doubles (stability diagnostic).
    double kappa3_step_change = 0.0;
};

/// zeta_k / (-zeta2)^(k/2).
double quasi_cumulant(double zeta_k, double zeta2, int k);

/// 2*radius+1 constrained fits at center + k*step, k = -radius..radius,
/// warm-started outward from the center along each arm.
std::vector<ConstrainedFit> profile_grid(const ModelSpec& model, const Dataset& data,
                                         int interest_index, double center, double step,
                                         int radius,
                                         const std::optional<Vector>& center_warm = std::nullopt,
                                         const FitOptions& opts = {});

/// Central-difference derivatives from a uniform grid of radius >= 4 centered
/// at psi_hat: 5-point stencils of order O(step^4) for zeta1/zeta2 (and
/// gamma1/gamma2), O(step^2) for zeta3/zeta4; the outer points provide the
/// doubled-step kappa3 comparison. Throws curvature_error when -zeta2 <= 0.
ProfileCurve profile_derivs(const std::vector<ConstrainedFit>& grid);

/// First derivative of l_p at the grid center (5-point stencil); used for the
/// score statistic, where the grid is centered at psi0 rather than psi_hat.
double profile_slope(const std::vector<ConstrainedFit>& grid);

/// Convenience pipeline: pilot-curvature step selection around the fitted
/// maximum, radius-4 grid, derivatives; retries once with step/4 if the
/// curvature check trips.
ProfileCurve profile_curve(const ModelSpec& model, const Dataset& data, const FitResult& fit,
                           const FitOptions& opts = {});

/// The step profile_curve would use: 0.5 / sqrt(pilot curvature), with the
/// pilot from a 3-point stencil at spacing 1e-3*(1+|psi_hat|).
double default_profile_step(const ModelSpec& model, const Dataset& data, const FitResult& fit,
                            const FitOptions& opts = {});

}  // namespace rstar
