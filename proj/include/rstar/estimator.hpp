#pragma once

#include <optional>

#include "rstar/model.hpp"

namespace rstar {

struct FitOptions {
    double tol_grad = 1e-10;  // relative: ||grad||_inf <= tol * (1 + |loglik|)
    int max_iter = 200;
    double coef_bound = 1e6;     // iterates escaping this norm trigger a divergence error
    double sigma_floor = 1e-8;   // sigma below this means the scale is collapsing
    double sigma_cap = 1e8;
    double separation_eta = 20.0;  // all |eta| beyond this, sign-aligned with y => separation
};

struct FitResult {
    ParameterVector theta_hat;
    double loglik_at_max = 0.0;
    Matrix observed_info;           // j(theta_hat) = -hessian, (psi, lambda) order
    double logdet_nuisance = 0.0;   // log|j_lambda_lambda(theta_hat)|
    int iterations = 0;
    bool converged = false;

    double psi_hat() const { return theta_hat.psi; }
    /// Profile standard error sqrt([j^-1]_psi_psi).
    double se_psi() const;
};

struct ConstrainedFit {
    double psi = 0.0;
    Vector lambda_hat;             // nuisance maximizer at fixed psi
    double loglik_profile = 0.0;   // l_p(psi)
    Matrix nuisance_info;          // j_ll(psi, lambda_hat), (p-1) x (p-1)
    Vector cross_info;             // j_psi_lambda(psi, lambda_hat)
    double logdet_nuisance = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Maximum likelihood by damped Newton (step-halving on the log-likelihood;
/// information-scaled ascent fallback when the Hessian is not negative
/// definite). Deterministic given (data, init): zeros for the logistic
/// family, least squares for location-scale when no init is supplied. For
/// free-scale models the iteration runs on log(sigma); all reported
/// quantities are on the natural (beta, sigma) scale.
FitResult fit_mle(const ModelSpec& model, const Dataset& data, int interest_index = 0,
                  const std::optional<ParameterVector>& init = std::nullopt,
                  const FitOptions& opts = {});

/// Constrained maximum over the nuisance block at fixed psi = psi0.
ConstrainedFit fit_constrained(const ModelSpec& model, const Dataset& data, double psi0,
                               int interest_index,
                               const std::optional<Vector>& warm_start = std::nullopt,
                               const FitOptions& opts = {});

/// d(lambda_hat_psi)/d(psi), the solution of j_ll * x = -j_psi_lambda at the fit.
Vector constrained_slope(const ConstrainedFit& fit);

/// log|A| for symmetric positive definite A via Cholesky; conditioning_error if not PD.
double logdet_spd(const Matrix& a, const char* what);

}  // namespace rstar
