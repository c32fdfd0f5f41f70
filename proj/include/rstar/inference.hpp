#pragma once

#include <optional>
#include <utility>

#include "rstar/expansion.hpp"

namespace rstar {

/// Below this |r| the modified root switches to its linear representation:
/// the log(q/r)/r form is an exact identity but numerically hollow at the
/// origin, and the linear form is its analytic continuation there.
inline constexpr double kNearZeroRoot = 0.05;

struct InferenceReport {
    double psi0 = 0.0;
    double r = 0.0;
    std::optional<double> wald_t;
    std::optional<double> score_s;
    double rho = 1.0;
    double q = 0.0;
    double r_star = 0.0;
    double r_np = 0.0;
    double r_inf = 0.0;
    /// p-values of the reported root: r_star normally, r on the patched branch
    /// (where r_star is only known through its linear representation).
    double p_one_sided = 0.5;
    double p_two_sided = 1.0;
    /// p-values of each root separately.
    double p_one_sided_r = 0.5;
    double p_two_sided_r = 1.0;
    double p_one_sided_rstar = 0.5;
    double p_two_sided_rstar = 1.0;
    bool near_zero_patched = false;
};

/// Signed root of the likelihood ratio: sign(psi_hat - psi0) *
/// sqrt(2 {l_p(psi_hat) - l_p(psi0)}). Differences in [-1e-8, 0) are clipped
/// to zero; anything lower is a profile inconsistency.
double likelihood_root(double lp_hat, double lp_psi0, double psi_hat, double psi0);

/// t = (psi_hat - psi0) * sqrt(j_p(psi_hat))
double wald_stat(double psi_hat, double psi0, double j_p);

/// s = l_p'(psi0) / sqrt(j_p(psi_hat))
double score_stat(double zeta1_at_psi0, double j_p);

/// rho = exp{(logdet_hat - logdet_psi0) / 2}
double rho_stat(double logdet_hat, double logdet_psi0);

/// q = t * rho (linear exponential) or s / rho (location-scale)
double q_stat(Family family, double t_or_s, double rho);

struct RStarValue {
    double value = 0.0;
    bool patched = false;
};

/// r + log(q/r)/r for |r| >= kNearZeroRoot (sign_inconsistency_error when
/// q/r <= 0); otherwise the linear representation c0 + (1 + c1) r, flagged.
RStarValue r_star(double r, double q, const LinearRepr& coeffs);

/// (r_np, r_inf) with family-correct signs; requires |r| >= kNearZeroRoot.
std::pair<double, double> decompose(double r, double rho, double t_or_s, Family family);

/// (one_sided, two_sided) normal p-values: Phi(-stat) and 2 Phi(-|stat|).
std::pair<double, double> p_values(double stat);

/// Reusable state for testing many psi0 values against one dataset.
struct AnalysisContext {
    ModelSpec model;
    FitResult fit;
    ProfileCurve curve;
    LinearRepr repr;
    FitOptions opts;
};

AnalysisContext prepare_analysis(const ModelSpec& model, const Dataset& data,
                                 int interest_index = 0, const FitOptions& opts = {});

InferenceReport test_psi(const AnalysisContext& ctx, const Dataset& data, double psi0);

/// Single-shot pipeline: fit, profile, and test psi0.
InferenceReport analyze(const ModelSpec& model, const Dataset& data, double psi0,
                        int interest_index = 0, const FitOptions& opts = {});

enum class WhichRoot { r, r_star };

/// Equal-tailed interval by root inversion: endpoints solve
/// stat(psi) = +-z_{(1+level)/2}, bracketed within psi_hat +- 10 SE and
/// bisected to 1e-6 * SE.
std::pair<double, double> confidence_interval(const AnalysisContext& ctx, const Dataset& data,
                                              WhichRoot which, double level);

}  // namespace rstar
