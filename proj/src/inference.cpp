#include "rstar/inference.hpp"

#include <cmath>
#include <sstream>

#include "rstar/errors.hpp"
#include "rstar/numutil.hpp"

namespace rstar {

double likelihood_root(double lp_hat, double lp_psi0, double psi_hat, double psi0) {
    double diff = lp_hat - lp_psi0;
    if (diff < -1e-8) {
        std::ostringstream os;
        os << "constrained fit exceeds the global maximum by " << -diff
           << " at psi0=" << psi0 << "; profile is inconsistent";
        throw profile_inconsistency_error(os.str());
    }
    if (diff < 0.0) diff = 0.0;
    const double sign = psi_hat > psi0 ? 1.0 : (psi_hat < psi0 ? -1.0 : 0.0);
    return sign * std::sqrt(2.0 * diff);
}

double wald_stat(double psi_hat, double psi0, double j_p) {
    if (!(j_p > 0.0)) throw invalid_parameter_error("wald_stat: j_p must be positive");
    return (psi_hat - psi0) * std::sqrt(j_p);
}

double score_stat(double zeta1_at_psi0, double j_p) {
    if (!(j_p > 0.0)) throw invalid_parameter_error("score_stat: j_p must be positive");
    return zeta1_at_psi0 / std::sqrt(j_p);
}

double rho_stat(double logdet_hat, double logdet_psi0) {
    if (!std::isfinite(logdet_hat) || !std::isfinite(logdet_psi0))
        throw invalid_parameter_error("rho_stat: log-determinants must be finite");
    return std::exp(0.5 * (logdet_hat - logdet_psi0));
}

double q_stat(Family family, double t_or_s, double rho) {
    if (!(rho > 0.0)) throw invalid_parameter_error("q_stat: rho must be positive");
    return family == Family::linear_exponential ? t_or_s * rho : t_or_s / rho;
}

RStarValue r_star(double r, double q, const LinearRepr& coeffs) {
    if (std::abs(r) < kNearZeroRoot)
        return {coeffs.c0 + (1.0 + coeffs.c1) * r, true};
    const double ratio = q / r;
    if (!(ratio > 0.0)) {
        std::ostringstream os;
        os << "q and r disagree in sign away from the maximum (r=" << r << ", q=" << q << ")";
        throw sign_inconsistency_error(os.str());
    }
    return {r + std::log(ratio) / r, false};
}

std::pair<double, double> decompose(double r, double rho, double t_or_s, Family family) {
    if (std::abs(r) < kNearZeroRoot)
        throw invalid_parameter_error("decompose requires |r| >= the near-zero threshold");
    const double ratio = t_or_s / r;
    if (!(ratio > 0.0))
        throw sign_inconsistency_error("decompose: statistic and r disagree in sign");
    const double log_rho = std::log(rho);
    const double r_np = (family == Family::linear_exponential ? log_rho : -log_rho) / r;
    const double r_inf = std::log(ratio) / r;
    return {r_np, r_inf};
}

std::pair<double, double> p_values(double stat) {
    if (!std::isfinite(stat)) throw invalid_parameter_error("p_values: statistic must be finite");
    return {normal_cdf(-stat), 2.0 * normal_cdf(-std::abs(stat))};
}

AnalysisContext prepare_analysis(const ModelSpec& model, const Dataset& data, int interest_index,
                                 const FitOptions& opts) {
    AnalysisContext ctx;
    ctx.model = model;
    ctx.opts = opts;
    ctx.fit = fit_mle(model, data, interest_index, std::nullopt, opts);
    ctx.curve = profile_curve(model, data, ctx.fit, opts);
    ctx.repr = linear_repr(ctx.curve, model.family, data.n());
    return ctx;
}

InferenceReport test_psi(const AnalysisContext& ctx, const Dataset& data, double psi0) {
    const ModelSpec& model = ctx.model;
    const int interest = ctx.fit.theta_hat.interest_index;
    const ConstrainedFit cf =
        fit_constrained(model, data, psi0, interest, ctx.fit.theta_hat.lambda, ctx.opts);

    InferenceReport rep;
    rep.psi0 = psi0;
    rep.r = likelihood_root(ctx.fit.loglik_at_max, cf.loglik_profile, ctx.fit.psi_hat(), psi0);
    rep.rho = rho_stat(ctx.fit.logdet_nuisance, cf.logdet_nuisance);

    const double t = wald_stat(ctx.fit.psi_hat(), psi0, ctx.curve.j_p);
    rep.wald_t = t;
    double t_or_s = t;
    if (model.family == Family::location_scale) {
        const auto grid =
            profile_grid(model, data, interest, psi0, ctx.curve.step, 2, cf.lambda_hat, ctx.opts);
        const double s = score_stat(profile_slope(grid), ctx.curve.j_p);
        rep.score_s = s;
        t_or_s = s;
    }
    rep.q = q_stat(model.family, t_or_s, rep.rho);

    const RStarValue rs = r_star(rep.r, rep.q, ctx.repr);
    rep.r_star = rs.value;
    rep.near_zero_patched = rs.patched;
    if (rs.patched) {
        // the exact log-ratio split is hollow near r=0; report the
        // first-order family predictions, which sum to the patched r_star
        std::tie(rep.r_np, rep.r_inf) = predicted_adjustments(ctx.curve, model.family, rep.r);
    } else {
        std::tie(rep.r_np, rep.r_inf) = decompose(rep.r, rep.rho, t_or_s, model.family);
    }

    std::tie(rep.p_one_sided_r, rep.p_two_sided_r) = p_values(rep.r);
    std::tie(rep.p_one_sided_rstar, rep.p_two_sided_rstar) = p_values(rep.r_star);
    if (rs.patched) {
        rep.p_one_sided = rep.p_one_sided_r;
        rep.p_two_sided = rep.p_two_sided_r;
    } else {
        rep.p_one_sided = rep.p_one_sided_rstar;
        rep.p_two_sided = rep.p_two_sided_rstar;
    }
    return rep;
}

InferenceReport analyze(const ModelSpec& model, const Dataset& data, double psi0,
                        int interest_index, const FitOptions& opts) {
    return test_psi(prepare_analysis(model, data, interest_index, opts), data, psi0);
}

namespace {

double root_stat(const AnalysisContext& ctx, const Dataset& data, WhichRoot which, double psi) {
    const InferenceReport rep = test_psi(ctx, data, psi);
    return which == WhichRoot::r ? rep.r : rep.r_star;
}

// stat is decreasing in psi; solve stat(psi) = target by bisection.
double invert_root(const AnalysisContext& ctx, const Dataset& data, WhichRoot which, double target,
                   double lo, double hi, double tol) {
    double f_lo = root_stat(ctx, data, which, lo) - target;
    double f_hi = root_stat(ctx, data, which, hi) - target;
    if (!(f_lo > 0.0 && f_hi < 0.0)) {
        std::ostringstream os;
        os << "no bracket for root inversion in [" << lo << ", " << hi << "]";
        throw bracket_error(os.str());
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = root_stat(ctx, data, which, mid) - target;
        if (f_mid > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::pair<double, double> confidence_interval(const AnalysisContext& ctx, const Dataset& data,
                                              WhichRoot which, double level) {
    if (!(level > 0.0 && level < 1.0))
        throw invalid_parameter_error("confidence level must be in (0,1)");
    const double z = normal_quantile(0.5 * (1.0 + level));
    const double se = 1.0 / std::sqrt(ctx.curve.j_p);
    const double psi_hat = ctx.fit.psi_hat();
    const double tol = 1e-6 * se;
    const double lo = invert_root(ctx, data, which, z, psi_hat - 10.0 * se, psi_hat, tol);
    const double hi = invert_root(ctx, data, which, -z, psi_hat, psi_hat + 10.0 * se, tol);
    return {lo, hi};
}

}  // namespace rstar
