#include "rstar/profile.hpp"

#include <cmath>
#include <sstream>

#include "rstar/errors.hpp"

namespace rstar {

namespace {

// 5-point central stencils at spacing h around index c of f.
// Orders: d1, d2 accurate to O(h^4); d3, d4 to O(h^2).
struct Stencil5 {
    double d1, d2, d3, d4;
};

template <typename Get>
Stencil5 stencil5(const Get& f, int c, int stride, double h) {
    const double fm2 = f(c - 2 * stride), fm1 = f(c - stride), f0 = f(c),
                 fp1 = f(c + stride), fp2 = f(c + 2 * stride);
    Stencil5 s;
    s.d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
    s.d2 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
    s.d3 = (-fm2 + 2.0 * fm1 - 2.0 * fp1 + fp2) / (2.0 * h * h * h);
    s.d4 = (fm2 - 4.0 * fm1 + 6.0 * f0 - 4.0 * fp1 + fp2) / (h * h * h * h);
    return s;
}

ConstrainedFit run_fit(const ModelSpec& model, const Dataset& data, int interest_index, double psi,
                       const std::optional<Vector>& warm, const FitOptions& opts) {
    try {
        return fit_constrained(model, data, psi, interest_index, warm, opts);
    } catch (const convergence_error& e) {
        std::ostringstream os;
        os << "constrained fit at psi=" << psi << " failed: " << e.what();
        throw convergence_error(os.str());
    } catch (const divergence_error& e) {
        std::ostringstream os;
        os << "constrained fit at psi=" << psi << " failed: " << e.what();
        throw divergence_error(os.str());
    }
}

}  // namespace

double quasi_cumulant(double zeta_k, double zeta2, int k) {
    return zeta_k / std::pow(-zeta2, 0.5 * k);
}

std::vector<ConstrainedFit> profile_grid(const ModelSpec& model, const Dataset& data,
                                         int interest_index, double center, double step,
                                         int radius, const std::optional<Vector>& center_warm,
                                         const FitOptions& opts) {
    if (!(step > 0.0)) throw invalid_parameter_error("profile_grid: step must be positive");
    if (radius < 0) throw invalid_parameter_error("profile_grid: radius must be >= 0");

    std::vector<ConstrainedFit> grid(2 * radius + 1);
    grid[radius] = run_fit(model, data, interest_index, center, center_warm, opts);
    // two outward arms, each warm-started from its neighbor
    for (int k = 1; k <= radius; ++k) {
        grid[radius + k] = run_fit(model, data, interest_index, center + k * step,
                                   grid[radius + k - 1].lambda_hat, opts);
        grid[radius - k] = run_fit(model, data, interest_index, center - k * step,
                                   grid[radius - k + 1].lambda_hat, opts);
    }
    return grid;
}

double profile_slope(const std::vector<ConstrainedFit>& grid) {
    const int m = static_cast<int>(grid.size());
    if (m < 5 || m % 2 == 0)
        throw invalid_parameter_error("profile_slope needs an odd grid of at least 5 points");
    const int c = m / 2;
    const double h = grid[c + 1].psi - grid[c].psi;
    const auto lp = [&](int i) { return grid[i].loglik_profile; };
    return stencil5(lp, c, 1, h).d1;
}

ProfileCurve profile_derivs(const std::vector<ConstrainedFit>& grid) {
    const int m = static_cast<int>(grid.size());
    if (m < 9 || m % 2 == 0)
        throw invalid_parameter_error("profile_derivs needs an odd grid of radius >= 4");
    const int c = m / 2;
    const double h = grid[c + 1].psi - grid[c].psi;
    for (int i = 0; i + 1 < m; ++i) {
        const double d = grid[i + 1].psi - grid[i].psi;
        if (std::abs(d - h) > 1e-9 * (1.0 + std::abs(h)))
            throw invalid_parameter_error("profile_derivs: grid spacing is not uniform");
    }

    const auto lp = [&](int i) { return grid[i].loglik_profile; };
    const auto ld = [&](int i) { return grid[i].logdet_nuisance; };

    const Stencil5 sl = stencil5(lp, c, 1, h);
    const Stencil5 sd = stencil5(ld, c, 1, h);

    ProfileCurve curve;
    curve.psi_hat = grid[c].psi;
    curve.step = h;
    curve.zeta[0] = sl.d1;
    curve.zeta[1] = sl.d2;
    curve.zeta[2] = sl.d3;
    curve.zeta[3] = sl.d4;
    if (!(-sl.d2 > 0.0)) {
        std::ostringstream os;
        os << "profile not locally concave at psi=" << curve.psi_hat << " (zeta2=" << sl.d2 << ")";
        throw curvature_error(os.str());
    }
    curve.j_p = -sl.d2;
    if (std::abs(sl.d1) > 1e-5 * curve.j_p * h) {
        std::ostringstream os;
        os << "grid center is not the profile maximum: zeta1=" << sl.d1 << " at psi=" << curve.psi_hat;
        throw profile_inconsistency_error(os.str());
    }
    curve.kappa3 = quasi_cumulant(sl.d3, sl.d2, 3);
    curve.kappa4 = quasi_cumulant(sl.d4, sl.d2, 4);
    curve.gamma1 = sd.d1;
    curve.gamma2 = sd.d2;

    // same stencils at doubled spacing on the even-index points
    const Stencil5 sl2 = stencil5(lp, c, 2, 2.0 * h);
    if (-sl2.d2 > 0.0) {
        const double kappa3_wide = quasi_cumulant(sl2.d3, sl2.d2, 3);
        curve.kappa3_step_change =
            std::abs(curve.kappa3 - kappa3_wide) / std::max(std::abs(curve.kappa3), 1e-12);
    }
    return curve;
}

double default_profile_step(const ModelSpec& model, const Dataset& data, const FitResult& fit,
                            const FitOptions& opts) {
    const int interest = fit.theta_hat.interest_index;
    const double psi_hat = fit.psi_hat();
    const double h0 = 1e-3 * (1.0 + std::abs(psi_hat));
    const double lp_plus =
        run_fit(model, data, interest, psi_hat + h0, fit.theta_hat.lambda, opts).loglik_profile;
    const double lp_minus =
        run_fit(model, data, interest, psi_hat - h0, fit.theta_hat.lambda, opts).loglik_profile;
    const double pilot = -(lp_plus - 2.0 * fit.loglik_at_max + lp_minus) / (h0 * h0);
    if (!(pilot > 0.0)) {
        std::ostringstream os;
        os << "pilot curvature non-positive (" << pilot << ") at psi_hat=" << psi_hat;
        throw curvature_error(os.str());
    }
    return 0.5 / std::sqrt(pilot);
}

ProfileCurve profile_curve(const ModelSpec& model, const Dataset& data, const FitResult& fit,
                           const FitOptions& opts) {
    const int interest = fit.theta_hat.interest_index;
    double step = default_profile_step(model, data, fit, opts);
    for (int attempt = 0;; ++attempt) {
        try {
            const auto grid = profile_grid(model, data, interest, fit.psi_hat(), step, 4,
                                           fit.theta_hat.lambda, opts);
            return profile_derivs(grid);
        } catch (const curvature_error&) {
            if (attempt >= 1) throw;
            step *= 0.25;  // one retry on rough profiles
        }
    }
}

}  // namespace rstar
