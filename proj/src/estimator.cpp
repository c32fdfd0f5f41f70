#include "rstar/estimator.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "rstar/errors.hpp"

namespace rstar {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Internal optimization coordinates are the (psi, lambda)-ordered parameter
// vector with sigma replaced by log(sigma). Sigma is never the interest
// parameter, so for free-scale models it always sits in the last slot.
struct Problem {
    const ModelSpec& model;
    const Dataset& data;
    int interest_index;
    int dim;
    bool log_sigma;

    ParameterVector theta_at(const Vector& v) const {
        ParameterVector theta;
        theta.interest_index = interest_index;
        theta.psi = v[0];
        theta.lambda = v.tail(dim - 1);
        if (log_sigma) theta.lambda[dim - 2] = std::exp(v[dim - 1]);
        return theta;
    }

    Vector internal_of(const ParameterVector& theta) const {
        Vector v(dim);
        v[0] = theta.psi;
        v.tail(dim - 1) = theta.lambda;
        if (log_sigma) v[dim - 1] = std::log(theta.lambda[dim - 2]);
        return v;
    }

    double value(const Vector& v) const {
        try {
            return loglik(model, data, theta_at(v));
        } catch (const invalid_parameter_error&) {
            return kNegInf;  // line-search probe left the admissible domain
        }
    }

    // Chain rule for the log(sigma) coordinate.
    Vector to_internal_grad(const ParameterVector& theta, Vector g) const {
        if (log_sigma) g[dim - 1] *= theta.lambda[dim - 2];
        return g;
    }

    Matrix to_internal_hess(const ParameterVector& theta, const Vector& g_nat, Matrix h) const {
        if (log_sigma) {
            const double sigma = theta.lambda[dim - 2];
            h.row(dim - 1) *= sigma;
            h.col(dim - 1) *= sigma;
            h(dim - 1, dim - 1) += sigma * g_nat[dim - 1];
        }
        return h;
    }

    void check_divergence(const ParameterVector& theta, const FitOptions& opts) const {
        const Vector full = full_from_split(theta);
        const int p = data.ncols();
        if (full.head(p).cwiseAbs().maxCoeff() > opts.coef_bound)
            throw divergence_error("coefficient iterates escaped bound " +
                                   std::to_string(opts.coef_bound) + "; likelihood appears unbounded");
        if (model.scale_is_free()) {
            const double sigma = full[p];
            if (sigma < opts.sigma_floor)
                throw divergence_error("sigma collapsed below " + std::to_string(opts.sigma_floor) +
                                       "; no interior maximum in the scale");
            if (sigma > opts.sigma_cap) throw divergence_error("sigma escaped above cap");
        }
        if (model.family == Family::linear_exponential) {
            const Vector eta = linear_predictor(model, data, full);
            bool separated = true;
            for (int i = 0; i < data.n() && separated; ++i) {
                const double s = data.y[i] == 1.0 ? eta[i] : -eta[i];
                separated = s > opts.separation_eta;
            }
            if (separated)
                throw divergence_error("complete separation: all observations fitted beyond eta=" +
                                       std::to_string(opts.separation_eta) + ", no finite MLE");
        }
    }
};

struct NewtonOutcome {
    Vector v;
    int iterations = 0;
};

// Maximize over the coordinates listed in `active` (the rest of v stays fixed).
// Convergence is judged on the natural-scale gradient restricted to `active`.
NewtonOutcome newton_maximize(const Problem& prob, Vector v, const std::vector<int>& active,
                              const FitOptions& opts) {
    const int m = static_cast<int>(active.size());
    NewtonOutcome out;
    if (m == 0) {
        out.v = v;
        return out;
    }
    double f = prob.value(v);
    if (!std::isfinite(f)) throw invalid_parameter_error("initial point has non-finite log-likelihood");

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        const ParameterVector theta = prob.theta_at(v);
        prob.check_divergence(theta, opts);

        const Vector g_nat = grad(prob.model, prob.data, theta);
        double gmax = 0.0;
        for (int a : active) gmax = std::max(gmax, std::abs(g_nat[a]));
        if (gmax <= opts.tol_grad * (1.0 + std::abs(f))) {
            out.v = v;
            out.iterations = iter;
            return out;
        }

        const Vector g_int = prob.to_internal_grad(theta, g_nat);
        const Matrix h_int = prob.to_internal_hess(theta, g_nat, hessian(prob.model, prob.data, theta));

        Vector g_a(m);
        Matrix j_a(m, m);
        for (int r = 0; r < m; ++r) {
            g_a[r] = g_int[active[r]];
            for (int c = 0; c < m; ++c) j_a(r, c) = -h_int(active[r], active[c]);
        }

        Vector dir(m);
        Eigen::LLT<Matrix> llt(j_a);
        if (llt.info() == Eigen::Success) {
            dir = llt.solve(g_a);
        } else {
            // Hessian not negative definite: ascend along the gradient scaled
            // by the information diagonal.
            const double dmax = std::max(j_a.diagonal().cwiseAbs().maxCoeff(), 1.0);
            for (int r = 0; r < m; ++r)
                dir[r] = g_a[r] / std::max(std::abs(j_a(r, r)), 1e-12 * dmax);
        }

        Vector step = Vector::Zero(prob.dim);
        for (int r = 0; r < m; ++r) step[active[r]] = dir[r];

        double t = 1.0;
        bool accepted = false;
        for (int k = 0; k < 60; ++k, t *= 0.5) {
            const Vector cand = v + t * step;
            const double fc = prob.value(cand);
            if (fc > f) {
                v = cand;
                f = fc;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // No ascent at any step length: either we are numerically at the
            // apex, or something is genuinely wrong.
            if (gmax <= 1e4 * opts.tol_grad * (1.0 + std::abs(f))) {
                out.v = v;
                out.iterations = iter;
                return out;
            }
            std::ostringstream os;
            os << "line search stalled at iteration " << iter << " with |grad|_inf=" << gmax
               << ", loglik=" << f;
            throw convergence_error(os.str());
        }
    }
    std::ostringstream os;
    os << "no convergence after " << opts.max_iter
       << " iterations; last loglik=" << f;
    throw convergence_error(os.str());
}

// Ordinary least squares via column-pivoted QR.
Vector least_squares(const Matrix& x, const Vector& y) {
    return x.colPivHouseholderQr().solve(y);
}

ParameterVector default_init(const ModelSpec& model, const Dataset& data, int interest_index) {
    const int p = data.ncols();
    const int d = model.param_dim(p);
    Vector full = Vector::Zero(d);
    if (model.family == Family::location_scale) {
        const Vector beta = least_squares(data.X, data.y);
        full.head(p) = beta;
        if (model.scale_is_free()) {
            const double rss = (data.y - data.X * beta).squaredNorm();
            full[p] = std::max(std::sqrt(rss / data.n()), 1e-8);
        }
    }
    return split_from_full(full, interest_index);
}

Vector constrained_init(const ModelSpec& model, const Dataset& data, double psi0,
                        int interest_index) {
    const int p = data.ncols();
    const int d = model.param_dim(p);
    Vector lambda = Vector::Zero(d - 1);
    if (model.family == Family::location_scale) {
        // restricted least squares with the interest column pinned at psi0
        Matrix xr(data.n(), p - 1);
        int k = 0;
        for (int j = 0; j < p; ++j)
            if (j != interest_index) xr.col(k++) = data.X.col(j);
        const Vector yr = data.y - psi0 * data.X.col(interest_index);
        if (p > 1) {
            const Vector beta_r = least_squares(xr, yr);
            lambda.head(p - 1) = beta_r;
            if (model.scale_is_free())
                lambda[d - 2] = std::max(std::sqrt((yr - xr * beta_r).squaredNorm() / data.n()), 1e-8);
        } else if (model.scale_is_free()) {
            lambda[d - 2] = std::max(std::sqrt(yr.squaredNorm() / data.n()), 1e-8);
        }
    }
    return lambda;
}

Problem make_problem(const ModelSpec& model, const Dataset& data, int interest_index) {
    validate_dataset(model, data);
    const int d = model.param_dim(data.ncols());
    if (interest_index < 0 || interest_index >= data.ncols())
        throw invalid_parameter_error("interest_index must name a design column");
    return Problem{model, data, interest_index, d, model.scale_is_free()};
}

}  // namespace

double logdet_spd(const Matrix& a, const char* what) {
    if (a.rows() == 0) return 0.0;
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success)
        throw conditioning_error(std::string(what) + " is not positive definite");
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

double FitResult::se_psi() const {
    Eigen::LLT<Matrix> llt(observed_info);
    if (llt.info() != Eigen::Success) throw conditioning_error("observed information not positive definite");
    Vector e = Vector::Zero(observed_info.rows());
    e[0] = 1.0;
    return std::sqrt(llt.solve(e)[0]);
}

FitResult fit_mle(const ModelSpec& model, const Dataset& data, int interest_index,
                  const std::optional<ParameterVector>& init, const FitOptions& opts) {
    const Problem prob = make_problem(model, data, interest_index);
    const ParameterVector start = init ? *init : default_init(model, data, interest_index);
    if (start.dim() != prob.dim || start.interest_index != interest_index)
        throw invalid_parameter_error("init does not match the requested problem");

    std::vector<int> active(prob.dim);
    for (int i = 0; i < prob.dim; ++i) active[i] = i;
    const NewtonOutcome res = newton_maximize(prob, prob.internal_of(start), active, opts);

    FitResult fit;
    fit.theta_hat = prob.theta_at(res.v);
    fit.loglik_at_max = loglik(model, data, fit.theta_hat);
    fit.observed_info = -hessian(model, data, fit.theta_hat);
    fit.iterations = res.iterations;
    fit.converged = true;
    logdet_spd(fit.observed_info, "observed information");  // PD contract
    fit.logdet_nuisance =
        logdet_spd(fit.observed_info.bottomRightCorner(prob.dim - 1, prob.dim - 1),
                   "nuisance information");
    return fit;
}

ConstrainedFit fit_constrained(const ModelSpec& model, const Dataset& data, double psi0,
                               int interest_index, const std::optional<Vector>& warm_start,
                               const FitOptions& opts) {
    const Problem prob = make_problem(model, data, interest_index);

    ParameterVector start;
    start.interest_index = interest_index;
    start.psi = psi0;
    start.lambda = warm_start ? *warm_start : constrained_init(model, data, psi0, interest_index);
    if (start.dim() != prob.dim) throw invalid_parameter_error("warm start has wrong dimension");

    std::vector<int> active(prob.dim - 1);
    for (int i = 1; i < prob.dim; ++i) active[i - 1] = i;
    const NewtonOutcome res = newton_maximize(prob, prob.internal_of(start), active, opts);

    ConstrainedFit fit;
    fit.psi = psi0;
    const ParameterVector theta = prob.theta_at(res.v);
    fit.lambda_hat = theta.lambda;
    fit.loglik_profile = loglik(model, data, theta);
    const Matrix info = -hessian(model, data, theta);
    fit.nuisance_info = info.bottomRightCorner(prob.dim - 1, prob.dim - 1);
    fit.cross_info = info.row(0).tail(prob.dim - 1);
    fit.logdet_nuisance = logdet_spd(fit.nuisance_info, "nuisance information");
    fit.iterations = res.iterations;
    fit.converged = true;
    return fit;
}

Vector constrained_slope(const ConstrainedFit& fit) {
    const auto m = fit.nuisance_info.rows();
    if (m == 0) return Vector();
    Eigen::LLT<Matrix> llt(fit.nuisance_info);
    if (llt.info() != Eigen::Success)
        throw conditioning_error("nuisance information is singular; cannot solve for the constrained slope");
    return llt.solve(-fit.cross_info);
}

}  // namespace rstar
