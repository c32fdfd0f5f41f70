#include "rstar/model.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "rstar/errors.hpp"

namespace rstar {

ModelSpec ModelSpec::logistic_regression() {
    ModelSpec m;
    m.family = Family::linear_exponential;
    return m;
}

ModelSpec ModelSpec::locscale_normal() {
    ModelSpec m;
    m.family = Family::location_scale;
    m.error_density = ErrorDensity::normal;
    return m;
}

ModelSpec ModelSpec::locscale_t(double dof) {
    ModelSpec m;
    m.family = Family::location_scale;
    m.error_density = ErrorDensity::student_t;
    m.t_dof = dof;
    return m;
}

ModelSpec ModelSpec::locscale_logistic() {
    ModelSpec m;
    m.family = Family::location_scale;
    m.error_density = ErrorDensity::logistic;
    return m;
}

ModelSpec ModelSpec::normal_known_sigma(double sigma) {
    ModelSpec m;
    m.family = Family::location_scale;
    m.error_density = ErrorDensity::normal;
    m.fixed_sigma = sigma;
    return m;
}

std::string ModelSpec::name() const {
    if (family == Family::linear_exponential) return "logistic";
    std::ostringstream os;
    if (fixed_sigma) {
        os << "locscale-fixed-sigma:" << *fixed_sigma;
        return os.str();
    }
    switch (error_density) {
        case ErrorDensity::normal: return "locscale-normal";
        case ErrorDensity::logistic: return "locscale-logistic";
        case ErrorDensity::student_t:
            os << "locscale-t:" << t_dof;
            return os.str();
    }
    return "unknown";
}

Vector full_from_split(const ParameterVector& theta) {
    const int d = theta.dim();
    if (theta.interest_index < 0 || theta.interest_index >= d)
        throw invalid_parameter_error("interest_index out of range");
    Vector full(d);
    int k = 0;
    for (int j = 0; j < d; ++j) {
        if (j == theta.interest_index)
            full[j] = theta.psi;
        else
            full[j] = theta.lambda[k++];
    }
    return full;
}

ParameterVector split_from_full(const Vector& full, int interest_index) {
    const int d = static_cast<int>(full.size());
    if (interest_index < 0 || interest_index >= d)
        throw invalid_parameter_error("interest_index out of range");
    ParameterVector theta;
    theta.interest_index = interest_index;
    theta.psi = full[interest_index];
    theta.lambda.resize(d - 1);
    int k = 0;
    for (int j = 0; j < d; ++j)
        if (j != interest_index) theta.lambda[k++] = full[j];
    return theta;
}

void validate_dataset(const ModelSpec& model, const Dataset& data) {
    const int n = data.n();
    const int p = data.ncols();
    if (n == 0 || p == 0) throw data_error("empty dataset");
    if (data.X.rows() != n) throw data_error("X and y row counts differ");
    if (n < p + 1) throw data_error("need at least p+1 observations");
    if (!data.y.allFinite() || !data.X.allFinite()) throw data_error("non-finite data values");
    Eigen::ColPivHouseholderQR<Matrix> qr(data.X);
    if (qr.rank() < p) throw data_error("design matrix is numerically rank deficient");
    if (model.family == Family::linear_exponential) {
        for (int i = 0; i < n; ++i)
            if (data.y[i] != 0.0 && data.y[i] != 1.0)
                throw data_error("logistic family requires binary 0/1 responses");
    }
}

namespace {

// log(1 + exp(x)) without overflow
inline double softplus(double x) {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// Standardized error density: log f and its first two derivatives.
struct ErrorTerms {
    double logf, d1, d2;
};

ErrorTerms error_terms(const ModelSpec& model, double z) {
    ErrorTerms t{};
    switch (model.error_density) {
        case ErrorDensity::normal:
            t.logf = -0.5 * z * z - 0.5 * std::log(2.0 * M_PI);
            t.d1 = -z;
            t.d2 = -1.0;
            break;
        case ErrorDensity::student_t: {
            const double nu = model.t_dof;
            const double c = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                             0.5 * std::log(nu * M_PI);
            const double w = nu + z * z;
            t.logf = c - 0.5 * (nu + 1.0) * std::log1p(z * z / nu);
            t.d1 = -(nu + 1.0) * z / w;
            t.d2 = -(nu + 1.0) * (nu - z * z) / (w * w);
            break;
        }
        case ErrorDensity::logistic: {
            t.logf = -std::abs(z) - 2.0 * std::log1p(std::exp(-std::abs(z)));
            const double s = sigmoid(z);
            t.d1 = 1.0 - 2.0 * s;  // = -tanh(z/2)
            t.d2 = -2.0 * s * (1.0 - s);
            break;
        }
    }
    return t;
}

struct FullTheta {
    Vector coef;   // regression coefficients, length ncols
    double sigma;  // 1.0 when the family has no scale
};

FullTheta unpack(const ModelSpec& model, const Dataset& data, const ParameterVector& theta) {
    const int p = data.ncols();
    const int d = model.param_dim(p);
    if (theta.dim() != d) throw invalid_parameter_error("parameter dimension mismatch");
    if (model.family == Family::location_scale && theta.interest_index >= p)
        throw invalid_parameter_error("interest parameter must be a regression coefficient");
    const Vector full = full_from_split(theta);
    if (!full.allFinite()) throw invalid_parameter_error("non-finite parameter value");
    FullTheta ft;
    if (model.scale_is_free()) {
        ft.coef = full.head(p);
        ft.sigma = full[p];
    } else {
        ft.coef = full;
        ft.sigma = model.fixed_sigma.value_or(1.0);
    }
    if (model.family == Family::location_scale && ft.sigma <= 0.0)
        throw invalid_parameter_error("sigma must be positive");
    return ft;
}

// Permutation from natural order to (psi, lambda) order.
std::vector<int> split_order(int d, int interest_index) {
    std::vector<int> ord;
    ord.reserve(d);
    ord.push_back(interest_index);
    for (int j = 0; j < d; ++j)
        if (j != interest_index) ord.push_back(j);
    return ord;
}

}  // namespace

Vector linear_predictor(const ModelSpec& model, const Dataset& data, const Vector& full) {
    const int p = data.ncols();
    return data.X * full.head(p);
}

double loglik(const ModelSpec& model, const Dataset& data, const ParameterVector& theta) {
    const FullTheta ft = unpack(model, data, theta);
    const int n = data.n();
    double l = 0.0;
    if (model.family == Family::linear_exponential) {
        const Vector eta = data.X * ft.coef;
        for (int i = 0; i < n; ++i) l += data.y[i] * eta[i] - softplus(eta[i]);
        return l;
    }
    const Vector mu = data.X * ft.coef;
    for (int i = 0; i < n; ++i) {
        const double z = (data.y[i] - mu[i]) / ft.sigma;
        l += error_terms(model, z).logf;
    }
    return l - n * std::log(ft.sigma);
}

Vector grad(const ModelSpec& model, const Dataset& data, const ParameterVector& theta) {
    const FullTheta ft = unpack(model, data, theta);
    const int n = data.n();
    const int p = data.ncols();
    const int d = model.param_dim(p);
    Vector g_full(d);
    if (model.family == Family::linear_exponential) {
        const Vector eta = data.X * ft.coef;
        Vector resid(n);
        for (int i = 0; i < n; ++i) resid[i] = data.y[i] - sigmoid(eta[i]);
        g_full = data.X.transpose() * resid;
    } else {
        const Vector mu = data.X * ft.coef;
        Vector d1(n);
        double sum_d1z = 0.0;
        for (int i = 0; i < n; ++i) {
            const double z = (data.y[i] - mu[i]) / ft.sigma;
            d1[i] = error_terms(model, z).d1;
            sum_d1z += d1[i] * z;
        }
        g_full.head(p) = -(data.X.transpose() * d1) / ft.sigma;
        if (model.scale_is_free()) g_full[p] = -(sum_d1z + n) / ft.sigma;
    }
    // reorder to (psi, lambda)
    const auto ord = split_order(d, theta.interest_index);
    Vector g(d);
    for (int k = 0; k < d; ++k) g[k] = g_full[ord[k]];
    return g;
}

Matrix hessian(const ModelSpec& model, const Dataset& data, const ParameterVector& theta) {
    const FullTheta ft = unpack(model, data, theta);
    const int n = data.n();
    const int p = data.ncols();
    const int d = model.param_dim(p);
    Matrix h_full(d, d);
    if (model.family == Family::linear_exponential) {
        const Vector eta = data.X * ft.coef;
        Vector w(n);
        for (int i = 0; i < n; ++i) {
            const double s = sigmoid(eta[i]);
            w[i] = s * (1.0 - s);
        }
        h_full = -(data.X.transpose() * w.asDiagonal() * data.X);
    } else {
        const Vector mu = data.X * ft.coef;
        const double s2 = ft.sigma * ft.sigma;
        Vector d2(n), cross(n);
        double sum_d1z = 0.0, sum_d2zz = 0.0;
        for (int i = 0; i < n; ++i) {
            const double z = (data.y[i] - mu[i]) / ft.sigma;
            const ErrorTerms t = error_terms(model, z);
            d2[i] = t.d2;
            cross[i] = t.d1 + t.d2 * z;
            sum_d1z += t.d1 * z;
            sum_d2zz += t.d2 * z * z;
        }
        h_full.topLeftCorner(p, p) = (data.X.transpose() * d2.asDiagonal() * data.X) / s2;
        if (model.scale_is_free()) {
            const Vector hbs = (data.X.transpose() * cross) / s2;
            h_full.block(0, p, p, 1) = hbs;
            h_full.block(p, 0, 1, p) = hbs.transpose();
            h_full(p, p) = (n + 2.0 * sum_d1z + sum_d2zz) / s2;
        }
    }
    const auto ord = split_order(d, theta.interest_index);
    Matrix h(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) h(a, b) = h_full(ord[a], ord[b]);
    // enforce exact symmetry against rounding in the products
    h = 0.5 * (h + h.transpose()).eval();
    return h;
}

}  // namespace rstar
