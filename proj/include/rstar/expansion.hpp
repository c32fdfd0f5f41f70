#pragma once

#include <vector>

#include "rstar/profile.hpp"

namespace rstar {

/// Coefficients relating the Wald and score statistics to the likelihood
/// root through the standardized profile derivatives:
///   t = r { 1 + A1 r / sqrt(n) + B1 r^2 / n + ... }
///   s = t { 1 + A2 t / sqrt(n) + B2 t^2 / n + ... }
struct LemmaCoeffs {
    double A1, B1, A2, B2;
};

/// Linear representation of the modified root: r_star ~ c0 + (1 + c1) r,
/// i.e. c0 = A_star / sqrt(n) and c1 = B_star / n.
struct LinearRepr {
    double c0 = 0.0;
    double c1 = 0.0;
    Family family = Family::linear_exponential;
    int n = 0;
};

LemmaCoeffs lemma1_coeffs(const ProfileCurve& curve, int n);

/// First-order (linear in r) predictions of the nuisance and information
/// adjustments, with family-specific signs:
///   exponential:  r_np ~  g1/(2 sj) - [k3 g1/(12 sj) + g2/(4 j)] r
///                 r_inf ~ -k3/6 + [k4/24 + 4 k3^2/72] r
///   location-scale: both with all signs flipped on r_np, and
///                 r_inf ~  k3/3 - [3 k4/24 + 11 k3^2/72] r
/// where sj = sqrt(j_p), all evaluated at psi_hat.
std::pair<double, double> predicted_adjustments(const ProfileCurve& curve, Family family, double r);

LinearRepr linear_repr(const ProfileCurve& curve, Family family, int n);

/// Scaling diagnostic for r = q + A q^2 / sqrt(n) + B q^3 / n + ...
struct Theorem3Point {
    int n = 0;
    double r = 0.0;
    double q = 0.0;
    double a_hat = 0.0;  // sqrt(n) (r - q) / q^2
    bool excluded = false;
};

struct Theorem3Report {
    std::vector<Theorem3Point> points;
    double a_mean = 0.0;
    double a_min = 0.0;
    double a_max = 0.0;
    /// max|a_hat| / min|a_hat| over included points (how far from constant A is).
    double a_spread_ratio = 0.0;
    /// log-log slope of |r - q - a_mean q^2/sqrt(n)| against n; roughly -1 or
    /// steeper when the cubic term dominates the remainder.
    double residual_slope = 0.0;
    /// all residuals at rounding level; the slope is meaningless then
    bool below_noise = false;
};

/// Requires at least 3 distinct n values; points with |q| < 1e-3 are excluded
/// from the estimates but kept in the report.
Theorem3Report theorem3_diagnostic(const std::vector<Theorem3Point>& inputs);

inline Theorem3Point make_t3_point(double r, double q, int n) {
    return Theorem3Point{n, r, q, 0.0, false};
}

}  // namespace rstar
