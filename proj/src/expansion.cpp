#include "rstar/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "rstar/errors.hpp"
#include "rstar/numutil.hpp"

namespace rstar {

LemmaCoeffs lemma1_coeffs(const ProfileCurve& curve, int n) {
    const double rn = std::sqrt(static_cast<double>(n));
    const double k3 = curve.kappa3;
    const double k4 = curve.kappa4;
    LemmaCoeffs c;
    c.A1 = -rn / 6.0 * k3;
    c.B1 = n / 24.0 * k4 + 5.0 * n / 72.0 * k3 * k3;
    c.A2 = rn / 2.0 * k3;
    c.B2 = -n / 6.0 * k4;
    return c;
}

namespace {

struct AdjCoeffs {
    double np0, np1;    // r_np  ~ np0 + np1 * r
    double inf0, inf1;  // r_inf ~ inf0 + inf1 * r
};

AdjCoeffs adjustment_coeffs(const ProfileCurve& curve, Family family) {
    const double k3 = curve.kappa3;
    const double k4 = curve.kappa4;
    const double sj = std::sqrt(curve.j_p);
    const double g1 = curve.gamma1;
    const double g2 = curve.gamma2;

    AdjCoeffs c{};
    c.np0 = 0.5 * g1 / sj;
    c.np1 = -(k3 * g1 / (12.0 * sj) + g2 / (4.0 * curve.j_p));
    if (family == Family::linear_exponential) {
        c.inf0 = -k3 / 6.0;
        c.inf1 = k4 / 24.0 + 4.0 / 72.0 * k3 * k3;
    } else {
        // location-scale: the nuisance adjustment flips sign wholesale
        c.np0 = -c.np0;
        c.np1 = -c.np1;
        c.inf0 = k3 / 3.0;
        c.inf1 = -(3.0 / 24.0 * k4 + 11.0 / 72.0 * k3 * k3);
    }
    return c;
}

}  // namespace

std::pair<double, double> predicted_adjustments(const ProfileCurve& curve, Family family,
                                                double r) {
    const AdjCoeffs c = adjustment_coeffs(curve, family);
    return {c.np0 + c.np1 * r, c.inf0 + c.inf1 * r};
}

LinearRepr linear_repr(const ProfileCurve& curve, Family family, int n) {
    const AdjCoeffs c = adjustment_coeffs(curve, family);
    LinearRepr repr;
    repr.c0 = c.np0 + c.inf0;
    repr.c1 = c.np1 + c.inf1;
    repr.family = family;
    repr.n = n;
    return repr;
}

Theorem3Report theorem3_diagnostic(const std::vector<Theorem3Point>& inputs) {
    std::set<int> distinct;
    for (const auto& p : inputs) distinct.insert(p.n);
    if (distinct.size() < 3)
        throw std::invalid_argument("theorem3_diagnostic needs at least 3 distinct n values");

    Theorem3Report rep;
    rep.points = inputs;
    std::vector<double> a_vals;
    for (auto& p : rep.points) {
        if (std::abs(p.q) < 1e-3) {
            p.excluded = true;
            p.a_hat = 0.0;
            continue;
        }
        p.a_hat = std::sqrt(static_cast<double>(p.n)) * (p.r - p.q) / (p.q * p.q);
        a_vals.push_back(p.a_hat);
    }
    if (a_vals.empty()) throw std::invalid_argument("theorem3_diagnostic: every point was excluded");

    rep.a_mean = mean(a_vals);
    rep.a_min = *std::min_element(a_vals.begin(), a_vals.end());
    rep.a_max = *std::max_element(a_vals.begin(), a_vals.end());
    double amin_abs = std::numeric_limits<double>::infinity(), amax_abs = 0.0;
    for (double a : a_vals) {
        amin_abs = std::min(amin_abs, std::abs(a));
        amax_abs = std::max(amax_abs, std::abs(a));
    }
    rep.a_spread_ratio = amin_abs > 0.0 ? amax_abs / amin_abs
                                        : std::numeric_limits<double>::infinity();
    if (amax_abs == 0.0) rep.a_spread_ratio = 1.0;  // identically zero: no spread

    std::vector<double> ns, resids;
    bool all_tiny = true;
    for (const auto& p : rep.points) {
        if (p.excluded) continue;
        const double resid =
            std::abs(p.r - p.q - rep.a_mean * p.q * p.q / std::sqrt(static_cast<double>(p.n)));
        ns.push_back(static_cast<double>(p.n));
        resids.push_back(resid);
        all_tiny = all_tiny && resid < 1e-14;
    }
    rep.below_noise = all_tiny;
    rep.residual_slope = all_tiny ? std::numeric_limits<double>::quiet_NaN()
                                  : loglog_slope(ns, resids);
    return rep;
}

}  // namespace rstar
