#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rstar/inference.hpp"
#include "rstar/rng.hpp"

namespace rstar {

/// Monte Carlo study configuration. Covariates are iid standard normal with
/// a leading intercept column; responses are drawn from `model` at
/// (intercept, beta_true) and, for location-scale, noise scale sigma_true.
struct SimConfig {
    ModelSpec model;
    std::vector<int> n_grid;
    int p = 5;          // covariates, excluding the intercept
    Vector beta_true;   // length p
    double intercept = 1.0;
    double sigma_true = 1.0;
    double psi0 = 0.0;
    int interest_index = 1;  // column of [1 | Z] under test; 0 is the intercept
    int reps = 500;
    int bootstrap_reps = 500;
    double level = 0.95;
    std::uint64_t seed = 1;
    int workers = 0;  // 0 = hardware concurrency
};

struct SimCell {
    int n = 0;
    double mean_d = 0.0;
    double sd_d = 0.0;
    std::pair<double, double> mean_ci{0.0, 0.0};
    std::pair<double, double> sd_ci{0.0, 0.0};
    int n_failed = 0;
    int n_patched = 0;  // replications where r_star took the near-zero branch
};

struct SimResult {
    std::vector<SimCell> cells;
    double slope_mean = 0.0;  // log |mean_d| against log n
    double slope_sd = 0.0;    // log sd_d against log n
    bool unreliable = false;  // some cell lost more than 5% of its replications
    bool degenerate = false;  // residuals at rounding level; slopes are meaningless
    bool mean_sign_flip = false;
};

/// Deterministic dataset draw: a pure function of (config.seed, n, rep_index).
Dataset generate_dataset(const SimConfig& config, int n, int rep_index);

/// Per replication: fit, profile, residual d = r_star - c0 - (1+c1) r; then
/// per n: mean/sd of d with percentile-bootstrap CIs, and fitted log-log
/// slopes across the n grid. Replication failures are skipped and counted.
SimResult run_study(const SimConfig& config);

/// Percentile bootstrap interval for `stat` over B resamples with
/// replacement; deterministic given seed. Requires at least 10 values.
std::pair<double, double> bootstrap_ci(
    const std::vector<double>& values, int B, double level, std::uint64_t seed,
    const std::function<double(const std::vector<double>&)>& stat = nullptr);

/// One-dataset-per-n diagnostic sweep used by the `verify` command: tests
/// psi0 = psi_hat - offset_se * SE on a seeded dataset at each n, recording
/// the Wald/likelihood-root discrepancy against its two-term prediction and
/// the q-scaling points for the cubic-remainder check.
struct VerifyConfig {
    ModelSpec model;
    std::vector<int> n_grid;
    int p = 5;
    Vector beta_true;
    double intercept = 1.0;
    double sigma_true = 1.0;
    int interest_index = 1;
    double offset_se = 1.5;
    std::uint64_t seed = 1;
};

struct VerifyRow {
    int n = 0;
    double psi_hat = 0.0;
    double se = 0.0;
    double psi0 = 0.0;
    double r = 0.0;
    double t = 0.0;
    double q = 0.0;
    double lemma_residual = 0.0;  // |t - r (1 + A1 r/sqrt(n) + B1 r^2/n)|
    double a_hat = 0.0;
    bool excluded = false;
};

struct VerifyResult {
    std::vector<VerifyRow> rows;
    double lemma_slope = 0.0;  // log-log slope of the lemma residual vs n
    Theorem3Report t3;
};

VerifyResult run_verify(const VerifyConfig& config);

}  // namespace rstar
