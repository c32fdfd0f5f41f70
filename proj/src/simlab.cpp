#include "rstar/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "rstar/errors.hpp"
#include "rstar/numutil.hpp"

namespace rstar {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate_config(const SimConfig& cfg) {
    if (cfg.reps < 100) throw config_error("reps must be at least 100");
    if (cfg.bootstrap_reps < 100) throw config_error("bootstrap_reps must be at least 100");
    if (cfg.n_grid.empty()) throw config_error("n_grid is empty");
    for (std::size_t i = 1; i < cfg.n_grid.size(); ++i)
        if (cfg.n_grid[i] <= cfg.n_grid[i - 1])
            throw config_error("n_grid must be strictly increasing");
    if (cfg.p < 1) throw config_error("p must be at least 1");
    if (static_cast<int>(cfg.beta_true.size()) != cfg.p)
        throw config_error("beta_true must have length p");
    if (cfg.interest_index < 0 || cfg.interest_index > cfg.p)
        throw config_error("interest_index out of range for the [1 | Z] design");
    if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw config_error("level must be in (0,1)");
    if (cfg.model.family == Family::location_scale && !(cfg.sigma_true > 0.0))
        throw config_error("sigma_true must be positive");
}

double draw_error(const ModelSpec& model, RngStream& rng) {
    switch (model.error_density) {
        case ErrorDensity::normal: return rng.normal();
        case ErrorDensity::student_t: return rng.student_t(static_cast<int>(model.t_dof));
        case ErrorDensity::logistic: return rng.logistic();
    }
    return rng.normal();
}

int pool_size(int workers) {
    if (workers > 0) return workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Run job(0..count-1) on a pool; each index is processed exactly once and
// writes only to its own slot, so the schedule cannot affect the result.
void parallel_for(int count, int workers, const std::function<void(int)>& job) {
    const int nw = std::min(pool_size(workers), count);
    if (nw <= 1) {
        for (int i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    pool.reserve(nw);
    for (int w = 0; w < nw; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct RepOutcome {
    double d = 0.0;
    bool failed = false;
    bool patched = false;
};

RepOutcome run_rep(const SimConfig& cfg, int n, int rep_index) {
    RepOutcome out;
    try {
        const Dataset ds = generate_dataset(cfg, n, rep_index);
        const AnalysisContext ctx = prepare_analysis(cfg.model, ds, cfg.interest_index);
        const InferenceReport rep = test_psi(ctx, ds, cfg.psi0);
        out.d = rep.r_star - (ctx.repr.c0 + (1.0 + ctx.repr.c1) * rep.r);
        out.patched = rep.near_zero_patched;
    } catch (const fit_error&) {
        out.failed = true;
    } catch (const diagnostic_error&) {
        out.failed = true;
    }
    return out;
}

}  // namespace

Dataset generate_dataset(const SimConfig& config, int n, int rep_index) {
    if (rep_index < 0) throw config_error("rep_index must be non-negative");
    RngStream rng(config.seed, static_cast<std::uint64_t>(n),
                  static_cast<std::uint64_t>(rep_index));
    const int cols = config.p + 1;
    Dataset ds;
    ds.X.resize(n, cols);
    ds.y.resize(n);
    ds.X.col(0).setOnes();
    for (int i = 0; i < n; ++i)
        for (int j = 1; j < cols; ++j) ds.X(i, j) = rng.normal();

    Vector coef(cols);
    coef[0] = config.intercept;
    coef.tail(config.p) = config.beta_true;
    const Vector eta = ds.X * coef;

    if (config.model.family == Family::linear_exponential) {
        for (int i = 0; i < n; ++i) {
            const double prob = 1.0 / (1.0 + std::exp(-eta[i]));
            ds.y[i] = rng.bernoulli(prob) ? 1.0 : 0.0;
        }
    } else {
        for (int i = 0; i < n; ++i)
            ds.y[i] = eta[i] + config.sigma_true * draw_error(config.model, rng);
    }
    return ds;
}

std::pair<double, double> bootstrap_ci(
    const std::vector<double>& values, int B, double level, std::uint64_t seed,
    const std::function<double(const std::vector<double>&)>& stat) {
    if (values.size() < 10) throw std::invalid_argument("bootstrap_ci needs at least 10 values");
    if (B < 1) throw std::invalid_argument("bootstrap_ci needs B >= 1");
    const auto stat_fn = stat ? stat : std::function<double(const std::vector<double>&)>(
                                           [](const std::vector<double>& v) { return mean(v); });
    RngStream rng(seed, 0x626f6f74ULL, 0);
    const std::size_t m = values.size();
    std::vector<double> stats(B);
    std::vector<double> resample(m);
    for (int b = 0; b < B; ++b) {
        for (std::size_t i = 0; i < m; ++i) resample[i] = values[rng.below(m)];
        stats[b] = stat_fn(resample);
    }
    std::sort(stats.begin(), stats.end());
    return {quantile_sorted(stats, 0.5 * (1.0 - level)),
            quantile_sorted(stats, 0.5 * (1.0 + level))};
}

SimResult run_study(const SimConfig& config) {
    validate_config(config);
    SimResult result;
    result.cells.reserve(config.n_grid.size());

    for (const int n : config.n_grid) {
        std::vector<RepOutcome> outcomes(config.reps);
        parallel_for(config.reps, config.workers,
                     [&](int rep) { outcomes[rep] = run_rep(config, n, rep); });

        SimCell cell;
        cell.n = n;
        std::vector<double> d_values;
        d_values.reserve(config.reps);
        for (const auto& out : outcomes) {
            if (out.failed) {
                ++cell.n_failed;
                continue;
            }
            if (out.patched) ++cell.n_patched;
            d_values.push_back(out.d);
        }
        if (d_values.size() < 10)
            throw convergence_error("fewer than 10 usable replications at n=" + std::to_string(n));
        cell.mean_d = mean(d_values);
        cell.sd_d = stdev(d_values);
        cell.mean_ci = bootstrap_ci(d_values, config.bootstrap_reps, config.level,
                                    mix64(config.seed ^ (static_cast<std::uint64_t>(n) << 20 | 1)));
        cell.sd_ci = bootstrap_ci(d_values, config.bootstrap_reps, config.level,
                                  mix64(config.seed ^ (static_cast<std::uint64_t>(n) << 20 | 2)),
                                  [](const std::vector<double>& v) { return stdev(v); });
        if (cell.n_failed > 0.05 * config.reps) result.unreliable = true;
        result.cells.push_back(cell);
    }

    std::vector<double> ns, abs_means, sds;
    bool any_pos = false, any_neg = false;
    double max_sd = 0.0;
    for (const auto& c : result.cells) {
        ns.push_back(static_cast<double>(c.n));
        abs_means.push_back(std::abs(c.mean_d));
        sds.push_back(c.sd_d);
        any_pos = any_pos || c.mean_d > 0.0;
        any_neg = any_neg || c.mean_d < 0.0;
        max_sd = std::max(max_sd, c.sd_d);
    }
    result.mean_sign_flip = any_pos && any_neg;
    result.degenerate = max_sd < 1e-8;
    if (result.degenerate || ns.size() < 2) {
        result.slope_mean = kNaN;
        result.slope_sd = kNaN;
    } else {
        result.slope_mean = loglog_slope(ns, abs_means);
        result.slope_sd = loglog_slope(ns, sds);
    }
    return result;
}

VerifyResult run_verify(const VerifyConfig& config) {
    if (config.n_grid.size() < 3)
        throw config_error("verify needs at least 3 n values");
    SimConfig gen;
    gen.model = config.model;
    gen.p = config.p;
    gen.beta_true = config.beta_true;
    gen.intercept = config.intercept;
    gen.sigma_true = config.sigma_true;
    gen.interest_index = config.interest_index;
    gen.seed = config.seed;

    VerifyResult result;
    std::vector<Theorem3Point> points;
    std::vector<double> ns, resids;
    for (const int n : config.n_grid) {
        const Dataset ds = generate_dataset(gen, n, 0);
        const AnalysisContext ctx = prepare_analysis(config.model, ds, config.interest_index);
        VerifyRow row;
        row.n = n;
        row.psi_hat = ctx.fit.psi_hat();
        row.se = 1.0 / std::sqrt(ctx.curve.j_p);
        row.psi0 = row.psi_hat - config.offset_se * row.se;
        const InferenceReport rep = test_psi(ctx, ds, row.psi0);
        row.r = rep.r;
        row.t = rep.wald_t.value();
        row.q = rep.q;
        const LemmaCoeffs lc = lemma1_coeffs(ctx.curve, n);
        const double rn = std::sqrt(static_cast<double>(n));
        row.lemma_residual =
            std::abs(row.t - row.r * (1.0 + lc.A1 * row.r / rn + lc.B1 * row.r * row.r / n));
        points.push_back(make_t3_point(row.r, row.q, n));
        ns.push_back(static_cast<double>(n));
        resids.push_back(row.lemma_residual);
        result.rows.push_back(row);
    }
    result.lemma_slope = loglog_slope(ns, resids);
    result.t3 = theorem3_diagnostic(points);
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        result.rows[i].a_hat = result.t3.points[i].a_hat;
        result.rows[i].excluded = result.t3.points[i].excluded;
    }
    return result;
}

}  // namespace rstar
