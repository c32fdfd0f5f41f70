#pragma once

#include <cstdint>
#include <random>

namespace rstar {

/// Deterministic per-task random stream.
///
/// A stream is a pure function of (seed, a, b): the two stream keys are mixed
/// into the engine seed with splitmix64, so (seed, n, rep_index) always yields
/// the same draws no matter which worker thread runs the replication.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t key_a = 0, std::uint64_t key_b = 0);

    /// Uniform on the open interval (0, 1); 53-bit resolution.
    double uniform01();

    /// Standard normal via Box-Muller (pair cached).
    double normal();

    /// Chi-squared with integer df, built from the same normal stream.
    double chisq(int df);

    /// Student-t with integer df: normal / sqrt(chisq(df)/df).
    double student_t(int df);

    /// Standard logistic variate by inverse CDF.
    double logistic();

    bool bernoulli(double p) { return uniform01() < p; }

    /// Uniform integer in [0, m).
    std::uint64_t below(std::uint64_t m);

private:
    std::mt19937_64 eng_;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

/// splitmix64 finalizer; used for stream derivation and config hashing.
std::uint64_t mix64(std::uint64_t x);

}  // namespace rstar
