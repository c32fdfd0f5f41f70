#include "rstar/rng.hpp"

#include <cmath>
#include <limits>

namespace rstar {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t key_a, std::uint64_t key_b) {
    std::uint64_t s = mix64(seed);
    s = mix64(s ^ mix64(key_a + 0x1000000001ULL));
    s = mix64(s ^ mix64(key_b + 0x2000000003ULL));
    eng_.seed(s);
}

double RngStream::uniform01() {
    // (x >> 11) gives 53 random bits; +0.5 keeps the value strictly inside (0,1).
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_normal_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    cached_normal_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
}

double RngStream::chisq(int df) {
    double s = 0.0;
    for (int i = 0; i < df; ++i) {
        const double z = normal();
        s += z * z;
    }
    return s;
}

double RngStream::student_t(int df) {
    return normal() / std::sqrt(chisq(df) / static_cast<double>(df));
}

double RngStream::logistic() {
    const double u = uniform01();
    return std::log(u / (1.0 - u));
}

std::uint64_t RngStream::below(std::uint64_t m) {
    // Debiased modulo; m is small (resample indices), rejection is rare.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % m;
    std::uint64_t x;
    do {
        x = eng_();
    } while (x >= limit);
    return x % m;
}

}  // namespace rstar
