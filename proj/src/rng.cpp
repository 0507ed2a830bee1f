#include "fedsim/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "fedsim/errors.hpp"

namespace fedsim {

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

std::uint64_t Rng::uniform_int(std::uint64_t bound) {
    if (bound == 0) throw contract_error("uniform_int: bound must be >= 1");
    // Bucketed rejection keeps the draw exactly uniform.
    const std::uint64_t scaling = std::numeric_limits<std::uint64_t>::max() / bound;
    const std::uint64_t last = bound * scaling;
    std::uint64_t x = next_u64();
    while (x >= last) x = next_u64();
    return x / scaling;
}

double Rng::normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::gamma(double shape) {
    if (!(shape > 0.0)) throw contract_error("gamma: shape must be > 0");
    if (shape < 1.0) {
        // Boost to shape + 1 and scale back.
        double u = uniform();
        while (u <= 0.0) u = uniform();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

std::vector<double> Rng::dirichlet(double alpha, std::size_t k) {
    if (k == 0) throw contract_error("dirichlet: k must be >= 1");
    std::vector<double> p(k);
    for (;;) {
        double sum = 0.0;
        for (auto& v : p) {
            v = gamma(alpha);
            sum += v;
        }
        if (sum > 0.0) {
            for (auto& v : p) v /= sum;
            return p;
        }
        // All-zero draw (tiny alpha underflow); re-draw.
    }
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

Rng make_stream(std::uint64_t master_seed, std::string_view name) {
    return Rng(splitmix64(splitmix64(master_seed) ^ fnv1a64(name)));
}

}  // namespace fedsim
