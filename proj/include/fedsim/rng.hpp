#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace fedsim {

// Deterministic random source used throughout the simulator.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. The distributions on top are implemented here instead of the
// ones in <random>, whose results are implementation-defined; with both
// pieces pinned, a (seed, stream name) pair draws the same values on every
// platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53 random bits.
    double uniform();
    double uniform(double lo, double hi);

    // Unbiased uniform integer in [0, bound); bound >= 1.
    std::uint64_t uniform_int(std::uint64_t bound);

    // Standard normal (Box-Muller; consumes two uniforms).
    double normal();

    // Gamma(shape, 1), Marsaglia-Tsang; shape > 0.
    double gamma(double shape);

    // Symmetric Dirichlet(alpha, ..., alpha) of length k.
    std::vector<double> dirichlet(double alpha, std::size_t k);

    // Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[uniform_int(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// Stream splitting: seed(name) = splitmix64(splitmix64(master) ^ fnv1a64(name)).
// Distinct names yield independent streams under the same master seed.
std::uint64_t fnv1a64(std::string_view s);
std::uint64_t splitmix64(std::uint64_t x);
Rng make_stream(std::uint64_t master_seed, std::string_view name);

}  // namespace fedsim
