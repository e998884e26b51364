#ifndef NDP_RNG_HPP
#define NDP_RNG_HPP

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace ndp {

/// Deterministic pseudo-random generator (xoshiro256** seeded via
/// splitmix64). Implemented here instead of <random> so that streams are
/// bit-identical across standard libraries and build modes; every seeded
/// result in the project is reproducible byte for byte.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01();

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi);

    /// Unbiased uniform integer in [0, bound). bound must be > 0.
    std::uint64_t uniform_below(std::uint64_t bound);

    /// Standard normal via Box-Muller.
    double normal();

    /// Gamma variate, shape > 0, unit scale (Marsaglia-Tsang).
    double gamma(double shape);

    /// Dirichlet draw; alpha entries equal to zero yield zero components.
    /// At least one alpha must be positive.
    std::vector<double> dirichlet(std::span<const double> alpha);

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    /// `count` distinct indices drawn uniformly from [0, population).
    /// Returned in draw order.
    std::vector<std::size_t> sample_indices(std::size_t population,
                                            std::size_t count);

private:
    std::uint64_t state_[4];
};

/// Named sub-seed derivation: every component that consumes randomness
/// (clustering, factor initialization, sampling, synthesis) derives its own
/// stream from the single run seed, so components stay independently
/// reproducible when others are reconfigured.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream_name);

} // namespace ndp

#endif
