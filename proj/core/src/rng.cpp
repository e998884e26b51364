#include "ndp/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "ndp/errors.hpp"

namespace ndp {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_)
        word = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

std::uint64_t Rng::uniform_below(std::uint64_t bound) {
    if (bound == 0)
        throw std::invalid_argument("uniform_below: bound must be positive");
    // Mask rejection keeps the draw unbiased and platform-independent.
    std::uint64_t mask = bound - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    std::uint64_t draw;
    do {
        draw = next_u64() & mask;
    } while (draw >= bound);
    return draw;
}

double Rng::normal() {
    double u1 = uniform01();
    while (u1 <= 0.0)
        u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

double Rng::gamma(double shape) {
    if (!(shape > 0.0))
        throw std::invalid_argument("gamma: shape must be positive");
    if (shape < 1.0) {
        // Boost to shape+1 and scale back.
        double u = uniform01();
        while (u <= 0.0)
            u = uniform01();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform01();
        if (u < 1.0 - 0.0331 * x * x * x * x)
            return d * v;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
            return d * v;
    }
}

std::vector<double> Rng::dirichlet(std::span<const double> alpha) {
    bool any_positive = false;
    for (double a : alpha) {
        if (a < 0.0)
            throw std::invalid_argument("dirichlet: negative concentration");
        any_positive = any_positive || a > 0.0;
    }
    if (!any_positive)
        throw std::invalid_argument("dirichlet: all concentrations are zero");

    std::vector<double> draw(alpha.size(), 0.0);
    for (int attempt = 0; attempt < 100; ++attempt) {
        double sum = 0.0;
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            draw[i] = alpha[i] > 0.0 ? gamma(alpha[i]) : 0.0;
            sum += draw[i];
        }
        if (sum > 0.0) {
            for (double& v : draw)
                v /= sum;
            return draw;
        }
        // All gammas underflowed to zero (possible for very small shapes);
        // redraw.
    }
    throw Error("dirichlet: sampling failed to produce a positive draw");
}

std::vector<std::size_t> Rng::sample_indices(std::size_t population,
                                             std::size_t count) {
    if (count > population)
        throw std::invalid_argument(
            "sample_indices: count exceeds population");
    std::vector<std::size_t> pool(population);
    for (std::size_t i = 0; i < population; ++i)
        pool[i] = i;
    // Partial Fisher-Yates: the first `count` slots are the sample.
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j =
            i + static_cast<std::size_t>(uniform_below(population - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    return pool;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream_name) {
    std::uint64_t sm = master ^ fnv1a64(stream_name);
    return splitmix64(sm);
}

} // namespace ndp
