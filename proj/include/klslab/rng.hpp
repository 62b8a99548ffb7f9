#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>

namespace klslab {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Splitting rule for ensembles: seed_i = hash(master, i). Documented in the
// README; every parallel path derives its stream from this.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t s = master ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    return splitmix64(s);
}

// Deterministic RNG stream. Gaussian variates use Marsaglia's polar method on
// top of mt19937_64 so sequences do not depend on the standard library's
// distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        engine_.seed(splitmix64(s));
    }

    static Rng substream(std::uint64_t master, std::uint64_t index) {
        return Rng(derive_seed(master, index));
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

    Eigen::VectorXd normal_vector(int d) {
        Eigen::VectorXd x(d);
        for (int i = 0; i < d; ++i) x[i] = normal();
        return x;
    }

    Eigen::VectorXd on_sphere(int d) {
        Eigen::VectorXd x = normal_vector(d);
        double n = x.norm();
        while (n == 0.0) {
            x = normal_vector(d);
            n = x.norm();
        }
        return x / n;
    }

    std::uint64_t bits() { return engine_(); }

    // integer in [0, n)
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace klslab
