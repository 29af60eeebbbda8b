#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "linmaml/core.hpp"

namespace linmaml {

// Splittable random stream keyed by (master_seed, run_index, stream_tag).
// Streams with distinct keys are independent regardless of the order or the
// thread they are consumed on, which is what makes parallel Monte Carlo runs
// reproducible. Gaussian variates use the Marsaglia polar method on top of
// mt19937_64 raw output, so a stream's output depends only on its key.
class RngStream {
  public:
    RngStream(std::uint64_t master_seed, std::uint64_t run_index, std::uint64_t stream_tag)
        : engine_(derive_key(master_seed, run_index, stream_tag)) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double gaussian() {
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
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    Vector gaussian_vector(Eigen::Index n) {
        Vector out(n);
        for (Eigen::Index i = 0; i < n; ++i) out[i] = gaussian();
        return out;
    }

    // Filled row by row.
    Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols) {
        Matrix out(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = gaussian();
        return out;
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        // SplitMix64 finalizer.
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t derive_key(std::uint64_t master, std::uint64_t run, std::uint64_t tag) {
        return mix(mix(mix(master) ^ run) ^ tag);
    }

    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Stream tags reserved per subsystem; run_experiment additionally uses the
// low tag bits for resample attempts.
namespace stream_tag {
inline constexpr std::uint64_t kRunData = 0;         // + attempt index
inline constexpr std::uint64_t kMoments = 1ULL << 32;
inline constexpr std::uint64_t kWishart = 2ULL << 32;
inline constexpr std::uint64_t kConcentration = 3ULL << 32;
}  // namespace stream_tag

}  // namespace linmaml
