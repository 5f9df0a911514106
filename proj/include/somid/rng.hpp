#pragma once

// Seed splitting and Gaussian sampling. Derived streams let the simulator
// regenerate measurement noise independently of the disturbance draws.

#include <cstdint>
#include <random>

namespace somid {

/// SplitMix64 mix; derives independent stream seeds from a master seed.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Gaussian {
  public:
    explicit Gaussian(std::uint64_t seed) : eng_(seed) {}

    double standard() { return n01_(eng_); }
    double sample(double mean, double stddev) { return mean + stddev * n01_(eng_); }
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(eng_);
    }
    int uniform_int(int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(eng_);
    }

  private:
    std::mt19937_64 eng_;
    std::normal_distribution<double> n01_;
};

}  // namespace somid
