// mmwrx - mmWave multiuser receiver simulation: beamforming, low-resolution
// ADC quantization, channel-estimation error and RF front-end power models
// Copyright (C) 2026 the mmwrx authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MMWRX_RNG_HPP
#define MMWRX_RNG_HPP

#include <complex>
#include <cstdint>
#include <random>

namespace mmwrx {

// SplitMix64 finalizer, used to derive independent seeds from a counter.
constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t seed_mix(std::uint64_t h, std::uint64_t v)
{
    return splitmix64(h ^ (v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2)));
}

// Counter-based seed derivation: every (master, point, realization) triple maps
// to its own stream, so parallel runs reproduce serial ones exactly.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t point, std::uint64_t realization)
{
    return seed_mix(seed_mix(splitmix64(master), point), realization);
}

// Random source with the draw helpers used throughout the library.
class Rng
{
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::mt19937_64 &engine() { return engine_; }

    double gauss() { return normal_(engine_); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uni_(engine_); }

    // Circularly symmetric complex Gaussian with E[|z|^2] = var
    std::complex<double> cgauss(double var = 1.0)
    {
        double s = std::sqrt(0.5 * var);
        return {s * normal_(engine_), s * normal_(engine_)};
    }

  private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uni_{0.0, 1.0};
};

} // namespace mmwrx

#endif
