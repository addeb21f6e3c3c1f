// SPDX-License-Identifier: Apache-2.0
//
// isacsim - deterministic link-level simulator for sensing-assisted distributed MIMO
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

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace isacsim {

// splitmix64 finalizer. Bijective on 64-bit words, so distinct inputs never
// collide; quality is more than sufficient for Monte Carlo use.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Small counter-based generator (splitmix64). Every random quantity in the
// simulator is drawn from a stream derived from an explicit key, never from a
// shared sequential source, so results do not depend on evaluation order or
// on how work is distributed over threads.
class Rng {
  public:
    explicit Rng(std::uint64_t state) : state_(state) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller (cosine branch only). Consumes exactly
    // two raw 64-bit draws per call; callers that re-derive values outside
    // the library rely on this fixed consumption.
    double gauss() {
        const double u1 = 1.0 - uniform(); // (0, 1], keeps the log finite
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Circularly-symmetric complex normal with unit total variance
    // (real and imaginary parts each carry variance 1/2). Real part first.
    std::complex<double> cgauss_unit() {
        const double re = gauss();
        const double im = gauss();
        return {re * 0.70710678118654752440, im * 0.70710678118654752440};
    }

  private:
    std::uint64_t state_;
};

// Purpose tags separating the independent random quantities of one frame.
enum StreamPurpose : std::uint64_t {
    kStreamScatterer = 1, // scatterer placement inside the target (per frame)
    kStreamRcs = 2,       // per-(AP, scatterer) radar cross section
    kStreamMeasNoise = 3, // per-(AP, scatterer) delay/Doppler/angle noise
    kStreamLsError = 4,   // pilot-estimation error matrix (per frame)
};

// Stream address. Unused coordinates are zero by convention.
struct StreamKey {
    std::uint64_t seed = 0;
    std::uint64_t frame = 0;
    std::uint64_t ap = 0;
    std::uint64_t item = 0;
    std::uint64_t purpose = 0;
};

// Derives an independent stream for a key by chaining the finalizer over the
// key coordinates. Each coordinate is salted with its position so permuted
// keys map to unrelated streams.
inline Rng make_stream(const StreamKey& k) {
    constexpr std::uint64_t gold = 0x9E3779B97F4A7C15ULL;
    std::uint64_t s = mix64(k.seed + gold);
    s = mix64(s ^ mix64(k.frame + 2 * gold));
    s = mix64(s ^ mix64(k.ap + 3 * gold));
    s = mix64(s ^ mix64(k.item + 4 * gold));
    s = mix64(s ^ mix64(k.purpose + 5 * gold));
    return Rng(s);
}

} // namespace isacsim
