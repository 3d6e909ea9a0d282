// Copyright 2026 The qmetro Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qmetro/rng.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace qmetro {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
    return splitmix64(splitmix64(root) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

double Rng::uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

double Rng::normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

std::int64_t Rng::binomial(std::int64_t trials, double p) {
    if (trials < 0) {
        throw std::invalid_argument("Rng::binomial: negative trial count");
    }
    if (trials == 0 || p <= 0.0) {
        return 0;
    }
    if (p >= 1.0) {
        return trials;
    }
    return std::binomial_distribution<std::int64_t>(trials, p)(engine_);
}

std::vector<std::int64_t> Rng::multinomial(std::int64_t trials, std::span<const double> probs) {
    std::vector<std::int64_t> counts(probs.size(), 0);
    double remaining_mass = std::accumulate(probs.begin(), probs.end(), 0.0);
    std::int64_t remaining = trials;
    for (std::size_t m = 0; m < probs.size() && remaining > 0; ++m) {
        if (m + 1 == probs.size()) {
            counts[m] = remaining;
            break;
        }
        const double p = remaining_mass > 0.0 ? std::clamp(probs[m] / remaining_mass, 0.0, 1.0) : 0.0;
        counts[m] = binomial(remaining, p);
        remaining -= counts[m];
        remaining_mass -= probs[m];
    }
    return counts;
}

}  // namespace qmetro
