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

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace qmetro {

/// splitmix64 finalizer applied to (root, index); used to derive independent
/// per-trial / per-restart / per-row streams from one root seed.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

/// Seeded 64-bit generator. A stream is a pure function of its seed.
class Rng {
  public:
    using engine_type = std::mt19937_64;

    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    static Rng stream(std::uint64_t root, std::uint64_t index) { return Rng(derive_seed(root, index)); }

    engine_type &engine() { return engine_; }
    double uniform();
    double normal();
    std::int64_t binomial(std::int64_t trials, double p);
    /// Multinomial draw via conditional binomials; @p probs need not be normalized.
    std::vector<std::int64_t> multinomial(std::int64_t trials, std::span<const double> probs);

  private:
    engine_type engine_;
};

}  // namespace qmetro
