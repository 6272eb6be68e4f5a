// Copyright 2026 The dcount Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dcount/adversary.hpp"

#include <stdexcept>

namespace dcount {

SiteId uniform_next(std::size_t k, RngStream& rng) {
  return static_cast<SiteId>(sample_uniform_index(k, rng));
}

SiteId attack_next(AttackState& state, double observed, std::size_t k) {
  if (observed != state.last_estimate) {
    state.last_estimate = observed;
    state.target = (state.target + 1) % k;
  }
  return state.target;
}

UniformStream::UniformStream(std::size_t k, RngStream rng)
    : k_(k), rng_(std::move(rng)) {
  if (k == 0) {
    throw std::invalid_argument("UniformStream: need at least one site");
  }
}

SiteId UniformStream::next_site(const Observation& /*obs*/) {
  return uniform_next(k_, rng_);
}

RoundRobinAttack::RoundRobinAttack(std::size_t k, double initial_estimate)
    : k_(k), state_{0, initial_estimate} {
  if (k == 0) {
    throw std::invalid_argument("RoundRobinAttack: need at least one site");
  }
}

SiteId RoundRobinAttack::next_site(const Observation& obs) {
  return attack_next(state_, obs.estimate, k_);
}

}  // namespace dcount
