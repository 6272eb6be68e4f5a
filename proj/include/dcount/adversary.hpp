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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string_view>

#include "dcount/protocol.hpp"
#include "dcount/randkit.hpp"

namespace dcount {

class MessageLedger;

enum class Access : std::uint8_t {
  kBlackBox,  // published estimate only
  kWhiteBox,  // full engine state
};

// Everything a white-box adversary may inspect. Only valid for the duration
// of the next_site() call it is passed to.
struct WhiteBoxView {
  std::uint64_t events = 0;
  const Protocol* protocol = nullptr;
  const MessageLedger* ledger = nullptr;
};

struct Observation {
  double estimate = 0.0;
  // Null for black-box adversaries.
  const WhiteBoxView* white_box = nullptr;
};

// Chooses the site of the next event. Consulted once per event, after the
// previous event has been fully processed.
class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual std::string_view name() const = 0;
  virtual Access access() const { return Access::kBlackBox; }
  virtual SiteId next_site(const Observation& obs) = 0;
};

// I.i.d. uniform site. One draw per call.
SiteId uniform_next(std::size_t k, RngStream& rng);

struct AttackState {
  SiteId target = 0;
  double last_estimate = 0.0;
};

// Round-robin attack step: move to the next site exactly when the observed
// estimate differs from the last one recorded, otherwise keep injecting at
// the current target.
SiteId attack_next(AttackState& state, double observed, std::size_t k);

class UniformStream final : public Adversary {
 public:
  UniformStream(std::size_t k, RngStream rng);
  std::string_view name() const override { return "uniform"; }
  SiteId next_site(const Observation& obs) override;

 private:
  std::size_t k_;
  RngStream rng_;
};

class RoundRobinAttack final : public Adversary {
 public:
  // `initial_estimate` is the protocol's estimate before any event.
  explicit RoundRobinAttack(std::size_t k, double initial_estimate = 0.0);
  std::string_view name() const override { return "attack"; }
  SiteId next_site(const Observation& obs) override;
  const AttackState& state() const noexcept { return state_; }

 private:
  std::size_t k_;
  AttackState state_;
};

// Every event at one fixed site.
class SingleSiteStream final : public Adversary {
 public:
  explicit SingleSiteStream(SiteId site = 0) : site_(site) {}
  std::string_view name() const override { return "single-site"; }
  SiteId next_site(const Observation&) override { return site_; }

 private:
  SiteId site_;
};

// Adapts a callable. The callable sees the white-box view when `access` is
// kWhiteBox.
class ScriptedAdversary final : public Adversary {
 public:
  using Script = std::function<SiteId(const Observation&)>;
  ScriptedAdversary(Access access, Script script)
      : access_(access), script_(std::move(script)) {}
  std::string_view name() const override { return "scripted"; }
  Access access() const override { return access_; }
  SiteId next_site(const Observation& obs) override { return script_(obs); }

 private:
  Access access_;
  Script script_;
};

}  // namespace dcount
