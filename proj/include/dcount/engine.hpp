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

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dcount/adversary.hpp"
#include "dcount/protocol.hpp"
#include "dcount/randkit.hpp"

namespace dcount {

enum class ProtocolKind : std::uint8_t { kHyz12, kRobust };
enum class StreamKind : std::uint8_t { kUniform, kAttack };

std::string_view to_string(ProtocolKind kind) noexcept;
std::string_view to_string(StreamKind kind) noexcept;
// Throw std::invalid_argument on unknown names.
ProtocolKind parse_protocol(std::string_view name);
StreamKind parse_stream(std::string_view name);

// One experiment cell.
struct RunConfig {
  std::size_t k = 1;
  double epsilon = 0.125;
  // Robust only.
  double c = 1.0;
  std::uint64_t events = 1;
  std::uint64_t seed = 0;
  ProtocolKind protocol = ProtocolKind::kRobust;
  StreamKind stream = StreamKind::kUniform;

  // k >= 1, 0 < epsilon <= 0.5, events >= 1, c >= 1.
  void validate() const;
};

enum class MessageKind : std::uint8_t {
  kReport,          // Report / ReportSample
  kDoublingNotify,  // DoublingNotify
  kBroadcast,       // one per receiving site
  kCountReply,      // ReportCount
};
inline constexpr std::size_t kMessageKinds = 4;

MessageKind kind_of(const Message& msg);

class MessageLedger {
 public:
  void record(MessageKind kind, std::uint64_t n = 1) noexcept {
    per_kind_[static_cast<std::size_t>(kind)] += n;
    total_ += n;
  }
  std::uint64_t total() const noexcept { return total_; }
  std::uint64_t count(MessageKind kind) const noexcept {
    return per_kind_[static_cast<std::size_t>(kind)];
  }

 private:
  std::array<std::uint64_t, kMessageKinds> per_kind_{};
  std::uint64_t total_ = 0;
};

// Row t-1 holds the state right after event t.
struct Transcript {
  std::uint64_t seed = 0;
  std::vector<double> estimate;
  std::vector<std::uint64_t> messages;
  std::vector<std::uint64_t> round;

  std::size_t size() const noexcept { return estimate.size(); }
};

struct StepDelta {
  double estimate = 0.0;
  std::uint64_t messages = 0;
};

// Sequential engine. Each event is delivered to one site; every message it
// triggers, and every message those trigger, is delivered in FIFO order
// before the next event. Delivery is instantaneous and reliable.
class Engine {
 public:
  // Called after each delivery, with the protocol already updated.
  using DeliveryTap = std::function<void(const Envelope&, const Protocol&)>;

  Engine(std::unique_ptr<Protocol> protocol,
         std::unique_ptr<Adversary> adversary, std::uint64_t seed);

  // Consults the adversary and processes one event at the chosen site.
  StepDelta advance();
  // Processes one event at `site` without consulting the adversary.
  StepDelta step(SiteId site);

  void set_delivery_tap(DeliveryTap tap) { tap_ = std::move(tap); }

  double estimate() const { return protocol_->current_estimate(); }
  std::uint64_t events() const noexcept { return events_; }
  std::uint64_t consultations() const noexcept { return consultations_; }
  std::uint64_t deliveries() const noexcept { return deliveries_; }
  bool quiescent() const noexcept { return queue_.empty(); }
  const MessageLedger& ledger() const noexcept { return ledger_; }
  const Protocol& protocol() const noexcept { return *protocol_; }
  const Adversary& adversary() const noexcept { return *adversary_; }

 private:
  void deliver(const Envelope& envelope);

  std::unique_ptr<Protocol> protocol_;
  std::unique_ptr<Adversary> adversary_;
  RngStream rng_;
  std::deque<Envelope> queue_;
  MessageLedger ledger_;
  DeliveryTap tap_;
  std::uint64_t events_ = 0;
  std::uint64_t consultations_ = 0;
  std::uint64_t deliveries_ = 0;
};

// Protocol randomness uses RngStream(seed, kProtocolStream); the uniform
// stream uses RngStream(seed, kAdversaryStream).
inline constexpr std::uint64_t kProtocolStream = 0;
inline constexpr std::uint64_t kAdversaryStream = 1;

std::unique_ptr<Protocol> make_protocol(const RunConfig& config);
std::unique_ptr<Adversary> make_adversary(const RunConfig& config);
Engine make_engine(const RunConfig& config);

struct EventRecord {
  std::uint64_t t = 0;
  double estimate = 0.0;
  std::uint64_t messages = 0;
  std::uint64_t round = 0;
};

using EventObserver = std::function<void(const EventRecord&, const Engine&)>;

// Runs config.events events, calling `observer` after each one.
void run(const RunConfig& config, const EventObserver& observer);
// Same, keeping every row.
Transcript run(const RunConfig& config);

}  // namespace dcount
