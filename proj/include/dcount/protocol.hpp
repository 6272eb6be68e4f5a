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
#include <deque>
#include <span>
#include <string_view>
#include <variant>

#include "dcount/randkit.hpp"

namespace dcount {

// Zero-based site index.
using SiteId = std::size_t;

// Site -> server: exact local count sampled with probability p (HYZ12).
struct Report {
  SiteId site;
  std::uint64_t count;
};

// Site -> server: local count reached a power of two (Doubling).
struct DoublingNotify {
  SiteId site;
  std::uint64_t count;
};

// Server-internal alert raised by the Doubling tracker. Never crosses the
// network and costs no messages.
struct BoundaryReached {
  std::uint64_t estimate;
};

// Server -> all sites: new transmission probability.
struct ProbabilityUpdate {
  double p;
};

// Site -> server: anonymous "an event was sampled" (Robust). No payload.
struct ReportSample {};

// Server -> all sites: request exact counts (Robust).
struct CountRequest {};

// Site -> server: reply to CountRequest.
struct ReportCount {
  SiteId site;
  std::uint64_t count;
};

using Message = std::variant<Report, DoublingNotify, BoundaryReached,
                             ProbabilityUpdate, ReportSample, CountRequest,
                             ReportCount>;

enum class Route : std::uint8_t {
  kToServer,
  kToAllSites,  // one delivery, and one message, per site
  kServerInternal,
};

struct Envelope {
  Route route;
  Message message;
};

// Append-only handle on the engine's FIFO queue.
class Outbox {
 public:
  explicit Outbox(std::deque<Envelope>& queue) : queue_(&queue) {}

  void to_server(Message m) { queue_->push_back({Route::kToServer, m}); }
  void broadcast(Message m) { queue_->push_back({Route::kToAllSites, m}); }
  void raise(Message m) { queue_->push_back({Route::kServerInternal, m}); }

 private:
  std::deque<Envelope>* queue_;
};

// A complete counting protocol: the state of every site plus the server.
// The engine owns message delivery; the protocol only reacts to it.
class Protocol {
 public:
  virtual ~Protocol() = default;

  virtual std::string_view name() const = 0;
  virtual std::size_t site_count() const = 0;

  // An event arrives at `site`.
  virtual void on_event(SiteId site, RngStream& rng, Outbox& out) = 0;
  // A server broadcast is delivered to `site`.
  virtual void on_site_message(SiteId site, const Message& msg,
                               RngStream& rng, Outbox& out) = 0;
  // A site message or an internal alert is delivered to the server.
  virtual void on_server_message(const Message& msg, RngStream& rng,
                                 Outbox& out) = 0;

  // Published estimate. Pure.
  virtual double current_estimate() const = 0;
  virtual std::uint64_t round_index() const = 0;
  // Server-side transmission probability.
  virtual double transmission_probability() const = 0;
  // True per-site event counts as held by the sites.
  virtual std::span<const std::uint64_t> local_counts() const = 0;
};

}  // namespace dcount
