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

#include "dcount/engine.hpp"

#include <stdexcept>
#include <string>
#include <type_traits>

#include "dcount/hyz12.hpp"
#include "dcount/robust.hpp"

namespace dcount {

std::string_view to_string(ProtocolKind kind) noexcept {
  switch (kind) {
    case ProtocolKind::kHyz12:
      return "hyz12";
    case ProtocolKind::kRobust:
      return "robust";
  }
  return "?";
}

std::string_view to_string(StreamKind kind) noexcept {
  switch (kind) {
    case StreamKind::kUniform:
      return "uniform";
    case StreamKind::kAttack:
      return "attack";
  }
  return "?";
}

ProtocolKind parse_protocol(std::string_view name) {
  if (name == "hyz12") return ProtocolKind::kHyz12;
  if (name == "robust") return ProtocolKind::kRobust;
  throw std::invalid_argument("unknown protocol '" + std::string(name) +
                              "' (expected hyz12 or robust)");
}

StreamKind parse_stream(std::string_view name) {
  if (name == "uniform") return StreamKind::kUniform;
  if (name == "attack") return StreamKind::kAttack;
  throw std::invalid_argument("unknown stream '" + std::string(name) +
                              "' (expected uniform or attack)");
}

void RunConfig::validate() const {
  if (k == 0) {
    throw std::invalid_argument("RunConfig: k must be >= 1");
  }
  if (!(epsilon > 0.0 && epsilon <= 0.5)) {
    throw std::invalid_argument("RunConfig: epsilon must be in (0, 0.5], got " +
                                std::to_string(epsilon));
  }
  if (events == 0) {
    throw std::invalid_argument("RunConfig: events must be >= 1");
  }
  if (!(c >= 1.0)) {
    throw std::invalid_argument("RunConfig: c must be >= 1, got " +
                                std::to_string(c));
  }
}

MessageKind kind_of(const Message& msg) {
  return std::visit(
      [](const auto& m) -> MessageKind {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Report> ||
                      std::is_same_v<T, ReportSample>) {
          return MessageKind::kReport;
        } else if constexpr (std::is_same_v<T, DoublingNotify>) {
          return MessageKind::kDoublingNotify;
        } else if constexpr (std::is_same_v<T, ProbabilityUpdate> ||
                             std::is_same_v<T, CountRequest>) {
          return MessageKind::kBroadcast;
        } else if constexpr (std::is_same_v<T, ReportCount>) {
          return MessageKind::kCountReply;
        } else {
          throw std::logic_error("kind_of: internal alert is not a message");
        }
      },
      msg);
}

Engine::Engine(std::unique_ptr<Protocol> protocol,
               std::unique_ptr<Adversary> adversary, std::uint64_t seed)
    : protocol_(std::move(protocol)),
      adversary_(std::move(adversary)),
      rng_(seed, kProtocolStream) {
  if (!protocol_ || !adversary_) {
    throw std::invalid_argument("Engine: protocol and adversary required");
  }
}

StepDelta Engine::advance() {
  Observation obs{protocol_->current_estimate(), nullptr};
  WhiteBoxView view;
  if (adversary_->access() == Access::kWhiteBox) {
    view = WhiteBoxView{events_, protocol_.get(), &ledger_};
    obs.white_box = &view;
  }
  ++consultations_;
  const SiteId site = adversary_->next_site(obs);
  return step(site);
}

StepDelta Engine::step(SiteId site) {
  if (site >= protocol_->site_count()) {
    throw std::out_of_range("Engine: site " + std::to_string(site) +
                            " out of range");
  }
  const double before = protocol_->current_estimate();
  const std::uint64_t messages_before = ledger_.total();
  ++events_;
  Outbox out(queue_);
  protocol_->on_event(site, rng_, out);
  while (!queue_.empty()) {
    const Envelope envelope = queue_.front();
    queue_.pop_front();
    deliver(envelope);
  }
  return {protocol_->current_estimate() - before,
          ledger_.total() - messages_before};
}

void Engine::deliver(const Envelope& envelope) {
  Outbox out(queue_);
  switch (envelope.route) {
    case Route::kToServer:
      ledger_.record(kind_of(envelope.message));
      ++deliveries_;
      protocol_->on_server_message(envelope.message, rng_, out);
      break;
    case Route::kToAllSites: {
      const MessageKind kind = kind_of(envelope.message);
      for (SiteId i = 0; i < protocol_->site_count(); ++i) {
        ledger_.record(kind);
        ++deliveries_;
        protocol_->on_site_message(i, envelope.message, rng_, out);
      }
      break;
    }
    case Route::kServerInternal:
      protocol_->on_server_message(envelope.message, rng_, out);
      break;
  }
  if (tap_) {
    tap_(envelope, *protocol_);
  }
}

std::unique_ptr<Protocol> make_protocol(const RunConfig& config) {
  config.validate();
  switch (config.protocol) {
    case ProtocolKind::kHyz12:
      return std::make_unique<Hyz12Protocol>(config.k, config.epsilon);
    case ProtocolKind::kRobust:
      return std::make_unique<RobustProtocol>(config.k, config.epsilon,
                                              config.c);
  }
  throw std::invalid_argument("make_protocol: unknown protocol");
}

std::unique_ptr<Adversary> make_adversary(const RunConfig& config) {
  config.validate();
  switch (config.stream) {
    case StreamKind::kUniform:
      return std::make_unique<UniformStream>(
          config.k, RngStream(config.seed, kAdversaryStream));
    case StreamKind::kAttack:
      return std::make_unique<RoundRobinAttack>(config.k, 0.0);
  }
  throw std::invalid_argument("make_adversary: unknown stream");
}

Engine make_engine(const RunConfig& config) {
  return Engine(make_protocol(config), make_adversary(config), config.seed);
}

void run(const RunConfig& config, const EventObserver& observer) {
  Engine engine = make_engine(config);
  for (std::uint64_t t = 1; t <= config.events; ++t) {
    engine.advance();
    if (observer) {
      observer(EventRecord{t, engine.estimate(), engine.ledger().total(),
                           engine.protocol().round_index()},
               engine);
    }
  }
}

Transcript run(const RunConfig& config) {
  Transcript transcript;
  transcript.seed = config.seed;
  transcript.estimate.reserve(config.events);
  transcript.messages.reserve(config.events);
  transcript.round.reserve(config.events);
  run(config, [&](const EventRecord& row, const Engine&) {
    transcript.estimate.push_back(row.estimate);
    transcript.messages.push_back(row.messages);
    transcript.round.push_back(row.round);
  });
  return transcript;
}

}  // namespace dcount
