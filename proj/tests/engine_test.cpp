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

#include <gtest/gtest.h>

#include <stdexcept>

#include "dcount/hyz12.hpp"

namespace dcount {
namespace {

RunConfig config_for(ProtocolKind protocol, StreamKind stream) {
  RunConfig config;
  config.k = 64;
  config.epsilon = 0.125;
  config.events = 100000;
  config.seed = 99;
  config.protocol = protocol;
  config.stream = stream;
  return config;
}

TEST(RunConfig, Validation) {
  RunConfig config;
  EXPECT_NO_THROW(config.validate());
  config.k = 0;
  EXPECT_THROW(config.validate(), std::invalid_argument);
  config.k = 1;
  config.epsilon = 0.6;
  EXPECT_THROW(config.validate(), std::invalid_argument);
  config.epsilon = 0.1;
  config.events = 0;
  EXPECT_THROW(config.validate(), std::invalid_argument);
  config.events = 1;
  config.c = 0.9;
  EXPECT_THROW(config.validate(), std::invalid_argument);
}

TEST(Names, RoundTrip) {
  EXPECT_EQ(parse_protocol("hyz12"), ProtocolKind::kHyz12);
  EXPECT_EQ(parse_protocol(to_string(ProtocolKind::kRobust)),
            ProtocolKind::kRobust);
  EXPECT_EQ(parse_stream("attack"), StreamKind::kAttack);
  EXPECT_THROW(parse_protocol("doubling"), std::invalid_argument);
  EXPECT_THROW(parse_stream("zipf"), std::invalid_argument);
}

TEST(Run, RobustSingleSiteExact) {
  RunConfig config;
  config.k = 1;
  config.epsilon = 0.5;
  config.c = 1.0;
  config.events = 3;
  config.protocol = ProtocolKind::kRobust;
  const Transcript t = run(config);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t.estimate[0], 1.0);
  EXPECT_EQ(t.estimate[1], 2.0);
}

TEST(Run, LengthAndMonotoneMessages) {
  for (ProtocolKind p : {ProtocolKind::kHyz12, ProtocolKind::kRobust}) {
    for (StreamKind s : {StreamKind::kUniform, StreamKind::kAttack}) {
      RunConfig config = config_for(p, s);
      config.events = 20000;
      const Transcript t = run(config);
      ASSERT_EQ(t.size(), 20000u);
      for (std::size_t i = 1; i < t.size(); ++i) {
        ASSERT_GE(t.messages[i], t.messages[i - 1]);
        ASSERT_GE(t.round[i], t.round[i - 1]);
      }
    }
  }
}

TEST(Run, ReplayIsBitIdentical) {
  const RunConfig config =
      config_for(ProtocolKind::kHyz12, StreamKind::kUniform);
  const Transcript a = run(config);
  const Transcript b = run(config);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.messages, b.messages);
  EXPECT_EQ(a.round, b.round);
  RunConfig other = config;
  other.seed = 100;
  EXPECT_NE(run(other).estimate, a.estimate);
}

TEST(Engine, QuiescenceConsultationsAndConservation) {
  for (ProtocolKind p : {ProtocolKind::kHyz12, ProtocolKind::kRobust}) {
    RunConfig config = config_for(p, StreamKind::kAttack);
    Engine engine = make_engine(config);
    std::uint64_t tapped = 0;
    engine.set_delivery_tap([&](const Envelope& envelope, const Protocol& proto) {
      switch (envelope.route) {
        case Route::kToServer:
          ++tapped;
          break;
        case Route::kToAllSites:
          tapped += proto.site_count();
          break;
        case Route::kServerInternal:
          break;
      }
    });
    constexpr std::uint64_t kEvents = 30000;
    for (std::uint64_t t = 0; t < kEvents; ++t) {
      engine.advance();
      ASSERT_TRUE(engine.quiescent());
    }
    EXPECT_EQ(engine.consultations(), kEvents);
    EXPECT_EQ(engine.events(), kEvents);
    EXPECT_EQ(engine.deliveries(), engine.ledger().total());
    EXPECT_EQ(tapped, engine.ledger().total());
    std::uint64_t by_kind = 0;
    for (MessageKind kind :
         {MessageKind::kReport, MessageKind::kDoublingNotify,
          MessageKind::kBroadcast, MessageKind::kCountReply}) {
      by_kind += engine.ledger().count(kind);
    }
    EXPECT_EQ(by_kind, engine.ledger().total());
  }
}

TEST(Engine, StepDeltas) {
  // Robust at p=1: one ReportSample per step until the k-th closes a round.
  RunConfig config = config_for(ProtocolKind::kRobust, StreamKind::kUniform);
  Engine engine = make_engine(config);
  for (int i = 0; i < 63; ++i) {
    const StepDelta d = engine.step(static_cast<SiteId>(i));
    EXPECT_EQ(d.messages, 1u);
    EXPECT_EQ(d.estimate, 1.0);
  }
  EXPECT_EQ(engine.step(63).messages, 1u + 3 * 64);
  EXPECT_THROW(engine.step(64), std::out_of_range);
}

TEST(Engine, Hyz12NotifyOnPowersOfTwo) {
  RunConfig config = config_for(ProtocolKind::kHyz12, StreamKind::kUniform);
  Engine engine = make_engine(config);
  // p=1: each event reports; counts 1, 2, 4 also notify.
  EXPECT_EQ(engine.step(0).messages, 2u);
  EXPECT_EQ(engine.step(0).messages, 2u);
  EXPECT_EQ(engine.step(0).messages, 1u);
  EXPECT_EQ(engine.step(0).messages, 2u);
  EXPECT_EQ(engine.ledger().count(MessageKind::kDoublingNotify), 3u);
}

// The report is processed before the boundary the same event triggers.
TEST(Engine, ReportBeforeBoundary) {
  RunConfig config = config_for(ProtocolKind::kHyz12, StreamKind::kUniform);
  Engine engine = make_engine(config);
  std::vector<int> order;
  engine.set_delivery_tap([&](const Envelope& envelope, const Protocol&) {
    if (std::holds_alternative<Report>(envelope.message)) order.push_back(0);
    if (std::holds_alternative<DoublingNotify>(envelope.message)) {
      order.push_back(1);
    }
    if (std::holds_alternative<BoundaryReached>(envelope.message)) {
      order.push_back(2);
    }
  });
  engine.step(0);  // count 1: report, notify
  engine.step(1);  // count 1: report, notify, boundary at n'=2
  EXPECT_EQ(order, (std::vector<int>{0, 1, 0, 1, 2}));
}

}  // namespace
}  // namespace dcount
