// Copyright 2026 The signopt Authors. All Rights Reserved.
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
// =============================================================================

#include "signopt/votesim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

namespace signopt {

namespace {

std::size_t payload_bytes(std::size_t dim) { return (dim + 7) / 8; }

void check_message(const SignMessage& m) {
  if (m.payload.size() != payload_bytes(m.dim)) {
    throw Error("sign message payload has " + std::to_string(m.payload.size()) +
                " bytes, expected " + std::to_string(payload_bytes(m.dim)));
  }
  if (m.dim % 8 != 0 && !m.payload.empty()) {
    const auto pad_mask = static_cast<std::uint8_t>(0xFFu << (m.dim % 8));
    if ((m.payload.back() & pad_mask) != 0) {
      throw Error("sign message has non-zero pad bits");
    }
  }
}

bool bit_at(const SignMessage& m, std::size_t i) {
  return (m.payload[i / 8] >> (i % 8)) & 1u;
}

}  // namespace

SignMessage pack_signs(std::span<const double> signs) {
  if (signs.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error("sign vector too long for a u32 dimension");
  }
  SignMessage m;
  m.dim = static_cast<std::uint32_t>(signs.size());
  m.payload.assign(payload_bytes(signs.size()), 0);
  for (std::size_t i = 0; i < signs.size(); ++i) {
    if (signs[i] == 1.0) {
      m.payload[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    } else if (signs[i] != -1.0) {
      throw Error("sign entries must be exactly +1 or -1");
    }
  }
  return m;
}

Vector unpack_signs(const SignMessage& message) {
  check_message(message);
  Vector out(message.dim);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = bit_at(message, i) ? 1.0 : -1.0;
  }
  return out;
}

std::vector<std::uint8_t> serialize(const SignMessage& message) {
  check_message(message);
  std::vector<std::uint8_t> bytes(4 + message.payload.size());
  for (int b = 0; b < 4; ++b) {
    bytes[b] = static_cast<std::uint8_t>((message.dim >> (8 * b)) & 0xFFu);
  }
  std::copy(message.payload.begin(), message.payload.end(), bytes.begin() + 4);
  return bytes;
}

SignMessage deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw Error("sign message shorter than its header");
  SignMessage m;
  for (int b = 0; b < 4; ++b) {
    m.dim |= static_cast<std::uint32_t>(bytes[b]) << (8 * b);
  }
  if (bytes.size() - 4 != payload_bytes(m.dim)) {
    throw Error("sign message length does not match its dim header");
  }
  m.payload.assign(bytes.begin() + 4, bytes.end());
  check_message(m);
  return m;
}

std::vector<std::int32_t> tally_votes(std::span<const SignMessage> messages) {
  if (messages.empty()) throw Error("majority vote needs at least one message");
  const std::uint32_t dim = messages.front().dim;
  std::vector<std::int32_t> tally(dim, 0);
  for (const auto& m : messages) {
    if (m.dim != dim) throw Error("sign message dimension mismatch");
    check_message(m);
    for (std::size_t i = 0; i < dim; ++i) tally[i] += bit_at(m, i) ? 1 : -1;
  }
  return tally;
}

namespace {

SignMessage decide(const std::vector<std::int32_t>& tally) {
  SignMessage d;
  d.dim = static_cast<std::uint32_t>(tally.size());
  d.payload.assign(payload_bytes(tally.size()), 0);
  for (std::size_t i = 0; i < tally.size(); ++i) {
    if (tally[i] >= 0) d.payload[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  }
  return d;
}

}  // namespace

SignMessage aggregate_majority(std::span<const SignMessage> messages) {
  return decide(tally_votes(messages));
}

std::string_view to_string(AggregationMode mode) {
  return mode == AggregationMode::majority ? "majority" : "sum_of_signs";
}

AggregationMode parse_aggregation_mode(std::string_view name) {
  if (name == "majority") return AggregationMode::majority;
  if (name == "sum_of_signs") return AggregationMode::sum_of_signs;
  throw Error("unknown aggregation mode '" + std::string(name) + "'");
}

std::uint64_t downlink_bits(AggregationMode mode, std::size_t workers, std::size_t dim) {
  if (mode == AggregationMode::majority) return dim;
  // Tally takes 2M + 1 values.
  const auto levels = static_cast<std::uint64_t>(2 * workers + 1);
  const auto width = static_cast<std::uint64_t>(std::bit_width(levels - 1));
  return dim * width;
}

VoteRound vote_round(Vector& x, std::span<GradientOracle* const> workers,
                     StepSize step, AggregationMode mode) {
  if (workers.empty()) throw Error("vote round needs at least one worker");
  if (!(step.delta >= 0.0) || !std::isfinite(step.delta)) {
    throw Error("learning rate must be finite and non-negative");
  }
  VoteRound round;
  round.up_messages.reserve(workers.size());
  for (GradientOracle* worker : workers) {
    if (worker->dim() != x.size()) throw Error("dimension mismatch");
    round.up_messages.push_back(
        pack_signs(sign_vec(minibatch_draw(*worker, x, step.batch))));
  }
  round.tally = tally_votes(round.up_messages);
  round.decision = decide(round.tally);
  round.bits_up = static_cast<std::uint64_t>(workers.size()) * x.size();
  round.bits_down = downlink_bits(mode, workers.size(), x.size());

  if (mode == AggregationMode::majority) {
    const Vector direction = unpack_signs(round.decision);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= step.delta * direction[i];
  } else {
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] -= step.delta * static_cast<double>(round.tally[i]);
    }
  }
  return round;
}

std::string_view to_string(CommScheme scheme) {
  switch (scheme) {
    case CommScheme::sgd: return "SGD";
    case CommScheme::qsgd: return "QSGD";
    case CommScheme::terngrad: return "TernGrad";
    case CommScheme::sign_majority: return "SignMajority";
  }
  return "unknown";
}

double comm_bits_per_iter(CommScheme scheme, std::size_t workers, std::size_t dim) {
  if (workers == 0 || dim == 0) throw Error("workers and dim must be >= 1");
  const double md = static_cast<double>(workers) * static_cast<double>(dim);
  switch (scheme) {
    case CommScheme::sgd: return 64.0 * md;
    case CommScheme::qsgd:
    case CommScheme::terngrad:
      return (2.0 + std::log2(2.0 * static_cast<double>(workers) + 1.0)) * md;
    case CommScheme::sign_majority: return 2.0 * md;
  }
  throw Error("unknown communication scheme");
}

void CommLedger::record(const VoteRound& round) {
  ++rounds_;
  bits_up_ += round.bits_up;
  bits_down_ += round.bits_down;
  bits_down_delivered_ += round.bits_down * round.up_messages.size();
}

std::vector<StochasticOracle> make_worker_oracles(const Problem& problem,
                                                  std::size_t workers,
                                                  std::uint64_t base_seed) {
  if (workers == 0) throw Error("distributed.M must be >= 1");
  std::vector<StochasticOracle> out;
  out.reserve(workers);
  for (std::size_t m = 0; m < workers; ++m) {
    out.push_back(problem.make_oracle(worker_seed(base_seed, m)));
  }
  return out;
}

Trajectory run_distributed(const Objective& objective,
                           std::span<GradientOracle* const> workers,
                           const Schedule& schedule, std::uint64_t iterations,
                           Vector x0, AggregationMode mode,
                           const RunOptions& options, CommLedger* ledger) {
  if (workers.empty()) throw Error("distributed run needs at least one worker");
  if (x0.size() != objective.dim()) throw Error("dimension mismatch");
  Trajectory traj;
  if (iterations == 0) return traj;

  CommLedger local;
  CommLedger& book = ledger ? *ledger : local;
  const std::uint64_t up0 = book.bits_up();
  const std::uint64_t down0 = book.bits_down();
  const std::uint64_t calls0 = workers.front()->draw_count();

  Vector x = std::move(x0);
  for (std::uint64_t k = 0; k <= iterations; ++k) {
    StepRecord rec = make_record(objective, k, x, options.snapshots);
    rec.oracle_calls = workers.front()->draw_count() - calls0;
    rec.bits_up = book.bits_up() - up0;
    rec.bits_down = book.bits_down() - down0;
    traj.append(std::move(rec));
    if (k < iterations) book.record(vote_round(x, workers, schedule.at(k), mode));
  }
  return traj;
}

VoteErrorEstimate estimate_vote_error(const NoiseModel& noise, double g_value,
                                      std::size_t workers, std::uint64_t rounds,
                                      std::uint64_t seed) {
  if (workers == 0) throw Error("vote needs at least one worker");
  if (rounds == 0) throw Error("vote error estimate needs rounds >= 1");
  noise.validate(1);
  std::vector<Rng> streams;
  streams.reserve(workers);
  for (std::size_t m = 0; m < workers; ++m) streams.emplace_back(worker_seed(seed, m));

  const bool truth = g_value >= 0.0;
  std::vector<SignMessage> votes(workers);
  std::uint64_t wrong = 0;
  for (std::uint64_t r = 0; r < rounds; ++r) {
    for (std::size_t m = 0; m < workers; ++m) {
      const double draw = g_value + noise.sample_coordinate(0, streams[m]);
      const double s = draw >= 0.0 ? 1.0 : -1.0;
      votes[m] = pack_signs(std::span<const double>(&s, 1));
    }
    const SignMessage decision = aggregate_majority(votes);
    const bool decided_positive = decision.payload[0] & 1u;
    if (decided_positive != truth) ++wrong;
  }
  VoteErrorEstimate est;
  est.rounds = rounds;
  est.rate = static_cast<double>(wrong) / static_cast<double>(rounds);
  est.standard_error =
      std::sqrt(est.rate * (1.0 - est.rate) / static_cast<double>(rounds));
  return est;
}

}  // namespace signopt
