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

#ifndef SIGNOPT_VOTESIM_HPP_
#define SIGNOPT_VOTESIM_HPP_

#include <cstdint>
#include <string_view>
#include <vector>

#include "signopt/core.hpp"
#include "signopt/optimizers.hpp"
#include "signopt/problems.hpp"

namespace signopt {

/// One packed sign vector.
///
/// Bit i lives in payload[i / 8] at position i % 8 (least significant
/// first); 1 encodes +1 and 0 encodes -1. Pad bits of the last byte are 0.
struct SignMessage {
  std::uint32_t dim = 0;
  std::vector<std::uint8_t> payload;

  std::size_t payload_bits() const { return dim; }
  friend bool operator==(const SignMessage&, const SignMessage&) = default;
};

/// Entries must be exactly +1.0 or -1.0.
SignMessage pack_signs(std::span<const double> signs);
Vector unpack_signs(const SignMessage& message);

/// Wire form: u32 little-endian dim followed by the payload bytes.
std::vector<std::uint8_t> serialize(const SignMessage& message);
SignMessage deserialize(std::span<const std::uint8_t> bytes);

/// Per-coordinate sum of the +/-1 votes; each entry lies in [-M, M].
std::vector<std::int32_t> tally_votes(std::span<const SignMessage> messages);

/// Sign of the vote tally per coordinate, ties resolved to +1.
SignMessage aggregate_majority(std::span<const SignMessage> messages);

enum class AggregationMode { majority, sum_of_signs };

std::string_view to_string(AggregationMode mode);
AggregationMode parse_aggregation_mode(std::string_view name);

/// Server -> worker payload bits for one round: d in majority mode,
/// d * ceil(log2(2M + 1)) when the raw tally is returned.
std::uint64_t downlink_bits(AggregationMode mode, std::size_t workers, std::size_t dim);

struct VoteRound {
  std::vector<SignMessage> up_messages;
  std::vector<std::int32_t> tally;
  SignMessage decision;
  std::uint64_t bits_up = 0;
  std::uint64_t bits_down = 0;
};

/// One round of the protocol: every worker draws a `step.batch` mini-batch at
/// x and uploads its sign bits; the server aggregates and x is updated in
/// place by -delta * decision (majority) or -delta * tally (sum_of_signs).
VoteRound vote_round(Vector& x, std::span<GradientOracle* const> workers,
                     StepSize step, AggregationMode mode);

enum class CommScheme { sgd, qsgd, terngrad, sign_majority };

std::string_view to_string(CommScheme scheme);

/// Bits per iteration for M workers in dimension d:
/// SGD 64Md, QSGD and TernGrad (2 + log2(2M + 1))Md, sign majority 2Md.
double comm_bits_per_iter(CommScheme scheme, std::size_t workers, std::size_t dim);

/// Payload bits accumulated over a distributed run.
///
/// bits_down() counts the broadcast once per round. bits_down_delivered()
/// counts one copy per receiving worker, which is the convention behind
/// the 2Md sign-majority figure.
class CommLedger {
 public:
  void record(const VoteRound& round);

  std::uint64_t rounds() const { return rounds_; }
  std::uint64_t bits_up() const { return bits_up_; }
  std::uint64_t bits_down() const { return bits_down_; }
  std::uint64_t bits_down_delivered() const { return bits_down_delivered_; }
  std::uint64_t bits_total_delivered() const { return bits_up_ + bits_down_delivered_; }

 private:
  std::uint64_t rounds_ = 0;
  std::uint64_t bits_up_ = 0;
  std::uint64_t bits_down_ = 0;
  std::uint64_t bits_down_delivered_ = 0;
};

/// One oracle per worker, seeded with worker_seed(base_seed, m).
std::vector<StochasticOracle> make_worker_oracles(const Problem& problem,
                                                  std::size_t workers,
                                                  std::uint64_t base_seed);

/// Runs `iterations` vote rounds from x0. Records carry the first worker's
/// cumulative draw count (every worker draws the same amount) and the
/// cumulative bits_up / bits_down of the ledger.
Trajectory run_distributed(const Objective& objective,
                           std::span<GradientOracle* const> workers,
                           const Schedule& schedule, std::uint64_t iterations,
                           Vector x0, AggregationMode mode,
                           const RunOptions& options = {},
                           CommLedger* ledger = nullptr);

struct VoteErrorEstimate {
  double rate = 0.0;
  double standard_error = 0.0;
  std::uint64_t rounds = 0;
};

/// Monte Carlo rate at which the majority decision for a single coordinate
/// with true gradient `g_value` disagrees with sign(g_value). Each of the
/// `workers` voters sees g_value plus one draw of `noise` at coordinate 0.
/// Votes travel through pack_signs / aggregate_majority.
VoteErrorEstimate estimate_vote_error(const NoiseModel& noise, double g_value,
                                      std::size_t workers, std::uint64_t rounds,
                                      std::uint64_t seed);

}  // namespace signopt

#endif  // SIGNOPT_VOTESIM_HPP_
