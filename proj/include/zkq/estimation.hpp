#pragma once

// Covariant state estimation and Monte-Carlo fidelity experiments.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "zkq/attacks.hpp"
#include "zkq/scenarios.hpp"

namespace zkq {

inline constexpr std::size_t kMaxRejectionProposals = 10'000;
inline constexpr std::size_t kMaxCopies = 8;
/// Trials per random stream. Stream b covers trials [b*kBlockSize, (b+1)*kBlockSize),
/// so results do not depend on the worker count.
inline constexpr std::size_t kBlockSize = 1000;

enum class FailurePolicy { DiscardOnFail, EstimateRemaining };

std::string_view to_string(FailurePolicy p);
FailurePolicy policy_from_string(std::string_view s);

struct FidelityReport {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  double baseline = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::string policy;
  std::string family;

  /// delta / stderr.
  double significance() const { return std_error > 0.0 ? delta / std_error : 0.0; }
};

/// Covariant estimate from i.i.d. copies of `state`. n_copies = 0 returns a
/// uniformly random direction. Otherwise the estimate direction m is drawn
/// with density (N+1) <m|state|m>^N relative to the uniform sphere, by
/// rejection sampling with envelope N+1.
PureQubit covariant_estimate(const DensityMatrix& state, std::size_t n_copies, SeededRng& rng);

/// Same measurement on a product of possibly different qubit states; the
/// acceptance weight is prod_j <m|copies_j|m>. An empty span gives a uniform guess.
PureQubit covariant_estimate(std::span<const DensityMatrix> copies, SeededRng& rng);

struct TrialStats {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;
};

/// Runs `trial` for indices [0, samples) with one SeededRng(seed, block) per
/// block of kBlockSize trials, on `workers` threads. Blocks are folded in
/// order, so the result is independent of the worker count.
TrialStats run_trials(std::size_t samples, std::uint64_t seed, std::size_t workers,
                      const std::function<double(SeededRng&)>& trial);

FidelityReport make_report(const TrialStats& stats, double baseline, std::uint64_t seed,
                           std::string policy, std::string family);

/// Haar-averaged fidelity of the covariant estimator from n_copies of phi.
/// Baseline is n/(n+1), the value one copy fewer would reach.
FidelityReport mean_estimation_fidelity(std::size_t n_copies, std::size_t samples,
                                        std::uint64_t seed, std::size_t workers = 1);

/// Eve intercepts the message and ancilla, runs the extraction attack and
/// estimates phi. Baseline 1/2.
FidelityReport eve_experiment(const AliceStrategy& strategy, std::size_t samples,
                              FailurePolicy policy, std::uint64_t seed, std::size_t workers = 1);

/// Bob runs the test, then the extraction attack on the ancilla left after
/// the test, and estimates phi from his qubit plus whatever he extracted.
/// Baseline 2/3.
FidelityReport bob_experiment(const AliceStrategy& strategy, std::size_t samples,
                              FailurePolicy policy, std::uint64_t seed, std::size_t workers = 1);

/// Single Eve trial, exposed for the game simulator.
struct EveAttempt {
  bool classical = false;
  std::optional<ExtractionResult> extraction;
  PureQubit estimate;
};
EveAttempt eve_attack(const TestMessage& msg, const DensityMatrix& ancilla, FailurePolicy policy,
                      SeededRng& rng);

struct BobAttempt {
  bool classical = false;
  std::optional<ExtractionResult> extraction;
  PureQubit estimate;
};
/// Bob's estimate after the test. `joint_post` is the joint state left by run_test.
BobAttempt bob_attack(const TestMessage& msg, const DensityMatrix& joint_post,
                      FailurePolicy policy, SeededRng& rng);

}  // namespace zkq
