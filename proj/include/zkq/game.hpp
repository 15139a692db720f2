#pragma once

// End-to-end run of the convincing game: Alice builds a message, Eve may
// intercept it, Bob runs the test and tries to learn his state.

#include <optional>
#include <string>

#include "zkq/estimation.hpp"

namespace zkq {

struct EveRecord {
  bool classical = false;
  bool extraction_success = false;
  std::string branch;
  double branch_probability = 0.0;
  Bloch estimate{};
  double fidelity = 0.0;
  /// Eve forwards what is left of the ancilla; false if she could not
  /// return a system of the original dimension.
  bool forwarded_intact = true;
};

struct GameTranscript {
  std::uint64_t seed = 0;
  std::string family;
  std::string honesty;
  Bloch phi{};
  Bloch alice_belief{};
  std::string note;
  std::size_t ancilla_dim = 1;
  bool alice_pass_prediction_certain = false;  // condition 1 w.r.t. Bob's actual state
  std::optional<EveRecord> eve;
  bool bob_passed = false;
  std::string bob_label;
  double bob_branch_probability = 0.0;
  bool bob_classical = false;
  std::optional<bool> bob_extraction_success;
  Bloch bob_estimate{};
  double bob_fidelity = 0.0;
};

/// Bob always uses the estimate-remaining policy; Eve uses `eve_policy`.
GameTranscript simulate_game(const AliceStrategy& strategy, const PureQubit& phi, bool eavesdrop,
                             SeededRng& rng,
                             FailurePolicy eve_policy = FailurePolicy::EstimateRemaining);

}  // namespace zkq
