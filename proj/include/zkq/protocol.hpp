#pragma once

// Alice's test message and the checker for the two convincing conditions.
//
// A message is an exact instrument on H_anc (x) H_qubit, the set of accepted
// branch labels, and the ancilla state. Fully classical messages carry no
// ancilla; they are treated as ancilla dimension 1 with rho = [1].

#include <optional>
#include <string>
#include <vector>

#include "zkq/quantum.hpp"

namespace zkq {

/// Second eigenvalue of the response operator must not exceed 1 - kGapThreshold
/// for the certain-pass state to count as unique.
inline constexpr double kGapThreshold = 1e-6;
/// Fidelity cap around phi excluded by the grid oracle.
inline constexpr double kGridCapFidelity = 0.999;
/// Grid points at or above this pass probability count as "certain".
inline constexpr double kGridCertainTol = 1e-6;

struct TestMessage {
  Instrument instrument;
  std::vector<std::string> accepted;
  std::optional<DensityMatrix> ancilla;
  std::string note;

  std::size_t ancilla_dim() const { return ancilla ? ancilla->dim() : 1; }
  /// rho, or the 1x1 identity for classical messages.
  DensityMatrix ancilla_state() const;
  bool is_classical() const { return !ancilla.has_value(); }
};

/// Human-readable list of invariant violations; empty when the message is valid.
/// Accepting every label is not a violation here (the checker reports it).
std::vector<std::string> message_violations(const TestMessage& msg);

/// Builds a message and throws InvalidMessage listing every violation.
TestMessage make_message(Instrument instrument, std::vector<std::string> accepted,
                         std::optional<DensityMatrix> ancilla, std::string note = {});

struct ConvincingVerdict {
  bool condition1 = false;
  bool condition2 = false;
  /// <phi|M|phi>, Alice's predicted pass probability for Bob's actual state.
  double pass_probability = 0.0;
  ComplexMatrix response_operator;
  double top_eigenvalue = 0.0;
  double second_eigenvalue = 0.0;
  std::optional<PureQubit> certified_state;
  bool accepts_every_label = false;
};

/// A = sum over accepted branches of K^dagger K, on H_anc (x) H_qubit.
ComplexMatrix test_observable(const TestMessage& msg);

/// M = Tr_anc[(rho (x) I) A], so that Tr(A rho (x) |phi'><phi'|) = <phi'|M|phi'>.
ComplexMatrix response_operator(const TestMessage& msg);

/// Spectral verdict from the response operator.
ConvincingVerdict check_convincing(const TestMessage& msg, const PureQubit& phi);

/// Near-uniform points on the unit sphere (golden-angle spiral).
std::vector<Bloch> fibonacci_sphere(std::size_t n);

/// Oracle verdict: evaluates Tr(A rho (x) |phi'><phi'|) on the full space for
/// every grid state phi'. condition2 holds when condition1 holds and no grid
/// point outside the fidelity-0.999 cap around phi reaches 1 - 1e-6. Agrees
/// with check_convincing whenever the response operator's gap exceeds
/// grid_gap_resolution().
ConvincingVerdict brute_force_check(const TestMessage& msg, const PureQubit& phi,
                                    std::size_t grid_resolution);

/// Smallest spectral gap the grid oracle resolves.
constexpr double grid_gap_resolution() {
  return kGridCertainTol / (1.0 - kGridCapFidelity);
}

struct TestRun {
  bool passed;
  std::string label;
  double probability;
  DensityMatrix post_state;  // joint ancilla (x) qubit state after the branch
};

/// Prepares rho (x) |phi><phi|, samples the message instrument and passes iff
/// the sampled label is accepted.
TestRun run_test(const TestMessage& msg, const PureQubit& bob_qubit, SeededRng& rng);

}  // namespace zkq
