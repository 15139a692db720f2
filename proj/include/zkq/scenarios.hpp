#pragma once

// Concrete test messages (trivial cheat, classical direction, symmetric
// projection) and a generator of random convincing messages.

#include <optional>
#include <string>
#include <string_view>

#include "zkq/protocol.hpp"

namespace zkq {

enum class Family { TrivialCheat, ClassicalDirection, Scp, RandomConvincing };

std::string_view to_string(Family f);
Family family_from_string(std::string_view s);

/// "Prepare up, then measure z": the qubit is reset to |up> (Kraus |up><up|
/// and |up><down|, both labeled "up"), and a zero "down" branch completes the
/// label set. Passes with certainty for every Bob state.
TestMessage trivial_cheat_message();

/// Projective measurement along n, accepting "up". Throws NotUnitVector.
TestMessage classical_direction_message(const Bloch& n);

/// Ancilla |phi><phi| with {P_sym "sym", P_anti "anti"}, accepting "sym".
TestMessage scp_message(const PureQubit& phi);

struct RandomMessageOptions {
  /// Minimum gap below 1 for the second eigenvalue of the response operator.
  double min_gap = 1e-4;
  /// Complement eigenvalues are drawn from [0, max_complement_eigenvalue].
  double max_complement_eigenvalue = 1.0 - 1e-3;
  /// Probability of promoting one complement direction to eigenvalue 1, which
  /// makes A's eigenvalue-1 eigenspace larger than the support of rho (x) phi.
  double degenerate_probability = 0.25;
  /// Draw the rank of rho uniformly from [1, dim] instead of full rank.
  bool random_rank = true;
  std::size_t max_attempts = 1000;
};

/// Random exact message with Kraus pair {sqrt(A) "pass", sqrt(I - A) "fail"}
/// that is convincing for phi. ancilla_dim = 1 yields a classical message.
/// Throws GenerationFailed after max_attempts rejections.
TestMessage random_convincing_message(const PureQubit& phi, std::size_t ancilla_dim,
                                      SeededRng& rng, const RandomMessageOptions& opts = {});

/// Same construction around a caller-supplied ancilla state.
TestMessage random_convincing_message(const PureQubit& phi, const DensityMatrix& ancilla,
                                      SeededRng& rng, const RandomMessageOptions& opts = {});

/// Hilbert-Schmidt random density matrix G G^dagger / Tr, G of size dim x rank.
DensityMatrix sample_density_matrix(std::size_t dim, std::size_t rank, SeededRng& rng);

struct ScenarioDescriptor {
  Family family = Family::Scp;
  /// Classical family: measurement axis. SCP / random: the state the message is built for.
  Bloch direction{0.0, 0.0, 1.0};
  std::size_t ancilla_dim = 2;
  std::uint64_t seed = 0;
};

TestMessage instantiate(const ScenarioDescriptor& desc);

// ---------------------------------------------------------------------------
// Alice strategies

enum class Honesty { Honest, CheatFixedState, CheatRandom };

std::string_view to_string(Honesty h);
Honesty honesty_from_string(std::string_view s);

/// How Alice picks her message. The hidden variable eta is drawn from the
/// trial's random stream: for the classical family it is a random unitary
/// applied after the measurement (changing the Kraus form but not X); for the
/// random family it is the generator's randomness; SCP uses none.
struct AliceStrategy {
  Honesty honesty = Honesty::Honest;
  Family family = Family::Scp;
  std::size_t ancilla_dim = 2;
  /// State Alice believes Bob has when cheating with a fixed state.
  Bloch cheat_state{0.0, 0.0, 1.0};
  /// eta correlated with phi: the random family then puts weight of rho on
  /// a direction orthogonal to phi.
  bool correlated = false;
  RandomMessageOptions random_options{};
};

/// The state Alice builds her message around for this trial.
PureQubit alice_belief(const AliceStrategy& s, const PureQubit& phi, SeededRng& rng);

/// Message Alice sends when Bob holds phi.
TestMessage message_for(const AliceStrategy& s, const PureQubit& phi, SeededRng& rng);

}  // namespace zkq
