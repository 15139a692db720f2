#include "zkq/game.hpp"

namespace zkq {

GameTranscript simulate_game(const AliceStrategy& strategy, const PureQubit& phi, bool eavesdrop,
                             SeededRng& rng, FailurePolicy eve_policy) {
  GameTranscript t;
  t.seed = rng.seed();
  t.family = to_string(strategy.family);
  t.honesty = to_string(strategy.honesty);
  t.phi = phi.bloch();

  // The belief draw consumes the same stream positions message_for would, so
  // record it from a copy of the generator.
  SeededRng peek = rng;
  t.alice_belief = alice_belief(strategy, phi, peek).bloch();
  TestMessage msg = message_for(strategy, phi, rng);
  t.note = msg.note;
  t.ancilla_dim = msg.ancilla_dim();
  t.alice_pass_prediction_certain = check_convincing(msg, phi).condition1;

  if (eavesdrop) {
    EveRecord eve;
    const auto attempt = eve_attack(msg, msg.ancilla_state(), eve_policy, rng);
    eve.classical = attempt.classical;
    eve.estimate = attempt.estimate.bloch();
    eve.fidelity = fidelity(phi, attempt.estimate);
    if (attempt.extraction) {
      const auto& ex = *attempt.extraction;
      eve.extraction_success = ex.success;
      eve.branch = ex.branch;
      eve.branch_probability = ex.probability;
      const DensityMatrix& left = ex.success ? *ex.reconstructed : *ex.residual_ancilla;
      if (left.dim() == msg.ancilla_dim()) {
        msg.ancilla = left;
      } else {
        msg.ancilla = DensityMatrix::maximally_mixed(msg.ancilla_dim());
        eve.forwarded_intact = false;
      }
    }
    t.eve = eve;
  }

  const TestRun run = run_test(msg, phi, rng);
  t.bob_passed = run.passed;
  t.bob_label = run.label;
  t.bob_branch_probability = run.probability;
  const auto bob = bob_attack(msg, run.post_state, FailurePolicy::EstimateRemaining, rng);
  t.bob_classical = bob.classical;
  if (bob.extraction) t.bob_extraction_success = bob.extraction->success;
  t.bob_estimate = bob.estimate.bloch();
  t.bob_fidelity = fidelity(phi, bob.estimate);
  return t;
}

}  // namespace zkq
