#pragma once

// Constructive attacks on convincing messages.
//
// Classical messages: diagonalize X and read off its unique eigenvalue-1
// eigenvector. General messages: write every vector Psi_k spanning the
// complement of A's eigenvalue-1 eigenspace as (W_k (x) I)|singlet>, then
// measure the ancilla with the Kraus operators W_k^dagger / sqrt(sum_k Tr W_k^dagger W_k).
// Any successful branch leaves a copy of Bob's qubit.

#include <optional>
#include <string>
#include <vector>

#include "zkq/protocol.hpp"

namespace zkq {

inline constexpr double kStarTol = 1e-9;
inline constexpr const char* kFailLabel = "fail";

struct ExtractionPlan {
  std::size_t ancilla_dim;
  /// Projector onto the eigenvalue-1 eigenspace of A.
  ComplexMatrix unit_projector;
  /// Orthonormal columns Psi_k spanning the complement.
  ComplexMatrix complement;
  /// W_k, each ancilla_dim x 2.
  std::vector<ComplexMatrix> operators;
  /// sum_k Tr(W_k^dagger W_k).
  double normalization;
  /// Branches "w1".."wN" (ancilla -> qubit) followed by "fail" (ancilla -> ancilla).
  Instrument instrument;

  std::size_t size() const { return operators.size(); }
};

struct ExtractionResult {
  bool success;
  std::string branch;
  double probability;
  std::optional<DensityMatrix> reconstructed;
  std::optional<DensityMatrix> residual_ancilla;
};

/// Unique eigenvalue-1 eigenvector of X for a fully classical message.
/// Throws NotClassical if the message carries an ancilla and Degenerate if the
/// eigenvalue-1 eigenspace is not one-dimensional.
PureQubit reconstruct_from_classical(const TestMessage& msg);

/// Throws EmptyComplement when A is the identity within tol.
ExtractionPlan build_extraction_plan(const TestMessage& msg, double tol = kUnitEigenTol);

/// Plan from an explicit orthonormal complement basis (any basis of the same
/// subspace gives an equivalent attack).
ExtractionPlan plan_from_complement(const ComplexMatrix& unit_projector,
                                    const ComplexMatrix& complement, std::size_t ancilla_dim);

/// max_k <phi_perp| W_k^dagger rho W_k |phi_perp> <= 1e-9.
bool verify_star_condition(const ExtractionPlan& plan, const DensityMatrix& ancilla,
                           const PureQubit& phi);
double star_residual(const ExtractionPlan& plan, const DensityMatrix& ancilla,
                     const PureQubit& phi);

/// sum_k Tr(W_k^dagger rho W_k) / normalization.
double extraction_success_probability(const ExtractionPlan& plan, const DensityMatrix& ancilla);

/// Per-branch Born probabilities of the extraction instrument, fail branch last.
std::vector<LabeledProbability> extraction_branch_probabilities(const ExtractionPlan& plan,
                                                                const DensityMatrix& ancilla);

ExtractionResult extract_copy(const ExtractionPlan& plan, const DensityMatrix& ancilla,
                              SeededRng& rng);

}  // namespace zkq
