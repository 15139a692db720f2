#include "zkq/attacks.hpp"

#include <algorithm>
#include <cmath>

namespace zkq {

PureQubit reconstruct_from_classical(const TestMessage& msg) {
  if (!msg.is_classical()) {
    throw Error(ErrorCode::NotClassical, "message carries an ancilla of dimension " +
                                             std::to_string(msg.ancilla_dim()));
  }
  const auto eig = hermitian_eig(test_observable(msg), 1e-9);
  const auto unit = std::count_if(eig.values.begin(), eig.values.end(),
                                  [](double l) { return l >= 1.0 - kUnitEigenTol; });
  if (unit != 1) {
    throw Error(ErrorCode::Degenerate,
                "eigenvalue-1 eigenspace of X has dimension " + std::to_string(unit));
  }
  const ComplexVector top = eig.vectors.col(1);
  return {top(0), top(1)};
}

ExtractionPlan plan_from_complement(const ComplexMatrix& unit_projector,
                                    const ComplexMatrix& complement, std::size_t ancilla_dim) {
  if (complement.cols() == 0) {
    throw Error(ErrorCode::EmptyComplement, "test observable is the identity");
  }
  if (static_cast<std::size_t>(complement.rows()) != 2 * ancilla_dim) {
    throw Error(ErrorCode::DimensionMismatch, "complement vectors do not live on ancilla x qubit");
  }
  std::vector<ComplexMatrix> ops;
  double norm = 0.0;
  for (Eigen::Index k = 0; k < complement.cols(); ++k) {
    ops.push_back(operator_from_singlet(complement.col(k), ancilla_dim));
    norm += (ops.back().adjoint() * ops.back()).trace().real();
  }

  std::vector<Branch> branches;
  const double scale = 1.0 / std::sqrt(norm);
  for (std::size_t k = 0; k < ops.size(); ++k) {
    branches.push_back({"w" + std::to_string(k + 1), ops[k].adjoint() * scale});
  }
  Instrument partial(ancilla_dim, 2, branches, Completeness::SubNormalized);
  // With a single-vector complement on a trivial ancilla the W-branches are
  // already complete; keep a zero fail branch so the label set is uniform.
  const auto diag = validate_instrument(partial);
  Instrument inst = [&] {
    if (diag.classification == InstrumentClass::Exact) {
      branches.push_back({kFailLabel, ComplexMatrix::Zero(static_cast<Eigen::Index>(ancilla_dim),
                                                          static_cast<Eigen::Index>(ancilla_dim))});
      return Instrument(ancilla_dim, 2, branches, Completeness::Exact);
    }
    return completing_branch(partial, kFailLabel);
  }();

  return {ancilla_dim, unit_projector, complement, std::move(ops), norm, std::move(inst)};
}

ExtractionPlan build_extraction_plan(const TestMessage& msg, double tol) {
  const auto eig = hermitian_eig(test_observable(msg), 1e-9);
  std::vector<Eigen::Index> unit, perp;
  for (Eigen::Index j = 0; j < eig.values.size(); ++j) {
    (eig.values(j) >= 1.0 - tol ? unit : perp).push_back(j);
  }
  const Eigen::Index n = eig.vectors.rows();
  ComplexMatrix projector = ComplexMatrix::Zero(n, n);
  for (auto j : unit) projector += eig.vectors.col(j) * eig.vectors.col(j).adjoint();
  ComplexMatrix complement(n, static_cast<Eigen::Index>(perp.size()));
  for (std::size_t k = 0; k < perp.size(); ++k) {
    complement.col(static_cast<Eigen::Index>(k)) = eig.vectors.col(perp[k]);
  }
  return plan_from_complement(projector, complement, msg.ancilla_dim());
}

double star_residual(const ExtractionPlan& plan, const DensityMatrix& ancilla,
                     const PureQubit& phi) {
  if (ancilla.dim() != plan.ancilla_dim) {
    throw Error(ErrorCode::DimensionMismatch, "ancilla does not match the plan");
  }
  const ComplexVector perp = phi.orthogonal().vector();
  double worst = 0.0;
  for (const auto& w : plan.operators) {
    const ComplexMatrix reduced = w.adjoint() * ancilla.matrix() * w;
    worst = std::max(worst, (perp.adjoint() * reduced * perp)(0, 0).real());
  }
  return worst;
}

bool verify_star_condition(const ExtractionPlan& plan, const DensityMatrix& ancilla,
                           const PureQubit& phi) {
  return star_residual(plan, ancilla, phi) <= kStarTol;
}

double extraction_success_probability(const ExtractionPlan& plan, const DensityMatrix& ancilla) {
  if (ancilla.dim() != plan.ancilla_dim) {
    throw Error(ErrorCode::DimensionMismatch, "ancilla does not match the plan");
  }
  double total = 0.0;
  for (const auto& w : plan.operators) {
    total += (w.adjoint() * ancilla.matrix() * w).trace().real();
  }
  return std::clamp(total / plan.normalization, 0.0, 1.0);
}

std::vector<LabeledProbability> extraction_branch_probabilities(const ExtractionPlan& plan,
                                                                const DensityMatrix& ancilla) {
  return outcome_probabilities(plan.instrument, ancilla);
}

ExtractionResult extract_copy(const ExtractionPlan& plan, const DensityMatrix& ancilla,
                              SeededRng& rng) {
  auto outcome = apply_instrument(plan.instrument, ancilla, rng);
  if (outcome.label == kFailLabel) {
    return {false, outcome.label, outcome.probability, std::nullopt, std::move(outcome.post_state)};
  }
  return {true, outcome.label, outcome.probability, std::move(outcome.post_state), std::nullopt};
}

}  // namespace zkq
