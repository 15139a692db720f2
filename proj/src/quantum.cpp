#include "zkq/quantum.hpp"

#include <algorithm>
#include <sstream>

namespace zkq {

Instrument::Instrument(std::size_t input_dim, std::size_t output_dim, std::vector<Branch> branches,
                       Completeness completeness)
    : input_dim_(input_dim),
      output_dim_(output_dim),
      branches_(std::move(branches)),
      completeness_(completeness) {
  if (input_dim_ == 0 || output_dim_ == 0) {
    throw Error(ErrorCode::InvalidInstrument, "instrument dimensions must be positive");
  }
  if (branches_.empty()) throw Error(ErrorCode::InvalidInstrument, "instrument has no branches");
  for (const auto& b : branches_) {
    if (static_cast<std::size_t>(b.kraus.cols()) != input_dim_ || b.kraus.rows() == 0) {
      std::ostringstream os;
      os << "branch '" << b.label << "' is " << b.kraus.rows() << "x" << b.kraus.cols()
         << ", expected ?x" << input_dim_;
      throw Error(ErrorCode::DimensionMismatch, os.str());
    }
  }
}

ComplexMatrix Instrument::effect(const std::vector<std::string>& labels) const {
  ComplexMatrix e = ComplexMatrix::Zero(static_cast<Eigen::Index>(input_dim_),
                                        static_cast<Eigen::Index>(input_dim_));
  for (const auto& b : branches_) {
    if (std::find(labels.begin(), labels.end(), b.label) != labels.end()) {
      e += b.kraus.adjoint() * b.kraus;
    }
  }
  return e;
}

ComplexMatrix Instrument::total_effect() const {
  ComplexMatrix e = ComplexMatrix::Zero(static_cast<Eigen::Index>(input_dim_),
                                        static_cast<Eigen::Index>(input_dim_));
  for (const auto& b : branches_) e += b.kraus.adjoint() * b.kraus;
  return e;
}

std::vector<std::string> Instrument::distinct_labels() const {
  std::vector<std::string> out;
  for (const auto& b : branches_) {
    if (std::find(out.begin(), out.end(), b.label) == out.end()) out.push_back(b.label);
  }
  return out;
}

InstrumentDiagnostic validate_instrument(const Instrument& inst) {
  const ComplexMatrix defect = identity(inst.input_dim()) - inst.total_effect();
  const double deviation = max_abs(defect);
  const double margin = hermitian_eig(defect, 1e-8).values(0);
  InstrumentClass cls = InstrumentClass::Invalid;
  if (deviation <= kCompletenessTol) {
    cls = InstrumentClass::Exact;
  } else if (margin >= -kCompletenessTol) {
    cls = InstrumentClass::SubNormalized;
  }
  return {cls, deviation, margin, defect};
}

std::vector<LabeledProbability> outcome_probabilities(const Instrument& inst,
                                                      const DensityMatrix& state) {
  if (state.dim() != inst.input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "state dimension " + std::to_string(state.dim()) +
                                                  " vs instrument input " +
                                                  std::to_string(inst.input_dim()));
  }
  std::vector<LabeledProbability> out;
  out.reserve(inst.size());
  for (const auto& b : inst.branches()) {
    const double p = (b.kraus * state.matrix() * b.kraus.adjoint()).trace().real();
    if (p < -kNullProbability || p > 1.0 + kNullProbability) {
      throw Error(ErrorCode::InvalidState,
                  "branch '" + b.label + "' has probability " + std::to_string(p));
    }
    out.push_back({b.label, std::clamp(p, 0.0, 1.0)});
  }
  return out;
}

MeasurementOutcome apply_instrument(const Instrument& inst, const DensityMatrix& state,
                                    SeededRng& rng) {
  const auto probs = outcome_probabilities(inst, state);
  std::vector<double> weights;
  weights.reserve(probs.size());
  for (const auto& p : probs) weights.push_back(p.probability > kNullProbability ? p.probability : 0.0);
  if (std::none_of(weights.begin(), weights.end(), [](double w) { return w > 0.0; })) {
    throw Error(ErrorCode::AllBranchesNull, "every branch has probability <= 1e-12");
  }
  const std::size_t k = rng.discrete(weights);
  const auto& kraus = inst.branches()[k].kraus;
  ComplexMatrix post = kraus * state.matrix() * kraus.adjoint();
  post /= post.trace().real();
  return {k, probs[k].label, probs[k].probability, DensityMatrix((post + post.adjoint()) / 2.0)};
}

Instrument completing_branch(const Instrument& inst, const std::string& fail_label) {
  const auto diag = validate_instrument(inst);
  if (diag.classification != InstrumentClass::SubNormalized) {
    std::ostringstream os;
    os << "instrument classifies as "
       << (diag.classification == InstrumentClass::Exact ? "exact" : "invalid")
       << " (defect " << diag.deviation << ", margin " << diag.psd_margin << ")";
    throw Error(ErrorCode::NotSubNormalized, os.str());
  }
  auto branches = inst.branches();
  branches.push_back({fail_label, matrix_sqrt_psd(diag.defect, 1e-8)});
  return Instrument(inst.input_dim(), inst.output_dim(), std::move(branches), Completeness::Exact);
}

ComplexMatrix swap_operator() {
  ComplexMatrix s = ComplexMatrix::Zero(4, 4);
  s(0, 0) = 1.0;
  s(1, 2) = 1.0;
  s(2, 1) = 1.0;
  s(3, 3) = 1.0;
  return s;
}

ComplexMatrix symmetric_projector() {
  return (identity(4) + swap_operator()) / 2.0;
}

}  // namespace zkq
