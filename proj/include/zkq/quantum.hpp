#pragma once

// Quantum instruments: labeled Kraus branches, completeness diagnostics and
// Born-rule sampling.

#include <string>
#include <vector>

#include "zkq/qmath.hpp"

namespace zkq {

/// Born probabilities below this are treated as zero.
inline constexpr double kNullProbability = 1e-12;
/// Exactness window for sum K^dagger K = I.
inline constexpr double kCompletenessTol = 1e-9;

enum class Completeness { Exact, SubNormalized };

/// One measurement branch. The Kraus matrix maps the input space (cols) to
/// this branch's output space (rows). Several branches may share a label;
/// they then form one coarse-grained outcome.
struct Branch {
  std::string label;
  ComplexMatrix kraus;
};

class Instrument {
 public:
  /// Checks shapes only: every branch must have input_dim columns.
  Instrument(std::size_t input_dim, std::size_t output_dim, std::vector<Branch> branches,
             Completeness completeness = Completeness::Exact);

  std::size_t input_dim() const noexcept { return input_dim_; }
  /// Nominal output dimension. A completing "fail" branch keeps the input
  /// dimension, so individual branches may differ.
  std::size_t output_dim() const noexcept { return output_dim_; }
  Completeness completeness() const noexcept { return completeness_; }
  const std::vector<Branch>& branches() const noexcept { return branches_; }
  std::size_t size() const noexcept { return branches_.size(); }

  /// sum_i K_i^dagger K_i over the branches whose label is in `labels`.
  ComplexMatrix effect(const std::vector<std::string>& labels) const;
  /// sum over every branch.
  ComplexMatrix total_effect() const;
  std::vector<std::string> distinct_labels() const;

 private:
  std::size_t input_dim_;
  std::size_t output_dim_;
  std::vector<Branch> branches_;
  Completeness completeness_;
};

enum class InstrumentClass { Exact, SubNormalized, Invalid };

struct InstrumentDiagnostic {
  InstrumentClass classification;
  /// max |sum K^dagger K - I| entrywise.
  double deviation;
  /// Smallest eigenvalue of I - sum K^dagger K (negative means over-complete).
  double psd_margin;
  ComplexMatrix defect;  // I - sum K^dagger K
};

InstrumentDiagnostic validate_instrument(const Instrument& inst);

struct LabeledProbability {
  std::string label;
  double probability;
};

struct MeasurementOutcome {
  std::size_t branch;
  std::string label;
  double probability;
  DensityMatrix post_state;
};

/// p_i = Tr(K_i rho K_i^dagger), one entry per branch, clamped to [0, 1]
/// after a +-1e-12 window. Throws InvalidState if a probability falls
/// outside that window.
std::vector<LabeledProbability> outcome_probabilities(const Instrument& inst,
                                                      const DensityMatrix& state);

MeasurementOutcome apply_instrument(const Instrument& inst, const DensityMatrix& state,
                                    SeededRng& rng);

/// Appends K_fail = sqrt(I - sum K^dagger K), labeled "fail", acting on the
/// input space. Throws NotSubNormalized unless the input classifies as
/// sub-normalized.
Instrument completing_branch(const Instrument& inst, const std::string& fail_label = "fail");

/// (I + SWAP)/2 on two qubits.
ComplexMatrix symmetric_projector();
ComplexMatrix swap_operator();

}  // namespace zkq
