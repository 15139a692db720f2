#include "zkq/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace zkq {

DensityMatrix TestMessage::ancilla_state() const {
  return ancilla ? *ancilla : DensityMatrix(identity(1));
}

std::vector<std::string> message_violations(const TestMessage& msg) {
  std::vector<std::string> out;
  const std::size_t expected_input = msg.ancilla_dim() * 2;
  if (msg.instrument.input_dim() != expected_input) {
    std::ostringstream os;
    os << "instrument input_dim " << msg.instrument.input_dim() << " != ancilla_dim "
       << msg.ancilla_dim() << " * 2";
    out.push_back(os.str());
  }
  const auto diag = validate_instrument(msg.instrument);
  if (diag.classification != InstrumentClass::Exact) {
    std::ostringstream os;
    os << "instrument is not complete: max|sum K^dagger K - I| = " << diag.deviation;
    out.push_back(os.str());
  }
  if (msg.accepted.empty()) out.emplace_back("accepted set is empty");
  const auto labels = msg.instrument.distinct_labels();
  for (const auto& a : msg.accepted) {
    if (std::find(labels.begin(), labels.end(), a) == labels.end()) {
      out.push_back("accepted label '" + a + "' is not a branch label");
    }
  }
  return out;
}

TestMessage make_message(Instrument instrument, std::vector<std::string> accepted,
                         std::optional<DensityMatrix> ancilla, std::string note) {
  TestMessage msg{std::move(instrument), std::move(accepted), std::move(ancilla), std::move(note)};
  const auto violations = message_violations(msg);
  if (!violations.empty()) {
    std::string what = "invalid test message:";
    for (const auto& v : violations) what += "\n  - " + v;
    throw Error(ErrorCode::InvalidMessage, what);
  }
  return msg;
}

ComplexMatrix test_observable(const TestMessage& msg) {
  const ComplexMatrix a = msg.instrument.effect(msg.accepted);
  return (a + a.adjoint()) / 2.0;
}

ComplexMatrix response_operator(const TestMessage& msg) {
  const ComplexMatrix a = test_observable(msg);
  const DensityMatrix rho = msg.ancilla_state();
  const ComplexMatrix weighted = tensor(rho.matrix(), identity(2)) * a;
  const ComplexMatrix m = partial_trace(weighted, rho.dim(), 2, Factor::Second);
  return (m + m.adjoint()) / 2.0;
}

namespace {

bool accepts_every_label(const TestMessage& msg) {
  const auto labels = msg.instrument.distinct_labels();
  return std::all_of(labels.begin(), labels.end(), [&](const std::string& l) {
    return std::find(msg.accepted.begin(), msg.accepted.end(), l) != msg.accepted.end();
  });
}

double expectation(const ComplexMatrix& m, const ComplexVector& v) {
  return (v.adjoint() * m * v)(0, 0).real();
}

}  // namespace

ConvincingVerdict check_convincing(const TestMessage& msg, const PureQubit& phi) {
  ConvincingVerdict v;
  v.response_operator = response_operator(msg);
  v.accepts_every_label = accepts_every_label(msg);
  v.pass_probability = expectation(v.response_operator, phi.vector());
  const auto eig = hermitian_eig(v.response_operator, 1e-9);
  v.second_eigenvalue = eig.values(0);
  v.top_eigenvalue = eig.values(1);
  v.condition1 = v.pass_probability >= 1.0 - kUnitEigenTol;

  const bool top_certain = v.top_eigenvalue >= 1.0 - kUnitEigenTol;
  const bool gapped = v.second_eigenvalue <= 1.0 - kGapThreshold;
  if (top_certain && gapped) {
    const ComplexVector top = eig.vectors.col(1);
    const PureQubit certified(top(0), top(1));
    if (fidelity(certified, phi) >= 1.0 - kUnitEigenTol) {
      v.condition2 = true;
      v.certified_state = certified;
    }
  }
  return v;
}

std::vector<Bloch> fibonacci_sphere(std::size_t n) {
  std::vector<Bloch> pts;
  pts.reserve(n);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double t = golden * static_cast<double>(i);
    pts.push_back({r * std::cos(t), r * std::sin(t), z});
  }
  return pts;
}

ConvincingVerdict brute_force_check(const TestMessage& msg, const PureQubit& phi,
                                    std::size_t grid_resolution) {
  if (grid_resolution < 16) {
    throw Error(ErrorCode::InvalidMessage, "grid resolution must be at least 16");
  }
  const ComplexMatrix a = test_observable(msg);
  const ComplexMatrix rho = msg.ancilla_state().matrix();
  // Pass probability with the full joint trace, no reduction.
  auto pass = [&](const PureQubit& q) {
    return (a * tensor(rho, q.projector())).trace().real();
  };

  ConvincingVerdict v;
  v.accepts_every_label = accepts_every_label(msg);
  v.pass_probability = pass(phi);
  v.condition1 = v.pass_probability >= 1.0 - kUnitEigenTol;

  double best_inside = v.pass_probability;
  double best_outside = 0.0;
  for (const auto& n : fibonacci_sphere(grid_resolution)) {
    const PureQubit q = PureQubit::along(n);
    const double p = pass(q);
    if (fidelity(q, phi) >= kGridCapFidelity) {
      best_inside = std::max(best_inside, p);
    } else {
      best_outside = std::max(best_outside, p);
    }
  }
  v.top_eigenvalue = std::max(best_inside, best_outside);
  v.second_eigenvalue = best_outside;
  v.condition2 = v.condition1 && best_outside < 1.0 - kGridCertainTol;
  if (v.condition2) v.certified_state = phi;
  return v;
}

TestRun run_test(const TestMessage& msg, const PureQubit& bob_qubit, SeededRng& rng) {
  const DensityMatrix joint(tensor(msg.ancilla_state().matrix(), bob_qubit.projector()));
  auto outcome = apply_instrument(msg.instrument, joint, rng);
  const bool passed =
      std::find(msg.accepted.begin(), msg.accepted.end(), outcome.label) != msg.accepted.end();
  return {passed, std::move(outcome.label), outcome.probability, std::move(outcome.post_state)};
}

}  // namespace zkq
