#include "zkq/scenarios.hpp"

#include <algorithm>
#include <sstream>

namespace zkq {

std::string_view to_string(Family f) {
  switch (f) {
    case Family::TrivialCheat: return "trivial-cheat";
    case Family::ClassicalDirection: return "classical-direction";
    case Family::Scp: return "scp";
    case Family::RandomConvincing: return "random-convincing";
  }
  return "unknown";
}

Family family_from_string(std::string_view s) {
  if (s == "trivial-cheat" || s == "trivial") return Family::TrivialCheat;
  if (s == "classical-direction" || s == "classical") return Family::ClassicalDirection;
  if (s == "scp") return Family::Scp;
  if (s == "random-convincing" || s == "random") return Family::RandomConvincing;
  throw Error(ErrorCode::ParseError, "unknown scenario family '" + std::string(s) + "'");
}

std::string_view to_string(Honesty h) {
  switch (h) {
    case Honesty::Honest: return "honest";
    case Honesty::CheatFixedState: return "cheat-fixed-state";
    case Honesty::CheatRandom: return "cheat-random";
  }
  return "unknown";
}

Honesty honesty_from_string(std::string_view s) {
  if (s == "honest") return Honesty::Honest;
  if (s == "cheat-fixed-state" || s == "cheat-fixed") return Honesty::CheatFixedState;
  if (s == "cheat-random") return Honesty::CheatRandom;
  throw Error(ErrorCode::ParseError, "unknown honesty '" + std::string(s) + "'");
}

TestMessage trivial_cheat_message() {
  const ComplexVector up = PureQubit::up().vector();
  const ComplexVector down = PureQubit::down().vector();
  const ComplexMatrix z_up = up * up.adjoint();
  const ComplexMatrix z_down = down * down.adjoint();
  // reset channel {|up><up|, |up><down|} followed by a z measurement
  const ComplexMatrix reset0 = up * up.adjoint();
  const ComplexMatrix reset1 = up * down.adjoint();
  std::vector<Branch> branches{
      {"up", z_up * reset0},
      {"up", z_up * reset1},
      {"down", z_down * reset0},
      {"down", z_down * reset1},
  };
  return make_message(Instrument(2, 2, std::move(branches)), {"up"}, std::nullopt,
                      "Prepare the spin in state up along z, measure z: you will get up.");
}

TestMessage classical_direction_message(const Bloch& n) {
  const PureQubit up = PureQubit::from_bloch(n);
  const PureQubit down = up.orthogonal();
  std::vector<Branch> branches{{"up", up.projector()}, {"down", down.projector()}};
  std::ostringstream note;
  note.precision(12);
  note << "Measure the spin along (" << n[0] << ", " << n[1] << ", " << n[2]
       << "). You will certainly get up.";
  return make_message(Instrument(2, 2, std::move(branches)), {"up"}, std::nullopt, note.str());
}

TestMessage scp_message(const PureQubit& phi) {
  const ComplexMatrix sym = symmetric_projector();
  const ComplexMatrix anti = identity(4) - sym;
  std::vector<Branch> branches{{"sym", sym}, {"anti", anti}};
  return make_message(Instrument(4, 4, std::move(branches)), {"sym"}, DensityMatrix::pure(phi),
                      "The ancilla is another copy of your state; projecting both onto the "
                      "symmetric subspace will certainly succeed.");
}

DensityMatrix sample_density_matrix(std::size_t dim, std::size_t rank, SeededRng& rng) {
  const ComplexMatrix g = sample_ginibre(dim, std::clamp<std::size_t>(rank, 1, dim), rng);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix((rho + rho.adjoint()) / 2.0);
}

namespace {

TestMessage kraus_pair_message(const ComplexMatrix& a, std::optional<DensityMatrix> ancilla) {
  const auto n = static_cast<std::size_t>(a.rows());
  std::vector<Branch> branches{{"pass", matrix_sqrt_psd(a, 1e-9)},
                               {"fail", matrix_sqrt_psd(identity(n) - a, 1e-9)}};
  return make_message(Instrument(n, n, std::move(branches)), {"pass"}, std::move(ancilla),
                      "Apply the two-outcome measurement; the outcome will be pass.");
}

}  // namespace

TestMessage random_convincing_message(const PureQubit& phi, const DensityMatrix& ancilla,
                                      SeededRng& rng, const RandomMessageOptions& opts) {
  const std::size_t d = ancilla.dim();
  const auto n = static_cast<Eigen::Index>(2 * d);
  const auto rho_eig = hermitian_eig(ancilla.matrix());
  std::vector<ComplexVector> support;
  for (Eigen::Index j = 0; j < rho_eig.values.size(); ++j) {
    if (rho_eig.values(j) > 1e-10) {
      support.push_back(tensor(ComplexVector(rho_eig.vectors.col(j)), phi.vector()));
    }
  }
  const auto s = static_cast<Eigen::Index>(support.size());
  std::optional<DensityMatrix> carried;
  if (d > 1) carried = ancilla;

  for (std::size_t attempt = 0; attempt < opts.max_attempts; ++attempt) {
    ComplexMatrix seed_basis(n, s + n);
    for (Eigen::Index j = 0; j < s; ++j) seed_basis.col(j) = support[static_cast<std::size_t>(j)];
    seed_basis.rightCols(n) = sample_haar_unitary(2 * d, rng);
    const ComplexMatrix basis = orthonormalize(seed_basis);
    if (basis.cols() != n) continue;

    Eigen::VectorXd eigenvalues(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      eigenvalues(j) = j < s ? 1.0 : rng.uniform() * opts.max_complement_eigenvalue;
    }
    if (s < n && rng.uniform() < opts.degenerate_probability) {
      const auto pick = s + static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(n - s));
      eigenvalues(std::min(pick, n - 1)) = 1.0;
    }
    ComplexMatrix a = basis * eigenvalues.cast<cplx>().asDiagonal() * basis.adjoint();
    a = (a + a.adjoint()) / 2.0;

    TestMessage msg = kraus_pair_message(a, carried);
    const auto verdict = check_convincing(msg, phi);
    if (verdict.condition1 && verdict.condition2 &&
        verdict.second_eigenvalue <= 1.0 - opts.min_gap) {
      return msg;
    }
  }
  std::ostringstream os;
  os << "no convincing message after " << opts.max_attempts << " attempts (ancilla_dim=" << d
     << ", min_gap=" << opts.min_gap << ", rank(rho)=" << s << ")";
  throw Error(ErrorCode::GenerationFailed, os.str());
}

TestMessage random_convincing_message(const PureQubit& phi, std::size_t ancilla_dim,
                                      SeededRng& rng, const RandomMessageOptions& opts) {
  if (ancilla_dim < 1 || ancilla_dim > 8) {
    throw Error(ErrorCode::GenerationFailed,
                "ancilla_dim must be in [1, 8], got " + std::to_string(ancilla_dim));
  }
  std::size_t rank = ancilla_dim;
  if (opts.random_rank) {
    rank = 1 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(ancilla_dim));
  }
  return random_convincing_message(phi, sample_density_matrix(ancilla_dim, rank, rng), rng, opts);
}

TestMessage instantiate(const ScenarioDescriptor& desc) {
  switch (desc.family) {
    case Family::TrivialCheat: return trivial_cheat_message();
    case Family::ClassicalDirection: return classical_direction_message(desc.direction);
    case Family::Scp: return scp_message(PureQubit::from_bloch(desc.direction));
    case Family::RandomConvincing: {
      SeededRng rng(desc.seed);
      return random_convincing_message(PureQubit::from_bloch(desc.direction), desc.ancilla_dim,
                                       rng);
    }
  }
  throw Error(ErrorCode::Internal, "unhandled family");
}

PureQubit alice_belief(const AliceStrategy& s, const PureQubit& phi, SeededRng& rng) {
  switch (s.honesty) {
    case Honesty::Honest: return phi;
    case Honesty::CheatFixedState: return PureQubit::along(s.cheat_state);
    case Honesty::CheatRandom: return sample_haar_qubit(rng);
  }
  return phi;
}

namespace {

DensityMatrix correlated_ancilla(const PureQubit& phi, std::size_t d, SeededRng& rng) {
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(d));
  const ComplexVector perp = phi.orthogonal().vector();
  v(0) = perp(0);
  v(1) = perp(1);
  const double weight = 0.5 + 0.5 * rng.uniform();
  const DensityMatrix noise = sample_density_matrix(d, d, rng);
  return DensityMatrix(weight * v * v.adjoint() + (1.0 - weight) * noise.matrix());
}

}  // namespace

TestMessage message_for(const AliceStrategy& s, const PureQubit& phi, SeededRng& rng) {
  const PureQubit belief = alice_belief(s, phi, rng);
  switch (s.family) {
    case Family::TrivialCheat: return trivial_cheat_message();
    case Family::ClassicalDirection: {
      TestMessage base = classical_direction_message(belief.bloch());
      const ComplexMatrix eta = sample_haar_unitary(2, rng);
      std::vector<Branch> branches = base.instrument.branches();
      for (auto& b : branches) b.kraus = eta * b.kraus;
      return make_message(Instrument(2, 2, std::move(branches)), base.accepted, std::nullopt,
                          base.note);
    }
    case Family::Scp: return scp_message(belief);
    case Family::RandomConvincing: {
      if (s.correlated && s.ancilla_dim >= 2) {
        return random_convincing_message(belief, correlated_ancilla(belief, s.ancilla_dim, rng),
                                         rng, s.random_options);
      }
      return random_convincing_message(belief, s.ancilla_dim, rng, s.random_options);
    }
  }
  throw Error(ErrorCode::Internal, "unhandled family");
}

}  // namespace zkq
