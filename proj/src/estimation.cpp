#include "zkq/estimation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace zkq {

std::string_view to_string(FailurePolicy p) {
  return p == FailurePolicy::DiscardOnFail ? "discard-on-fail" : "estimate-remaining";
}

FailurePolicy policy_from_string(std::string_view s) {
  if (s == "discard-on-fail" || s == "discard") return FailurePolicy::DiscardOnFail;
  if (s == "estimate-remaining" || s == "remaining") return FailurePolicy::EstimateRemaining;
  throw Error(ErrorCode::ParseError, "unknown failure policy '" + std::string(s) + "'");
}

PureQubit covariant_estimate(std::span<const DensityMatrix> copies, SeededRng& rng) {
  if (copies.size() > kMaxCopies) {
    throw Error(ErrorCode::Internal, "at most 8 copies are supported");
  }
  for (const auto& c : copies) {
    if (c.dim() != 2) throw Error(ErrorCode::DimensionMismatch, "copies must be qubit states");
  }
  for (std::size_t proposal = 0; proposal < kMaxRejectionProposals; ++proposal) {
    const Bloch m = sample_sphere_direction(rng);
    if (copies.empty()) return PureQubit::along(m);
    const PureQubit candidate = PureQubit::along(m);
    double weight = 1.0;
    for (const auto& c : copies) weight *= fidelity(candidate, c.matrix());
    if (rng.uniform() < weight) return candidate;
  }
  throw Error(ErrorCode::Internal, "covariant estimate: rejection sampling did not accept");
}

PureQubit covariant_estimate(const DensityMatrix& state, std::size_t n_copies, SeededRng& rng) {
  if (n_copies > kMaxCopies) throw Error(ErrorCode::Internal, "at most 8 copies are supported");
  const std::vector<DensityMatrix> copies(n_copies, state);
  return covariant_estimate(std::span<const DensityMatrix>(copies), rng);
}

TrialStats run_trials(std::size_t samples, std::uint64_t seed, std::size_t workers,
                      const std::function<double(SeededRng&)>& trial) {
  const std::size_t blocks = (samples + kBlockSize - 1) / kBlockSize;
  std::vector<TrialStats> partial(blocks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= blocks) return;
      try {
        SeededRng rng(seed, b);
        const std::size_t begin = b * kBlockSize;
        const std::size_t end = std::min(samples, begin + kBlockSize);
        TrialStats& s = partial[b];
        for (std::size_t i = begin; i < end; ++i) {
          const double x = trial(rng);
          s.sum += x;
          s.sum_sq += x * x;
          ++s.count;
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(blocks);
      }
    }
  };

  const std::size_t n_threads = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(blocks, 1));
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  TrialStats total;
  for (const auto& s : partial) {
    total.sum += s.sum;
    total.sum_sq += s.sum_sq;
    total.count += s.count;
  }
  return total;
}

FidelityReport make_report(const TrialStats& stats, double baseline, std::uint64_t seed,
                           std::string policy, std::string family) {
  FidelityReport r;
  r.samples = stats.count;
  r.seed = seed;
  r.baseline = baseline;
  r.policy = std::move(policy);
  r.family = std::move(family);
  if (stats.count == 0) return r;
  const double n = static_cast<double>(stats.count);
  r.mean = std::clamp(stats.sum / n, 0.0, 1.0);
  if (stats.count > 1) {
    const double var = std::max(0.0, (stats.sum_sq - n * r.mean * r.mean) / (n - 1.0));
    r.std_error = std::sqrt(var / n);
  }
  r.delta = r.mean - baseline;
  return r;
}

FidelityReport mean_estimation_fidelity(std::size_t n_copies, std::size_t samples,
                                        std::uint64_t seed, std::size_t workers) {
  if (samples < 1000) throw Error(ErrorCode::Internal, "mean_estimation_fidelity needs >= 1000 samples");
  const auto stats = run_trials(samples, seed, workers, [n_copies](SeededRng& rng) {
    const PureQubit phi = sample_haar_qubit(rng);
    return fidelity(phi, covariant_estimate(DensityMatrix::pure(phi), n_copies, rng));
  });
  const double n = static_cast<double>(n_copies);
  return make_report(stats, n / (n + 1.0), seed, "none",
                     "covariant-" + std::to_string(n_copies) + "-copies");
}

EveAttempt eve_attack(const TestMessage& msg, const DensityMatrix& ancilla, FailurePolicy policy,
                      SeededRng& rng) {
  if (msg.is_classical()) {
    try {
      return {true, std::nullopt, reconstruct_from_classical(msg)};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Degenerate) throw;
      return {true, std::nullopt, covariant_estimate(std::span<const DensityMatrix>{}, rng)};
    }
  }
  const ExtractionPlan plan = build_extraction_plan(msg);
  ExtractionResult result = extract_copy(plan, ancilla, rng);
  std::vector<DensityMatrix> copies;
  if (result.success) {
    copies.push_back(*result.reconstructed);
  } else if (policy == FailurePolicy::EstimateRemaining && result.residual_ancilla &&
             result.residual_ancilla->dim() == 2) {
    copies.push_back(*result.residual_ancilla);
  }
  PureQubit estimate = covariant_estimate(std::span<const DensityMatrix>(copies), rng);
  return {false, std::move(result), estimate};
}

BobAttempt bob_attack(const TestMessage& msg, const DensityMatrix& joint_post,
                      FailurePolicy policy, SeededRng& rng) {
  const std::size_t d = msg.ancilla_dim();
  if (joint_post.dim() != 2 * d) {
    throw Error(ErrorCode::DimensionMismatch, "post-test state is not ancilla x qubit");
  }
  const DensityMatrix own(partial_trace(joint_post.matrix(), d, 2, Factor::Second));
  if (msg.is_classical()) {
    try {
      return {true, std::nullopt, reconstruct_from_classical(msg)};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Degenerate) throw;
      return {true, std::nullopt, covariant_estimate(own, 1, rng)};
    }
  }
  const DensityMatrix ancilla(partial_trace(joint_post.matrix(), d, 2, Factor::First));
  const ExtractionPlan plan = build_extraction_plan(msg);
  ExtractionResult result = extract_copy(plan, ancilla, rng);
  std::vector<DensityMatrix> copies{own};
  if (result.success) {
    copies.push_back(*result.reconstructed);
  } else if (policy == FailurePolicy::EstimateRemaining && result.residual_ancilla &&
             result.residual_ancilla->dim() == 2) {
    copies.push_back(*result.residual_ancilla);
  }
  PureQubit estimate = covariant_estimate(std::span<const DensityMatrix>(copies), rng);
  return {false, std::move(result), estimate};
}

FidelityReport eve_experiment(const AliceStrategy& strategy, std::size_t samples,
                              FailurePolicy policy, std::uint64_t seed, std::size_t workers) {
  const auto stats = run_trials(samples, seed, workers, [&](SeededRng& rng) {
    const PureQubit phi = sample_haar_qubit(rng);
    const TestMessage msg = message_for(strategy, phi, rng);
    const auto attempt = eve_attack(msg, msg.ancilla_state(), policy, rng);
    return fidelity(phi, attempt.estimate);
  });
  return make_report(stats, 0.5, seed, std::string(to_string(policy)),
                     std::string(to_string(strategy.family)));
}

FidelityReport bob_experiment(const AliceStrategy& strategy, std::size_t samples,
                              FailurePolicy policy, std::uint64_t seed, std::size_t workers) {
  const auto stats = run_trials(samples, seed, workers, [&](SeededRng& rng) {
    const PureQubit phi = sample_haar_qubit(rng);
    const TestMessage msg = message_for(strategy, phi, rng);
    const TestRun run = run_test(msg, phi, rng);
    const auto attempt = bob_attack(msg, run.post_state, policy, rng);
    return fidelity(phi, attempt.estimate);
  });
  return make_report(stats, 2.0 / 3.0, seed, std::string(to_string(policy)),
                     std::string(to_string(strategy.family)));
}

}  // namespace zkq
