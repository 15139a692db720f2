#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "zkq/estimation.hpp"

using namespace zkq;

namespace {

double z_component(const ComplexVector& v) {
  return std::norm(v(0)) - std::norm(v(1));
}

}  // namespace

TEST_SUITE("estimation") {

TEST_CASE("fidelity worked examples") {
  CHECK(fidelity(PureQubit::up(), PureQubit::up()) == doctest::Approx(1.0));
  CHECK(fidelity(PureQubit::up(), PureQubit::down()) == doctest::Approx(0.0));
  CHECK(fidelity(PureQubit::up(), PureQubit::from_bloch({1, 0, 0})) == doctest::Approx(0.5));
  CHECK(fidelity(PureQubit::up(), DensityMatrix::maximally_mixed(2).matrix()) == doctest::Approx(0.5));
}

TEST_CASE("covariant estimator reaches (N+1)/(N+2)") {
  for (std::size_t n : {0u, 1u, 2u}) {
    const auto r = mean_estimation_fidelity(n, 50'000, 11);
    const double want = (n + 1.0) / (n + 2.0);
    CHECK(std::abs(r.mean - want) <= 0.01);
    CHECK(std::abs(r.mean - want) <= 4.0 * r.std_error);
    CHECK(r.samples == 50'000);
    CHECK(r.baseline == doctest::Approx(n / (n + 1.0)));
  }
  for (std::size_t n : {3u, 5u}) {
    const auto r = mean_estimation_fidelity(n, 20'000, 12);
    CHECK(std::abs(r.mean - (n + 1.0) / (n + 2.0)) <= 4.0 * r.std_error);
  }
}

TEST_CASE("fidelity distribution has CDF f^(N+1)") {
  SeededRng rng(13);
  // critical value of the one-sample KS statistic at alpha = 0.01
  const std::size_t n = 10'000;
  const double critical = 1.63 / std::sqrt(static_cast<double>(n));
  for (std::size_t copies : {0u, 1u, 2u, 4u}) {
    std::vector<double> f;
    for (std::size_t i = 0; i < n; ++i) {
      const PureQubit phi = sample_haar_qubit(rng);
      f.push_back(fidelity(phi, covariant_estimate(DensityMatrix::pure(phi), copies, rng)));
    }
    const double k = static_cast<double>(copies) + 1.0;
    CHECK(oracle::ks_statistic(f, [k](double x) { return std::pow(x, k); }) < critical);
  }
}

TEST_CASE("estimates rotate with the state") {
  SeededRng rng(14);
  const std::size_t n = 10'000;
  const double critical = 1.63 * std::sqrt(2.0 / static_cast<double>(n));
  for (std::size_t copies : {1u, 2u}) {
    const PureQubit phi = sample_haar_qubit(rng);
    const ComplexMatrix u = sample_haar_unitary(2, rng);
    const ComplexVector uv = u * phi.vector();
    const PureQubit rotated(uv(0), uv(1));
    std::vector<double> a, b;
    for (std::size_t i = 0; i < n; ++i) {
      a.push_back(z_component(u * covariant_estimate(DensityMatrix::pure(phi), copies, rng).vector()));
      b.push_back(z_component(covariant_estimate(DensityMatrix::pure(rotated), copies, rng).vector()));
    }
    CHECK(oracle::ks_statistic(a, b) < critical);
  }
}

TEST_CASE("mixed copies and limits") {
  SeededRng rng(15);
  const DensityMatrix mixed = DensityMatrix::maximally_mixed(2);
  // maximally mixed copies carry no information: estimate is uniform
  std::vector<double> f;
  for (int i = 0; i < 5000; ++i) f.push_back(fidelity(PureQubit::up(), covariant_estimate(mixed, 3, rng)));
  CHECK(oracle::ks_statistic(f, [](double x) { return x; }) < 1.63 / std::sqrt(5000.0));

  CHECK_THROWS_AS(covariant_estimate(mixed, kMaxCopies + 1, rng), Error);
  const std::vector<DensityMatrix> wrong{DensityMatrix::maximally_mixed(3)};
  CHECK_THROWS_AS(covariant_estimate(std::span<const DensityMatrix>(wrong), rng), Error);
  CHECK_THROWS_AS(mean_estimation_fidelity(1, 999, 0), Error);
}

TEST_CASE("determinism and worker independence") {
  const auto a = mean_estimation_fidelity(1, 5000, 42, 1);
  const auto b = mean_estimation_fidelity(1, 5000, 42, 1);
  const auto c = mean_estimation_fidelity(1, 5000, 42, 4);
  const auto d = mean_estimation_fidelity(1, 5000, 43, 1);
  CHECK(a.mean == b.mean);
  CHECK(a.mean == c.mean);
  CHECK(a.std_error == c.std_error);
  CHECK(a.mean != d.mean);

  AliceStrategy s;
  s.family = Family::RandomConvincing;
  CHECK(eve_experiment(s, 3000, FailurePolicy::EstimateRemaining, 5, 1).mean ==
        eve_experiment(s, 3000, FailurePolicy::EstimateRemaining, 5, 3).mean);
}

TEST_CASE("run_trials propagates failures") {
  CHECK_THROWS_AS(run_trials(3000, 1, 2, [](SeededRng&) -> double { throw Error(ErrorCode::Internal, "x"); }),
                  Error);
  const auto stats = run_trials(2500, 1, 2, [](SeededRng&) { return 1.0; });
  CHECK(stats.count == 2500);
  CHECK(stats.sum == 2500.0);
}

TEST_CASE("Eve and Bob on the symmetric projection protocol") {
  AliceStrategy s;
  const std::size_t n = 50'000;
  struct Expect {
    bool bob;
    FailurePolicy policy;
    double value;
  };
  for (const Expect e : {Expect{false, FailurePolicy::EstimateRemaining, 2.0 / 3.0},
                         Expect{false, FailurePolicy::DiscardOnFail, 7.0 / 12.0},
                         Expect{true, FailurePolicy::EstimateRemaining, 3.0 / 4.0},
                         Expect{true, FailurePolicy::DiscardOnFail, 17.0 / 24.0}}) {
    const auto r = e.bob ? bob_experiment(s, n, e.policy, 21) : eve_experiment(s, n, e.policy, 21);
    CAPTURE(e.bob);
    CAPTURE(to_string(e.policy));
    CHECK(std::abs(r.mean - e.value) <= 4.0 * r.std_error);
    CHECK(r.significance() >= 5.0);
  }
}

TEST_CASE("Eve and Bob gain on random convincing messages") {
  AliceStrategy s;
  s.family = Family::RandomConvincing;
  for (FailurePolicy p : {FailurePolicy::EstimateRemaining, FailurePolicy::DiscardOnFail}) {
    const auto eve = eve_experiment(s, 50'000, p, 31);
    const auto bob = bob_experiment(s, 50'000, p, 31);
    CAPTURE(eve.mean);
    CAPTURE(bob.mean);
    CHECK(eve.significance() >= 5.0);
    CHECK(bob.significance() >= 5.0);
  }
}

TEST_CASE("classical messages leak phi completely") {
  AliceStrategy s;
  s.family = Family::ClassicalDirection;
  const auto eve = eve_experiment(s, 2000, FailurePolicy::DiscardOnFail, 1);
  CHECK(eve.mean == doctest::Approx(1.0).epsilon(1e-9));
  const auto bob = bob_experiment(s, 2000, FailurePolicy::DiscardOnFail, 1);
  CHECK(bob.mean == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("policy strings") {
  CHECK(policy_from_string("discard-on-fail") == FailurePolicy::DiscardOnFail);
  CHECK(policy_from_string("remaining") == FailurePolicy::EstimateRemaining);
  CHECK_THROWS_AS(policy_from_string("maybe"), Error);
}

}  // TEST_SUITE
