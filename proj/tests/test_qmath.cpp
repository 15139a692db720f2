#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "zkq/qmath.hpp"

using namespace zkq;

namespace {

ComplexMatrix diag2(cplx a, cplx b) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST_SUITE("qmath") {

TEST_CASE("tensor: identity and basis projectors") {
  CHECK(max_abs(tensor(identity(2), identity(2)) - identity(4)) == 0.0);

  const ComplexMatrix got = tensor(diag2(1, 0), diag2(0, 1));
  ComplexMatrix want = ComplexMatrix::Zero(4, 4);
  want(1, 1) = 1.0;
  CHECK(max_abs(got - want) == 0.0);
}

TEST_CASE("tensor: sigma_y on the first factor of |up down>") {
  ComplexVector updown = ComplexVector::Zero(4);
  updown(1) = 1.0;
  const ComplexVector out = tensor(sigma_y(), identity(2)) * updown;
  ComplexVector want = ComplexVector::Zero(4);
  want(3) = cplx{0.0, 1.0};
  CHECK((out - want).norm() < 1e-15);
  CHECK((oracle::kron(sigma_y(), identity(2)) * updown - want).norm() < 1e-15);
}

TEST_CASE("tensor matches the naive Kronecker loop on rectangular input") {
  SeededRng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = sample_ginibre(3, 2, rng);
    const auto b = sample_ginibre(2, 4, rng);
    CHECK(max_abs(tensor(a, b) - oracle::kron(a, b)) < 1e-14);
  }
}

TEST_CASE("hermitian_eig: diagonal, Pauli and rank-one shift") {
  auto e = hermitian_eig(diag2(0.3, 1.0));
  CHECK(e.values(0) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(e.values(1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(e.vectors(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(e.vectors(1, 1)) == doctest::Approx(1.0));

  e = hermitian_eig(sigma_y());
  CHECK(e.values(0) == doctest::Approx(-1.0));
  CHECK(e.values(1) == doctest::Approx(1.0));

  SeededRng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const PureQubit phi = sample_haar_qubit(rng);
    const ComplexMatrix m = (identity(2) + phi.projector()) / 2.0;
    const auto eig = hermitian_eig(m);
    CHECK(std::abs(eig.values(0) - 0.5) < 1e-12);
    CHECK(std::abs(eig.values(1) - 1.0) < 1e-12);
    const ComplexVector top = eig.vectors.col(1);
    CHECK(fidelity(PureQubit(top(0), top(1)), phi) > 1.0 - 1e-12);
    CHECK(oracle::eig_residual(m, eig.values, eig.vectors) < 1e-12);
  }
}

TEST_CASE("hermitian_eig: residual and orthonormality on random Hermitian input") {
  SeededRng rng(11);
  for (Eigen::Index d : {2, 3, 4, 8, 16}) {
    const auto g = sample_ginibre(static_cast<std::size_t>(d), static_cast<std::size_t>(d), rng);
    const ComplexMatrix h = g + g.adjoint();
    const auto eig = hermitian_eig(h);
    const double scale = h.norm();
    CHECK(oracle::eig_residual(h, eig.values, eig.vectors) <= 1e-9 * scale);
    CHECK(max_abs(eig.vectors.adjoint() * eig.vectors - identity(static_cast<std::size_t>(d))) < 1e-10);
    for (Eigen::Index j = 1; j < d; ++j) CHECK(eig.values(j - 1) <= eig.values(j));
  }
}

TEST_CASE("hermitian_eig: symmetrizes within tolerance, rejects beyond") {
  ComplexMatrix m = sigma_x();
  m(0, 1) += 1e-12;
  CHECK_NOTHROW(hermitian_eig(m));
  m(0, 1) += 1e-3;
  try {
    hermitian_eig(m);
    FAIL("expected NotHermitian");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotHermitian);
  }
  CHECK_THROWS_AS(hermitian_eig(ComplexMatrix::Zero(2, 3)), Error);
}

TEST_CASE("partial_trace: product and singlet") {
  SeededRng rng(5);
  const ComplexMatrix rho = oracle::random_psd(3, rng);
  const ComplexMatrix sigma = oracle::random_psd(2, rng);
  const ComplexMatrix pt = partial_trace(tensor(rho, sigma), 3, 2, Factor::Second);
  CHECK(max_abs(pt - sigma * rho.trace()) < 1e-12);

  const ComplexVector s = singlet();
  const ComplexMatrix reduced = partial_trace(s * s.adjoint(), 2, 2, Factor::First);
  CHECK(max_abs(reduced - identity(2) / 2.0) < 1e-15);
}

TEST_CASE("partial_trace matches the index-summation oracle") {
  SeededRng rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    const ComplexMatrix m = oracle::random_psd(4, rng);
    CHECK(max_abs(partial_trace(m, 2, 2, Factor::First) - oracle::partial_trace(m, 2, 2, true)) < 1e-12);
    CHECK(max_abs(partial_trace(m, 2, 2, Factor::Second) - oracle::partial_trace(m, 2, 2, false)) < 1e-12);
    const ComplexMatrix big = oracle::random_psd(6, rng);
    CHECK(max_abs(partial_trace(big, 3, 2, Factor::First) - oracle::partial_trace(big, 3, 2, true)) < 1e-12);
    CHECK(std::abs(partial_trace(big, 3, 2, Factor::Second).trace() - big.trace()) < 1e-12);
  }
  CHECK_THROWS_AS(partial_trace(identity(4), 3, 2, Factor::First), Error);
}

TEST_CASE("operator_from_singlet: identity and component formula") {
  CHECK(max_abs(operator_from_singlet(singlet(), 2) - identity(2)) < 1e-15);

  ComplexVector psi = ComplexVector::Zero(4);
  psi(1) = 1.0;  // |0>|down>
  const ComplexMatrix w = operator_from_singlet(psi, 2);
  ComplexMatrix want = ComplexMatrix::Zero(2, 2);
  want(0, 0) = std::numbers::sqrt2;
  CHECK(max_abs(w - want) < 1e-15);
  CHECK((tensor(w, identity(2)) * singlet() - psi).norm() < 1e-15);

  CHECK_THROWS_AS(operator_from_singlet(ComplexVector::Zero(5), 2), Error);
}

TEST_CASE("operator_from_singlet round trip on random vectors") {
  SeededRng rng(23);
  for (std::size_t d : {1u, 2u, 3u, 4u, 8u}) {
    for (int trial = 0; trial < 1000; ++trial) {
      const ComplexVector psi = oracle::random_unit_vector(static_cast<Eigen::Index>(2 * d), rng);
      const ComplexMatrix w = operator_from_singlet(psi, d);
      REQUIRE(w.rows() == static_cast<Eigen::Index>(d));
      REQUIRE(w.cols() == 2);
      CHECK((oracle::kron(w, identity(2)) * singlet() - psi).norm() < 1e-12);
    }
  }
}

TEST_CASE("matrix_sqrt_psd") {
  CHECK(max_abs(matrix_sqrt_psd(identity(3)) - identity(3)) < 1e-15);
  CHECK(max_abs(matrix_sqrt_psd(diag2(4.0, 0.25)) - diag2(2.0, 0.5)) < 1e-14);
  SeededRng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix m = oracle::random_psd(4, rng);
    const ComplexMatrix s = matrix_sqrt_psd(m);
    CHECK(max_abs(s * s - m) <= 1e-9 * m.norm());
    CHECK(hermitian_deviation(s) < 1e-12);
    CHECK(hermitian_eig(s).values(0) > -1e-12);
  }
  try {
    matrix_sqrt_psd(diag2(1.0, -0.5));
    FAIL("expected NotPSD");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPSD);
  }
}

TEST_CASE("PureQubit: normalization, Bloch round trip, orthogonal state") {
  const PureQubit q(3.0, cplx{0.0, 4.0});
  CHECK(std::norm(q.alpha()) + std::norm(q.beta()) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(PureQubit(0.0, 0.0), Error);

  CHECK(fidelity(PureQubit::up(), PureQubit::up()) == doctest::Approx(1.0));
  CHECK(fidelity(PureQubit::up(), PureQubit::down()) == doctest::Approx(0.0));
  CHECK(fidelity(PureQubit::up(), PureQubit::from_bloch({1, 0, 0})) == doctest::Approx(0.5));

  SeededRng rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const Bloch n = sample_sphere_direction(rng);
    const Bloch back = PureQubit::from_bloch(n).bloch();
    for (int k = 0; k < 3; ++k) CHECK(std::abs(back[k] - n[k]) < 1e-12);

    const PureQubit phi = sample_haar_qubit(rng);
    CHECK(fidelity(phi, phi.orthogonal()) < 1e-30);
    // global phase does not matter
    const PureQubit rotated(phi.alpha() * std::polar(1.0, 0.7), phi.beta() * std::polar(1.0, 0.7));
    CHECK(fidelity(phi, rotated) == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(PureQubit::from_bloch({0.0, 0.0, 1.1}), Error);
}

TEST_CASE("DensityMatrix validation") {
  CHECK_NOTHROW(DensityMatrix(identity(2) / 2.0));
  CHECK_THROWS_AS(DensityMatrix(identity(2)), Error);  // trace 2
  CHECK_THROWS_AS(DensityMatrix(diag2(1.5, -0.5)), Error);
  ComplexMatrix nh = identity(2) / 2.0;
  nh(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityMatrix{nh}, Error);
  CHECK(DensityMatrix::pure(PureQubit::up()).purity() == doctest::Approx(1.0));
}

TEST_CASE("SeededRng: determinism and stream separation") {
  SeededRng a(42, 0), b(42, 0), c(42, 1);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs = differs || x != c.next_u64();
  }
  CHECK(differs);

  SeededRng r1(42), r2(42);
  const PureQubit p1 = sample_haar_qubit(r1);
  const PureQubit p2 = sample_haar_qubit(r2);
  CHECK(p1.alpha() == p2.alpha());
  CHECK(p1.beta() == p2.beta());
  const Bloch d1 = sample_sphere_direction(r1);
  const Bloch d2 = sample_sphere_direction(r2);
  CHECK(d1 == d2);
}

TEST_CASE("sample_haar_qubit: moments over 100000 draws") {
  SeededRng rng(2024);
  const int n = 100'000;
  Bloch mean{0, 0, 0};
  double up_weight = 0.0;
  for (int i = 0; i < n; ++i) {
    const PureQubit q = sample_haar_qubit(rng);
    const Bloch b = q.bloch();
    for (int k = 0; k < 3; ++k) mean[k] += b[k] / n;
    up_weight += std::norm(q.alpha()) / n;
  }
  CHECK(std::sqrt(mean[0] * mean[0] + mean[1] * mean[1] + mean[2] * mean[2]) < 0.02);
  CHECK(std::abs(up_weight - 0.5) < 0.01);
}

TEST_CASE("sample_sphere_direction: coordinate means over 100000 draws") {
  SeededRng rng(99);
  const int n = 100'000;
  Bloch mean{0, 0, 0};
  for (int i = 0; i < n; ++i) {
    const Bloch b = sample_sphere_direction(rng);
    CHECK(std::abs(b[0] * b[0] + b[1] * b[1] + b[2] * b[2] - 1.0) < 1e-12);
    for (int k = 0; k < 3; ++k) mean[k] += b[k] / n;
  }
  for (int k = 0; k < 3; ++k) CHECK(std::abs(mean[k]) < 0.02);
}

TEST_CASE("sample_haar_unitary is unitary") {
  SeededRng rng(4);
  for (std::size_t d : {2u, 4u, 8u}) {
    const auto u = sample_haar_unitary(d, rng);
    CHECK(max_abs(u.adjoint() * u - identity(d)) < 1e-12);
  }
}

}  // TEST_SUITE
