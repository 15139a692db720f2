#pragma once

// Dense complex linear algebra, qubit states and seeded randomness.
//
// Tensor ordering convention used everywhere: ancilla first, qubit second.
// In a product space A (x) B the composite index is a * dim(B) + b, i.e. the
// second factor varies fastest.

#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "zkq/error.hpp"

namespace zkq {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Bloch = std::array<double, 3>;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
/// Eigenvalues at or above 1 - kUnitEigenTol belong to the eigenvalue-1 space.
inline constexpr double kUnitEigenTol = 1e-9;

enum class Factor { First, Second };

// ---------------------------------------------------------------------------
// Randomness

/// Reproducible random stream identified by (seed, stream id).
///
/// Variates are derived from the raw 64-bit engine output only, so draw
/// sequences do not depend on the standard library's distribution code.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed = 0, std::uint64_t stream = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform();
  double normal();
  /// Index drawn with probability proportional to weights[i].
  std::size_t discrete(std::span<const double> weights);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// States

class PureQubit {
 public:
  /// Normalizes (alpha, beta); throws NotUnitVector if the pair is (near) zero.
  PureQubit(cplx alpha, cplx beta);

  static PureQubit up() { return {1.0, 0.0}; }
  static PureQubit down() { return {0.0, 1.0}; }
  /// |up_n> for a unit Bloch direction n. Throws NotUnitVector if |n| != 1 within 1e-9.
  static PureQubit from_bloch(const Bloch& n);
  /// Same as from_bloch but normalizes any nonzero vector first.
  static PureQubit along(const Bloch& v);

  cplx alpha() const noexcept { return amp_[0]; }
  cplx beta() const noexcept { return amp_[1]; }
  ComplexVector vector() const;
  ComplexMatrix projector() const;
  Bloch bloch() const;
  /// The orthogonal state sigma_y |phi*>.
  PureQubit orthogonal() const;

 private:
  std::array<cplx, 2> amp_;
};

/// |<a|b>|^2, insensitive to global phase.
double fidelity(const PureQubit& a, const PureQubit& b);
/// <phi|rho|phi>.
double fidelity(const PureQubit& phi, const ComplexMatrix& rho);

class DensityMatrix {
 public:
  /// Validates Hermiticity, positivity and unit trace; throws otherwise.
  explicit DensityMatrix(ComplexMatrix m);

  static DensityMatrix pure(const ComplexVector& v);
  static DensityMatrix pure(const PureQubit& q) { return pure(q.vector()); }
  static DensityMatrix maximally_mixed(std::size_t dim);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  const ComplexMatrix& matrix() const noexcept { return m_; }
  double purity() const;

 private:
  ComplexMatrix m_;
};

// ---------------------------------------------------------------------------
// Linear algebra

struct EigenDecomposition {
  Eigen::VectorXd values;   // ascending
  ComplexMatrix vectors;    // orthonormal columns, vectors.col(j) <-> values(j)
};

ComplexMatrix identity(std::size_t dim);
ComplexMatrix dagger(const ComplexMatrix& m);
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector tensor(const ComplexVector& a, const ComplexVector& b);

/// max |M - M^dagger| entrywise. Throws NotSquare for rectangular input.
double hermitian_deviation(const ComplexMatrix& m);
double max_abs(const ComplexMatrix& m);

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized as
/// (M + M^dagger)/2 when its deviation is within tol; beyond tol it throws
/// NotHermitian.
EigenDecomposition hermitian_eig(const ComplexMatrix& m, double tol = kHermitianTol);

ComplexMatrix partial_trace(const ComplexMatrix& m, std::size_t dim_first,
                            std::size_t dim_second, Factor keep);

/// Principal square root of a Hermitian PSD matrix. Eigenvalues in
/// [-tol, 0) are clamped to zero; anything lower throws NotPSD.
ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& m, double tol = kPsdTol);

/// (|01> - |10>)/sqrt(2).
ComplexVector singlet();
/// Pauli matrices.
ComplexMatrix sigma_x();
ComplexMatrix sigma_y();
ComplexMatrix sigma_z();

/// The unique W (dim_anc x 2) with (W (x) I)|singlet> = psi, where psi lives
/// on H_anc (x) H_qubit with the qubit as fast index.
ComplexMatrix operator_from_singlet(const ComplexVector& psi, std::size_t dim_anc);

/// Columns of `basis` orthonormalized (modified Gram-Schmidt, two passes).
/// Columns that become numerically zero are dropped.
ComplexMatrix orthonormalize(const ComplexMatrix& basis, double drop_tol = 1e-10);

// ---------------------------------------------------------------------------
// Samplers

PureQubit sample_haar_qubit(SeededRng& rng);
Bloch sample_sphere_direction(SeededRng& rng);
/// Complex matrix with i.i.d. standard complex Gaussian entries.
ComplexMatrix sample_ginibre(std::size_t rows, std::size_t cols, SeededRng& rng);
/// Haar-random unitary via QR of a Ginibre matrix with phase correction.
ComplexMatrix sample_haar_unitary(std::size_t dim, SeededRng& rng);

}  // namespace zkq
