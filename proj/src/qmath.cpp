#include "zkq/qmath.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace zkq {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::NotUnitVector: return "NotUnitVector";
    case ErrorCode::NotSubNormalized: return "NotSubNormalized";
    case ErrorCode::AllBranchesNull: return "AllBranchesNull";
    case ErrorCode::InvalidInstrument: return "InvalidInstrument";
    case ErrorCode::InvalidMessage: return "InvalidMessage";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::NotClassical: return "NotClassical";
    case ErrorCode::EmptyComplement: return "EmptyComplement";
    case ErrorCode::GenerationFailed: return "GenerationFailed";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// SeededRng

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x7a6b71u};
  engine_.seed(seq);
}

double SeededRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

std::size_t SeededRng::discrete(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += std::max(w, 0.0);
  if (weights.empty() || total <= 0.0) {
    throw Error(ErrorCode::Internal, "discrete draw with no positive weight");
  }
  const double target = uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (target < acc) return i;
  }
  return last_positive;
}

// ---------------------------------------------------------------------------
// States

PureQubit::PureQubit(cplx alpha, cplx beta) {
  const double norm = std::sqrt(std::norm(alpha) + std::norm(beta));
  if (!(norm > 1e-300) || !std::isfinite(norm)) {
    throw Error(ErrorCode::NotUnitVector, "qubit amplitudes have zero norm");
  }
  amp_ = {alpha / norm, beta / norm};
}

PureQubit PureQubit::from_bloch(const Bloch& n) {
  const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
  if (std::abs(len - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "Bloch vector has norm " << len;
    throw Error(ErrorCode::NotUnitVector, os.str());
  }
  return along(n);
}

PureQubit PureQubit::along(const Bloch& v) {
  const double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (!(len > 0.0)) throw Error(ErrorCode::NotUnitVector, "zero Bloch vector");
  const double z = std::clamp(v[2] / len, -1.0, 1.0);
  const double theta = std::acos(z);
  const double azimuth = std::atan2(v[1], v[0]);
  return {std::cos(theta / 2.0), std::polar(std::sin(theta / 2.0), azimuth)};
}

ComplexVector PureQubit::vector() const {
  ComplexVector v(2);
  v << amp_[0], amp_[1];
  return v;
}

ComplexMatrix PureQubit::projector() const {
  const ComplexVector v = vector();
  return v * v.adjoint();
}

Bloch PureQubit::bloch() const {
  const cplx c = std::conj(amp_[0]) * amp_[1];
  return {2.0 * c.real(), 2.0 * c.imag(), std::norm(amp_[0]) - std::norm(amp_[1])};
}

PureQubit PureQubit::orthogonal() const {
  // sigma_y applied to the complex conjugate
  const cplx i{0.0, 1.0};
  return {-i * std::conj(amp_[1]), i * std::conj(amp_[0])};
}

double fidelity(const PureQubit& a, const PureQubit& b) {
  const cplx overlap = std::conj(a.alpha()) * b.alpha() + std::conj(a.beta()) * b.beta();
  return std::clamp(std::norm(overlap), 0.0, 1.0);
}

double fidelity(const PureQubit& phi, const ComplexMatrix& rho) {
  if (rho.rows() != 2 || rho.cols() != 2) {
    throw Error(ErrorCode::DimensionMismatch, "fidelity needs a 2x2 density matrix");
  }
  const ComplexVector v = phi.vector();
  return std::clamp((v.adjoint() * rho * v)(0, 0).real(), 0.0, 1.0);
}

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) {
    throw Error(ErrorCode::NotSquare, "density matrix must be square and nonempty");
  }
  const double dev = hermitian_deviation(m_);
  if (dev > kHermitianTol) {
    throw Error(ErrorCode::NotHermitian, "density matrix deviates from Hermitian by " + std::to_string(dev));
  }
  m_ = (m_ + m_.adjoint()) / 2.0;
  const double tr = m_.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw Error(ErrorCode::InvalidState, "density matrix trace is " + std::to_string(tr));
  }
  const auto eig = hermitian_eig(m_);
  if (eig.values(0) < -kPsdTol) {
    throw Error(ErrorCode::NotPSD, "density matrix has eigenvalue " + std::to_string(eig.values(0)));
  }
}

DensityMatrix DensityMatrix::pure(const ComplexVector& v) {
  const double n = v.norm();
  if (!(n > 0.0)) throw Error(ErrorCode::NotUnitVector, "zero state vector");
  const ComplexVector u = v / n;
  return DensityMatrix(u * u.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  return DensityMatrix(identity(dim) / static_cast<double>(dim));
}

double DensityMatrix::purity() const {
  return (m_ * m_).trace().real();
}

// ---------------------------------------------------------------------------
// Linear algebra

ComplexMatrix identity(std::size_t dim) {
  return ComplexMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

ComplexMatrix dagger(const ComplexMatrix& m) {
  return m.adjoint();
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexVector tensor(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

double hermitian_deviation(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::NotSquare, "matrix is not square");
  return max_abs(m - m.adjoint());
}

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

EigenDecomposition hermitian_eig(const ComplexMatrix& m, double tol) {
  const double dev = hermitian_deviation(m);
  if (dev > tol) {
    std::ostringstream os;
    os << "deviation " << dev << " exceeds tolerance " << tol;
    throw Error(ErrorCode::NotHermitian, os.str());
  }
  const ComplexMatrix sym = (m + m.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::Internal, "eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix partial_trace(const ComplexMatrix& m, std::size_t dim_first, std::size_t dim_second,
                            Factor keep) {
  const auto d1 = static_cast<Eigen::Index>(dim_first);
  const auto d2 = static_cast<Eigen::Index>(dim_second);
  if (m.rows() != m.cols() || m.rows() != d1 * d2) {
    std::ostringstream os;
    os << "partial trace of " << m.rows() << "x" << m.cols() << " over " << dim_first << "x"
       << dim_second;
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
  if (keep == Factor::First) {
    ComplexMatrix out = ComplexMatrix::Zero(d1, d1);
    for (Eigen::Index a = 0; a < d1; ++a)
      for (Eigen::Index b = 0; b < d1; ++b)
        out(a, b) = m.block(a * d2, b * d2, d2, d2).trace();
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(d2, d2);
  for (Eigen::Index a = 0; a < d1; ++a) out += m.block(a * d2, a * d2, d2, d2);
  return out;
}

ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& m, double tol) {
  const auto eig = hermitian_eig(m, tol);
  if (eig.values.size() > 0 && eig.values(0) < -tol) {
    throw Error(ErrorCode::NotPSD, "smallest eigenvalue " + std::to_string(eig.values(0)));
  }
  const Eigen::VectorXd roots = eig.values.cwiseMax(0.0).cwiseSqrt();
  return eig.vectors * roots.cast<cplx>().asDiagonal() * eig.vectors.adjoint();
}

ComplexVector singlet() {
  ComplexVector s = ComplexVector::Zero(4);
  s(1) = 1.0 / std::numbers::sqrt2;
  s(2) = -1.0 / std::numbers::sqrt2;
  return s;
}

ComplexMatrix sigma_x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

ComplexMatrix sigma_y() {
  const cplx i{0.0, 1.0};
  ComplexMatrix m(2, 2);
  m << 0.0, -i, i, 0.0;
  return m;
}

ComplexMatrix sigma_z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

ComplexMatrix operator_from_singlet(const ComplexVector& psi, std::size_t dim_anc) {
  if (psi.size() % 2 != 0 || static_cast<std::size_t>(psi.size()) != 2 * dim_anc) {
    throw Error(ErrorCode::DimensionMismatch,
                "state of length " + std::to_string(psi.size()) + " is not ancilla(" +
                    std::to_string(dim_anc) + ") x qubit");
  }
  const auto d = static_cast<Eigen::Index>(dim_anc);
  ComplexMatrix w(d, 2);
  for (Eigen::Index a = 0; a < d; ++a) {
    w(a, 0) = std::numbers::sqrt2 * psi(2 * a + 1);
    w(a, 1) = -std::numbers::sqrt2 * psi(2 * a);
  }
  return w;
}

ComplexMatrix orthonormalize(const ComplexMatrix& basis, double drop_tol) {
  std::vector<ComplexVector> kept;
  for (Eigen::Index c = 0; c < basis.cols(); ++c) {
    ComplexVector v = basis.col(c);
    const double original = v.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : kept) v -= q * q.dot(v);
    }
    const double n = v.norm();
    if (n > drop_tol * std::max(1.0, original)) kept.push_back(v / n);
  }
  ComplexMatrix out(basis.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = kept[i];
  return out;
}

// ---------------------------------------------------------------------------
// Samplers

PureQubit sample_haar_qubit(SeededRng& rng) {
  for (;;) {
    const cplx a{rng.normal(), rng.normal()};
    const cplx b{rng.normal(), rng.normal()};
    if (std::norm(a) + std::norm(b) > 1e-300) return {a, b};
  }
}

Bloch sample_sphere_direction(SeededRng& rng) {
  for (;;) {
    const double x = rng.normal(), y = rng.normal(), z = rng.normal();
    const double n = std::sqrt(x * x + y * y + z * z);
    if (n > 1e-150) return {x / n, y / n, z / n};
  }
}

ComplexMatrix sample_ginibre(std::size_t rows, std::size_t cols, SeededRng& rng) {
  ComplexMatrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = cplx{rng.normal(), rng.normal()};
  return g;
}

ComplexMatrix sample_haar_unitary(std::size_t dim, SeededRng& rng) {
  const ComplexMatrix g = sample_ginibre(dim, dim, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const cplx d = r(j, j);
    const double ad = std::abs(d);
    if (ad > 0.0) q.col(j) *= d / ad;
  }
  return q;
}

}  // namespace zkq
