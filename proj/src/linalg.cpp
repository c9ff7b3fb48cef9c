#include "qoct/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qoct {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kNormTol = 1e-10;

void require_square(const Matrix& m) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw DimensionError("operator must be a non-empty square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

}  // namespace

double max_abs(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& m) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, max_abs(m));
  return max_abs(m - m.adjoint()) <= kHermitianTol * scale;
}

Operator::Operator(Matrix entries) : Operator(std::move(entries), false) {}

Operator::Operator(Matrix entries, bool hermitian)
    : entries_(std::move(entries)), hermitian_(hermitian) {
  require_square(entries_);
}

Operator Operator::hermitian(Matrix entries) {
  require_square(entries);
  if (!qoct::is_hermitian(entries)) {
    throw HermiticityError("matrix is not Hermitian (max |M - M^dagger| = " +
                           std::to_string(max_abs(entries - entries.adjoint())) + ")");
  }
  return Operator(std::move(entries), true);
}

Operator Operator::identity(Eigen::Index dim) {
  return Operator(Matrix::Identity(dim, dim), true);
}

Operator Operator::zero(Eigen::Index dim) { return Operator(Matrix::Zero(dim, dim), true); }

QuantumState::QuantumState(StateKind kind, Vector psi, Matrix rho)
    : kind_(kind), psi_(std::move(psi)), rho_(std::move(rho)) {}

QuantumState QuantumState::pure(Vector psi) {
  if (psi.size() == 0) throw DimensionError("pure state must have dimension >= 1");
  const double norm2 = psi.squaredNorm();
  if (!std::isfinite(norm2) || std::abs(norm2 - 1.0) > kNormTol) {
    throw StateError("pure state is not normalized (|psi|^2 = " + std::to_string(norm2) + ")");
  }
  return pure_unchecked(std::move(psi));
}

QuantumState QuantumState::density(Matrix rho) {
  require_square(rho);
  if (!is_hermitian(rho)) throw StateError("density matrix is not Hermitian");
  const double trace = rho.trace().real();
  if (std::abs(trace - 1.0) > kNormTol) {
    throw StateError("density matrix trace is " + std::to_string(trace) + ", expected 1");
  }
  const double lowest = min_eigenvalue(rho);
  if (lowest < -kNormTol) {
    throw StateError("density matrix has negative eigenvalue " + std::to_string(lowest));
  }
  return density_unchecked(std::move(rho));
}

QuantumState QuantumState::pure_unchecked(Vector psi) {
  return QuantumState(StateKind::Pure, std::move(psi), Matrix());
}

QuantumState QuantumState::density_unchecked(Matrix rho) {
  return QuantumState(StateKind::Density, Vector(), std::move(rho));
}

Eigen::Index QuantumState::dim() const { return is_pure() ? psi_.size() : rho_.rows(); }

const Vector& QuantumState::vector() const {
  if (!is_pure()) throw StateError("state is a density matrix, not a pure vector");
  return psi_;
}

const Matrix& QuantumState::matrix() const {
  if (is_pure()) throw StateError("state is a pure vector, not a density matrix");
  return rho_;
}

Matrix QuantumState::density_matrix() const {
  if (is_pure()) return psi_ * psi_.adjoint();
  return rho_;
}

Operator commutator(const Operator& a, const Operator& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("commutator of operators with dimensions " + std::to_string(a.dim()) +
                         " and " + std::to_string(b.dim()));
  }
  Matrix ab = a.matrix() * b.matrix();
  Matrix ba = b.matrix() * a.matrix();
  return Operator(ab - ba);
}

Complex expectation(const QuantumState& state, const Operator& a) {
  if (state.dim() != a.dim()) {
    throw DimensionError("state dimension " + std::to_string(state.dim()) +
                         " does not match operator dimension " + std::to_string(a.dim()));
  }
  if (state.is_pure()) return state.vector().dot(a.matrix() * state.vector());
  return trace_of_product(state.matrix(), a.matrix());
}

Operator expm_hermitian(const Operator& h, Complex scale) {
  if (!h.is_hermitian()) {
    throw HermiticityError("expm_hermitian requires an operator flagged Hermitian");
  }
  Matrix u = expm_hermitian(h.matrix(), scale);
  // exp(i*theta*h) with real theta is unitary, exp(real*h) is Hermitian.
  if (scale.real() == 0.0 || scale.imag() != 0.0) return Operator(std::move(u));
  return Operator::hermitian(std::move(u));
}

Matrix expm_hermitian(const Matrix& h, Complex scale) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw HermiticityError("eigendecomposition of Hermitian generator failed");
  }
  const Eigen::VectorXd& lambda = solver.eigenvalues();
  const Matrix& basis = solver.eigenvectors();
  Vector phases(lambda.size());
  for (Eigen::Index k = 0; k < lambda.size(); ++k) phases(k) = std::exp(scale * lambda(k));
  return basis * phases.asDiagonal() * basis.adjoint();
}

double min_eigenvalue(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

Complex trace_of_product(const Matrix& a, const Matrix& b) {
  // Tr{ab} = sum_jk a_jk b_kj
  return a.cwiseProduct(b.transpose()).sum();
}

}  // namespace qoct
