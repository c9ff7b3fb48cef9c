#pragma once

#include <complex>

#include <Eigen/Dense>

#include "qoct/errors.hpp"

namespace qoct {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Largest absolute entry, 0 for an empty matrix.
double max_abs(const Matrix& m);

/// True when max|m - m^dagger| <= 1e-12 * max(1, max|m|).
bool is_hermitian(const Matrix& m);

/// Square complex matrix with validated Hermiticity metadata.
///
/// The flag is never asserted blindly: constructing a Hermitian operator
/// from a matrix that fails the check throws HermiticityError. Nothing is
/// symmetrized behind the caller's back.
class Operator {
 public:
  /// General (not necessarily Hermitian) operator.
  explicit Operator(Matrix entries);

  /// Hermitian operator; throws HermiticityError when the check fails.
  static Operator hermitian(Matrix entries);

  static Operator identity(Eigen::Index dim);
  static Operator zero(Eigen::Index dim);

  Eigen::Index dim() const { return entries_.rows(); }
  const Matrix& matrix() const { return entries_; }
  bool is_hermitian() const { return hermitian_; }

 private:
  Operator(Matrix entries, bool hermitian);

  Matrix entries_;
  bool hermitian_ = false;
};

enum class StateKind { Pure, Density };

/// Pure state vector or density matrix.
class QuantumState {
 public:
  /// Validates | |psi|^2 - 1 | <= 1e-10.
  static QuantumState pure(Vector psi);
  /// Validates Hermiticity, unit trace and positivity (min eigenvalue >= -1e-10).
  static QuantumState density(Matrix rho);

  /// Skip validation; used for states produced by unitary propagation of a
  /// validated initial state.
  static QuantumState pure_unchecked(Vector psi);
  static QuantumState density_unchecked(Matrix rho);

  StateKind kind() const { return kind_; }
  bool is_pure() const { return kind_ == StateKind::Pure; }
  Eigen::Index dim() const;

  /// Throws StateError when called on a density state.
  const Vector& vector() const;
  /// Throws StateError when called on a pure state.
  const Matrix& matrix() const;

  /// |psi><psi| for pure states, the stored matrix otherwise.
  Matrix density_matrix() const;

 private:
  QuantumState(StateKind kind, Vector psi, Matrix rho);

  StateKind kind_;
  Vector psi_;
  Matrix rho_;
};

/// ab - ba.
Operator commutator(const Operator& a, const Operator& b);

/// <psi|A|psi> or Tr{rho A}.
Complex expectation(const QuantumState& state, const Operator& a);

/// exp(scale * h) through the eigendecomposition of a Hermitian h.
Operator expm_hermitian(const Operator& h, Complex scale);

/// Unvalidated kernel of expm_hermitian; reads only the lower triangle of h.
Matrix expm_hermitian(const Matrix& h, Complex scale);

/// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const Matrix& hermitian);

/// Tr{a b} without forming the product.
Complex trace_of_product(const Matrix& a, const Matrix& b);

}  // namespace qoct
