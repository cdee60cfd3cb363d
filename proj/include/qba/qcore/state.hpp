#pragma once

// Dense pure-state engine for registers of at most five two-level
// subsystems.
//
// Amplitude layout: subsystem 0 is the slowest-varying index of the
// Kronecker product, i.e. it owns the most significant bit of the basis
// index. Basis vector 0 of each subsystem is |u>, basis vector 1 is |u_perp>.
// For two subsystems the amplitude order is uu, u u_perp, u_perp u,
// u_perp u_perp.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "qba/qcore/rng.hpp"

namespace qba::qcore {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

inline constexpr std::size_t kMaxSubsystems = 5;
inline constexpr double kTolerance = 1e-12;
inline constexpr double kImpossibleBranchThreshold = 1e-14;
inline constexpr double kDependenceThreshold = 1e-10;

class QcoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public QcoreError {
 public:
  using QcoreError::QcoreError;
};

/// Raised by collapse when the requested branch has probability below
/// kImpossibleBranchThreshold.
class ImpossibleBranch : public QcoreError {
 public:
  using QcoreError::QcoreError;
};

class DegenerateInput : public QcoreError {
 public:
  using QcoreError::QcoreError;
};

class OperatorError : public QcoreError {
 public:
  using QcoreError::QcoreError;
};

class PureState {
 public:
  /// Takes amplitudes whose squared norm is within 1e-9 of one and
  /// renormalizes them exactly. Length must be 2^n with 1 <= n <= 5.
  explicit PureState(Vector amplitudes);

  /// Normalizes any nonzero vector of valid length.
  static PureState normalized(Vector amplitudes);
  static PureState basis_state(std::size_t subsystems, std::size_t index);

  std::size_t subsystems() const { return subsystems_; }
  std::size_t dimension() const { return static_cast<std::size_t>(amps_.size()); }
  const Vector& amplitudes() const { return amps_; }
  Complex operator[](std::size_t index) const { return amps_(static_cast<Eigen::Index>(index)); }
  double norm() const { return amps_.norm(); }

 private:
  struct Trusted {};
  PureState(Vector amplitudes, std::size_t subsystems, Trusted)
      : amps_(std::move(amplitudes)), subsystems_(subsystems) {}

  friend PureState tensor(const PureState&, const PureState&);

  Vector amps_;
  std::size_t subsystems_ = 0;
};

enum class OperatorKind { General, Unitary, Projector };

class LinearOperator {
 public:
  static LinearOperator general(Matrix matrix);
  /// Throws OperatorError unless U^dagger U = I within 1e-12.
  static LinearOperator unitary(Matrix matrix);
  /// Throws OperatorError unless P^2 = P and P^dagger = P within 1e-12.
  static LinearOperator projector(Matrix matrix);
  /// |v><v| / <v|v>.
  static LinearOperator projector_onto(const Vector& v);
  static LinearOperator identity(std::size_t arity);

  std::size_t arity() const { return arity_; }
  std::size_t dimension() const { return static_cast<std::size_t>(matrix_.rows()); }
  OperatorKind kind() const { return kind_; }
  const Matrix& matrix() const { return matrix_; }

  /// Numerical checks, independent of the kind flag.
  bool is_unitary(double tol = kTolerance) const;
  bool is_projector(double tol = kTolerance) const;

  /// I - P for a projector P.
  LinearOperator complement() const;

 private:
  LinearOperator(Matrix matrix, OperatorKind kind);

  Matrix matrix_;
  std::size_t arity_ = 0;
  OperatorKind kind_ = OperatorKind::General;
};

/// Eigenbasis of a two-outcome observable: plus has eigenvalue +1,
/// minus has eigenvalue -1.
struct LocalBasis {
  Vector plus;
  Vector minus;

  /// Validates that plus and minus are an orthonormal pair of 2-vectors.
  static LocalBasis make(Vector plus, Vector minus);
  static LocalBasis computational();

  const Vector& eigenvector(int outcome) const { return outcome > 0 ? plus : minus; }
};

PureState tensor(const PureState& a, const PureState& b);

/// Applies a unitary on the listed subsystems (targets[0] is the operator's
/// most significant qubit), identity elsewhere. Non-unitary operators are
/// rejected; use collapse for projectors.
PureState apply(const LinearOperator& op, std::span<const std::size_t> targets,
                const PureState& state);
PureState apply(const LinearOperator& op, std::initializer_list<std::size_t> targets,
                const PureState& state);

struct Branch {
  PureState state;
  double probability;
};

/// <s|P|s> on the listed subsystems.
double branch_probability(const LinearOperator& proj, std::span<const std::size_t> targets,
                          const PureState& state);
double branch_probability(const LinearOperator& proj, std::initializer_list<std::size_t> targets,
                          const PureState& state);

/// Projects onto P and renormalizes. Throws ImpossibleBranch when the
/// branch probability is below kImpossibleBranchThreshold.
Branch collapse(const LinearOperator& proj, std::span<const std::size_t> targets,
                const PureState& state);
Branch collapse(const LinearOperator& proj, std::initializer_list<std::size_t> targets,
                const PureState& state);

struct LocalMeasurement {
  int outcome;  // +1 or -1
  PureState post_state;
  double probability;
};

/// Born-rule sample of one subsystem in the given basis. Consumes exactly
/// one uniform draw from rng.
LocalMeasurement measure_local(const PureState& state, std::size_t subsystem,
                               const LocalBasis& basis, Rng& rng);

/// Probability of each outcome of a local measurement, without sampling.
/// Values below kImpossibleBranchThreshold are reported as exactly zero.
struct OutcomeProbabilities {
  double plus;
  double minus;
};
OutcomeProbabilities local_probabilities(const PureState& state, std::size_t subsystem,
                                         const LocalBasis& basis);

/// |<a|b>|^2.
double fidelity(const PureState& a, const PureState& b);

/// Classical Gram-Schmidt with one re-orthogonalization pass. Order is
/// preserved; each output vector spans the same flag of subspaces as the
/// inputs. A residual whose norm relative to its input falls below
/// kDependenceThreshold raises DegenerateInput.
std::vector<Vector> gram_schmidt(std::span<const Vector> vectors);

/// Applies an arbitrary 2^k x 2^k matrix to raw amplitudes on the listed
/// subsystems. No normalization.
Vector apply_matrix(const Matrix& matrix, std::span<const std::size_t> targets,
                    const Vector& amplitudes);

}  // namespace qba::qcore
