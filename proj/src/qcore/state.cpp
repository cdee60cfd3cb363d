#include "qba/qcore/state.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace qba::qcore {

namespace {

std::size_t subsystems_for(Eigen::Index length) {
  const auto n = static_cast<std::size_t>(length);
  if (n < 2 || !std::has_single_bit(n)) {
    throw DimensionError("state length " + std::to_string(n) + " is not a power of two >= 2");
  }
  const auto k = static_cast<std::size_t>(std::countr_zero(n));
  if (k > kMaxSubsystems) {
    throw DimensionError("more than " + std::to_string(kMaxSubsystems) + " subsystems");
  }
  return k;
}

std::size_t arity_for(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("operator matrix is not square");
  }
  const auto n = static_cast<std::size_t>(m.rows());
  if (n < 2 || !std::has_single_bit(n)) {
    throw DimensionError("operator dimension is not a power of two >= 2");
  }
  return static_cast<std::size_t>(std::countr_zero(n));
}

void check_targets(std::span<const std::size_t> targets, std::size_t arity,
                   std::size_t subsystems) {
  if (targets.size() != arity) {
    throw DimensionError("operator arity " + std::to_string(arity) + " does not match " +
                         std::to_string(targets.size()) + " targets");
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] >= subsystems) {
      throw DimensionError("target subsystem " + std::to_string(targets[i]) + " out of range");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (targets[i] == targets[j]) {
        throw DimensionError("duplicate target subsystem");
      }
    }
  }
}

std::size_t bit_of(std::size_t subsystem, std::size_t subsystems) {
  return std::size_t{1} << (subsystems - 1 - subsystem);
}

}  // namespace

PureState::PureState(Vector amplitudes) : subsystems_(subsystems_for(amplitudes.size())) {
  const double norm2 = amplitudes.squaredNorm();
  if (std::abs(norm2 - 1.0) > 1e-9) {
    throw QcoreError("state is not normalized (squared norm " + std::to_string(norm2) + ")");
  }
  amps_ = amplitudes / std::sqrt(norm2);
}

PureState PureState::normalized(Vector amplitudes) {
  const double norm = amplitudes.norm();
  if (norm < kImpossibleBranchThreshold) {
    throw QcoreError("cannot normalize a zero vector");
  }
  const auto k = subsystems_for(amplitudes.size());
  return PureState(amplitudes / norm, k, Trusted{});
}

PureState PureState::basis_state(std::size_t subsystems, std::size_t index) {
  if (subsystems < 1 || subsystems > kMaxSubsystems) {
    throw DimensionError("subsystem count out of range");
  }
  const std::size_t dim = std::size_t{1} << subsystems;
  if (index >= dim) {
    throw DimensionError("basis index out of range");
  }
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return PureState(std::move(v), subsystems, Trusted{});
}

LinearOperator::LinearOperator(Matrix matrix, OperatorKind kind)
    : matrix_(std::move(matrix)), arity_(arity_for(matrix_)), kind_(kind) {}

LinearOperator LinearOperator::general(Matrix matrix) {
  return LinearOperator(std::move(matrix), OperatorKind::General);
}

LinearOperator LinearOperator::unitary(Matrix matrix) {
  LinearOperator op(std::move(matrix), OperatorKind::Unitary);
  if (!op.is_unitary()) {
    throw OperatorError("matrix is not unitary within tolerance");
  }
  return op;
}

LinearOperator LinearOperator::projector(Matrix matrix) {
  LinearOperator op(std::move(matrix), OperatorKind::Projector);
  if (!op.is_projector()) {
    throw OperatorError("matrix is not an orthogonal projector within tolerance");
  }
  return op;
}

LinearOperator LinearOperator::projector_onto(const Vector& v) {
  const double norm2 = v.squaredNorm();
  if (norm2 < kImpossibleBranchThreshold) {
    throw OperatorError("cannot project onto a zero vector");
  }
  return LinearOperator(v * v.adjoint() / norm2, OperatorKind::Projector);
}

LinearOperator LinearOperator::identity(std::size_t arity) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << arity);
  return LinearOperator(Matrix::Identity(dim, dim), OperatorKind::Unitary);
}

bool LinearOperator::is_unitary(double tol) const {
  const auto dim = matrix_.rows();
  return ((matrix_.adjoint() * matrix_) - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() <= tol;
}

bool LinearOperator::is_projector(double tol) const {
  const bool idempotent = ((matrix_ * matrix_) - matrix_).cwiseAbs().maxCoeff() <= tol;
  const bool hermitian = (matrix_.adjoint() - matrix_).cwiseAbs().maxCoeff() <= tol;
  return idempotent && hermitian;
}

LinearOperator LinearOperator::complement() const {
  if (kind_ != OperatorKind::Projector) {
    throw OperatorError("complement is only defined for projectors");
  }
  const auto dim = matrix_.rows();
  return LinearOperator(Matrix::Identity(dim, dim) - matrix_, OperatorKind::Projector);
}

LocalBasis LocalBasis::make(Vector plus, Vector minus) {
  if (plus.size() != 2 || minus.size() != 2) {
    throw DimensionError("local basis vectors must have length 2");
  }
  const bool ok = std::abs(plus.squaredNorm() - 1.0) <= kTolerance &&
                  std::abs(minus.squaredNorm() - 1.0) <= kTolerance &&
                  std::abs(plus.dot(minus)) <= kTolerance;
  if (!ok) {
    throw QcoreError("local basis is not orthonormal");
  }
  return LocalBasis{std::move(plus), std::move(minus)};
}

LocalBasis LocalBasis::computational() {
  Vector plus(2), minus(2);
  plus << 1.0, 0.0;
  minus << 0.0, 1.0;
  return LocalBasis{plus, minus};
}

PureState tensor(const PureState& a, const PureState& b) {
  const std::size_t n = a.subsystems() + b.subsystems();
  if (n > kMaxSubsystems) {
    throw DimensionError("tensor product exceeds " + std::to_string(kMaxSubsystems) +
                         " subsystems");
  }
  const auto da = a.amplitudes().size();
  const auto db = b.amplitudes().size();
  Vector out(da * db);
  for (Eigen::Index i = 0; i < da; ++i) {
    out.segment(i * db, db) = a.amplitudes()(i) * b.amplitudes();
  }
  return PureState(std::move(out), n, PureState::Trusted{});
}

Vector apply_matrix(const Matrix& matrix, std::span<const std::size_t> targets,
                    const Vector& amplitudes) {
  const std::size_t n = subsystems_for(amplitudes.size());
  check_targets(targets, arity_for(matrix), n);

  const std::size_t k = targets.size();
  const std::size_t dim = static_cast<std::size_t>(amplitudes.size());
  const std::size_t sub = std::size_t{1} << k;

  std::size_t target_mask = 0;
  std::vector<std::size_t> offsets(sub, 0);
  for (std::size_t j = 0; j < sub; ++j) {
    for (std::size_t t = 0; t < k; ++t) {
      if (j & (std::size_t{1} << (k - 1 - t))) {
        offsets[j] |= bit_of(targets[t], n);
      }
    }
  }
  for (auto t : targets) {
    target_mask |= bit_of(t, n);
  }

  Vector out(amplitudes.size());
  Vector gathered(static_cast<Eigen::Index>(sub));
  for (std::size_t base = 0; base < dim; ++base) {
    if (base & target_mask) {
      continue;
    }
    for (std::size_t j = 0; j < sub; ++j) {
      gathered(static_cast<Eigen::Index>(j)) = amplitudes(static_cast<Eigen::Index>(base | offsets[j]));
    }
    const Vector mapped = matrix * gathered;
    for (std::size_t j = 0; j < sub; ++j) {
      out(static_cast<Eigen::Index>(base | offsets[j])) = mapped(static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

PureState apply(const LinearOperator& op, std::span<const std::size_t> targets,
                const PureState& state) {
  if (op.kind() != OperatorKind::Unitary) {
    throw OperatorError("apply requires a unitary operator; use collapse for projectors");
  }
  return PureState::normalized(apply_matrix(op.matrix(), targets, state.amplitudes()));
}

PureState apply(const LinearOperator& op, std::initializer_list<std::size_t> targets,
                const PureState& state) {
  return apply(op, std::span<const std::size_t>(targets.begin(), targets.size()), state);
}

double branch_probability(const LinearOperator& proj, std::span<const std::size_t> targets,
                          const PureState& state) {
  if (proj.kind() != OperatorKind::Projector) {
    throw OperatorError("branch probability requires a projector");
  }
  const Vector projected = apply_matrix(proj.matrix(), targets, state.amplitudes());
  return projected.squaredNorm();
}

double branch_probability(const LinearOperator& proj, std::initializer_list<std::size_t> targets,
                          const PureState& state) {
  return branch_probability(proj, std::span<const std::size_t>(targets.begin(), targets.size()),
                            state);
}

Branch collapse(const LinearOperator& proj, std::span<const std::size_t> targets,
                const PureState& state) {
  if (proj.kind() != OperatorKind::Projector) {
    throw OperatorError("collapse requires a projector");
  }
  const Vector projected = apply_matrix(proj.matrix(), targets, state.amplitudes());
  const double p = projected.squaredNorm();
  if (p < kImpossibleBranchThreshold) {
    throw ImpossibleBranch("projector branch has probability " + std::to_string(p));
  }
  return Branch{PureState::normalized(projected), p};
}

Branch collapse(const LinearOperator& proj, std::initializer_list<std::size_t> targets,
                const PureState& state) {
  return collapse(proj, std::span<const std::size_t>(targets.begin(), targets.size()), state);
}

namespace {

// Amplitude of the subsystem projected onto <e| for the pair of indices
// differing only in the measured bit.
struct PairProjection {
  Vector plus_part;
  Vector minus_part;
  double plus_prob;
  double minus_prob;
};

PairProjection project_pairs(const PureState& state, std::size_t subsystem,
                             const LocalBasis& basis) {
  const std::size_t n = state.subsystems();
  if (subsystem >= n) {
    throw DimensionError("subsystem " + std::to_string(subsystem) + " out of range");
  }
  const std::size_t bit = bit_of(subsystem, n);
  const auto& amps = state.amplitudes();
  const Complex p0 = std::conj(basis.plus(0)), p1 = std::conj(basis.plus(1));
  const Complex m0 = std::conj(basis.minus(0)), m1 = std::conj(basis.minus(1));

  PairProjection out{Vector::Zero(amps.size()), Vector::Zero(amps.size()), 0.0, 0.0};
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    if (i & bit) {
      continue;
    }
    const auto i0 = static_cast<Eigen::Index>(i);
    const auto i1 = static_cast<Eigen::Index>(i | bit);
    const Complex cp = p0 * amps(i0) + p1 * amps(i1);
    const Complex cm = m0 * amps(i0) + m1 * amps(i1);
    out.plus_part(i0) = basis.plus(0) * cp;
    out.plus_part(i1) = basis.plus(1) * cp;
    out.minus_part(i0) = basis.minus(0) * cm;
    out.minus_part(i1) = basis.minus(1) * cm;
    out.plus_prob += std::norm(cp);
    out.minus_prob += std::norm(cm);
  }
  if (out.plus_prob < kImpossibleBranchThreshold) out.plus_prob = 0.0;
  if (out.minus_prob < kImpossibleBranchThreshold) out.minus_prob = 0.0;
  const double total = out.plus_prob + out.minus_prob;
  out.plus_prob /= total;
  out.minus_prob /= total;
  return out;
}

}  // namespace

OutcomeProbabilities local_probabilities(const PureState& state, std::size_t subsystem,
                                         const LocalBasis& basis) {
  const auto proj = project_pairs(state, subsystem, basis);
  return {proj.plus_prob, proj.minus_prob};
}

LocalMeasurement measure_local(const PureState& state, std::size_t subsystem,
                               const LocalBasis& basis, Rng& rng) {
  auto proj = project_pairs(state, subsystem, basis);
  const double draw = rng.uniform();
  if (draw < proj.plus_prob) {
    return {+1, PureState::normalized(std::move(proj.plus_part)), proj.plus_prob};
  }
  return {-1, PureState::normalized(std::move(proj.minus_part)), proj.minus_prob};
}

double fidelity(const PureState& a, const PureState& b) {
  if (a.dimension() != b.dimension()) {
    throw DimensionError("fidelity of states with different dimensions");
  }
  return std::min(1.0, std::norm(a.amplitudes().dot(b.amplitudes())));
}

std::vector<Vector> gram_schmidt(std::span<const Vector> vectors) {
  std::vector<Vector> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) {
    if (!out.empty() && v.size() != out.front().size()) {
      throw DimensionError("gram_schmidt inputs have different lengths");
    }
    const double input_norm = v.norm();
    if (input_norm < kDependenceThreshold) {
      throw DegenerateInput("zero vector in gram_schmidt input");
    }
    Vector residual = v / input_norm;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& e : out) {
        residual -= e.dot(residual) * e;
      }
      if (pass == 0 && residual.norm() < kDependenceThreshold) {
        throw DegenerateInput("linearly dependent gram_schmidt input (pivot norm " +
                              std::to_string(residual.norm()) + ")");
      }
    }
    out.push_back(residual / residual.norm());
  }
  return out;
}

}  // namespace qba::qcore
