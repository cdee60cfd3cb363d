#include "qba/qcore/state.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "test_support.hpp"

namespace qba::qcore {
namespace {

PureState ket_u() { return PureState::basis_state(1, 0); }
PureState ket_u_perp() { return PureState::basis_state(1, 1); }

PureState phi_plus() {
  Vector v(4);
  v << 1.0, 0.0, 0.0, 1.0;
  return PureState::normalized(v);
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

TEST(QcoreTensor, BasisProductUsesSlowestVaryingFirstSubsystem) {
  const auto uu = tensor(ket_u(), ket_u());
  ASSERT_EQ(uu.dimension(), 4u);
  EXPECT_EQ(uu[0], Complex(1.0));
  EXPECT_EQ(uu[1], Complex(0.0));
  EXPECT_EQ(uu[2], Complex(0.0));
  EXPECT_EQ(uu[3], Complex(0.0));

  // |u> (x) |u_perp> is index 1; |u_perp> (x) |u> is index 2.
  EXPECT_NEAR(fidelity(tensor(ket_u(), ket_u_perp()), PureState::basis_state(2, 1)), 1.0, 1e-15);
  EXPECT_NEAR(fidelity(tensor(ket_u_perp(), ket_u()), PureState::basis_state(2, 2)), 1.0, 1e-15);

  // Flipping subsystem 0 moves the most significant bit.
  const auto flipped = apply(LinearOperator::unitary(pauli_x()), {0}, uu);
  EXPECT_NEAR(std::abs(flipped[2]), 1.0, 1e-15);
}

TEST(QcoreTensor, BellPairProductHasFourEqualEntries) {
  const auto s = tensor(phi_plus(), phi_plus());
  ASSERT_EQ(s.dimension(), 16u);
  int halves = 0;
  for (std::size_t i = 0; i < 16; ++i) {
    const double a = std::abs(s[i]);
    if (std::abs(a - 0.5) < 1e-15) {
      ++halves;
    } else {
      EXPECT_EQ(a, 0.0);
    }
  }
  EXPECT_EQ(halves, 4);
  EXPECT_NEAR(s.norm(), 1.0, 1e-12);
}

TEST(QcoreTensor, OverflowRejected) {
  std::mt19937_64 gen(1);
  const auto a = testing::random_state(gen, 3);
  const auto b = testing::random_state(gen, 3);
  EXPECT_THROW(tensor(a, b), DimensionError);
}

TEST(QcoreTensor, NormIsMultiplicative) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = testing::random_state(gen, 1 + trial % 3);
    const auto b = testing::random_state(gen, 1 + trial % 2);
    EXPECT_NEAR(tensor(a, b).norm(), 1.0, 1e-12);
  }
}

TEST(QcoreApply, IdentityLeavesStateUnchanged) {
  std::mt19937_64 gen(2);
  const auto s = testing::random_state(gen, 4);
  const auto out = apply(LinearOperator::identity(2), {3, 1}, s);
  EXPECT_LE((out.amplitudes() - s.amplitudes()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(QcoreApply, ReversedTargetsEqualSwapConjugation) {
  std::mt19937_64 gen(3);
  Matrix swap = Matrix::Zero(4, 4);
  swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = testing::random_state(gen, 3);
    const Matrix u = testing::random_unitary(gen, 4);
    const auto direct = apply(LinearOperator::unitary(u), {2, 1}, s);
    const auto conjugated = apply(LinearOperator::unitary(swap * u * swap), {1, 2}, s);
    EXPECT_LE((direct.amplitudes() - conjugated.amplitudes()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(QcoreApply, ArityMismatchAndBadTargetsRejected) {
  const auto s = tensor(phi_plus(), ket_u());
  EXPECT_THROW(apply(LinearOperator::identity(2), {0}, s), DimensionError);
  EXPECT_THROW(apply(LinearOperator::identity(2), {0, 0}, s), DimensionError);
  EXPECT_THROW(apply(LinearOperator::identity(1), {3}, s), DimensionError);
}

TEST(QcoreApply, ProjectorsMustGoThroughCollapse) {
  Vector u(2);
  u << 1.0, 0.0;
  EXPECT_THROW(apply(LinearOperator::projector_onto(u), {0}, ket_u()), OperatorError);
}

TEST(QcoreApply, NormPreservedForRandomUnitaries) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 4;
    const auto s = testing::random_state(gen, n);
    const std::size_t a = trial % n;
    const std::size_t b = (a + 1 + trial % (n - 1)) % n;
    const auto out = apply(LinearOperator::unitary(testing::random_unitary(gen, 4)), {a, b}, s);
    EXPECT_NEAR(out.norm(), 1.0, 1e-12);
  }
}

TEST(QcoreOperator, KindValidation) {
  Matrix not_unitary(2, 2);
  not_unitary << 1.0, 1.0, 0.0, 1.0;
  EXPECT_THROW(LinearOperator::unitary(not_unitary), OperatorError);
  EXPECT_THROW(LinearOperator::projector(not_unitary), OperatorError);
  Matrix bad_dim = Matrix::Identity(3, 3);
  EXPECT_THROW(LinearOperator::general(bad_dim), DimensionError);
}

TEST(QcoreCollapse, OrthogonalProjectionIsImpossibleBranch) {
  Vector u(2);
  u << 1.0, 0.0;
  EXPECT_THROW(collapse(LinearOperator::projector_onto(u), {0}, ket_u_perp()), ImpossibleBranch);
}

TEST(QcoreCollapse, ComplementaryBranchesSumToOne) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = testing::random_state(gen, 4);
    const auto p = LinearOperator::projector_onto(testing::random_vector(gen, 4));
    const std::array<std::size_t, 2> targets{static_cast<std::size_t>(trial % 4),
                                             static_cast<std::size_t>((trial + 2) % 4)};
    const double total = branch_probability(p, targets, s) +
                         branch_probability(p.complement(), targets, s);
    EXPECT_NEAR(total, 1.0, 1e-12);
    const auto branch = collapse(p, targets, s);
    EXPECT_NEAR(branch.state.norm(), 1.0, 1e-12);
  }
}

TEST(QcoreMeasure, EigenstateGivesPlusWithCertainty) {
  Rng rng(9);
  const auto basis = LocalBasis::computational();
  for (int i = 0; i < 100; ++i) {
    const auto m = measure_local(ket_u(), 0, basis, rng);
    EXPECT_EQ(m.outcome, +1);
    EXPECT_EQ(m.probability, 1.0);
  }
}

TEST(QcoreMeasure, OutOfRangeSubsystemRejected) {
  Rng rng(9);
  EXPECT_THROW(measure_local(phi_plus(), 2, LocalBasis::computational(), rng), DimensionError);
}

TEST(QcoreMeasure, SameSeedSameSequence) {
  std::mt19937_64 gen(6);
  const auto s = testing::random_state(gen, 3);
  const auto basis = LocalBasis::computational();
  Rng a(1234), b(1234);
  for (int i = 0; i < 200; ++i) {
    const auto ma = measure_local(s, static_cast<std::size_t>(i % 3), basis, a);
    const auto mb = measure_local(s, static_cast<std::size_t>(i % 3), basis, b);
    ASSERT_EQ(ma.outcome, mb.outcome);
    ASSERT_EQ(ma.post_state.amplitudes(), mb.post_state.amplitudes());
  }
}

TEST(QcoreMeasure, FrequencyInsideWilsonInterval) {
  std::mt19937_64 gen(7);
  const auto s = testing::random_state(gen, 2);
  Vector plus(2), minus(2);
  plus << std::sqrt(0.3), std::sqrt(0.7);
  minus << std::sqrt(0.7), -std::sqrt(0.3);
  const auto basis = LocalBasis::make(plus, minus);
  const double p_plus = local_probabilities(s, 1, basis).plus;

  Rng rng(77);
  const int trials = 100000;
  int plus_count = 0;
  for (int i = 0; i < trials; ++i) {
    const auto m = measure_local(s, 1, basis, rng);
    plus_count += m.outcome > 0 ? 1 : 0;
    EXPECT_NEAR(m.post_state.norm(), 1.0, 1e-12);
  }
  EXPECT_TRUE(testing::wilson_contains(plus_count, trials, p_plus))
      << plus_count << " / " << trials << " vs " << p_plus;
}

TEST(QcoreFidelity, BasicValues) {
  std::mt19937_64 gen(8);
  const auto s = testing::random_state(gen, 3);
  EXPECT_NEAR(fidelity(s, s), 1.0, 1e-12);
  EXPECT_EQ(fidelity(ket_u(), ket_u_perp()), 0.0);
  EXPECT_THROW(fidelity(ket_u(), phi_plus()), DimensionError);
}

TEST(QcoreGramSchmidt, OrthonormalInputUnchanged) {
  std::mt19937_64 gen(10);
  const Matrix u = testing::random_unitary(gen, 4);
  std::vector<Vector> cols;
  for (Eigen::Index c = 0; c < 4; ++c) cols.push_back(u.col(c));
  const auto out = gram_schmidt(cols);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_LE((out[i] - cols[i]).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(QcoreGramSchmidt, RandomInputsBecomeOrthonormalAndKeepSpan) {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Vector> in;
    for (int k = 0; k < 3; ++k) in.push_back(testing::random_vector(gen, 8));
    const auto out = gram_schmidt(in);
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (std::size_t j = 0; j < out.size(); ++j) {
        const double expected = i == j ? 1.0 : 0.0;
        EXPECT_NEAR(std::abs(out[i].dot(out[j]) - expected), 0.0, 1e-12);
      }
      // in[i] lies in span(out[0..i]).
      Vector residual = in[i];
      for (std::size_t j = 0; j <= i; ++j) residual -= out[j].dot(in[i]) * out[j];
      EXPECT_LE(residual.norm(), 1e-12 * in[i].norm());
    }
  }
}

TEST(QcoreGramSchmidt, DuplicatedVectorIsDegenerate) {
  std::mt19937_64 gen(13);
  const Vector v = testing::random_vector(gen, 4);
  const std::vector<Vector> in{v, testing::random_vector(gen, 4), v};
  EXPECT_THROW(gram_schmidt(in), DegenerateInput);
}

TEST(QcoreRng, DerivedSeedsAreDistinctAndStable) {
  EXPECT_EQ(derive_seed(7, 0), derive_seed(7, 0));
  EXPECT_NE(derive_seed(7, 0), derive_seed(7, 1));
  EXPECT_NE(derive_seed(7, 0), derive_seed(8, 0));
}

}  // namespace
}  // namespace qba::qcore
