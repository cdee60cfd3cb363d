#include "qba/hardy/hardy.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include <boost/math/tools/minima.hpp>

namespace qba::hardy {

namespace {

Vector vec2(Complex a, Complex b) {
  Vector v(2);
  v << a, b;
  return v;
}

Vector kron2(const Vector& a, const Vector& b) {
  Vector v(4);
  v << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
  return v;
}

Vector d_vector(const ObservablePair& p) { return vec2(p.alpha, p.beta); }
Vector d_perp_vector(const ObservablePair& p) { return vec2(std::conj(p.beta), -std::conj(p.alpha)); }

// Extends an orthonormal list to a full basis of C^dim by Gram-Schmidt
// against the standard basis vectors, skipping dependent candidates.
std::vector<Vector> complete_basis(std::vector<Vector> columns, Eigen::Index dim) {
  for (Eigen::Index k = 0; k < dim && static_cast<Eigen::Index>(columns.size()) < dim; ++k) {
    Vector e = Vector::Zero(dim);
    e(k) = 1.0;
    std::vector<Vector> candidate = columns;
    candidate.push_back(e);
    try {
      columns = qcore::gram_schmidt(candidate);
    } catch (const qcore::DegenerateInput&) {
    }
  }
  return columns;
}

}  // namespace

std::string_view to_string(Setting s) { return s == Setting::U ? "U" : "D"; }
std::string_view to_string(Outcome o) { return o == Outcome::Plus ? "+" : "-"; }

ObservablePair ObservablePair::from_real_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidObservable("alpha must lie in (0, 1)");
  }
  ObservablePair p{alpha, std::sqrt(1.0 - alpha * alpha)};
  p.validate();
  return p;
}

void ObservablePair::validate() const {
  const double a2 = std::norm(alpha);
  const double b2 = std::norm(beta);
  if (std::abs(a2 + b2 - 1.0) > qcore::kTolerance) {
    throw InvalidObservable("|alpha|^2 + |beta|^2 must equal 1");
  }
  const double a = std::abs(alpha);
  if (!(a > kAlphaMargin && a < 1.0 - kAlphaMargin)) {
    throw InvalidObservable("|alpha| must lie strictly inside (0, 1)");
  }
}

LocalBasis ObservablePair::d_basis() const {
  return LocalBasis::make(d_vector(*this), d_perp_vector(*this));
}

double q_value(const ObservablePair& pair1, const ObservablePair& pair2) {
  const double a = std::norm(pair1.alpha * pair2.alpha);
  const double b = std::norm(pair1.beta * pair2.beta);
  return a * b / (1.0 - a);
}

QMax q_max_search() {
  auto negative_q = [](double a) {
    const double a2 = a * a;
    return -(a2 * a2 * (1.0 - a2) * (1.0 - a2)) / (1.0 - a2 * a2);
  };
  const int bits = std::numeric_limits<double>::digits / 2 + 4;
  const auto [arg, value] =
      boost::math::tools::brent_find_minima(negative_q, kAlphaMargin, 1.0 - kAlphaMargin, bits);
  return QMax{arg, -value};
}

SymmetricCoefficients closed_form_coefficients(const ObservablePair& pair) {
  pair.validate();
  const Complex a = pair.alpha;
  const Complex b = pair.beta;
  const double a2 = std::norm(a);
  const double ab2 = std::norm(a * b);
  const double s = std::sqrt(1.0 - a2 * a2);
  return SymmetricCoefficients{
      ab2 / s,
      -std::conj(a) * b * a2 / s,
      -std::conj(a) * std::conj(a) * b * b * s / ab2,
  };
}

bool HardyModel::symmetric() const {
  return std::abs(pair1.alpha - pair2.alpha) < 1e-15 && std::abs(pair1.beta - pair2.beta) < 1e-15;
}

LinearOperator conversion_unitary(const HardyModel& model) {
  // Columns 0 and 1 are the images of |u u> and |u u_perp> on
  // (ancilla, distributor qubit); the ancilla-|u> block reproduces psi_h.
  const Complex p00 = model.x00, p01 = model.x01, p10 = model.x10, p11 = model.x11;
  Vector col0(4), col1(4);
  col0 << p00, p10, std::conj(p01), std::conj(p11);
  col1 << p01, p11, -std::conj(p00), -std::conj(p10);

  const auto columns = complete_basis({col0, col1}, 4);
  qcore::Matrix u(4, 4);
  for (Eigen::Index c = 0; c < 4; ++c) {
    u.col(c) = columns[static_cast<std::size_t>(c)];
  }
  // Gram-Schmidt reproduces the first two columns up to rounding; keep the
  // printed ones exactly.
  u.col(0) = col0;
  u.col(1) = col1;
  return LinearOperator::unitary(std::move(u));
}

LinearOperator swap_projector(const HardyModel& model) {
  return LinearOperator::projector_onto(model.psi_h.amplitudes().conjugate());
}

CheatProjector cheat_projector(const HardyModel& model) {
  qcore::Matrix relabel(2, 2);
  relabel.col(0) = d_vector(model.pair2);
  relabel.col(1) = d_perp_vector(model.pair2);
  const std::array<std::size_t, 1> second{1};
  PureState chi =
      PureState::normalized(qcore::apply_matrix(relabel, second, model.psi_h.amplitudes()));
  auto projector = LinearOperator::projector_onto(chi.amplitudes().conjugate());
  return CheatProjector{std::move(projector), std::move(chi)};
}

HardyModel build_model(const ObservablePair& pair1, const ObservablePair& pair2) {
  pair1.validate();
  pair2.validate();

  const Vector u = vec2(1.0, 0.0);
  std::array<Vector, 4> phi{
      kron2(d_perp_vector(pair1), d_perp_vector(pair2)),
      kron2(u, d_vector(pair2)),
      kron2(d_vector(pair1), u),
      kron2(u, u),
  };
  auto orthonormal = qcore::gram_schmidt(phi);
  Vector psi = orthonormal[3];
  const Complex lead = psi(0);
  psi *= std::conj(lead) / std::abs(lead);

  const Complex x00 = psi(0), x01 = psi(1), x10 = psi(2), x11 = psi(3);
  Vector prime(4);
  prime << std::conj(x01), -std::conj(x00), std::conj(x11), -std::conj(x10);

  HardyModel model{
      pair1,
      pair2,
      std::move(phi),
      PureState(psi),
      x00,
      x01,
      x10,
      x11,
      std::norm(x00),
      LinearOperator::identity(2),
      PureState(prime),
      LinearOperator::identity(2),
      LinearOperator::identity(2),
      PureState::basis_state(2, 0),
  };
  model.conversion_u = conversion_unitary(model);
  model.swap_m = swap_projector(model);
  auto cheat = cheat_projector(model);
  model.cheat_m = std::move(cheat.projector);
  model.chi = std::move(cheat.chi);
  return model;
}

HardyModel build_symmetric_model(double alpha) {
  const auto pair = ObservablePair::from_real_alpha(alpha);
  return build_model(pair, pair);
}

std::size_t ProbabilityTable::index(Setting s1, Setting s2, Outcome o1, Outcome o2) {
  return static_cast<std::size_t>(s1) * 8 + static_cast<std::size_t>(s2) * 4 +
         (o1 == Outcome::Plus ? 0 : 2) + (o2 == Outcome::Plus ? 0 : 1);
}

ProbabilityTable probability_table(const PureState& state, const ObservablePair& pair1,
                                   const ObservablePair& pair2) {
  if (state.subsystems() != 2) {
    throw qcore::DimensionError("probability_table needs a two-qubit state");
  }
  ProbabilityTable table;
  for (Setting s1 : {Setting::U, Setting::D}) {
    for (Setting s2 : {Setting::U, Setting::D}) {
      const auto b1 = pair1.basis(s1);
      const auto b2 = pair2.basis(s2);
      for (Outcome o1 : {Outcome::Plus, Outcome::Minus}) {
        for (Outcome o2 : {Outcome::Plus, Outcome::Minus}) {
          const Vector e = kron2(b1.eigenvector(sign_of(o1)), b2.eigenvector(sign_of(o2)));
          table.at(s1, s2, o1, o2) = std::norm(e.dot(state.amplitudes()));
        }
      }
    }
  }
  return table;
}

void write_csv(std::ostream& out, const ProbabilityTable& table) {
  const auto old_precision = out.precision(17);
  out << "setting1,setting2,outcome1,outcome2,probability\n";
  for (Setting s1 : {Setting::U, Setting::D}) {
    for (Setting s2 : {Setting::U, Setting::D}) {
      for (Outcome o1 : {Outcome::Plus, Outcome::Minus}) {
        for (Outcome o2 : {Outcome::Plus, Outcome::Minus}) {
          out << to_string(s1) << ',' << to_string(s2) << ',' << sign_of(o1) << ','
              << sign_of(o2) << ',' << table.at(s1, s2, o1, o2) << '\n';
        }
      }
    }
  }
  out.precision(old_precision);
}

HardyCheck check_hardy_conditions(const ProbabilityTable& table, double tol) {
  HardyCheck c{};
  c.dd_minus_minus = table.at(Setting::D, Setting::D, Outcome::Minus, Outcome::Minus);
  c.du_plus_plus = table.at(Setting::D, Setting::U, Outcome::Plus, Outcome::Plus);
  c.ud_plus_plus = table.at(Setting::U, Setting::D, Outcome::Plus, Outcome::Plus);
  c.uu_plus_plus = table.at(Setting::U, Setting::U, Outcome::Plus, Outcome::Plus);
  c.pass = c.dd_minus_minus <= tol && c.du_plus_plus <= tol && c.ud_plus_plus <= tol &&
           c.uu_plus_plus > tol;
  return c;
}

}  // namespace qba::hardy
