#pragma once

// Hardy-state construction for one choice of local observables U_k, D_k.
//
// Each party's U eigenbasis is the computational basis {|u>, |u_perp>}; the
// D eigenbasis is
//   |d>      = alpha |u> + beta |u_perp>
//   |d_perp> = conj(beta) |u> - conj(alpha) |u_perp>.
// The Hardy state is the unique two-qubit state orthogonal to
// |d1_perp d2_perp>, |u1 d2>, |d1 u2> and is obtained as the last member of
// the Gram-Schmidt basis built from those three vectors followed by |u1 u2>.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qba/qcore/state.hpp"

namespace qba::hardy {

using qcore::Complex;
using qcore::LinearOperator;
using qcore::LocalBasis;
using qcore::PureState;
using qcore::Vector;

enum class Setting : std::uint8_t { U = 0, D = 1 };

constexpr Setting flip(Setting s) { return s == Setting::U ? Setting::D : Setting::U; }
std::string_view to_string(Setting s);

class InvalidObservable : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Margin that keeps |alpha| strictly inside (0, 1).
inline constexpr double kAlphaMargin = 1e-9;

struct ObservablePair {
  Complex alpha;  // <u|d>
  Complex beta;   // <u_perp|d>

  /// Real alpha, beta = sqrt(1 - alpha^2).
  static ObservablePair from_real_alpha(double alpha);

  /// Throws InvalidObservable if |alpha|^2 + |beta|^2 != 1 (1e-12) or
  /// |alpha| is not inside (kAlphaMargin, 1 - kAlphaMargin).
  void validate() const;

  LocalBasis u_basis() const { return LocalBasis::computational(); }
  LocalBasis d_basis() const;
  LocalBasis basis(Setting s) const { return s == Setting::U ? u_basis() : d_basis(); }
};

/// |alpha1 alpha2|^2 |beta1 beta2|^2 / (1 - |alpha1 alpha2|^2).
double q_value(const ObservablePair& pair1, const ObservablePair& pair2);

struct QMax {
  double alpha_opt;  // |alpha| at the maximum, alpha1 = alpha2 real
  double q_max;
};

/// One-dimensional maximization of q over |alpha| in (0, 1) with
/// alpha1 = alpha2 real.
QMax q_max_search();

/// Closed-form U-basis coefficients of the symmetric Hardy state
/// (alpha1 = alpha2 = alpha, beta1 = beta2 = beta).
struct SymmetricCoefficients {
  Complex x00;
  Complex x01;
  Complex x11;
};
SymmetricCoefficients closed_form_coefficients(const ObservablePair& pair);

struct HardyModel {
  ObservablePair pair1;
  ObservablePair pair2;

  /// phi_0 = |d1_perp d2_perp>, phi_1 = |u1 d2>, phi_2 = |d1 u2>, phi_3 = |u1 u2>.
  std::array<Vector, 4> phi;
  PureState psi_h;
  /// psi_h amplitudes in uu, u u_perp, u_perp u, u_perp u_perp order.
  /// In the symmetric case x01 == x10.
  Complex x00, x01, x10, x11;
  double q;

  /// Two-qubit unitary on (ancilla, distributor qubit).
  LinearOperator conversion_u;
  /// Ancilla-|u_perp> branch left on the shared pair after conversion.
  PureState psi_prime;
  /// |psi_h*><psi_h*| (amplitude-wise conjugate).
  LinearOperator swap_m;
  /// |chi*><chi*|.
  LinearOperator cheat_m;
  /// psi_h with party 2's basis relabeled u -> d2, u_perp -> d2_perp.
  PureState chi;

  bool symmetric() const;
  LocalBasis basis(int party, Setting s) const {
    return party == 0 ? pair1.basis(s) : pair2.basis(s);
  }
};

/// Builds every derived object. Throws InvalidObservable for invalid pairs.
/// Phase convention: <u1 u2|psi_h> is real and positive.
HardyModel build_model(const ObservablePair& pair1, const ObservablePair& pair2);
HardyModel build_symmetric_model(double alpha);

LinearOperator conversion_unitary(const HardyModel& model);
LinearOperator swap_projector(const HardyModel& model);

struct CheatProjector {
  LinearOperator projector;
  PureState chi;
};
CheatProjector cheat_projector(const HardyModel& model);

enum class Outcome : std::int8_t { Plus = +1, Minus = -1 };

constexpr Outcome outcome_from_sign(int sign) { return sign > 0 ? Outcome::Plus : Outcome::Minus; }
constexpr int sign_of(Outcome o) { return static_cast<int>(o); }
std::string_view to_string(Outcome o);

/// Joint probabilities P(o1, o2 | s1, s2) for a two-qubit state.
class ProbabilityTable {
 public:
  double at(Setting s1, Setting s2, Outcome o1, Outcome o2) const {
    return entries_[index(s1, s2, o1, o2)];
  }
  double& at(Setting s1, Setting s2, Outcome o1, Outcome o2) {
    return entries_[index(s1, s2, o1, o2)];
  }
  const std::array<double, 16>& entries() const { return entries_; }

  /// Rows ordered by setting1, setting2, outcome1, outcome2 with U before D
  /// and + before -.
  static std::size_t index(Setting s1, Setting s2, Outcome o1, Outcome o2);

 private:
  std::array<double, 16> entries_{};
};

ProbabilityTable probability_table(const PureState& state, const ObservablePair& pair1,
                                   const ObservablePair& pair2);

/// 16-row CSV with header "setting1,setting2,outcome1,outcome2,probability".
void write_csv(std::ostream& out, const ProbabilityTable& table);

struct HardyCheck {
  bool pass;
  double dd_minus_minus;  // P(-,-|D,D), should be 0
  double du_plus_plus;    // P(+,+|D,U), should be 0
  double ud_plus_plus;    // P(+,+|U,D), should be 0
  double uu_plus_plus;    // P(+,+|U,U) = q, should be > tol
};

/// Passes iff the three zero conditions are <= tol and P(+,+|U,U) > tol.
HardyCheck check_hardy_conditions(const ProbabilityTable& table, double tol = qcore::kTolerance);

}  // namespace qba::hardy
