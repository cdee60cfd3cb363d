// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "qba/adversary/strategies.hpp"
#include "qba/hardy/hardy.hpp"
#include "qba/harness/trials.hpp"
#include "qba/qcore/rng.hpp"
#include "qba/verify/verify.hpp"

namespace {

using namespace qba;
using engine::Party;
using hardy::ObservablePair;
using hardy::Outcome;
using hardy::Setting;
using qcore::Complex;
using qcore::Vector;

constexpr double kExact = 1e-12;
constexpr double kQMaxTol = 1e-9;
constexpr double kAlphaSqTol = 1e-6;
constexpr double kFastSeconds = 1.0;
constexpr double kHonestSeconds = 60.0;
constexpr double kRate99 = 0.99;
constexpr double kRate95 = 0.95;
constexpr int kN = 256;
constexpr int kTrials = 500;
constexpr int kRandomPairs = 50;
constexpr std::size_t kCalibrationShots = 100000;
constexpr std::uint64_t kSeed = 20240611;

struct Result {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

qcore::PureState phi_plus() {
  Vector v(4);
  v << 1.0, 0.0, 0.0, 1.0;
  return qcore::PureState::normalized(v);
}

// Fidelity of the (1, 3) marginal of a 4-qubit pure state with target.
double outer_fidelity(const qcore::PureState& s, const qcore::PureState& target) {
  const auto& a = s.amplitudes();
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
  for (int i0 = 0; i0 < 2; ++i0)
    for (int i2 = 0; i2 < 2; ++i2)
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
          const int ir = i0 * 8 + (r >> 1) * 4 + i2 * 2 + (r & 1);
          const int ic = i0 * 8 + (c >> 1) * 4 + i2 * 2 + (c & 1);
          rho(r, c) += a(ir) * std::conj(a(ic));
        }
  const Vector& t = target.amplitudes();
  return std::real(t.dot(rho * t));
}

double zero_events_max(const hardy::ProbabilityTable& t) {
  return std::max({t.at(Setting::D, Setting::D, Outcome::Minus, Outcome::Minus),
                   t.at(Setting::D, Setting::U, Outcome::Plus, Outcome::Plus),
                   t.at(Setting::U, Setting::D, Outcome::Plus, Outcome::Plus)});
}

Result hardy_construction() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(kSeed);
  std::uniform_real_distribution<double> mag(0.02, 0.98), phase(0.0, 2.0 * std::numbers::pi);
  auto pair = [&] {
    const double a = mag(gen);
    return ObservablePair{std::polar(a, phase(gen)), std::polar(std::sqrt(1.0 - a * a), phase(gen))};
  };
  double worst_zero = 0.0, worst_q = 0.0;
  for (int i = 0; i < kRandomPairs; ++i) {
    const auto p1 = pair(), p2 = pair();
    const auto model = hardy::build_model(p1, p2);
    const auto table = hardy::probability_table(model.psi_h, p1, p2);
    const double aa = std::norm(p1.alpha * p2.alpha), bb = std::norm(p1.beta * p2.beta);
    const double q = aa * bb / (1.0 - aa);
    worst_zero = std::max(worst_zero, zero_events_max(table));
    worst_q = std::max(worst_q, std::abs(table.at(Setting::U, Setting::U, Outcome::Plus, Outcome::Plus) - q));
  }
  const double dt = seconds_since(t0);
  return {worst_zero <= kExact && worst_q <= kExact && dt < kFastSeconds,
          fmt("max zero-event prob %.2e, max |q - closed form| %.2e, %.3f s", worst_zero, worst_q, dt)};
}

Result q_maximum() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto found = hardy::q_max_search();
  const double dt = seconds_since(t0);
  const double q_ref = (5.0 * std::sqrt(5.0) - 11.0) / 2.0;
  const double a2_ref = (std::sqrt(5.0) - 1.0) / 2.0;
  const double dq = std::abs(found.q_max - q_ref);
  const double da = std::abs(found.alpha_opt * found.alpha_opt - a2_ref);
  return {dq <= kQMaxTol && da <= kAlphaSqTol && dt < kFastSeconds,
          fmt("q_max %.12f (|d| %.1e), |alpha|^2 %.9f (|d| %.1e), %.3f s", found.q_max, dq,
              found.alpha_opt * found.alpha_opt, da, dt)};
}

Result conversion_identity() {
  double worst = 0.0;
  bool unitary = true;
  for (double alpha : {0.3, 1.0 / std::numbers::sqrt2, harness::kOptimalAlpha, 0.9}) {
    const auto m = hardy::build_symmetric_model(alpha);
    unitary = unitary && m.conversion_u.is_unitary(kExact);
    const auto start = qcore::tensor(qcore::PureState::basis_state(1, 0), phi_plus());
    const auto converted = qcore::apply(m.conversion_u, {0, 1}, start);
    Vector u(2), up(2);
    u << 1.0, 0.0;
    up << 0.0, 1.0;
    const auto keep = qcore::collapse(qcore::LinearOperator::projector_onto(u), {0}, converted);
    const auto drop = qcore::collapse(qcore::LinearOperator::projector_onto(up), {0}, converted);
    // Discarded branch written out from the Hardy coefficients.
    Vector printed(4);
    printed << std::conj(m.x01), -std::conj(m.x00), std::conj(m.x11), -std::conj(m.x01);
    const auto printed_state = qcore::PureState::normalized(printed);
    worst = std::max({worst, std::abs(keep.probability - 0.5),
                      std::abs(1.0 - qcore::fidelity(keep.state, qcore::tensor(qcore::PureState::basis_state(1, 0),
                                                                              m.psi_h))),
                      std::abs(1.0 - qcore::fidelity(drop.state, qcore::tensor(qcore::PureState::basis_state(1, 1),
                                                                              printed_state)))});
  }
  return {worst <= kExact && unitary, fmt("max deviation %.2e, unitary %s", worst, unitary ? "yes" : "no")};
}

Result swap_identities() {
  double worst = 0.0;
  for (double alpha : {0.3, 1.0 / std::numbers::sqrt2, harness::kOptimalAlpha, 0.9}) {
    const auto m = hardy::build_symmetric_model(alpha);
    const auto start = qcore::tensor(phi_plus(), phi_plus());
    const auto honest = qcore::collapse(m.swap_m, {0, 2}, start);
    const auto cheat = qcore::collapse(m.cheat_m, {0, 2}, start);
    worst = std::max({worst, std::abs(honest.probability - 0.25), std::abs(cheat.probability - 0.25),
                      std::abs(1.0 - outer_fidelity(honest.state, m.psi_h)),
                      std::abs(1.0 - outer_fidelity(cheat.state, m.chi))});
  }
  return {worst <= kExact, fmt("max deviation %.2e", worst)};
}

Result chi_relabeling() {
  double worst = 0.0;
  for (double alpha : {0.3, 1.0 / std::numbers::sqrt2, harness::kOptimalAlpha, 0.9}) {
    const auto m = hardy::build_symmetric_model(alpha);
    const auto psi = hardy::probability_table(m.psi_h, m.pair1, m.pair2);
    const auto chi = hardy::probability_table(m.chi, m.pair1, m.pair2);
    for (Setting s1 : {Setting::U, Setting::D})
      for (Setting s2 : {Setting::U, Setting::D})
        for (Outcome o1 : {Outcome::Plus, Outcome::Minus})
          for (Outcome o2 : {Outcome::Plus, Outcome::Minus})
            worst = std::max(worst, std::abs(chi.at(s1, s2, o1, o2) - psi.at(s1, hardy::flip(s2), o1, o2)));
  }
  const auto half = hardy::build_symmetric_model(1.0 / std::numbers::sqrt2);
  const auto t = hardy::probability_table(half.chi, half.pair1, half.pair2);
  const double dd = t.at(Setting::D, Setting::D, Outcome::Minus, Outcome::Minus);
  const double uu = t.at(Setting::U, Setting::U, Outcome::Plus, Outcome::Plus);
  const bool ok = worst <= kExact && std::abs(dd - 1.0 / 6.0) <= kExact && std::abs(uu) <= kExact;
  return {ok, fmt("max table deviation %.2e, P(-,-|D,D) %.12f, P(+,+|U,U) %.1e", worst, dd, uu)};
}

harness::RunConfig acceptance_config(const std::string& scenario) {
  harness::RunConfig c;
  c.scenario = scenario;
  c.n = kN;
  c.trials = kTrials;
  c.seed = kSeed;
  return c;
}

struct Batch {
  std::vector<harness::TrialRow> rows;
  harness::Aggregates agg;
  double seconds;
};

Batch run_batch(const std::string& scenario) {
  const auto c = acceptance_config(scenario);
  const auto t0 = std::chrono::steady_clock::now();
  auto rows = harness::run_trials_parallel(c);
  const double dt = seconds_since(t0);
  auto agg = harness::aggregate(rows, adversary::make_scenario(scenario).traitors);
  return {std::move(rows), std::move(agg), dt};
}

double share(std::size_t k, std::size_t n) { return n == 0 ? 0.0 : static_cast<double>(k) / static_cast<double>(n); }

Result honest_end_to_end() {
  const auto b = run_batch("honest");
  const bool ok = b.agg.honest_success_rate >= kRate99 && b.agg.false_accusation_rate == 0.0 &&
                  b.seconds < kHonestSeconds;
  return {ok, fmt("success %.4f, false accusations %.4f, readability %.4f, %.1f s", b.agg.honest_success_rate,
                  b.agg.false_accusation_rate, b.agg.readability_rate, b.seconds)};
}

Result basis_flip() {
  const auto b = run_batch("a_basis_flip");
  const auto& bs = b.agg.actors[engine::index_of(Party::B)];
  const double flipped = share(bs.flipped, bs.readable);
  const double named = share(bs.named[engine::index_of(Party::A)], b.agg.trials);
  return {flipped >= kRate95 && named >= kRate99,
          fmt("B flipped %.4f of %zu readable, B names A %.4f", flipped, bs.readable, named)};
}

Result commander_equivocation() {
  const auto mixed = run_batch("c_mixed");
  // Default target is A: its swapped pairs carry B's reading, its direct
  // pairs A's check.
  std::size_t ok_mixed = 0;
  for (const auto& row : mixed.rows) {
    bool all = true;
    for (const auto& a : row.actors) {
      const auto& target_reading = a.actor == Party::A ? a.check_reading : a.message_reading;
      all = all && (!target_reading.readable() || a.verdict.traitor == Party::C);
    }
    ok_mixed += all;
  }
  const double mixed_rate = share(ok_mixed, mixed.rows.size());
  const auto two = run_batch("c_two_faced");
  const double two_rate = two.agg.detection_power.value_or(0.0);
  return {mixed_rate >= kRate99 && two_rate >= kRate99,
          fmt("mixed unreadable-or-C %.4f, two-faced both name C %.4f", mixed_rate, two_rate)};
}

Result links_and_liars() {
  std::string detail;
  bool ok = true;
  for (const char* s : {"a_fake_links", "b_fake_links", "a_liar", "b_liar"}) {
    const auto b = run_batch(s);
    const double d = b.agg.detection_power.value_or(0.0);
    ok = ok && d >= kRate99;
    detail += fmt("%s named %.4f (false accusation %.4f) ", s, d, b.agg.false_accusation_rate);
  }
  detail.pop_back();
  return {ok, detail};
}

Result sampling_calibration() {
  const auto m = hardy::build_symmetric_model(harness::kOptimalAlpha);
  const auto ub = m.pair1.u_basis();
  std::string detail;
  for (int attempt = 0; attempt < 2; ++attempt) {
    qcore::Rng rng(qcore::derive_seed(kSeed, static_cast<std::uint64_t>(attempt)));
    std::size_t hits = 0;
    for (std::size_t i = 0; i < kCalibrationShots; ++i) {
      const auto first = qcore::measure_local(m.psi_h, 0, ub, rng);
      const auto second = qcore::measure_local(first.post_state, 1, m.pair2.u_basis(), rng);
      hits += first.outcome > 0 && second.outcome > 0;
    }
    const auto ci = verify::wilson_interval(hits, kCalibrationShots);
    detail += fmt("attempt %d: %zu/%zu = %.5f, 99%% interval [%.5f, %.5f] vs q %.5f; ", attempt + 1, hits,
                  kCalibrationShots, share(hits, kCalibrationShots), ci.lower, ci.upper, m.q);
    if (ci.contains(m.q)) return {true, detail.substr(0, detail.size() - 2)};
  }
  return {false, detail.substr(0, detail.size() - 2)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
      {"Hardy construction on random pairs", hardy_construction},
      {"q maximum", q_maximum},
      {"conversion identity", conversion_identity},
      {"swap identities", swap_identities},
      {"chi relabeling", chi_relabeling},
      {"honest end-to-end", honest_end_to_end},
      {"basis-flip attack", basis_flip},
      {"commander equivocation", commander_equivocation},
      {"fake links and classical liars", links_and_liars},
      {"sampling calibration", sampling_calibration},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Result r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    failures += !r.pass;
    std::printf("%s %2zu %s: %s\n", r.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), r.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
