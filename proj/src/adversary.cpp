#include "cqss/adversary.hpp"

#include <cmath>
#include <stdexcept>

namespace cqss {

UnitaryOpd attack_unitary(double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  // Basis order |photon ancilla>: 00, 01, 10, 11. A rotation in the middle
  // block: |01> -> c|01> - s|10>, |10> -> c|10> + s|01>.
  Eigen::MatrixXcd m(4, 4);
  m << 1, 0, 0, 0,
       0, c, s, 0,
       0, -s, c, 0,
       0, 0, 0, 1;
  return UnitaryOpd(std::move(m));
}

double detection_rate(double phi) {
  const double s = std::sin(phi);
  return 0.5 * s * s;
}

double x_basis_detection_rate(double phi) { return 0.5 * (1.0 - std::cos(phi)); }

double all_state_detection_rate(double phi) {
  const double s = std::sin(phi);
  return 0.25 * (s * s + 1.0 - std::cos(phi));
}

double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("binary_entropy: p outside [0, 1]");
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

double eve_information(double phi) { return binary_entropy(detection_rate(phi)); }

DensityMatrixd preparation_average() {
  const QubitKet four[] = {QubitKet::plus_z, QubitKet::minus_z, QubitKet::plus_x,
                           QubitKet::minus_x};
  std::vector<std::pair<double, DensityMatrixd>> parts;
  for (QubitKet k : four) parts.emplace_back(0.25, density_from_pure(ket(k)));
  return mix(std::span<const std::pair<double, DensityMatrixd>>(parts));
}

DensityMatrixd coded_average(double p_label0) {
  if (p_label0 < 0.0 || p_label0 > 1.0)
    throw std::invalid_argument("coded_average: probability outside [0, 1]");
  const DensityMatrixd base = preparation_average();
  return mix<double>({{p_label0, base}, {1.0 - p_label0, evolve(coding_op(1), base)}});
}

DensityMatrixd joint_state_after_coding(double phi, double p_label0) {
  if (p_label0 < 0.0 || p_label0 > 1.0)
    throw std::invalid_argument("joint_state_after_coding: probability outside [0, 1]");
  const UnitaryOpd u_e = attack_unitary(phi);
  std::vector<std::pair<double, DensityMatrixd>> parts;
  for (int bit = 0; bit < 2; ++bit) {
    for (int label = 0; label < 2; ++label) {
      PureStated branch = tensor(basis_ket(bit, 2), basis_ket(0, 2));
      branch = apply(u_e, branch, {0, 1});
      branch = apply(coding_op(label), branch, 0);
      const double w = 0.5 * (label == 0 ? p_label0 : 1.0 - p_label0);
      parts.emplace_back(w, density_from_pure(branch));
    }
  }
  return mix(std::span<const std::pair<double, DensityMatrixd>>(parts));
}

DensityMatrixd ancilla_state(double phi, double p_label0) {
  return partial_trace(joint_state_after_coding(phi, p_label0), {1});
}

std::pair<double, double> ancilla_spectrum(double phi) {
  const double s = detection_rate(phi);  // sin^2 / 2
  return {1.0 - s, s};
}

namespace {

// Plug-in mutual information over a 2x2 contingency table, with the
// delta-method standard error of the estimate.
void tally_information(AttackOutcome& out) {
  const double n = static_cast<double>(out.guess_pairs);
  if (n <= 0.0) return;
  double pg[2] = {0, 0}, pl[2] = {0, 0};
  for (int g = 0; g < 2; ++g)
    for (int l = 0; l < 2; ++l) {
      pg[g] += static_cast<double>(out.counts[g][l]) / n;
      pl[l] += static_cast<double>(out.counts[g][l]) / n;
    }
  double mi = 0.0, second = 0.0;
  for (int g = 0; g < 2; ++g)
    for (int l = 0; l < 2; ++l) {
      const double p = static_cast<double>(out.counts[g][l]) / n;
      if (p <= 0.0 || pg[g] <= 0.0 || pl[l] <= 0.0) continue;
      const double term = std::log2(p / (pg[g] * pl[l]));
      mi += p * term;
      second += p * term * term;
    }
  out.mutual_information = mi;
  const double var = std::max(0.0, (second - mi * mi) / n);
  out.mutual_information_se = std::sqrt(var);
}

}  // namespace

std::pair<SessionTranscript, AttackOutcome> simulate_attack(const ProtocolConfig& cfg,
                                                            const AttackConfig& attack) {
  cfg.validate();
  if (cfg.variant != Variant::SinglePhoton)
    throw std::invalid_argument("simulate_attack: single-photon variant only");
  validate_attack(cfg, attack);

  SessionRun run = run_session_full(cfg, attack);
  AttackOutcome out;
  out.phi = attack.phi;
  out.rounds = cfg.rounds;
  out.eve_outcomes = std::move(run.eve_outcomes);
  out.eve_guesses = std::move(run.eve_guesses);

  for (const RoundRecord& rec : run.transcript.rounds) {
    const auto idx = static_cast<std::size_t>(rec.round_id);
    const bool attacked = out.eve_outcomes[idx] >= 0;
    if (attacked) ++out.attacked_rounds;

    if (!rec.returned) {
      // A control stop by an honest agent past the intercepted leg sees the
      // tampered photon; only those checks can catch the attack.
      const auto j = static_cast<int>(rec.agents.size()) - 1;
      if (!attacked || j < attack.intercept_leg || j == attack.adversary_agent) continue;
      const AgentEntry& entry = rec.agents[static_cast<std::size_t>(j)];
      if (entry.control_basis != rec.alice_basis) continue;  // inconclusive
      int expected = rec.alice_bit;
      for (int i = 0; i < j; ++i)
        expected ^= rec.agents[static_cast<std::size_t>(i)].coding_label;
      const bool error = entry.control_outcome != expected;
      if (rec.alice_basis == Axis::Z) {
        ++out.z_conclusive;
        if (error) ++out.z_errors;
      } else {
        ++out.x_conclusive;
        if (error) ++out.x_errors;
      }
      continue;
    }

    // Returned attacked rounds feed the guess-vs-secret tally.
    if (!attacked) continue;
    int secret = 0;
    for (std::size_t i = static_cast<std::size_t>(attack.intercept_leg);
         i < rec.agents.size(); ++i)
      secret ^= rec.agents[i].coding_label;
    const int guess = out.eve_guesses[idx];
    ++out.guess_pairs;
    ++out.counts[static_cast<std::size_t>(guess)][static_cast<std::size_t>(secret)];
  }

  if (out.z_conclusive > 0)
    out.z_error_rate = static_cast<double>(out.z_errors) / static_cast<double>(out.z_conclusive);
  if (out.x_conclusive > 0)
    out.x_error_rate = static_cast<double>(out.x_errors) / static_cast<double>(out.x_conclusive);
  tally_information(out);
  return {std::move(run.transcript), std::move(out)};
}

}  // namespace cqss
