#include "cqss/analysis.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace cqss {

std::vector<CurvePoint> information_curve(int n_points) {
  if (n_points < 2) throw std::invalid_argument("information_curve: need at least 2 points");
  std::vector<CurvePoint> curve;
  curve.reserve(static_cast<std::size_t>(n_points));
  const double phi_max = std::numbers::pi / 2.0;
  for (int k = 0; k < n_points; ++k) {
    const double phi = phi_max * static_cast<double>(k) / static_cast<double>(n_points - 1);
    curve.push_back({phi, detection_rate(phi), eve_information(phi)});
  }
  return curve;
}

namespace {

long count_announcements(std::size_t stop_position, bool handshake) {
  return 2 + static_cast<long>(stop_position) + (handshake ? 1 : 0);
}

EfficiencyReport make_report(const ProtocolConfig& cfg, long rounds, long key_digits,
                             long announcements, double digits_per_round) {
  EfficiencyReport r;
  r.rounds = rounds;
  r.key_digits = key_digits;
  r.epsilon_q = rounds > 0 ? static_cast<double>(key_digits) / static_cast<double>(rounds) : 0.0;
  r.expected_epsilon_q = digits_per_round *
                         std::pow(1.0 - cfg.p_control, static_cast<double>(cfg.num_agents)) *
                         (1.0 - cfg.f_sample2);
  r.announcements = announcements;
  r.announcements_per_round =
      rounds > 0 ? static_cast<double>(announcements) / static_cast<double>(rounds) : 0.0;
  return r;
}

}  // namespace

EfficiencyReport efficiency(const SessionTranscript& t, const KeyMaterial& k) {
  const SampleReport report = check_samples(t);
  long announcements = 0;
  for (std::size_t j = 0; j < report.s1.size(); ++j)
    announcements += static_cast<long>(report.s1[j].positions.size()) *
                     count_announcements(j, false);
  announcements += static_cast<long>(report.s2.positions.size()) * (1 + t.config.num_agents);
  return make_report(t.config, static_cast<long>(t.rounds.size()),
                     static_cast<long>(k.digit_count()), announcements, 1.0);
}

EfficiencyReport efficiency(const EprSessionTranscript& t, const KeyMaterial& k) {
  const SampleReport report = check_epr_samples(t);
  const bool handshake = t.config.variant == Variant::EPR;
  long announcements = 0;
  for (std::size_t j = 0; j < report.s1.size(); ++j)
    announcements += static_cast<long>(report.s1[j].positions.size()) *
                     count_announcements(j, handshake);
  announcements += static_cast<long>(report.s2.positions.size()) * (1 + t.config.num_agents);
  const double digits_per_round = t.config.variant == Variant::Qudit ? 2.0 : 1.0;
  return make_report(t.config, static_cast<long>(t.rounds.size()),
                     static_cast<long>(k.digit_count()), announcements, digits_per_round);
}

TheoryComparisonRow compare_theory(const AttackOutcome& outcome, double declared_phi) {
  if (outcome.phi != declared_phi)
    throw std::invalid_argument("compare_theory: declared phi does not match the outcome");
  TheoryComparisonRow row;
  row.phi = declared_phi;
  row.conclusive = outcome.z_conclusive;
  row.empirical = outcome.z_error_rate;
  row.expected = detection_rate(declared_phi);
  row.low_confidence = outcome.z_conclusive < 100;
  const double n = static_cast<double>(outcome.z_conclusive);
  const double spread = row.expected * (1.0 - row.expected);
  if (n > 0.0 && spread > 0.0) {
    const double se = std::sqrt(spread / n);
    row.z = (row.empirical - row.expected) / se;
    row.flagged = std::abs(row.z) > 3.0;
  } else if (n > 0.0) {
    // Degenerate binomial (phi = 0): any observed error is a flag.
    row.flagged = outcome.z_errors > 0;
    row.z = row.flagged ? std::numeric_limits<double>::infinity() : 0.0;
  }
  row.mi_estimate = outcome.mutual_information;
  row.mi_se = outcome.mutual_information_se;
  row.mi_bound = eve_information(declared_phi);
  row.mi_flagged = row.mi_estimate > row.mi_bound + 3.0 * row.mi_se;
  return row;
}

TheoryComparison compare_theory(std::span<const std::pair<double, AttackOutcome>> sweep) {
  TheoryComparison cmp;
  cmp.rows.reserve(sweep.size());
  for (const auto& [phi, outcome] : sweep) {
    cmp.rows.push_back(compare_theory(outcome, phi));
    cmp.any_flagged = cmp.any_flagged || cmp.rows.back().flagged || cmp.rows.back().mi_flagged;
  }
  return cmp;
}

}  // namespace cqss
