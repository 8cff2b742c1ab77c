#pragma once

#include <span>
#include <utility>
#include <vector>

#include "cqss/adversary.hpp"
#include "cqss/epr_qudit.hpp"
#include "cqss/protocol.hpp"

// Derived quantities: the disturbance-vs-information curve, key-rate
// efficiency bookkeeping, and statistical comparison of sampled attack
// sessions against the closed forms.

namespace cqss {

struct CurvePoint {
  double phi = 0.0;
  double epsilon = 0.0;  // detection rate of conclusive Z checks
  double info = 0.0;     // eavesdropper information ceiling, bits
};

// n_points samples of phi spanning [0, pi/2]; epsilon then sweeps 0 to 1/2.
std::vector<CurvePoint> information_curve(int n_points = 101);

struct EfficiencyReport {
  long rounds = 0;
  long key_digits = 0;
  double epsilon_q = 0.0;           // key digits per round
  double expected_epsilon_q = 0.0;  // digits/round * (1-p_control)^N * (1-f_sample2)
  long announcements = 0;           // classical messages spent on checks
  double announcements_per_round = 0.0;
};

// Announcement accounting, applied uniformly: a control stop at ring
// position j costs 2 + j messages (the agent's basis-and-outcome claim,
// Alice's preparation disclosure, j upstream coding labels), plus one more
// for the qubit-pair handshake; a sacrificed returned round costs
// 1 + num_agents (Alice's disclosure plus every coding label).
EfficiencyReport efficiency(const SessionTranscript& t, const KeyMaterial& k);
EfficiencyReport efficiency(const EprSessionTranscript& t, const KeyMaterial& k);

struct TheoryComparisonRow {
  double phi = 0.0;
  long conclusive = 0;
  double empirical = 0.0;   // observed Z-check error rate
  double expected = 0.0;    // closed form at phi
  double z = 0.0;           // (empirical - expected) / binomial se
  bool flagged = false;     // |z| > 3
  bool low_confidence = false;  // fewer than 100 conclusive checks
  double mi_estimate = 0.0;
  double mi_se = 0.0;
  double mi_bound = 0.0;    // information ceiling at phi
  bool mi_flagged = false;  // estimate exceeds ceiling beyond 3 se
};

struct TheoryComparison {
  std::vector<TheoryComparisonRow> rows;
  bool any_flagged = false;
};

// Throws if the outcome's phi does not equal the declared one; statistical
// disagreement only raises the row flags.
TheoryComparisonRow compare_theory(const AttackOutcome& outcome, double declared_phi);
TheoryComparison compare_theory(std::span<const std::pair<double, AttackOutcome>> sweep);

}  // namespace cqss
