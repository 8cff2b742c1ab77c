#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "cqss/protocol.hpp"
#include "cqss/qstate.hpp"

// Entangled-pair variants of the ring protocol.
//
// Alice keeps one particle of a maximally entangled pair and circulates the
// other. Agents code by displacing the traveling particle inside the
// generalized Bell basis; Alice's final two-particle measurement reads off
// the composite displacement, worth two digits (or two bits) per round
// instead of one. Control rounds for qubit pairs use a correlation
// handshake: agent and Alice measure in the same basis and compare parities
// against what the upstream coding predicts.

namespace cqss {

// Label (n, m) of the generalized entangled state
//   sum_j w^(j n) |j>|j+m> / sqrt(d),  w = exp(2 pi i / d),
// and of the displacement operator sum_j w^(j n) |j+m><j|. For qubits the
// four named states are phi+ = (0,0), psi+ = (0,1), phi- = (1,0),
// psi- = (1,1); Z outcomes anticorrelate iff m = 1, X outcomes iff n = 1.
struct BellLabel {
  int n = 0;
  int m = 0;
  friend bool operator==(const BellLabel&, const BellLabel&) = default;
};

inline constexpr BellLabel kPhiPlus{0, 0};
inline constexpr BellLabel kPsiPlus{0, 1};
inline constexpr BellLabel kPhiMinus{1, 0};
inline constexpr BellLabel kPsiMinus{1, 1};

PureStated bell_state(BellLabel l, int d);
UnitaryOpd qudit_op(BellLabel l, int d);

// Qubit coding alphabet for two classical bits: 0 identity, 1 the signed
// flip (the single-photon coding_op), 2 the plain flip, 3 the phase flip.
// Labels compose by XOR up to a global sign.
UnitaryOpd pauli_coding_op(int label);

// All d*d entangled states ordered by n*d + m.
std::vector<PureStated> bell_basis(int d);

// Joint measurement of subsystems {alice_slot, travel_slot} in the
// entangled basis of their (equal) dimension.
std::pair<BellLabel, PureStated> bell_measure(const PureStated& s, int alice_slot,
                                              int travel_slot, std::mt19937_64& rng);

// Starting from psi-, the state after the ring applied ops with XOR label l.
BellLabel epr_state_for_labels(int xor_label);
// Inverse lookup: Alice's measured label back to the XOR of coding labels.
int epr_decode(BellLabel l);

struct EprAgentEntry {
  AgentMode mode = AgentMode::Code;
  int coding_label = -1;        // EPR variant: 0..3
  BellLabel qudit_label{};      // Qudit variant: displacement applied
  Axis control_basis = Axis::Z; // control rounds (qubits)
  int control_outcome = -1;
  friend bool operator==(const EprAgentEntry&, const EprAgentEntry&) = default;
};

struct EprRoundRecord {
  long round_id = 0;
  std::vector<EprAgentEntry> agents;
  bool returned = false;
  BellLabel alice_bell_outcome{};   // valid iff returned
  // Control handshake (qubits): Alice's same-basis outcome on her particle.
  // Stays -1 for d > 2, where no check verdict is defined.
  int alice_control_outcome = -1;
  friend bool operator==(const EprRoundRecord&, const EprRoundRecord&) = default;
};

struct EprSessionTranscript {
  ProtocolConfig config;
  std::optional<AttackConfig> attack;
  std::vector<EprRoundRecord> rounds;
};

struct EprSessionRun {
  EprSessionTranscript transcript;
  std::vector<int> eve_outcomes;
  std::vector<int> eve_guesses;
};

// variant EPR runs qubit pairs from psi- with the pauli alphabet; variant
// Qudit runs dimension-d pairs from (0,0) with displacement coding. An
// attack (qubits only) entangles the traveling particle like the
// single-photon case.
EprSessionRun run_epr_session_full(const ProtocolConfig& cfg,
                                   const std::optional<AttackConfig>& attack,
                                   unsigned max_threads = 1);
EprSessionTranscript run_epr_session(const ProtocolConfig& cfg);
EprSessionTranscript run_epr_session(const ProtocolConfig& cfg,
                                     const std::optional<AttackConfig>& attack);

SampleReport check_epr_samples(const EprSessionTranscript& t);
KeyMaterial sift_epr_keys(const EprSessionTranscript& t, const SampleReport& report);

// Bits per circulated particle when displacements range over
// phase_levels * shift_levels labels.
double channel_capacity(int phase_levels, int shift_levels);
double channel_capacity(int d);

}  // namespace cqss
