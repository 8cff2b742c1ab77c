#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "cqss/attack_config.hpp"
#include "cqss/qstate.hpp"
#include "cqss/random.hpp"

// The circular single-photon secret-sharing protocol.
//
// One round: Alice prepares a qubit in a random basis (Z or X) with a random
// bit and sends it around the ring. Each agent either codes (applies one of
// two unitaries, staying invisible in both bases except for the bit flip) or
// measures in a random basis, which ends the circulation and turns the round
// into a check. If the photon survives every agent, Alice measures it in her
// preparation basis; the flip she observes is the XOR of all coding labels.
// Sifting keeps the returned all-code rounds (minus a sacrificed sample), so
// Alice's key digit equals the XOR of the agents' digits round by round,
// which is exactly the n-out-of-n splitting the scheme needs.

namespace cqss {

enum class Variant { SinglePhoton, EPR, Qudit };

struct ProtocolConfig {
  int num_agents = 2;
  long rounds = 1000;
  double p_control = 0.1;   // per-agent probability of a control measurement
  double f_sample2 = 0.1;   // fraction of returned rounds sacrificed for checking
  std::uint64_t rng_seed = 1;
  Variant variant = Variant::SinglePhoton;
  int qudit_dim = 2;        // Qudit variant only

  void validate() const;    // throws std::invalid_argument
};

enum class AgentMode { Control, Code };

// One agent's action in one round, as the transcript records it.
struct AgentEntry {
  AgentMode mode = AgentMode::Code;
  int coding_label = -1;         // Code rounds: 0 or 1
  Axis control_basis = Axis::Z;  // Control rounds
  int control_outcome = -1;
  friend bool operator==(const AgentEntry&, const AgentEntry&) = default;
};

struct RoundRecord {
  long round_id = 0;
  Axis alice_basis = Axis::Z;
  int alice_bit = 0;
  std::vector<AgentEntry> agents;  // ring order; shorter when circulation stopped
  bool returned = false;
  int alice_outcome = -1;          // valid iff returned
  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct SessionTranscript {
  ProtocolConfig config;
  std::optional<AttackConfig> attack;
  std::vector<RoundRecord> rounds;
};

struct Preparation {
  PureStated state;
  Axis basis;
  int bit;
};

struct AgentStepResult {
  AgentEntry entry;
  PureStated post;
};

// Control-round statistics for one agent (sample 1).
struct AgentSampleStats {
  std::vector<long> positions;  // round ids this agent terminated
  long conclusive = 0;          // measurement basis matched the preparation
  long errors = 0;
  double epsilon = 0.0;         // errors / conclusive, 0 when no data
};

// Sacrificed returned rounds (sample 2).
struct ReturnedSampleStats {
  std::vector<long> positions;
  long conclusive = 0;
  long errors = 0;
  double epsilon = 0.0;
};

struct SampleReport {
  std::vector<AgentSampleStats> s1;  // indexed by agent position
  ReturnedSampleStats s2;
  long pooled_conclusive = 0;
  long pooled_errors = 0;
  double pooled_epsilon = 0.0;
};

// Sifted key digits. digit_base and the combination law depend on the
// variant: XOR for SinglePhoton (base 2) and EPR (2-bit labels, base 4),
// componentwise addition mod d for Qudit. positions holds one round id per
// digit (so ids repeat for variants producing several digits per round).
struct KeyMaterial {
  Variant variant = Variant::SinglePhoton;
  int digit_base = 2;
  std::vector<long> positions;
  std::vector<int> alice_digits;
  std::vector<std::vector<int>> agent_digits;  // [agent][digit]
  bool empty() const { return alice_digits.empty(); }
  std::size_t digit_count() const { return alice_digits.size(); }
};

struct VerifyResult {
  bool pass = true;
  std::vector<std::size_t> disclosed;  // digit indices sacrificed to the check
  long remaining = 0;
  long mismatches = 0;
};

// The two coding unitaries. Label 0 is the identity; label 1 flips the bit
// in the Z basis and in the X basis alike (at the price of a global sign on
// one of the X states), which is what keeps a coded photon indistinguishable
// from an uncoded one in either check basis.
UnitaryOpd coding_op(int label);

Preparation alice_prepare(std::mt19937_64& rng);
AgentStepResult agent_step(const PureStated& photon, AgentMode mode, std::mt19937_64& rng);

void validate_attack(const ProtocolConfig& cfg, const AttackConfig& attack);

RoundRecord run_round(const ProtocolConfig& cfg, long round_id);

struct RoundResult {
  RoundRecord record;
  int eve_outcome = -1;  // ancilla readout; -1 when no ancilla was in flight
  int eve_guess = -1;    // the eavesdropper guesses her readout
};
RoundResult run_round_attacked(const ProtocolConfig& cfg, long round_id,
                               const AttackConfig* attack);

struct SessionRun {
  SessionTranscript transcript;
  std::vector<int> eve_outcomes;  // per round, -1 where absent
  std::vector<int> eve_guesses;
};

// Rounds draw from per-round engines, so any thread count (and any chunking)
// yields the identical session; the tests hold run_session to that.
// max_threads 0 means one thread per hardware core.
SessionRun run_session_full(const ProtocolConfig& cfg,
                            const std::optional<AttackConfig>& attack,
                            unsigned max_threads = 1);
SessionTranscript run_session(const ProtocolConfig& cfg);
SessionTranscript run_session(const ProtocolConfig& cfg,
                              const std::optional<AttackConfig>& attack);

SampleReport check_samples(const SessionTranscript& t);
KeyMaterial sift_keys(const SessionTranscript& t, const SampleReport& report);

int combine_digit(int a, int b, int base, Variant variant);
std::vector<int> combine_agent_keys(const KeyMaterial& k);
bool keys_agree(const KeyMaterial& k);
VerifyResult verify_key_agreement(const KeyMaterial& k, double check_fraction,
                                  std::mt19937_64& rng);

// One-time-pad splitting: Alice publishes cipher = message (+) her key; the
// agents can only undo it together. Digitwise modular arithmetic in the
// key's base (plain XOR when the base is 2).
std::vector<int> otp_split(const std::vector<int>& message_digits, const KeyMaterial& k);
std::vector<int> otp_reconstruct(const std::vector<int>& cipher, const KeyMaterial& k);
std::vector<int> otp_reconstruct_partial(const std::vector<int>& cipher, const KeyMaterial& k,
                                         const std::vector<int>& agent_subset);

}  // namespace cqss
