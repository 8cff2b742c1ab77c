#include "cqss/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "cqss/adversary.hpp"

namespace cqss {

void ProtocolConfig::validate() const {
  if (num_agents < 1) throw std::invalid_argument("config: num_agents must be >= 1");
  if (rounds < 0) throw std::invalid_argument("config: rounds must be >= 0");
  if (p_control < 0.0 || p_control > 1.0)
    throw std::invalid_argument("config: p_control must be in [0, 1]");
  if (f_sample2 < 0.0 || f_sample2 > 1.0)
    throw std::invalid_argument("config: f_sample2 must be in [0, 1]");
  if (qudit_dim < 2) throw std::invalid_argument("config: qudit_dim must be >= 2");
  if (qudit_dim > 16)
    throw std::invalid_argument("config: qudit_dim above 16 is not supported");
}

UnitaryOpd coding_op(int label) {
  Eigen::MatrixXcd m(2, 2);
  switch (label) {
    case 0:
      m << 1, 0, 0, 1;
      break;
    case 1:
      // |0> -> -|1>, |1> -> |0>. Flips the bit in Z and in X; the stray
      // sign is a global phase for any single preparation, so no check
      // basis can see the difference between coded and uncoded photons.
      m << 0, 1, -1, 0;
      break;
    default:
      throw std::invalid_argument("coding_op: label must be 0 or 1");
  }
  return UnitaryOpd(std::move(m));
}

Preparation alice_prepare(std::mt19937_64& rng) {
  const Axis basis = uniform_bit(rng) == 0 ? Axis::Z : Axis::X;
  const int bit = uniform_bit(rng);
  return Preparation{ket(qubit_ket(basis, bit)), basis, bit};
}

AgentStepResult agent_step(const PureStated& photon, AgentMode mode, std::mt19937_64& rng) {
  AgentEntry entry;
  entry.mode = mode;
  if (mode == AgentMode::Control) {
    entry.control_basis = uniform_bit(rng) == 0 ? Axis::Z : Axis::X;
    auto [outcome, post] = measure(photon, MeasBasisd::standard(entry.control_basis), 0, rng);
    entry.control_outcome = outcome;
    return AgentStepResult{entry, std::move(post)};
  }
  entry.coding_label = uniform_bit(rng);
  return AgentStepResult{entry, apply(coding_op(entry.coding_label), photon, 0)};
}

void validate_attack(const ProtocolConfig& cfg, const AttackConfig& attack) {
  if (attack.adversary_agent < 0 || attack.adversary_agent >= cfg.num_agents)
    throw std::invalid_argument("attack: adversary_agent out of range");
  if (attack.intercept_leg <= attack.adversary_agent || attack.intercept_leg > cfg.num_agents)
    throw std::invalid_argument(
        "attack: intercept_leg must be a later leg than the adversary's position");
  if (attack.phi < 0.0 || attack.phi > std::numbers::pi / 4 + 1e-12)
    throw std::invalid_argument("attack: phi must be in [0, pi/4]");
}

RoundResult run_round_attacked(const ProtocolConfig& cfg, long round_id,
                               const AttackConfig* attack) {
  auto rng = make_engine(cfg.rng_seed, Stream::round, static_cast<std::uint64_t>(round_id));
  Preparation prep = alice_prepare(rng);

  RoundResult result;
  RoundRecord& rec = result.record;
  rec.round_id = round_id;
  rec.alice_basis = prep.basis;
  rec.alice_bit = prep.bit;

  PureStated photon = prep.state;
  bool have_ancilla = false;
  const auto cross_leg = [&](int leg) {
    if (attack == nullptr || attack->intercept_leg != leg) return;
    photon = tensor(photon, basis_ket(0, 2));
    photon = apply(attack_unitary(attack->phi), photon, {0, 1});
    have_ancilla = true;
  };

  bool circulating = true;
  for (int i = 0; i < cfg.num_agents && circulating; ++i) {
    cross_leg(i);
    const AgentMode mode =
        uniform01(rng) < cfg.p_control ? AgentMode::Control : AgentMode::Code;
    auto step = agent_step(photon, mode, rng);
    rec.agents.push_back(step.entry);
    photon = std::move(step.post);
    circulating = mode == AgentMode::Code;
  }

  if (circulating) {
    cross_leg(cfg.num_agents);
    auto [outcome, post] = measure(photon, MeasBasisd::standard(prep.basis), 0, rng);
    rec.returned = true;
    rec.alice_outcome = outcome;
    photon = std::move(post);
  }

  // The eavesdropper reads her ancilla strictly last, so her presence never
  // shifts the draws behind the recorded fields; with phi = 0 the records
  // are identical to the honest session under the same seed.
  if (have_ancilla) {
    const MeasBasisd basis = attack->ancilla_basis == AncillaBasis::computational
                                 ? MeasBasisd::z()
                                 : MeasBasisd::x();
    result.eve_outcome = measure(photon, basis, 1, rng).first;
    result.eve_guess = result.eve_outcome;
  }
  return result;
}

RoundRecord run_round(const ProtocolConfig& cfg, long round_id) {
  return run_round_attacked(cfg, round_id, nullptr).record;
}

SessionRun run_session_full(const ProtocolConfig& cfg,
                            const std::optional<AttackConfig>& attack,
                            unsigned max_threads) {
  cfg.validate();
  if (cfg.variant != Variant::SinglePhoton)
    throw std::invalid_argument(
        "run_session handles the single-photon variant; use run_epr_session");
  if (attack) validate_attack(cfg, *attack);

  SessionRun run;
  run.transcript.config = cfg;
  run.transcript.attack = attack;
  run.transcript.rounds.resize(static_cast<std::size_t>(cfg.rounds));
  run.eve_outcomes.assign(static_cast<std::size_t>(cfg.rounds), -1);
  run.eve_guesses.assign(static_cast<std::size_t>(cfg.rounds), -1);

  const AttackConfig* att = attack ? &*attack : nullptr;
  const auto work = [&](long lo, long hi) {
    for (long r = lo; r < hi; ++r) {
      auto rr = run_round_attacked(cfg, r, att);
      const auto idx = static_cast<std::size_t>(r);
      run.transcript.rounds[idx] = std::move(rr.record);
      run.eve_outcomes[idx] = rr.eve_outcome;
      run.eve_guesses[idx] = rr.eve_guess;
    }
  };

  const unsigned threads =
      max_threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : max_threads;
  if (threads <= 1 || cfg.rounds < 2) {
    work(0, cfg.rounds);
    return run;
  }
  const long chunk = (cfg.rounds + threads - 1) / threads;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    const long lo = static_cast<long>(t) * chunk;
    const long hi = std::min(cfg.rounds, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(work, lo, hi);
  }
  for (auto& th : pool) th.join();
  return run;
}

SessionTranscript run_session(const ProtocolConfig& cfg) {
  return run_session_full(cfg, std::nullopt).transcript;
}

SessionTranscript run_session(const ProtocolConfig& cfg,
                              const std::optional<AttackConfig>& attack) {
  return run_session_full(cfg, attack).transcript;
}

namespace {

int xor_labels_before(const RoundRecord& rec, std::size_t end) {
  int acc = 0;
  for (std::size_t i = 0; i < end; ++i) {
    if (rec.agents[i].mode != AgentMode::Code)
      throw std::invalid_argument("transcript: coding entry expected before a control stop");
    acc ^= rec.agents[i].coding_label;
  }
  return acc;
}

void finalize(double& eps, long conclusive, long errors) {
  eps = conclusive > 0 ? static_cast<double>(errors) / static_cast<double>(conclusive) : 0.0;
}

}  // namespace

SampleReport check_samples(const SessionTranscript& t) {
  const ProtocolConfig& cfg = t.config;
  cfg.validate();
  SampleReport report;
  report.s1.resize(static_cast<std::size_t>(cfg.num_agents));

  for (const RoundRecord& rec : t.rounds) {
    if (!rec.returned) {
      if (rec.agents.empty())
        throw std::invalid_argument("transcript: stopped round without a control entry");
      const std::size_t j = rec.agents.size() - 1;
      const AgentEntry& entry = rec.agents[j];
      if (entry.mode != AgentMode::Control)
        throw std::invalid_argument("transcript: stopped round does not end in a control entry");
      AgentSampleStats& stats = report.s1[j];
      stats.positions.push_back(rec.round_id);
      if (entry.control_basis != rec.alice_basis) continue;  // inconclusive
      ++stats.conclusive;
      const int expected = rec.alice_bit ^ xor_labels_before(rec, j);
      if (entry.control_outcome != expected) ++stats.errors;
      continue;
    }

    // Returned rounds: Alice sacrifices a fraction for the second check.
    // Membership is drawn from a per-round engine of its own stream, so it
    // does not depend on transcript traversal order.
    auto draw = make_engine(cfg.rng_seed, Stream::sample_draw,
                            static_cast<std::uint64_t>(rec.round_id));
    if (uniform01(draw) >= cfg.f_sample2) continue;
    report.s2.positions.push_back(rec.round_id);
    ++report.s2.conclusive;  // Alice measures her own preparation basis
    const int expected = rec.alice_bit ^ xor_labels_before(rec, rec.agents.size());
    if (rec.alice_outcome != expected) ++report.s2.errors;
  }

  for (auto& stats : report.s1) {
    finalize(stats.epsilon, stats.conclusive, stats.errors);
    report.pooled_conclusive += stats.conclusive;
    report.pooled_errors += stats.errors;
  }
  finalize(report.s2.epsilon, report.s2.conclusive, report.s2.errors);
  report.pooled_conclusive += report.s2.conclusive;
  report.pooled_errors += report.s2.errors;
  finalize(report.pooled_epsilon, report.pooled_conclusive, report.pooled_errors);
  return report;
}

KeyMaterial sift_keys(const SessionTranscript& t, const SampleReport& report) {
  const ProtocolConfig& cfg = t.config;
  KeyMaterial key;
  key.variant = Variant::SinglePhoton;
  key.digit_base = 2;
  key.agent_digits.resize(static_cast<std::size_t>(cfg.num_agents));

  const auto& sacrificed = report.s2.positions;  // ascending by construction
  for (const RoundRecord& rec : t.rounds) {
    if (!rec.returned) continue;
    if (std::binary_search(sacrificed.begin(), sacrificed.end(), rec.round_id)) continue;
    key.positions.push_back(rec.round_id);
    // Alice's digit is the net flip she observed; each agent's digit is the
    // label it applied. The ring makes her digit the XOR of theirs.
    key.alice_digits.push_back(rec.alice_bit ^ rec.alice_outcome);
    for (std::size_t i = 0; i < rec.agents.size(); ++i)
      key.agent_digits[i].push_back(rec.agents[i].coding_label);
  }
  return key;
}

int combine_digit(int a, int b, int base, Variant variant) {
  if (base < 2) throw std::invalid_argument("combine_digit: base must be >= 2");
  if (a < 0 || a >= base || b < 0 || b >= base)
    throw std::invalid_argument("combine_digit: digit out of range");
  switch (variant) {
    case Variant::SinglePhoton:
    case Variant::EPR:
      return a ^ b;  // coding ops compose by XOR of their labels (up to phase)
    case Variant::Qudit:
      return (a + b) % base;
  }
  throw std::invalid_argument("combine_digit: unknown variant");
}

std::vector<int> combine_agent_keys(const KeyMaterial& k) {
  if (k.agent_digits.empty())
    throw std::invalid_argument("combine_agent_keys: no agent shares");
  std::vector<int> acc(k.digit_count(), 0);
  for (const auto& share : k.agent_digits) {
    if (share.size() != k.digit_count())
      throw std::invalid_argument("combine_agent_keys: ragged shares");
    for (std::size_t i = 0; i < share.size(); ++i)
      acc[i] = combine_digit(acc[i], share[i], k.digit_base, k.variant);
  }
  return acc;
}

bool keys_agree(const KeyMaterial& k) {
  return combine_agent_keys(k) == k.alice_digits;
}

VerifyResult verify_key_agreement(const KeyMaterial& k, double check_fraction,
                                  std::mt19937_64& rng) {
  if (check_fraction <= 0.0 || check_fraction > 1.0)
    throw std::invalid_argument("verify_key_agreement: fraction must be in (0, 1]");
  const std::vector<int> combined = combine_agent_keys(k);
  VerifyResult v;
  for (std::size_t i = 0; i < k.digit_count(); ++i) {
    if (uniform01(rng) >= check_fraction) continue;
    v.disclosed.push_back(i);
    if (combined[i] != k.alice_digits[i]) {
      ++v.mismatches;
      v.pass = false;
    }
  }
  v.remaining = static_cast<long>(k.digit_count() - v.disclosed.size());
  return v;
}

namespace {

void check_digits(const std::vector<int>& digits, int base, const char* who) {
  for (int d : digits)
    if (d < 0 || d >= base)
      throw std::invalid_argument(std::string(who) + ": digit out of range for base");
}

}  // namespace

std::vector<int> otp_split(const std::vector<int>& message_digits, const KeyMaterial& k) {
  if (message_digits.size() > k.digit_count())
    throw std::invalid_argument("otp_split: message longer than key");
  check_digits(message_digits, k.digit_base, "otp_split");
  std::vector<int> cipher(message_digits.size());
  for (std::size_t i = 0; i < cipher.size(); ++i)
    cipher[i] = (message_digits[i] + k.alice_digits[i]) % k.digit_base;
  return cipher;
}

std::vector<int> otp_reconstruct(const std::vector<int>& cipher, const KeyMaterial& k) {
  std::vector<int> all(k.agent_digits.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return otp_reconstruct_partial(cipher, k, all);
}

std::vector<int> otp_reconstruct_partial(const std::vector<int>& cipher, const KeyMaterial& k,
                                         const std::vector<int>& agent_subset) {
  if (cipher.size() > k.digit_count())
    throw std::invalid_argument("otp_reconstruct: cipher longer than key");
  check_digits(cipher, k.digit_base, "otp_reconstruct");
  for (std::size_t i = 0; i < agent_subset.size(); ++i) {
    if (agent_subset[i] < 0 ||
        agent_subset[i] >= static_cast<int>(k.agent_digits.size()))
      throw std::invalid_argument("otp_reconstruct: agent index out of range");
    for (std::size_t j = i + 1; j < agent_subset.size(); ++j)
      if (agent_subset[i] == agent_subset[j])
        throw std::invalid_argument("otp_reconstruct: duplicate agent index");
  }
  std::vector<int> plain(cipher.size());
  for (std::size_t i = 0; i < cipher.size(); ++i) {
    int key_digit = 0;
    for (int a : agent_subset)
      key_digit = combine_digit(key_digit, k.agent_digits[static_cast<std::size_t>(a)][i],
                                k.digit_base, k.variant);
    plain[i] = (cipher[i] - key_digit % k.digit_base + k.digit_base) % k.digit_base;
  }
  return plain;
}

}  // namespace cqss
