#include "cqss/epr_qudit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "cqss/adversary.hpp"

namespace cqss {

namespace {

void check_label(BellLabel l, int d) {
  if (d < 2) throw std::invalid_argument("bell label: dimension must be >= 2");
  if (l.n < 0 || l.n >= d || l.m < 0 || l.m >= d)
    throw std::invalid_argument("bell label: indices must lie in [0, d)");
}

std::complex<double> root_of_unity(int d, long exponent) {
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(exponent % d) /
                       static_cast<double>(d);
  return {std::cos(angle), std::sin(angle)};
}

}  // namespace

PureStated bell_state(BellLabel l, int d) {
  check_label(l, d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(d) * d);
  for (int j = 0; j < d; ++j)
    v(static_cast<Eigen::Index>(j) * d + (j + l.m) % d) =
        norm * root_of_unity(d, static_cast<long>(j) * l.n);
  return PureStated({d, d}, std::move(v));
}

UnitaryOpd qudit_op(BellLabel l, int d) {
  check_label(l, d);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (int j = 0; j < d; ++j)
    m((j + l.m) % d, j) = root_of_unity(d, static_cast<long>(j) * l.n);
  return UnitaryOpd(std::move(m));
}

UnitaryOpd pauli_coding_op(int label) {
  Eigen::MatrixXcd m(2, 2);
  switch (label) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, -1, 0; break;
    case 2: m << 0, 1, 1, 0; break;
    case 3: m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("pauli_coding_op: label must be 0..3");
  }
  return UnitaryOpd(std::move(m));
}

std::vector<PureStated> bell_basis(int d) {
  if (d < 2) throw std::invalid_argument("bell_basis: dimension must be >= 2");
  std::vector<PureStated> basis;
  basis.reserve(static_cast<std::size_t>(d) * d);
  for (int n = 0; n < d; ++n)
    for (int m = 0; m < d; ++m) basis.push_back(bell_state({n, m}, d));
  return basis;
}

std::pair<BellLabel, PureStated> bell_measure(const PureStated& s, int alice_slot,
                                              int travel_slot, std::mt19937_64& rng) {
  if (alice_slot < 0 || alice_slot >= s.subsystem_count() || travel_slot < 0 ||
      travel_slot >= s.subsystem_count())
    throw std::invalid_argument("bell_measure: slot out of range");
  const int d = s.dims()[static_cast<std::size_t>(alice_slot)];
  if (s.dims()[static_cast<std::size_t>(travel_slot)] != d)
    throw std::invalid_argument("bell_measure: subsystem dimensions differ");
  const auto basis = bell_basis(d);
  const int targets[2] = {alice_slot, travel_slot};
  auto [outcome, post] = measure_in_basis(s, std::span<const PureStated>(basis),
                                          std::span<const int>(targets, 2), rng);
  return {BellLabel{outcome / d, outcome % d}, std::move(post)};
}

// The ring starts from psi- = (1,1). Applying the alphabet op with XOR
// label l to the traveling particle lands on: 0 -> psi-, 1 -> phi+,
// 2 -> phi-, 3 -> psi+ (up to a global sign).
BellLabel epr_state_for_labels(int xor_label) {
  switch (xor_label) {
    case 0: return kPsiMinus;
    case 1: return kPhiPlus;
    case 2: return kPhiMinus;
    case 3: return kPsiPlus;
    default: throw std::invalid_argument("epr_state_for_labels: label must be 0..3");
  }
}

int epr_decode(BellLabel l) {
  for (int cand = 0; cand < 4; ++cand)
    if (epr_state_for_labels(cand) == l) return cand;
  throw std::invalid_argument("epr_decode: label indices must be bits");
}

namespace {

EprRoundRecord default_record(long round_id) {
  EprRoundRecord rec;
  rec.round_id = round_id;
  return rec;
}

struct EprRoundResult {
  EprRoundRecord record;
  int eve_outcome = -1;
  int eve_guess = -1;
};

EprRoundResult run_epr_round(const ProtocolConfig& cfg, long round_id,
                             const AttackConfig* attack) {
  auto rng = make_engine(cfg.rng_seed, Stream::round, static_cast<std::uint64_t>(round_id));
  const bool qudit = cfg.variant == Variant::Qudit;
  const int d = qudit ? cfg.qudit_dim : 2;

  EprRoundResult result;
  EprRoundRecord& rec = result.record;
  rec = default_record(round_id);

  // Subsystem 0 stays with Alice, subsystem 1 travels; an attack ancilla
  // joins as subsystem 2.
  PureStated pair = qudit ? bell_state({0, 0}, d) : bell_state(kPsiMinus, 2);
  bool have_ancilla = false;
  const auto cross_leg = [&](int leg) {
    if (attack == nullptr || attack->intercept_leg != leg) return;
    pair = tensor(pair, basis_ket(0, 2));
    pair = apply(attack_unitary(attack->phi), pair, {1, 2});
    have_ancilla = true;
  };

  bool circulating = true;
  for (int i = 0; i < cfg.num_agents && circulating; ++i) {
    cross_leg(i);
    EprAgentEntry entry;
    const AgentMode mode =
        uniform01(rng) < cfg.p_control ? AgentMode::Control : AgentMode::Code;
    entry.mode = mode;
    if (mode == AgentMode::Control) {
      if (qudit) {
        // No handshake is defined above qubits; the round is recorded and
        // discarded without a verdict.
        auto [outcome, post] = measure(pair, MeasBasisd::computational(d), 1, rng);
        entry.control_outcome = outcome;
        pair = std::move(post);
      } else {
        entry.control_basis = uniform_bit(rng) == 0 ? Axis::Z : Axis::X;
        const MeasBasisd basis = MeasBasisd::standard(entry.control_basis);
        auto [outcome, post] = measure(pair, basis, 1, rng);
        entry.control_outcome = outcome;
        auto [alice_outcome, post2] = measure(post, basis, 0, rng);
        rec.alice_control_outcome = alice_outcome;
        pair = std::move(post2);
      }
      circulating = false;
    } else if (qudit) {
      entry.qudit_label = BellLabel{uniform_index(rng, d), uniform_index(rng, d)};
      pair = apply(qudit_op(entry.qudit_label, d), pair, 1);
    } else {
      entry.coding_label = uniform_index(rng, 4);
      pair = apply(pauli_coding_op(entry.coding_label), pair, 1);
    }
    rec.agents.push_back(entry);
  }

  if (circulating) {
    cross_leg(cfg.num_agents);
    auto [label, post] = bell_measure(pair, 0, 1, rng);
    rec.returned = true;
    rec.alice_bell_outcome = label;
    pair = std::move(post);
  }

  if (have_ancilla) {
    const MeasBasisd basis = attack->ancilla_basis == AncillaBasis::computational
                                 ? MeasBasisd::z()
                                 : MeasBasisd::x();
    result.eve_outcome = measure(pair, basis, 2, rng).first;
    result.eve_guess = result.eve_outcome;
  }
  return result;
}

}  // namespace

EprSessionRun run_epr_session_full(const ProtocolConfig& cfg,
                                   const std::optional<AttackConfig>& attack,
                                   unsigned max_threads) {
  cfg.validate();
  if (cfg.variant == Variant::SinglePhoton)
    throw std::invalid_argument("run_epr_session: use run_session for the single-photon variant");
  if (attack) {
    if (cfg.variant != Variant::EPR)
      throw std::invalid_argument("run_epr_session: attacks are defined for qubit pairs only");
    validate_attack(cfg, *attack);
  }

  EprSessionRun run;
  run.transcript.config = cfg;
  run.transcript.attack = attack;
  run.transcript.rounds.resize(static_cast<std::size_t>(cfg.rounds));
  run.eve_outcomes.assign(static_cast<std::size_t>(cfg.rounds), -1);
  run.eve_guesses.assign(static_cast<std::size_t>(cfg.rounds), -1);

  const AttackConfig* att = attack ? &*attack : nullptr;
  const auto work = [&](long lo, long hi) {
    for (long r = lo; r < hi; ++r) {
      auto rr = run_epr_round(cfg, r, att);
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

EprSessionTranscript run_epr_session(const ProtocolConfig& cfg) {
  return run_epr_session_full(cfg, std::nullopt).transcript;
}

EprSessionTranscript run_epr_session(const ProtocolConfig& cfg,
                                     const std::optional<AttackConfig>& attack) {
  return run_epr_session_full(cfg, attack).transcript;
}

namespace {

void finalize(double& eps, long conclusive, long errors) {
  eps = conclusive > 0 ? static_cast<double>(errors) / static_cast<double>(conclusive) : 0.0;
}

}  // namespace

SampleReport check_epr_samples(const EprSessionTranscript& t) {
  const ProtocolConfig& cfg = t.config;
  cfg.validate();
  const bool qudit = cfg.variant == Variant::Qudit;
  const int d = qudit ? cfg.qudit_dim : 2;
  SampleReport report;
  report.s1.resize(static_cast<std::size_t>(cfg.num_agents));

  for (const EprRoundRecord& rec : t.rounds) {
    if (!rec.returned) {
      if (rec.agents.empty())
        throw std::invalid_argument("transcript: stopped round without a control entry");
      const std::size_t j = rec.agents.size() - 1;
      const EprAgentEntry& entry = rec.agents[j];
      if (entry.mode != AgentMode::Control)
        throw std::invalid_argument("transcript: stopped round does not end in a control entry");
      AgentSampleStats& stats = report.s1[j];
      stats.positions.push_back(rec.round_id);
      if (qudit) continue;  // no verdict without a handshake

      int xor_up = 0;
      for (std::size_t i = 0; i < j; ++i) xor_up ^= rec.agents[i].coding_label;
      const BellLabel state = epr_state_for_labels(xor_up);
      const int want_parity = entry.control_basis == Axis::Z ? state.m : state.n;
      ++stats.conclusive;
      if ((entry.control_outcome ^ rec.alice_control_outcome) != want_parity)
        ++stats.errors;
      continue;
    }

    auto draw = make_engine(cfg.rng_seed, Stream::sample_draw,
                            static_cast<std::uint64_t>(rec.round_id));
    if (uniform01(draw) >= cfg.f_sample2) continue;
    report.s2.positions.push_back(rec.round_id);
    ++report.s2.conclusive;
    if (qudit) {
      int sum_n = 0, sum_m = 0;
      for (const auto& entry : rec.agents) {
        sum_n = (sum_n + entry.qudit_label.n) % d;
        sum_m = (sum_m + entry.qudit_label.m) % d;
      }
      if (!(rec.alice_bell_outcome == BellLabel{sum_n, sum_m})) ++report.s2.errors;
    } else {
      int xor_all = 0;
      for (const auto& entry : rec.agents) xor_all ^= entry.coding_label;
      if (epr_decode(rec.alice_bell_outcome) != xor_all) ++report.s2.errors;
    }
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

KeyMaterial sift_epr_keys(const EprSessionTranscript& t, const SampleReport& report) {
  const ProtocolConfig& cfg = t.config;
  const bool qudit = cfg.variant == Variant::Qudit;
  KeyMaterial key;
  key.variant = cfg.variant;
  key.digit_base = qudit ? cfg.qudit_dim : 4;
  key.agent_digits.resize(static_cast<std::size_t>(cfg.num_agents));

  const auto& sacrificed = report.s2.positions;
  for (const EprRoundRecord& rec : t.rounds) {
    if (!rec.returned) continue;
    if (std::binary_search(sacrificed.begin(), sacrificed.end(), rec.round_id)) continue;
    if (qudit) {
      // Two digits per round, phase index first.
      key.positions.push_back(rec.round_id);
      key.positions.push_back(rec.round_id);
      key.alice_digits.push_back(rec.alice_bell_outcome.n);
      key.alice_digits.push_back(rec.alice_bell_outcome.m);
      for (std::size_t i = 0; i < rec.agents.size(); ++i) {
        key.agent_digits[i].push_back(rec.agents[i].qudit_label.n);
        key.agent_digits[i].push_back(rec.agents[i].qudit_label.m);
      }
    } else {
      key.positions.push_back(rec.round_id);
      key.alice_digits.push_back(epr_decode(rec.alice_bell_outcome));
      for (std::size_t i = 0; i < rec.agents.size(); ++i)
        key.agent_digits[i].push_back(rec.agents[i].coding_label);
    }
  }
  return key;
}

double channel_capacity(int phase_levels, int shift_levels) {
  if (phase_levels < 1 || shift_levels < 1)
    throw std::invalid_argument("channel_capacity: level counts must be >= 1");
  const long labels = static_cast<long>(phase_levels) * shift_levels;
  if (labels < 2) throw std::invalid_argument("channel_capacity: need at least two labels");
  return std::log2(static_cast<double>(labels));
}

double channel_capacity(int d) { return channel_capacity(d, d); }

}  // namespace cqss
