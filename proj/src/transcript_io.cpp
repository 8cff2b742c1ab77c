#include "cqss/transcript_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace cqss {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_complex(std::complex<double> z) {
  return "[" + fmt_double(z.real()) + ", " + fmt_double(z.imag()) + "]";
}

std::string variant_tag(Variant v, int qudit_dim) {
  switch (v) {
    case Variant::SinglePhoton: return "single";
    case Variant::EPR: return "epr";
    case Variant::Qudit: return "qudit:" + std::to_string(qudit_dim);
  }
  throw std::invalid_argument("variant_tag: unknown variant");
}

std::string digits_to_string(const std::vector<int>& digits, int base) {
  if (base < 2) throw std::invalid_argument("digits_to_string: base must be >= 2");
  std::string out;
  if (base <= 16) {
    out.reserve(digits.size());
    for (int d : digits) {
      if (d < 0 || d >= base)
        throw std::invalid_argument("digits_to_string: digit out of range");
      out += "0123456789abcdef"[d];
    }
    return out;
  }
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] < 0 || digits[i] >= base)
      throw std::invalid_argument("digits_to_string: digit out of range");
    if (i) out += ' ';
    out += std::to_string(digits[i]);
  }
  return out;
}

namespace {

char axis_char(Axis a) { return a == Axis::Z ? 'Z' : 'X'; }

std::string config_line(const ProtocolConfig& cfg) {
  std::string out = "variant " + variant_tag(cfg.variant, cfg.qudit_dim);
  out += " agents " + std::to_string(cfg.num_agents);
  out += " rounds " + std::to_string(cfg.rounds);
  out += " p_control " + fmt_double(cfg.p_control);
  out += " f_sample2 " + fmt_double(cfg.f_sample2);
  out += " seed " + std::to_string(cfg.rng_seed);
  return out;
}

std::string attack_line(const AttackConfig& a) {
  std::string out = "attack agent " + std::to_string(a.adversary_agent);
  out += " leg " + std::to_string(a.intercept_leg);
  out += " phi " + fmt_double(a.phi);
  out += " basis ";
  out += a.ancilla_basis == AncillaBasis::computational ? "computational" : "x";
  return out;
}

std::string positions_line(const std::vector<long>& positions) {
  std::string out;
  for (long p : positions) {
    out += ' ';
    out += std::to_string(p);
  }
  return out;
}

}  // namespace

std::string render_transcript(const SessionTranscript& t) {
  std::string out = "cqss-transcript v1\n";
  out += config_line(t.config) + "\n";
  if (t.attack) out += attack_line(*t.attack) + "\n";
  for (const RoundRecord& rec : t.rounds) {
    out += "round " + std::to_string(rec.round_id);
    out += " prep ";
    out += axis_char(rec.alice_basis);
    out += std::to_string(rec.alice_bit);
    out += " ops";
    for (const AgentEntry& e : rec.agents) {
      if (e.mode == AgentMode::Code) {
        out += " C" + std::to_string(e.coding_label);
      } else {
        out += " M";
        out += axis_char(e.control_basis);
        out += std::to_string(e.control_outcome);
      }
    }
    out += " ret ";
    out += rec.returned ? std::to_string(rec.alice_outcome) : "-";
    out += "\n";
  }
  return out;
}

std::string render_transcript(const EprSessionTranscript& t) {
  const bool qudit = t.config.variant == Variant::Qudit;
  std::string out = "cqss-transcript v1\n";
  out += config_line(t.config) + "\n";
  if (t.attack) out += attack_line(*t.attack) + "\n";
  for (const EprRoundRecord& rec : t.rounds) {
    out += "round " + std::to_string(rec.round_id);
    out += " ops";
    for (const EprAgentEntry& e : rec.agents) {
      if (e.mode == AgentMode::Code) {
        if (qudit)
          out += " C" + std::to_string(e.qudit_label.n) + "." + std::to_string(e.qudit_label.m);
        else
          out += " C" + std::to_string(e.coding_label);
      } else if (qudit) {
        out += " M" + std::to_string(e.control_outcome);
      } else {
        out += " M";
        out += axis_char(e.control_basis);
        out += std::to_string(e.control_outcome);
      }
    }
    out += " alice ";
    out += rec.alice_control_outcome >= 0 ? std::to_string(rec.alice_control_outcome) : "-";
    out += " bell ";
    if (rec.returned)
      out += std::to_string(rec.alice_bell_outcome.n) + "." +
             std::to_string(rec.alice_bell_outcome.m);
    else
      out += "-";
    out += "\n";
  }
  return out;
}

std::string render_sample_report(const SampleReport& r) {
  std::string out = "cqss-samples v1\n";
  for (std::size_t j = 0; j < r.s1.size(); ++j) {
    const AgentSampleStats& s = r.s1[j];
    out += "s1 agent " + std::to_string(j);
    out += " count " + std::to_string(s.positions.size());
    out += " conclusive " + std::to_string(s.conclusive);
    out += " errors " + std::to_string(s.errors);
    out += " epsilon " + fmt_double(s.epsilon) + "\n";
    out += "s1 agent " + std::to_string(j) + " positions" + positions_line(s.positions) + "\n";
  }
  out += "s2 count " + std::to_string(r.s2.positions.size());
  out += " conclusive " + std::to_string(r.s2.conclusive);
  out += " errors " + std::to_string(r.s2.errors);
  out += " epsilon " + fmt_double(r.s2.epsilon) + "\n";
  out += "s2 positions" + positions_line(r.s2.positions) + "\n";
  out += "pooled conclusive " + std::to_string(r.pooled_conclusive);
  out += " errors " + std::to_string(r.pooled_errors);
  out += " epsilon " + fmt_double(r.pooled_epsilon) + "\n";
  return out;
}

std::string render_key_material(const KeyMaterial& k) {
  std::string out = "cqss-keys v1\n";
  out += "variant " + variant_tag(k.variant, k.digit_base);
  out += " base " + std::to_string(k.digit_base);
  out += " digits " + std::to_string(k.digit_count()) + "\n";
  out += "positions" + positions_line(k.positions) + "\n";
  out += "alice " + digits_to_string(k.alice_digits, k.digit_base) + "\n";
  for (std::size_t i = 0; i < k.agent_digits.size(); ++i)
    out += "agent " + std::to_string(i) + " " +
           digits_to_string(k.agent_digits[i], k.digit_base) + "\n";
  return out;
}

namespace {

template <typename Transcript>
std::string summary_common(const Transcript& t, const SampleReport& r, const KeyMaterial& k,
                           const EfficiencyReport& eff, double abort_threshold,
                           long returned) {
  std::string out = "cqss-summary v1\n";
  out += "variant " + variant_tag(t.config.variant, t.config.qudit_dim) + "\n";
  out += "agents " + std::to_string(t.config.num_agents) + "\n";
  out += "rounds " + std::to_string(t.rounds.size()) + "\n";
  out += "seed " + std::to_string(t.config.rng_seed) + "\n";
  out += "p_control " + fmt_double(t.config.p_control) + "\n";
  out += "f_sample2 " + fmt_double(t.config.f_sample2) + "\n";
  if (t.attack) out += attack_line(*t.attack) + "\n";
  out += "returned " + std::to_string(returned) + "\n";
  for (std::size_t j = 0; j < r.s1.size(); ++j) {
    const AgentSampleStats& s = r.s1[j];
    out += "s1 agent " + std::to_string(j) + " count " + std::to_string(s.positions.size()) +
           " conclusive " + std::to_string(s.conclusive) + " errors " +
           std::to_string(s.errors) + " epsilon " + fmt_double(s.epsilon) + "\n";
  }
  out += "s2 count " + std::to_string(r.s2.positions.size()) + " errors " +
         std::to_string(r.s2.errors) + " epsilon " + fmt_double(r.s2.epsilon) + "\n";
  out += "pooled conclusive " + std::to_string(r.pooled_conclusive) + " errors " +
         std::to_string(r.pooled_errors) + " epsilon " + fmt_double(r.pooled_epsilon) + "\n";
  out += "key_digits " + std::to_string(k.digit_count()) + "\n";
  out += "digit_base " + std::to_string(k.digit_base) + "\n";
  out += "keys_agree " + std::string(k.empty() || keys_agree(k) ? "yes" : "no") + "\n";
  out += "epsilon_q " + fmt_double(eff.epsilon_q) + "\n";
  out += "expected_epsilon_q " + fmt_double(eff.expected_epsilon_q) + "\n";
  out += "announcements " + std::to_string(eff.announcements) + "\n";
  out += "abort_threshold " + fmt_double(abort_threshold) + "\n";
  out += "verdict ";
  out += r.pooled_epsilon <= abort_threshold ? "ok" : "abort";
  out += "\n";
  return out;
}

}  // namespace

std::string render_summary(const SessionTranscript& t, const SampleReport& r,
                           const KeyMaterial& k, const EfficiencyReport& eff,
                           double abort_threshold) {
  long returned = 0;
  for (const auto& rec : t.rounds) returned += rec.returned ? 1 : 0;
  return summary_common(t, r, k, eff, abort_threshold, returned);
}

std::string render_summary(const EprSessionTranscript& t, const SampleReport& r,
                           const KeyMaterial& k, const EfficiencyReport& eff,
                           double abort_threshold) {
  long returned = 0;
  for (const auto& rec : t.rounds) returned += rec.returned ? 1 : 0;
  return summary_common(t, r, k, eff, abort_threshold, returned);
}

std::string render_curve_csv(const std::vector<CurvePoint>& points) {
  std::string out = "phi,epsilon_B,I_B\n";
  for (const CurvePoint& p : points)
    out += fmt_double(p.phi) + "," + fmt_double(p.epsilon) + "," + fmt_double(p.info) + "\n";
  return out;
}

std::string render_sweep_csv(const std::vector<TheoryComparisonRow>& rows) {
  std::string out = "phi,epsilon_B_theory,epsilon_B_empirical,I_B_theory,I_empirical_estimate,n_conclusive\n";
  for (const TheoryComparisonRow& r : rows)
    out += fmt_double(r.phi) + "," + fmt_double(r.expected) + "," + fmt_double(r.empirical) +
           "," + fmt_double(r.mi_bound) + "," + fmt_double(r.mi_estimate) + "," +
           std::to_string(r.conclusive) + "\n";
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace cqss
