#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cqss/analysis.hpp"
#include "test_util.hpp"

using namespace cqss;

TEST_CASE("information curve endpoints, midpoint and shape") {
  const auto curve = information_curve(101);
  REQUIRE(curve.size() == 101);
  CHECK(curve.front().phi == 0.0);
  CHECK(curve.front().epsilon == 0.0);
  CHECK(curve.front().info == 0.0);
  CHECK(curve.back().phi == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
  CHECK(curve.back().epsilon == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(curve.back().info == doctest::Approx(1.0).epsilon(1e-12));

  // Grid point 50 sits exactly at the quarter angle.
  CHECK(curve[50].phi == doctest::Approx(std::numbers::pi / 4).epsilon(1e-15));
  CHECK(curve[50].epsilon == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(curve[50].info == doctest::Approx(0.81127812445913283).epsilon(1e-12));

  for (std::size_t i = 1; i < curve.size(); ++i) {
    CHECK(curve[i].phi > curve[i - 1].phi);
    CHECK(curve[i].epsilon >= curve[i - 1].epsilon);
    CHECK(curve[i].info >= curve[i - 1].info);
  }
  CHECK_THROWS_AS(information_curve(1), std::invalid_argument);
}

TEST_CASE("key-rate report for a low-overhead single-photon session") {
  ProtocolConfig cfg;
  cfg.num_agents = 2;
  cfg.rounds = 50000;
  cfg.p_control = 0.01;
  cfg.f_sample2 = 0.01;
  cfg.rng_seed = 47;

  const SessionTranscript t = run_session(cfg);
  const SampleReport report = check_samples(t);
  const KeyMaterial k = sift_keys(t, report);
  const EfficiencyReport eff = efficiency(t, k);

  CHECK(eff.rounds == cfg.rounds);
  CHECK(eff.key_digits == static_cast<long>(k.digit_count()));
  CHECK(eff.expected_epsilon_q == doctest::Approx(0.99 * 0.99 * 0.99).epsilon(1e-15));
  CHECK(std::abs(eff.epsilon_q - eff.expected_epsilon_q) < 0.006);

  // Re-run the announcement arithmetic straight off the report.
  long want = 0;
  for (std::size_t j = 0; j < report.s1.size(); ++j)
    want += static_cast<long>(report.s1[j].positions.size()) * (2 + static_cast<long>(j));
  want += static_cast<long>(report.s2.positions.size()) * (1 + cfg.num_agents);
  CHECK(eff.announcements == want);
  CHECK(eff.announcements_per_round ==
        doctest::Approx(static_cast<double>(want) / static_cast<double>(cfg.rounds)));
}

TEST_CASE("pair variants count the handshake and the doubled digits") {
  ProtocolConfig cfg;
  cfg.variant = Variant::EPR;
  cfg.num_agents = 2;
  cfg.rounds = 8000;
  cfg.p_control = 0.2;
  cfg.f_sample2 = 0.1;
  cfg.rng_seed = 53;

  const EprSessionTranscript t = run_epr_session(cfg);
  const SampleReport report = check_epr_samples(t);
  const KeyMaterial k = sift_epr_keys(t, report);
  const EfficiencyReport eff = efficiency(t, k);
  CHECK(eff.expected_epsilon_q == doctest::Approx(0.8 * 0.8 * 0.9).epsilon(1e-15));
  long want = 0;
  for (std::size_t j = 0; j < report.s1.size(); ++j)
    want += static_cast<long>(report.s1[j].positions.size()) * (3 + static_cast<long>(j));
  want += static_cast<long>(report.s2.positions.size()) * (1 + cfg.num_agents);
  CHECK(eff.announcements == want);

  ProtocolConfig qcfg = cfg;
  qcfg.variant = Variant::Qudit;
  qcfg.qudit_dim = 4;
  const EprSessionTranscript qt = run_epr_session(qcfg);
  const KeyMaterial qk = sift_epr_keys(qt, check_epr_samples(qt));
  const EfficiencyReport qeff = efficiency(qt, qk);
  // Two digits a round, and no handshake message above qubits.
  CHECK(qeff.expected_epsilon_q == doctest::Approx(2 * 0.8 * 0.8 * 0.9).epsilon(1e-15));
  CHECK(std::abs(qeff.epsilon_q - qeff.expected_epsilon_q) < 0.05);
}

TEST_CASE("theory comparison accepts a faithful attack sample") {
  ProtocolConfig cfg;
  cfg.num_agents = 2;
  cfg.rounds = 20000;
  cfg.p_control = 0.5;
  cfg.f_sample2 = 0.1;
  cfg.rng_seed = 61;
  AttackConfig attack;
  attack.phi = 0.3;

  const auto [t, out] = simulate_attack(cfg, attack);
  const TheoryComparisonRow row = compare_theory(out, 0.3);
  CHECK(row.expected == doctest::Approx(detection_rate(0.3)).epsilon(1e-15));
  CHECK_FALSE(row.low_confidence);
  CHECK_FALSE(row.flagged);
  CHECK(std::abs(row.z) < 3.0);
  CHECK_FALSE(row.mi_flagged);
  CHECK(row.mi_bound == doctest::Approx(eve_information(0.3)).epsilon(1e-15));

  CHECK_THROWS_AS(compare_theory(out, 0.31), std::invalid_argument);
}

TEST_CASE("theory comparison flags what it should") {
  AttackOutcome fake;
  fake.phi = 0.3;
  fake.z_conclusive = 10000;
  fake.z_errors = 3000;
  fake.z_error_rate = 0.3;  // far above the closed form ~0.0437
  const TheoryComparisonRow bad = compare_theory(fake, 0.3);
  CHECK(bad.flagged);
  CHECK(bad.z > 3.0);

  AttackOutcome sparse;
  sparse.phi = 0.2;
  sparse.z_conclusive = 50;
  sparse.z_errors = 1;
  sparse.z_error_rate = 0.02;
  CHECK(compare_theory(sparse, 0.2).low_confidence);

  // Degenerate spread at phi = 0: a single error is an immediate flag.
  AttackOutcome quiet;
  quiet.phi = 0.0;
  quiet.z_conclusive = 1000;
  const TheoryComparisonRow clean = compare_theory(quiet, 0.0);
  CHECK_FALSE(clean.flagged);
  CHECK(clean.z == 0.0);
  quiet.z_errors = 1;
  quiet.z_error_rate = 0.001;
  const TheoryComparisonRow dirty = compare_theory(quiet, 0.0);
  CHECK(dirty.flagged);
  CHECK(std::isinf(dirty.z));

  // An information estimate above the ceiling plus noise is flagged too.
  AttackOutcome leaky;
  leaky.phi = 0.1;
  leaky.z_conclusive = 10000;
  leaky.z_errors = static_cast<long>(10000 * detection_rate(0.1));
  leaky.z_error_rate = static_cast<double>(leaky.z_errors) / 10000.0;
  leaky.mutual_information = 0.9;
  leaky.mutual_information_se = 0.001;
  CHECK(compare_theory(leaky, 0.1).mi_flagged);

  std::vector<std::pair<double, AttackOutcome>> sweep{{0.3, fake}, {0.0, quiet}};
  const TheoryComparison cmp = compare_theory(sweep);
  REQUIRE(cmp.rows.size() == 2);
  CHECK(cmp.any_flagged);
}
