#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cqss/adversary.hpp"
#include "test_util.hpp"

using namespace cqss;
using cqss::testutil::max_abs_diff;

namespace {

double h2(double p) {  // independent binary entropy oracle
  double h = 0.0;
  if (p > 0) h -= p * std::log2(p);
  if (p < 1) h -= (1 - p) * std::log2(1 - p);
  return h;
}

Eigen::Vector4cd branch(double a, double b, double c, double d) {
  return Eigen::Vector4cd(a, b, c, d);
}

}  // namespace

TEST_CASE("attack_unitary matches its defining matrix and is unitary") {
  const double phi = 0.37;
  const double c = std::cos(phi), s = std::sin(phi);
  Eigen::MatrixXcd want(4, 4);
  want << 1, 0, 0, 0,
          0, c, s, 0,
          0, -s, c, 0,
          0, 0, 0, 1;
  const auto got = attack_unitary(phi).matrix();
  CHECK(max_abs_diff(got, want) == 0.0);

  CHECK(max_abs_diff(got * got.adjoint(), Eigen::MatrixXcd::Identity(4, 4)) < 1e-15);

  // Column action: |photon=1, ancilla=0> leaks into the flipped pair.
  const PureStated in({2, 2}, Eigen::Vector4cd(0, 0, 1, 0));
  const PureStated out = apply(attack_unitary(phi), in, {0, 1});
  CHECK(std::abs(out.amplitudes()(1) - s) < 1e-15);
  CHECK(std::abs(out.amplitudes()(2) - c) < 1e-15);

  // phi = 0 is the identity; the all-zero and all-one kets never move.
  CHECK(max_abs_diff(attack_unitary(0.0).matrix(), Eigen::MatrixXcd::Identity(4, 4)) == 0.0);
}

TEST_CASE("closed-form rates at the maximal coupling") {
  const double phi = std::numbers::pi / 4;
  CHECK(detection_rate(phi) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(x_basis_detection_rate(phi) ==
        doctest::Approx(0.5 * (1 - std::sqrt(0.5))).epsilon(1e-12));
  CHECK(all_state_detection_rate(phi) ==
        doctest::Approx(0.25 * (0.5 + 1 - std::sqrt(0.5))).epsilon(1e-12));
  CHECK(detection_rate(0.0) == 0.0);
  CHECK(x_basis_detection_rate(0.0) == 0.0);
  // The quarter-rate information ceiling, against an independent entropy.
  CHECK(eve_information(phi) == doctest::Approx(h2(0.25)).epsilon(1e-14));
  CHECK(eve_information(phi) == doctest::Approx(0.81127812445913283).epsilon(1e-12));
}

TEST_CASE("binary_entropy edges and domain") {
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(binary_entropy(0.1) == doctest::Approx(h2(0.1)).epsilon(1e-15));
  CHECK_THROWS_AS(binary_entropy(-0.01), std::invalid_argument);
  CHECK_THROWS_AS(binary_entropy(1.01), std::invalid_argument);
}

TEST_CASE("joint state after coding equals the hand-built four-branch mixture") {
  for (const double phi : {0.2, std::numbers::pi / 4}) {
    for (const double p : {0.0, 0.35, 1.0}) {
      const double c = std::cos(phi), s = std::sin(phi);
      // Preparation 0/1 each with weight 1/2; label 0/1 with weights p, 1-p.
      const std::vector<int> dims{2, 2};
      std::vector<std::pair<double, DensityMatrixd>> parts;
      parts.emplace_back(0.5 * p, density_from_pure(PureStated(dims, branch(1, 0, 0, 0))));
      parts.emplace_back(0.5 * (1 - p),
                         density_from_pure(PureStated(dims, branch(0, 0, -1, 0))));
      parts.emplace_back(0.5 * p, density_from_pure(PureStated(dims, branch(0, s, c, 0))));
      parts.emplace_back(0.5 * (1 - p),
                         density_from_pure(PureStated(dims, branch(c, 0, 0, -s))));
      const DensityMatrixd want =
          mix(std::span<const std::pair<double, DensityMatrixd>>(parts));
      const DensityMatrixd got = joint_state_after_coding(phi, p);
      CHECK(max_abs_diff(got.matrix(), want.matrix()) < 1e-14);
    }
  }
  CHECK_THROWS_AS(joint_state_after_coding(0.1, -0.2), std::invalid_argument);
}

TEST_CASE("ancilla marginal is diagonal and blind to the coding statistics") {
  const double phi = 0.61;
  const auto [lo_want, hi_want] = ancilla_spectrum(phi);
  CHECK(hi_want == doctest::Approx(detection_rate(phi)).epsilon(1e-15));
  Eigen::MatrixXcd want(2, 2);
  want << lo_want, 0, 0, hi_want;
  for (const double p : {0.0, 0.3, 0.5, 0.77, 1.0}) {
    const DensityMatrixd anc = ancilla_state(phi, p);
    CHECK(max_abs_diff(anc.matrix(), want) < 1e-12);
  }
}

TEST_CASE("ancilla entropy reproduces the information ceiling") {
  auto rng = make_engine(40, Stream::round, 0);
  for (int i = 0; i < 25; ++i) {
    const double phi = uniform01(rng) * std::numbers::pi / 4;
    const double p = uniform01(rng);
    const DensityMatrixd anc = ancilla_state(phi, p);
    CHECK(std::abs(von_neumann_entropy(anc) - eve_information(phi)) < 1e-10);
  }
}

TEST_CASE("the mean state leaving the dealer or any coder is featureless") {
  const Eigen::MatrixXcd half = 0.5 * Eigen::MatrixXcd::Identity(2, 2);
  CHECK(max_abs_diff(preparation_average().matrix(), half) < 1e-12);
  for (const double p : {0.0, 0.3, 0.5, 0.77, 1.0})
    CHECK(max_abs_diff(coded_average(p).matrix(), half) < 1e-12);
  CHECK_THROWS_AS(coded_average(1.2), std::invalid_argument);
}

TEST_CASE("simulated attack reproduces the closed-form error rates") {
  ProtocolConfig cfg;
  cfg.num_agents = 2;
  cfg.rounds = 40000;
  cfg.p_control = 0.5;
  cfg.f_sample2 = 0.1;
  cfg.rng_seed = 71;
  AttackConfig attack;
  attack.phi = std::numbers::pi / 4;

  const auto [transcript, out] = simulate_attack(cfg, attack);
  CHECK(transcript.rounds.size() == static_cast<std::size_t>(cfg.rounds));
  CHECK(out.attacked_rounds > 0);
  CHECK(out.attacked_rounds < cfg.rounds);

  REQUIRE(out.z_conclusive > 500);
  REQUIRE(out.x_conclusive > 500);
  const double z_th = detection_rate(attack.phi);
  const double x_th = x_basis_detection_rate(attack.phi);
  const double z_se = std::sqrt(z_th * (1 - z_th) / static_cast<double>(out.z_conclusive));
  const double x_se = std::sqrt(x_th * (1 - x_th) / static_cast<double>(out.x_conclusive));
  CHECK(std::abs(out.z_error_rate - z_th) < 3 * z_se);
  CHECK(std::abs(out.x_error_rate - x_th) < 3 * x_se);

  // The sampled information stays under the ceiling (within noise), and the
  // correlation with the downstream labels is real.
  CHECK(out.guess_pairs > 0);
  CHECK(out.mutual_information >= 0.0);
  CHECK(out.mutual_information <=
        eve_information(attack.phi) + 3 * out.mutual_information_se + 1e-6);
  long diag = out.counts[0][0] + out.counts[1][1];
  CHECK(diag != out.guess_pairs - diag);  // not a coin flip
}

TEST_CASE("every round codes when controls are disabled, and all are attacked") {
  ProtocolConfig cfg;
  cfg.num_agents = 2;
  cfg.rounds = 500;
  cfg.p_control = 0.0;
  cfg.rng_seed = 6;
  AttackConfig attack;
  attack.phi = 0.4;
  const auto [transcript, out] = simulate_attack(cfg, attack);
  CHECK(out.attacked_rounds == cfg.rounds);
  CHECK(out.guess_pairs == cfg.rounds);
  CHECK(out.z_conclusive == 0);
  CHECK(out.x_conclusive == 0);
  for (const auto& rec : transcript.rounds) CHECK(rec.returned);
}

TEST_CASE("a zero-angle attack is invisible in the transcript") {
  ProtocolConfig cfg;
  cfg.num_agents = 3;
  cfg.rounds = 2000;
  cfg.p_control = 0.3;
  cfg.rng_seed = 13;
  AttackConfig attack;
  attack.phi = 0.0;

  const SessionTranscript honest = run_session(cfg);
  const auto [attacked, out] = simulate_attack(cfg, attack);
  REQUIRE(honest.rounds.size() == attacked.rounds.size());
  for (std::size_t i = 0; i < honest.rounds.size(); ++i)
    CHECK(honest.rounds[i] == attacked.rounds[i]);
  CHECK(out.z_errors == 0);
  CHECK(out.x_errors == 0);
  // Anything the ancilla says at phi = 0 is uncorrelated noise with no reach.
  CHECK(std::abs(von_neumann_entropy(ancilla_state(0.0, 0.5))) < 1e-12);
}

TEST_CASE("simulate_attack validates its inputs") {
  ProtocolConfig cfg;
  AttackConfig attack;
  cfg.variant = Variant::Qudit;
  CHECK_THROWS_AS(simulate_attack(cfg, attack), std::invalid_argument);
  cfg = {};
  attack.intercept_leg = 0;
  CHECK_THROWS_AS(simulate_attack(cfg, attack), std::invalid_argument);
}
