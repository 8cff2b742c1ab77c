#pragma once

namespace cqss {

// Basis the eavesdropper reads her ancilla in after the round settles.
enum class AncillaBasis { computational, x };

// Parameters of an intercept-entangle attack staged inside a session.
//
// Legs are numbered so leg i (i < num_agents) is the hop delivering the
// photon *to* agent i, and leg num_agents is the return hop to Alice. The
// adversary occupies a ring position and tampers with a later leg, so
// intercept_leg must be strictly greater than adversary_agent.
//
// phi in [0, pi/4] sets the entangling strength; phi = 0 leaves the photon
// untouched and a session with such an attack produces the same records as
// an honest one under the same seed.
struct AttackConfig {
  int adversary_agent = 0;
  int intercept_leg = 1;
  double phi = 0.0;
  AncillaBasis ancilla_basis = AncillaBasis::computational;
};

}  // namespace cqss
