// Hyperelastic constitutive models (first Piola-Kirchhoff stress of the
// deformation gradient) and nodal force assembly in two weak forms:
//
//   partitioned  [M][F] = -int_U P grad(phi) dX + oint (P N) phi dA,
//                [M_b][T] = oint (-P N) phi dA   on the boundary trace space
//   unified      [M][G] = -int_U P grad(phi) dX
//
// plus the penalty tether force for effectively rigid structures. N is the
// outward reference normal; facet orientation supplies it as the clockwise-
// rotated tangent.
#pragma once

#include "ibfsi/fem_mesh.hpp"

#include <variant>

namespace ibfsi {

// fiber stress along the first reference axis only, P = (mu_e/w) [F11 0; F21 0]
struct AnisotropicShell {
  Real mu_e, w;
};

// P = (mu_e/w) F
struct OrthotropicShellNeoHookean {
  Real mu_e, w;
};

// P = mu_e F - p0 F^-T, stress-free reference when p0 = mu_e
struct NeoHookeanDisc {
  Real mu_e, p0;
};

using ConstitutiveModel =
    std::variant<AnisotropicShell, OrthotropicShellNeoHookean, NeoHookeanDisc>;

// throws std::invalid_argument when parameter invariants are violated
void validate(const ConstitutiveModel& model);

Real strain_energy(const ConstitutiveModel& model, const Mat2& F);
// throws when the inverse transpose is required on det F <= 0
Mat2 pk1(const ConstitutiveModel& model, const Mat2& F);

// max |pk1 - central difference of the energy| / max(1, max |pk1|), step 1e-6
Real pk1_gradient_check(const ConstitutiveModel& model, const Mat2& F);

struct RigidPenalty {
  Real   kappa = 0; // force density per displacement
  Real   eta   = 0; // force density per velocity
  Config anchor;    // configuration the tethers pull toward
};

struct LagrangianForce {
  NodeArray F; // partitioned interior force density
  NodeArray T; // transmission density, boundary-trace ordering
  NodeArray G; // unified force density
};

// weak-form right-hand sides before any mass solve
struct WeakForms {
  NodeArray volume;   // -int P grad(phi), all nodes
  NodeArray boundary; // +oint (P N) phi, nonzero only on facet nodes
  NodeArray traction; // oint (-P N) phi on the trace space
};

WeakForms assemble_weak_forms(const FeMesh& mesh, const Config& x,
                              const ConstitutiveModel& model);

LagrangianForce assemble_partitioned(const FeMesh& mesh, const Config& x,
                                     const ConstitutiveModel& model,
                                     const MassSolver& volume_mass,
                                     const MassSolver& boundary_mass);

LagrangianForce assemble_unified(const FeMesh& mesh, const Config& x,
                                 const ConstitutiveModel& model,
                                 const MassSolver& volume_mass);

// F = kappa (anchor - x) - eta v, evaluated nodewise with no mass solve
LagrangianForce rigid_force(const RigidPenalty& penalty, const Config& x,
                            const NodeArray& velocity);

} // namespace ibfsi
