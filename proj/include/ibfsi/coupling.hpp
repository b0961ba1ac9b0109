// Lagrangian-Eulerian interaction operators. Nodal coefficient fields are
// sampled at per-element Gaussian interaction points and transferred to MAC
// faces through the regularized delta kernels (force prolongation S, surface
// variant over boundary facets), and back through the adjoint restriction
// J = M^{-1} S^T h^2, which preserves the discrete power identity
// (F, J u)_X = (S F, u)_x.
#pragma once

#include "ibfsi/fem_mesh.hpp"
#include "ibfsi/kernels.hpp"
#include "ibfsi/mac_grid.hpp"

#include <map>
#include <vector>

namespace ibfsi {

// Per-entity (element or boundary facet) quadrature for interaction points.
// Point counts follow the deformed geometry: n per direction is the smallest
// count giving `density` points per grid cell across the entity's deformed
// bounding-box extent, floored at 2. Weights carry the reference measure, so
// each entity's weights sum to its reference area / arc length.
struct InteractionRule {
  ElementKind kind = ElementKind::q1_quad;
  bool        on_facets = false;
  Real        h = 0, density = 3.0, rebuild_threshold = 0.1;

  std::vector<int>          order;        // points per direction, per entity
  std::vector<VecX>         weights;      // reference-measure weights
  std::vector<Real>         built_extent; // deformed extent at build time
  std::map<int, ShapeCache> shapes;       // unit-element shapes keyed by order

  int n_entities() const { return static_cast<int>(order.size()); }
  int total_points() const;
};

// Rule over mesh.elems (volume forces and velocity restriction).
InteractionRule build_interaction_rule(const FeMesh& mesh, const Config& x,
                                       Real h, Real density = 3.0,
                                       Real rebuild_threshold = 0.1);

// Rule over mesh.facets (transmission forces).
InteractionRule build_boundary_interaction_rule(const FeMesh& mesh,
                                                const Config& x, Real h,
                                                Real density = 3.0,
                                                Real rebuild_threshold = 0.1);

// True when any entity's deformed extent grew past the rebuild threshold.
bool needs_rebuild(const InteractionRule& rule, const FeMesh& mesh,
                   const Config& x);

// f_face = sum_Q F(X_Q) delta_h(x_face - chi(X_Q)) w_Q. `values` holds nodal
// coefficients (all nodes). Throws when an interaction point leaves the
// domain through a non-periodic side, naming the element.
StaggeredField spread_volume(const InteractionRule& rule, const FeMesh& mesh,
                             const Config& x, const NodeArray& values,
                             const GridSpec& grid, KernelKind kernel);

// Same over boundary facets; `traction` holds trace-space coefficients.
StaggeredField spread_surface(const InteractionRule& rule, const FeMesh& mesh,
                              const Config& x, const NodeArray& traction,
                              const GridSpec& grid, KernelKind kernel);

// d chi/dt = M^{-1} rhs with rhs_m = sum_Q phi_m(X_Q) U_IB(chi(X_Q)) w_Q and
// U_IB the kernel interpolant of u.
NodeArray restrict_velocity(const InteractionRule& rule, const FeMesh& mesh,
                            const Config& x, const StaggeredField& u,
                            const MassSolver& mass, const GridSpec& grid,
                            KernelKind kernel);

// Kernel interpolant of one staggered field at an arbitrary point.
Vec2 interp_velocity(const StaggeredField& u, const GridSpec& grid,
                     KernelKind kernel, Vec2 p);

} // namespace ibfsi
