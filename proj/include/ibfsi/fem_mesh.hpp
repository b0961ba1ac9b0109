// Nodal finite-element meshes for the structure: bilinear quads (shells on a
// periodic reference strip), quadratic triangles (solid discs, isoparametric
// curved boundary), and quadratic edge segments (closed curves). Nodes carry
// reference coordinates; a Config holds current positions chi(X).
//
// Boundary facets are stored so that the clockwise-rotated reference tangent
// (t2, -t1) points out of the reference domain.
#pragma once

#include "ibfsi/types.hpp"

#include <Eigen/Sparse>
#include <iosfwd>
#include <vector>

namespace ibfsi {

enum class ElementKind { q1_quad, p2_tri, p2_edge, p1_edge };

int nodes_per_element(ElementKind kind); // 4, 6, 3, 2
int element_dim(ElementKind kind);       // 2, 2, 1, 1

// Shape values and reference-coordinate gradients at one point. phi is
// resized to the node count, dphi to (nodes x dim).
void shape_eval(ElementKind kind, Real xi, Real eta, VecX& phi, MatX& dphi);

struct QuadRule {
  MatX pts; // npts x 2, second column unused for 1D kinds
  VecX w;   // reference-measure weights
  int  npts() const { return static_cast<int>(w.size()); }
};

inline constexpr int max_gauss_points = 48;

// Gauss-Legendre on [0,1]; throws beyond max_gauss_points.
QuadRule gauss_legendre_1d(int n);
// Default assembly rules: q1 2x2 Gauss, p2 triangle 6-point degree-4,
// p2 edge 3-point Gauss.
QuadRule mass_rule(ElementKind kind);
// Interaction-point rules with n points per direction.
QuadRule tensor_rule_quad(int n);
QuadRule collapsed_rule_tri(int n); // Duffy map of the tensor rule
QuadRule rule_for(ElementKind kind, int n);

// Basis evaluations cached at the points of one rule.
struct ShapeCache {
  MatX phi;       // npts x nodes
  MatX dxi, deta; // npts x nodes (deta zero-width for 1D kinds)
};
ShapeCache eval_shapes(ElementKind kind, const QuadRule& rule);

using Config = NodeArray;

struct FeMesh {
  ElementKind     kind;
  ElementKind     facet_kind = ElementKind::p1_edge;
  NodeArray       nodes;  // reference coordinates
  Eigen::MatrixXi elems;  // n_elems x nodes_per_element
  Eigen::MatrixXi facets; // boundary facets, may be empty

  // period of the first reference coordinate (0 = not periodic); element
  // geometry unwraps node coordinates across the seam
  Real ref_period1 = 0;

  std::vector<int> boundary_nodes; // sorted unique facet nodes
  std::vector<int> trace_index;    // node -> position in boundary_nodes, or -1

  int n_nodes() const { return static_cast<int>(nodes.rows()); }
  int n_elems() const { return static_cast<int>(elems.rows()); }
  int n_facets() const { return static_cast<int>(facets.rows()); }

  void finalize(); // builds boundary_nodes / trace_index
};

// Annular shell strip, reference domain [0, 2 pi R] x [0, w], periodic in the
// first coordinate. m_circ x m_rad bilinear elements, facets on both edges.
FeMesh shell_mesh(int m_circ, int m_rad, Real R, Real w);

// Solid disc of quadratic triangles from concentric rings plus one Lloyd
// smoothing pass of the ring vertices; boundary midside nodes projected onto
// the circle. target_spacing is the quadratic node spacing. Throws on
// infeasible spacing (<= 0 or >= radius).
FeMesh disc_mesh(Vec2 center, Real radius, Real target_spacing);

// Closed circle of quadratic edge elements, node spacing ~ target_spacing.
// Node angles carry a deterministic third-of-a-spacing offset so the discrete
// point set has no mirror symmetry about the axes.
FeMesh circle_mesh(Vec2 center, Real radius, Real target_spacing);

// Reference coordinates of one element's nodes, seam-unwrapped about the
// first node when period1 > 0.
MatX element_ref_nodes(const FeMesh& mesh, int elem, Real period1);

// Deformation gradient F = sum_l x_l  (grad_X phi_l)^T at the points of
// `rule` on one element (2D reference kinds only).
void deformation_gradient(const FeMesh& mesh, const Config& x, int elem,
                          const QuadRule& rule, const ShapeCache& sc,
                          std::vector<Mat2>& F);

using SparseMat = Eigen::SparseMatrix<Real>;

SparseMat mass_matrix(const FeMesh& mesh);          // consistent, scalar
SparseMat boundary_mass_matrix(const FeMesh& mesh); // on the trace space

enum class MassMode { consistent, lumped };

// Per-component solves with [M]; consistent mode runs Jacobi-preconditioned
// CG to relative residual 1e-12 (deterministic fixed-order reductions).
class MassSolver {
public:
  MassSolver(const FeMesh& mesh, MassMode mode = MassMode::consistent);
  explicit MassSolver(SparseMat M, MassMode mode = MassMode::consistent);

  VecX solve(const VecX& rhs) const;
  // column-wise solve for nodal vector fields
  NodeArray solve(const NodeArray& rhs) const;
  const SparseMat& matrix() const { return m_; }
  MassMode mode() const { return mode_; }

private:
  SparseMat m_;
  VecX      inv_diag_;   // Jacobi preconditioner / lumped inverse
  MassMode  mode_;
};

// [U]^T [M] [V] summed over the two components.
Real lagrangian_inner_product(const SparseMat& M, const NodeArray& U,
                              const NodeArray& V);

// Total reference measure, sum_e int det(J_ref); for 1D kinds the arc length.
Real mesh_measure(const FeMesh& mesh);

// Deformed measure of a configuration, sum_e int det F det(J_ref) (2D kinds).
Real config_measure(const FeMesh& mesh, const Config& x);

// Plain-text dump:
//   mesh <kind> nodes <N> elems <E> facets <F>
//   node <Xref1> <Xref2> <x1> <x2>   (N lines, 17 significant digits)
//   elem <ids...>                     (E lines)
//   facet <ids...>                    (F lines)
void dump_mesh(std::ostream& os, const FeMesh& mesh, const Config& x);

const char* element_kind_name(ElementKind kind);

} // namespace ibfsi
