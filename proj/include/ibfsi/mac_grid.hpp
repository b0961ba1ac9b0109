// Staggered marker-and-cell grid on a rectangular box with square cells.
//
// Layout: pressure at cell centers (i+1/2, j+1/2)h; u1 at x1-faces
// (i, j+1/2)h; u2 at x2-faces (i+1/2, j)h, all offsets from `origin`.
// On periodic axes the face on the high side is identified with index 0,
// so u1 holds n1 x n2 entries; on non-periodic axes it holds (n1+1) x n2
// and the two boundary columns lie exactly on the domain sides.
//
// Boundary closures (non-periodic sides), used by the Laplacian here and by
// the advection and saddle operators:
//   velocity (Dirichlet g):   normal faces pinned to g.n; tangential ghosts
//                             mirror-odd about the value, ghost = 2 g.t - u.
//   slip (u.n = 0, tangential traction free): normal faces pinned to 0;
//                             tangential ghosts even, ghost = u.
//   traction_outflow (normal traction 0, tangential velocity 0): tangential
//                             ghosts mirror-odd about 0; the normal boundary
//                             face is an unknown whose row in the saddle
//                             system is the discrete traction condition
//                             2 mu (u_b - u_{b-1})/h = p_adj (see saddle.cpp);
//                             standalone operators return 0 on that face.
#pragma once

#include "ibfsi/types.hpp"

#include <array>
#include <iosfwd>
#include <string_view>

namespace ibfsi {

enum class SideBc {
  periodic,
  velocity,         // Dirichlet velocity, value in GridSpec::bc_value
  slip,             // no penetration, tangential traction free
  traction_outflow, // zero normal traction, zero tangential velocity
};

// Side order: x1 low, x1 high, x2 low, x2 high.
enum Side { side_x_lo = 0, side_x_hi = 1, side_y_lo = 2, side_y_hi = 3 };

struct GridSpec {
  int  n1 = 0, n2 = 0; // cell counts
  Real h  = 0;         // square cells
  Vec2 origin = Vec2::Zero();
  std::array<SideBc, 4> bc{SideBc::periodic, SideBc::periodic, SideBc::periodic,
                           SideBc::periodic};
  std::array<Vec2, 4> bc_value{Vec2::Zero(), Vec2::Zero(), Vec2::Zero(),
                               Vec2::Zero()};

  bool periodic1() const { return bc[side_x_lo] == SideBc::periodic; }
  bool periodic2() const { return bc[side_y_lo] == SideBc::periodic; }
  bool all_dirichlet() const;
  Real extent1() const { return n1 * h; }
  Real extent2() const { return n2 * h; }

  int u1_n1() const { return periodic1() ? n1 : n1 + 1; }
  int u1_n2() const { return n2; }
  int u2_n1() const { return n1; }
  int u2_n2() const { return periodic2() ? n2 : n2 + 1; }

  Vec2 cell_center(int i, int j) const {
    return origin + Vec2((i + 0.5) * h, (j + 0.5) * h);
  }
  Vec2 u1_pos(int i, int j) const { return origin + Vec2(i * h, (j + 0.5) * h); }
  Vec2 u2_pos(int i, int j) const { return origin + Vec2((i + 0.5) * h, j * h); }

  GridSpec coarsened() const; // halves n1,n2, doubles h (n must be even)

  // Throws std::invalid_argument on bad cell counts, non-positive h or
  // unmatched periodic sides.
  void validate() const;
};

struct CellField {
  int  n1 = 0, n2 = 0;
  VecX data; // row-major, data[j*n1 + i]

  Real&       operator()(int i, int j)       { return data[j * n1 + i]; }
  const Real& operator()(int i, int j) const { return data[j * n1 + i]; }

  static CellField zeros(const GridSpec& g);
};

struct StaggeredField {
  int  s1 = 0, s2 = 0; // u1 entry counts per direction
  int  t1 = 0, t2 = 0; // u2 entry counts per direction
  VecX u1, u2;         // row-major like CellField

  Real&       at1(int i, int j)       { return u1[j * s1 + i]; }
  const Real& at1(int i, int j) const { return u1[j * s1 + i]; }
  Real&       at2(int i, int j)       { return u2[j * t1 + i]; }
  const Real& at2(int i, int j) const { return u2[j * t1 + i]; }

  static StaggeredField zeros(const GridSpec& g);
};

// Second-order centered operators. Outputs on pinned/undefined boundary faces
// are zero (see header comment).
CellField      divergence(const StaggeredField& u, const GridSpec& g);
StaggeredField gradient(const CellField& p, const GridSpec& g);
StaggeredField laplacian(const StaggeredField& u, const GridSpec& g);

// Discrete inner products: (u,v)_x = sum w u v h^2 with w = 1/2 on boundary
// faces of non-periodic sides, and (p,q) = sum p q h^2.
Real inner_product(const StaggeredField& u, const StaggeredField& v,
                   const GridSpec& g);
Real inner_product(const CellField& p, const CellField& q, const GridSpec& g);

struct FieldNorms {
  Real l1 = 0, l2 = 0, linf = 0;
};
FieldNorms norms(const StaggeredField& u, const GridSpec& g);
FieldNorms norms(const CellField& p, const GridSpec& g);

Real max_abs(const StaggeredField& u);

// Fine-to-coarse restriction by averaging co-located entities (4 cells per
// cell, 2 faces per face). Fine grid must have even cell counts.
CellField      restrict_cell(const CellField& fine);
StaggeredField restrict_staggered(const StaggeredField& fine,
                                  const GridSpec&       fine_spec);

// Plain-text dump, one record per component:
//   field <name> n1 <n1> n2 <n2> h <h>
// followed by one value per line, row-major, 17 significant digits.
void dump_field(std::ostream& os, std::string_view name, const CellField& f,
                Real h);
void dump_field(std::ostream& os, std::string_view base,
                const StaggeredField& u, Real h); // writes <base>1, <base>2

// Ghost value one entry beyond a non-periodic side for a component tangential
// to that side. `g_t` is the prescribed tangential boundary velocity.
Real tangential_ghost(SideBc bc, Real g_t, Real interior);

} // namespace ibfsi
