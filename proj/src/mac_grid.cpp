#include "ibfsi/mac_grid.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace ibfsi {

bool GridSpec::all_dirichlet() const {
  for (int s = 0; s < 4; ++s)
    if (bc[s] != SideBc::velocity) return false;
  return true;
}

GridSpec GridSpec::coarsened() const {
  if (n1 % 2 || n2 % 2)
    throw std::invalid_argument("coarsening requires even cell counts");
  GridSpec c = *this;
  c.n1 = n1 / 2;
  c.n2 = n2 / 2;
  c.h  = 2 * h;
  return c;
}

void GridSpec::validate() const {
  if (n1 < 4 || n2 < 4)
    throw std::invalid_argument("grid needs at least 4 cells per direction");
  if (!(h > 0)) throw std::invalid_argument("cell size must be positive");
  if ((bc[side_x_lo] == SideBc::periodic) != (bc[side_x_hi] == SideBc::periodic))
    throw std::invalid_argument("periodic x1 sides must come in a pair");
  if ((bc[side_y_lo] == SideBc::periodic) != (bc[side_y_hi] == SideBc::periodic))
    throw std::invalid_argument("periodic x2 sides must come in a pair");
}

CellField CellField::zeros(const GridSpec& g) {
  CellField f;
  f.n1   = g.n1;
  f.n2   = g.n2;
  f.data = VecX::Zero(g.n1 * g.n2);
  return f;
}

StaggeredField StaggeredField::zeros(const GridSpec& g) {
  StaggeredField u;
  u.s1 = g.u1_n1();
  u.s2 = g.u1_n2();
  u.t1 = g.u2_n1();
  u.t2 = g.u2_n2();
  u.u1 = VecX::Zero(u.s1 * u.s2);
  u.u2 = VecX::Zero(u.t1 * u.t2);
  return u;
}

Real tangential_ghost(SideBc bc, Real g_t, Real interior) {
  switch (bc) {
  case SideBc::velocity:         return 2 * g_t - interior;
  case SideBc::slip:             return interior;
  case SideBc::traction_outflow: return -interior;
  default:                       return interior; // periodic sides never ask
  }
}

CellField divergence(const StaggeredField& u, const GridSpec& g) {
  CellField  d  = CellField::zeros(g);
  const Real ih = 1 / g.h;
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      const int  ip = g.periodic1() ? (i + 1) % g.n1 : i + 1;
      const int  jp = g.periodic2() ? (j + 1) % g.n2 : j + 1;
      d(i, j) = (u.at1(ip, j) - u.at1(i, j) + u.at2(i, jp) - u.at2(i, j)) * ih;
    }
  return d;
}

StaggeredField gradient(const CellField& p, const GridSpec& g) {
  StaggeredField gr = StaggeredField::zeros(g);
  const Real     ih = 1 / g.h;
  if (g.periodic1()) {
    for (int j = 0; j < g.n2; ++j)
      for (int i = 0; i < g.n1; ++i)
        gr.at1(i, j) = (p(i, j) - p((i + g.n1 - 1) % g.n1, j)) * ih;
  } else {
    for (int j = 0; j < g.n2; ++j)
      for (int i = 1; i < g.n1; ++i)
        gr.at1(i, j) = (p(i, j) - p(i - 1, j)) * ih;
  }
  if (g.periodic2()) {
    for (int j = 0; j < g.n2; ++j)
      for (int i = 0; i < g.n1; ++i)
        gr.at2(i, j) = (p(i, j) - p(i, (j + g.n2 - 1) % g.n2)) * ih;
  } else {
    for (int j = 1; j < g.n2; ++j)
      for (int i = 0; i < g.n1; ++i)
        gr.at2(i, j) = (p(i, j) - p(i, j - 1)) * ih;
  }
  return gr;
}

StaggeredField laplacian(const StaggeredField& u, const GridSpec& g) {
  StaggeredField L   = StaggeredField::zeros(g);
  const Real     ih2 = 1 / (g.h * g.h);

  // u1: second differences in x1 along the face line, tangential ghosts in x2.
  const int ilo = g.periodic1() ? 0 : 1;
  const int ihi = g.periodic1() ? u.s1 : u.s1 - 1;
  for (int j = 0; j < u.s2; ++j)
    for (int i = ilo; i < ihi; ++i) {
      const Real c  = u.at1(i, j);
      const Real xm = g.periodic1() ? u.at1((i + u.s1 - 1) % u.s1, j) : u.at1(i - 1, j);
      const Real xp = g.periodic1() ? u.at1((i + 1) % u.s1, j) : u.at1(i + 1, j);
      Real       ym, yp;
      if (g.periodic2()) {
        ym = u.at1(i, (j + u.s2 - 1) % u.s2);
        yp = u.at1(i, (j + 1) % u.s2);
      } else {
        ym = j > 0 ? u.at1(i, j - 1)
                   : tangential_ghost(g.bc[side_y_lo], g.bc_value[side_y_lo].x(), c);
        yp = j < u.s2 - 1
                 ? u.at1(i, j + 1)
                 : tangential_ghost(g.bc[side_y_hi], g.bc_value[side_y_hi].x(), c);
      }
      L.at1(i, j) = (xm + xp + ym + yp - 4 * c) * ih2;
    }

  // u2 mirrors the roles of the two directions.
  const int jlo = g.periodic2() ? 0 : 1;
  const int jhi = g.periodic2() ? u.t2 : u.t2 - 1;
  for (int j = jlo; j < jhi; ++j)
    for (int i = 0; i < u.t1; ++i) {
      const Real c  = u.at2(i, j);
      const Real ym = g.periodic2() ? u.at2(i, (j + u.t2 - 1) % u.t2) : u.at2(i, j - 1);
      const Real yp = g.periodic2() ? u.at2(i, (j + 1) % u.t2) : u.at2(i, j + 1);
      Real       xm, xp;
      if (g.periodic1()) {
        xm = u.at2((i + u.t1 - 1) % u.t1, j);
        xp = u.at2((i + 1) % u.t1, j);
      } else {
        xm = i > 0 ? u.at2(i - 1, j)
                   : tangential_ghost(g.bc[side_x_lo], g.bc_value[side_x_lo].y(), c);
        xp = i < u.t1 - 1
                 ? u.at2(i + 1, j)
                 : tangential_ghost(g.bc[side_x_hi], g.bc_value[side_x_hi].y(), c);
      }
      L.at2(i, j) = (xm + xp + ym + yp - 4 * c) * ih2;
    }
  return L;
}

namespace {
// Trapezoid-consistent face weight: 1/2 when the face lies on a non-periodic
// side.
inline Real w_u1(const GridSpec& g, int i) {
  return (!g.periodic1() && (i == 0 || i == g.n1)) ? 0.5 : 1.0;
}
inline Real w_u2(const GridSpec& g, int j) {
  return (!g.periodic2() && (j == 0 || j == g.n2)) ? 0.5 : 1.0;
}
} // namespace

Real inner_product(const StaggeredField& u, const StaggeredField& v,
                   const GridSpec& g) {
  const Real h2  = g.h * g.h;
  Real       acc = 0;
  for (int j = 0; j < u.s2; ++j)
    for (int i = 0; i < u.s1; ++i)
      acc += w_u1(g, i) * u.at1(i, j) * v.at1(i, j);
  for (int j = 0; j < u.t2; ++j)
    for (int i = 0; i < u.t1; ++i)
      acc += w_u2(g, j) * u.at2(i, j) * v.at2(i, j);
  return acc * h2;
}

Real inner_product(const CellField& p, const CellField& q, const GridSpec& g) {
  return p.data.dot(q.data) * g.h * g.h;
}

FieldNorms norms(const StaggeredField& u, const GridSpec& g) {
  const Real h2 = g.h * g.h;
  FieldNorms n;
  Real       sq = 0;
  for (int j = 0; j < u.s2; ++j)
    for (int i = 0; i < u.s1; ++i) {
      const Real w = w_u1(g, i), x = u.at1(i, j);
      n.l1 += w * std::abs(x);
      sq += w * x * x;
      n.linf = std::max(n.linf, std::abs(x));
    }
  for (int j = 0; j < u.t2; ++j)
    for (int i = 0; i < u.t1; ++i) {
      const Real w = w_u2(g, j), x = u.at2(i, j);
      n.l1 += w * std::abs(x);
      sq += w * x * x;
      n.linf = std::max(n.linf, std::abs(x));
    }
  n.l1 *= h2;
  n.l2 = std::sqrt(sq * h2);
  return n;
}

FieldNorms norms(const CellField& p, const GridSpec& g) {
  const Real h2 = g.h * g.h;
  FieldNorms n;
  n.l1   = p.data.cwiseAbs().sum() * h2;
  n.l2   = std::sqrt(p.data.squaredNorm() * h2);
  n.linf = p.data.size() ? p.data.cwiseAbs().maxCoeff() : 0;
  return n;
}

Real max_abs(const StaggeredField& u) {
  Real m = 0;
  if (u.u1.size()) m = u.u1.cwiseAbs().maxCoeff();
  if (u.u2.size()) m = std::max(m, u.u2.cwiseAbs().maxCoeff());
  return m;
}

CellField restrict_cell(const CellField& fine) {
  if (fine.n1 % 2 || fine.n2 % 2)
    throw std::invalid_argument("restriction requires even cell counts");
  CellField c;
  c.n1   = fine.n1 / 2;
  c.n2   = fine.n2 / 2;
  c.data = VecX::Zero(c.n1 * c.n2);
  for (int J = 0; J < c.n2; ++J)
    for (int I = 0; I < c.n1; ++I)
      c(I, J) = 0.25 * (fine(2 * I, 2 * J) + fine(2 * I + 1, 2 * J) +
                        fine(2 * I, 2 * J + 1) + fine(2 * I + 1, 2 * J + 1));
  return c;
}

StaggeredField restrict_staggered(const StaggeredField& fine,
                                  const GridSpec&       fine_spec) {
  GridSpec       cs = fine_spec.coarsened();
  StaggeredField c  = StaggeredField::zeros(cs);
  for (int J = 0; J < c.s2; ++J)
    for (int I = 0; I < c.s1; ++I)
      c.at1(I, J) = 0.5 * (fine.at1(2 * I, 2 * J) + fine.at1(2 * I, 2 * J + 1));
  for (int J = 0; J < c.t2; ++J)
    for (int I = 0; I < c.t1; ++I)
      c.at2(I, J) = 0.5 * (fine.at2(2 * I, 2 * J) + fine.at2(2 * I + 1, 2 * J));
  return c;
}

namespace {
void dump_values(std::ostream& os, std::string_view name, const VecX& v, int n1,
                 int n2, Real h) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", h);
  os << "field " << name << " n1 " << n1 << " n2 " << n2 << " h " << buf << "\n";
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", v[k]);
    os << buf << "\n";
  }
}
} // namespace

void dump_field(std::ostream& os, std::string_view name, const CellField& f,
                Real h) {
  dump_values(os, name, f.data, f.n1, f.n2, h);
}

void dump_field(std::ostream& os, std::string_view base,
                const StaggeredField& u, Real h) {
  dump_values(os, std::string(base) + "1", u.u1, u.s1, u.s2, h);
  dump_values(os, std::string(base) + "2", u.u2, u.t1, u.t2, h);
}

} // namespace ibfsi
