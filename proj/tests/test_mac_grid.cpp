#include "doctest.h"
#include "ibfsi/mac_grid.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace ibfsi;

namespace {

GridSpec periodic_unit(int n) {
  GridSpec g;
  g.n1 = g.n2 = n;
  g.h         = 1.0 / n;
  return g;
}

GridSpec cavity_unit(int n) {
  GridSpec g;
  g.n1 = g.n2 = n;
  g.h         = 1.0 / n;
  g.bc        = {SideBc::velocity, SideBc::velocity, SideBc::velocity,
                 SideBc::velocity};
  return g;
}

template <class F1, class F2>
StaggeredField fill(const GridSpec& g, F1 f1, F2 f2) {
  StaggeredField u = StaggeredField::zeros(g);
  for (int j = 0; j < u.s2; ++j)
    for (int i = 0; i < u.s1; ++i) u.at1(i, j) = f1(g.u1_pos(i, j));
  for (int j = 0; j < u.t2; ++j)
    for (int i = 0; i < u.t1; ++i) u.at2(i, j) = f2(g.u2_pos(i, j));
  return u;
}

template <class F> CellField fill_cells(const GridSpec& g, F f) {
  CellField p = CellField::zeros(g);
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) p(i, j) = f(g.cell_center(i, j));
  return p;
}

StaggeredField random_staggered(const GridSpec& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  StaggeredField u = StaggeredField::zeros(g);
  for (auto& v : u.u1) v = d(rng);
  for (auto& v : u.u2) v = d(rng);
  return u;
}

} // namespace

TEST_CASE("spec validation and sizes") {
  GridSpec g = periodic_unit(8);
  g.validate();
  CHECK(g.u1_n1() == 8);
  CHECK(g.u2_n2() == 8);

  GridSpec c = cavity_unit(8);
  c.validate();
  CHECK(c.u1_n1() == 9);
  CHECK(c.u2_n2() == 9);
  CHECK(c.all_dirichlet());

  GridSpec bad = periodic_unit(2);
  CHECK_THROWS(bad.validate());
  bad   = periodic_unit(8);
  bad.h = 0;
  CHECK_THROWS(bad.validate());
  bad                 = periodic_unit(8);
  bad.bc[side_x_hi]   = SideBc::velocity;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("divergence of constant and linear fields") {
  for (const GridSpec& g : {periodic_unit(16), cavity_unit(16)}) {
    StaggeredField ones = fill(g, [](Vec2) { return 1.0; }, [](Vec2) { return 1.0; });
    CellField      d    = divergence(ones, g);
    CHECK(norms(d, g).linf == 0.0);
  }

  // u = (x1, -x2) is exactly divergence free for the centered differences.
  GridSpec       g = cavity_unit(16);
  StaggeredField u = fill(g, [](Vec2 x) { return x.x(); }, [](Vec2 x) { return -x.y(); });
  CHECK(norms(divergence(u, g), g).linf <= 1e-14);

  StaggeredField v = fill(g, [](Vec2 x) { return x.x(); }, [](Vec2 x) { return x.y(); });
  CellField      d = divergence(v, g);
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) CHECK(d(i, j) == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("gradient of linear pressure") {
  GridSpec       g  = cavity_unit(16);
  CellField      p  = fill_cells(g, [](Vec2 x) { return 3 * x.x() - 2 * x.y(); });
  StaggeredField gr = gradient(p, g);
  for (int j = 0; j < gr.s2; ++j)
    for (int i = 0; i < gr.s1; ++i) {
      if (i == 0 || i == g.n1)
        CHECK(gr.at1(i, j) == 0.0); // boundary faces not defined
      else
        CHECK(gr.at1(i, j) == doctest::Approx(3.0).epsilon(1e-13));
    }
  for (int j = 1; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i)
      CHECK(gr.at2(i, j) == doctest::Approx(-2.0).epsilon(1e-13));
}

TEST_CASE("gradient/divergence adjointness") {
  // (grad p, u)_x = -(p, div u) exactly, periodic and with vanishing
  // boundary-normal velocity on Dirichlet boxes.
  {
    GridSpec       g = periodic_unit(12);
    StaggeredField u = random_staggered(g, 3u);
    CellField      p = CellField::zeros(g);
    std::mt19937   rng(5u);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (auto& v : p.data) v = d(rng);
    const Real a = inner_product(gradient(p, g), u, g);
    const Real b = -inner_product(p, divergence(u, g), g);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
  {
    GridSpec       g = cavity_unit(12);
    StaggeredField u = random_staggered(g, 7u);
    for (int j = 0; j < u.s2; ++j) u.at1(0, j) = u.at1(u.s1 - 1, j) = 0;
    for (int i = 0; i < u.t1; ++i) u.at2(i, 0) = u.at2(i, u.t2 - 1) = 0;
    CellField    p = CellField::zeros(g);
    std::mt19937 rng(9u);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (auto& v : p.data) v = d(rng);
    const Real a = inner_product(gradient(p, g), u, g);
    const Real b = -inner_product(p, divergence(u, g), g);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("laplacian of a quadratic is exact") {
  GridSpec g      = periodic_unit(16);
  g.bc[side_x_lo] = g.bc[side_x_hi] = SideBc::velocity; // x non-periodic, y periodic
  StaggeredField u = fill(g, [](Vec2 x) { return x.x() * x.x(); }, [](Vec2) { return 0.0; });
  StaggeredField L = laplacian(u, g);
  for (int j = 0; j < L.s2; ++j) {
    CHECK(L.at1(0, j) == 0.0);
    CHECK(L.at1(L.s1 - 1, j) == 0.0);
    for (int i = 1; i < L.s1 - 1; ++i)
      CHECK(L.at1(i, j) == doctest::Approx(2.0).epsilon(1e-11));
  }
}

TEST_CASE("laplacian ghost closure rows, hand computed") {
  // Constant u = 1 in a no-slip cavity: mirror-odd ghosts give -2/h^2 on rows
  // adjacent to a wall, -4/h^2 in corners-adjacent entries of the normal
  // component, zero in the interior.
  GridSpec       g    = cavity_unit(8);
  const Real     ih2  = 1.0 / (g.h * g.h);
  StaggeredField ones = fill(g, [](Vec2) { return 1.0; }, [](Vec2) { return 1.0; });
  StaggeredField L    = laplacian(ones, g);
  CHECK(L.at1(3, 0) == doctest::Approx(-2 * ih2));
  CHECK(L.at1(3, g.n2 - 1) == doctest::Approx(-2 * ih2));
  CHECK(L.at1(3, 3) == doctest::Approx(0.0));
  CHECK(L.at1(0, 3) == 0.0); // pinned boundary face
  CHECK(L.at2(0, 3) == doctest::Approx(-2 * ih2));
  CHECK(L.at2(3, 3) == doctest::Approx(0.0));

  // slip walls reflect evenly: no closure contribution from a constant
  GridSpec s = cavity_unit(8);
  s.bc       = {SideBc::velocity, SideBc::velocity, SideBc::slip, SideBc::slip};
  StaggeredField Ls = laplacian(fill(s, [](Vec2) { return 1.0; }, [](Vec2) { return 1.0; }), s);
  CHECK(Ls.at1(3, 0) == doctest::Approx(0.0));
}

TEST_CASE("inner products and norms") {
  for (const GridSpec& g : {periodic_unit(10), cavity_unit(10)}) {
    StaggeredField ones = fill(g, [](Vec2) { return 1.0; }, [](Vec2) { return 1.0; });
    // each component integrates to the domain area with the 1/2 edge weights
    CHECK(inner_product(ones, ones, g) == doctest::Approx(2.0).epsilon(1e-13));
    FieldNorms n = norms(ones, g);
    CHECK(n.l1 == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(n.l2 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
    CHECK(n.linf == 1.0);

    CellField pc = fill_cells(g, [](Vec2) { return 1.0; });
    CHECK(inner_product(pc, pc, g) == doctest::Approx(1.0).epsilon(1e-13));
  }
  GridSpec       g = periodic_unit(8);
  StaggeredField u = StaggeredField::zeros(g);
  u.at1(2, 3)      = -3.0;
  CHECK(max_abs(u) == 3.0);
  FieldNorms n = norms(u, g);
  CHECK(n.l1 == doctest::Approx(3.0 * g.h * g.h));
  CHECK(n.linf == 3.0);
}

TEST_CASE("operator convergence on smooth fields is second order") {
  auto lap_err = [](int n) {
    GridSpec       g = periodic_unit(n);
    StaggeredField u = fill(
        g,
        [](Vec2 x) { return std::sin(2 * M_PI * x.x()) * std::cos(2 * M_PI * x.y()); },
        [](Vec2 x) { return std::cos(2 * M_PI * x.x()) * std::sin(2 * M_PI * x.y()); });
    StaggeredField L     = laplacian(u, g);
    const Real     eight = 8 * M_PI * M_PI;
    Real           err   = 0;
    for (int j = 0; j < L.s2; ++j)
      for (int i = 0; i < L.s1; ++i) {
        Vec2 x = g.u1_pos(i, j);
        err    = std::max(err, std::abs(L.at1(i, j) +
                                        eight * std::sin(2 * M_PI * x.x()) *
                                            std::cos(2 * M_PI * x.y())));
      }
    return err;
  };
  const Real e32 = lap_err(32), e64 = lap_err(64);
  CHECK(std::log2(e32 / e64) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("restriction reproduces linears and halves sizes") {
  GridSpec       gf = cavity_unit(16);
  StaggeredField uf =
      fill(gf, [](Vec2 x) { return 1 + 2 * x.x() - x.y(); },
           [](Vec2 x) { return -0.5 + x.x() + 3 * x.y(); });
  GridSpec       gc = gf.coarsened();
  StaggeredField uc = restrict_staggered(uf, gf);
  CHECK(uc.s1 == gc.u1_n1());
  for (int j = 0; j < uc.s2; ++j)
    for (int i = 0; i < uc.s1; ++i) {
      Vec2 x = gc.u1_pos(i, j);
      CHECK(uc.at1(i, j) == doctest::Approx(1 + 2 * x.x() - x.y()).epsilon(1e-13));
    }

  CellField pf = fill_cells(gf, [](Vec2 x) { return x.x() + x.y(); });
  CellField pc = restrict_cell(pf);
  for (int j = 0; j < gc.n2; ++j)
    for (int i = 0; i < gc.n1; ++i) {
      Vec2 x = gc.cell_center(i, j);
      CHECK(pc(i, j) == doctest::Approx(x.x() + x.y()).epsilon(1e-13));
    }
}

TEST_CASE("field dumps: format, round trip, determinism") {
  GridSpec  g = periodic_unit(4);
  CellField p = fill_cells(g, [](Vec2 x) { return std::sin(x.x() + 3.7 * x.y()); });

  std::ostringstream a, b;
  dump_field(a, "p", p, g.h);
  dump_field(b, "p", p, g.h);
  CHECK(a.str() == b.str());

  std::istringstream in(a.str());
  std::string        tok;
  in >> tok;
  CHECK(tok == "field");
  in >> tok;
  CHECK(tok == "p");
  int  n1 = 0, n2 = 0;
  Real h = 0;
  in >> tok >> n1 >> tok >> n2 >> tok >> h;
  CHECK(n1 == 4);
  CHECK(n2 == 4);
  CHECK(h == g.h); // 17 significant digits reproduce the double exactly
  for (int k = 0; k < n1 * n2; ++k) {
    Real v = 0;
    in >> v;
    CHECK(v == p.data[k]); // row-major order
  }

  std::ostringstream s;
  StaggeredField     u = StaggeredField::zeros(g);
  dump_field(s, "u", u, g.h);
  CHECK(s.str().find("field u1 ") == 0);
  CHECK(s.str().find("field u2 ") != std::string::npos);
}
