// Advection operator: exactness on constant and linear fields, second order
// on smooth periodic fields, boundary closure behavior.
#include "doctest.h"

#include "ibfsi/advect.hpp"

#include <cmath>

using namespace ibfsi;

namespace {

const Real pi = 3.14159265358979323846;

GridSpec periodic_box(int n) {
  GridSpec g;
  g.n1 = g.n2 = n;
  g.h = Real(1) / n;
  g.bc.fill(SideBc::periodic);
  return g;
}

GridSpec velocity_box(int n, Vec2 value = Vec2::Zero()) {
  GridSpec g;
  g.n1 = g.n2 = n;
  g.h = Real(1) / n;
  g.bc.fill(SideBc::velocity);
  g.bc_value.fill(value);
  return g;
}

template <class F1, class F2>
StaggeredField fill(const GridSpec& g, F1&& f1, F2&& f2) {
  StaggeredField u = StaggeredField::zeros(g);
  for (int j = 0; j < u.s2; ++j)
    for (int i = 0; i < u.s1; ++i) u.at1(i, j) = f1(g.u1_pos(i, j));
  for (int j = 0; j < u.t2; ++j)
    for (int i = 0; i < u.t1; ++i) u.at2(i, j) = f2(g.u2_pos(i, j));
  return u;
}

// l1 norm of (advect(u) - exact) over all faces, h^2 weighted.
template <class F1, class F2>
Real advect_l1_error(const GridSpec& g, const StaggeredField& u, F1&& e1, F2&& e2) {
  StaggeredField a = advect(u, g);
  Real s = 0;
  for (int j = 0; j < a.s2; ++j)
    for (int i = 0; i < a.s1; ++i) s += std::abs(a.at1(i, j) - e1(g.u1_pos(i, j)));
  for (int j = 0; j < a.t2; ++j)
    for (int i = 0; i < a.t1; ++i) s += std::abs(a.at2(i, j) - e2(g.u2_pos(i, j)));
  return s * g.h * g.h;
}

} // namespace

TEST_CASE("constant velocity advects to zero") {
  const Vec2 c(1.7, -0.3);
  auto f1 = [&](Vec2) { return c.x(); };
  auto f2 = [&](Vec2) { return c.y(); };
  for (GridSpec g : {periodic_box(16), velocity_box(16, c)}) {
    StaggeredField u = fill(g, f1, f2);
    StaggeredField a = advect(u, g);
    CHECK(max_abs(a) == 0.0);
  }
}

TEST_CASE("linear field u = (x1, -x2) gives (x1, x2) away from boundaries") {
  const int n = 16;
  GridSpec g = velocity_box(n);
  StaggeredField u = fill(
      g, [](Vec2 p) { return p.x(); }, [](Vec2 p) { return -p.y(); });
  StaggeredField a = advect(u, g);
  for (int j = 4; j < n - 4; ++j)
    for (int i = 4; i < n - 4; ++i) {
      CHECK(a.at1(i, j) == doctest::Approx(g.u1_pos(i, j).x()).epsilon(1e-13));
      CHECK(a.at2(i, j) == doctest::Approx(g.u2_pos(i, j).y()).epsilon(1e-13));
    }
}

TEST_CASE("smooth periodic profile converges at second order, self term") {
  // u1 = c + a sin(2 pi x1), u2 = 0: u . grad u equals (u1 a 2 pi cos(2 pi x1), 0).
  const Real c = 0.7, amp = 0.3;
  auto f1 = [&](Vec2 p) { return c + amp * std::sin(2 * pi * p.x()); };
  auto e1 = [&](Vec2 p) {
    return (c + amp * std::sin(2 * pi * p.x())) * amp * 2 * pi * std::cos(2 * pi * p.x());
  };
  auto zero = [](Vec2) { return 0.0; };
  Real err[3];
  int k = 0;
  for (int n : {64, 128, 256}) {
    GridSpec g = periodic_box(n);
    err[k++] = advect_l1_error(g, fill(g, f1, zero), e1, zero);
  }
  CHECK(std::log2(err[0] / err[1]) >= 2.0);
  CHECK(std::log2(err[1] / err[2]) >= 2.0);
}

TEST_CASE("smooth periodic profile converges at second order, cross terms") {
  // u1 = sin(2 pi x2), u2 = sin(2 pi x1): each component is advected purely by
  // the other, exercising the transverse interface averaging.
  auto f1 = [](Vec2 p) { return std::sin(2 * pi * p.y()); };
  auto f2 = [](Vec2 p) { return std::sin(2 * pi * p.x()); };
  auto e1 = [](Vec2 p) { return std::sin(2 * pi * p.x()) * 2 * pi * std::cos(2 * pi * p.y()); };
  auto e2 = [](Vec2 p) { return std::sin(2 * pi * p.y()) * 2 * pi * std::cos(2 * pi * p.x()); };
  Real err[3];
  int k = 0;
  for (int n : {64, 128, 256}) {
    GridSpec g = periodic_box(n);
    err[k++] = advect_l1_error(g, fill(g, f1, f2), e1, e2);
  }
  CHECK(std::log2(err[0] / err[1]) >= 2.0);
  CHECK(std::log2(err[1] / err[2]) >= 2.0);
}

TEST_CASE("pinned boundary faces return zero in wall boxes") {
  const int n = 12;
  for (SideBc wall : {SideBc::velocity, SideBc::slip}) {
    GridSpec g = periodic_box(n);
    g.bc.fill(wall);
    StaggeredField u = fill(
        g, [](Vec2 p) { return std::sin(2 * pi * p.x()) * std::cos(2 * pi * p.y()); },
        [](Vec2 p) { return -std::cos(2 * pi * p.x()) * std::sin(2 * pi * p.y()); });
    for (int j = 0; j < u.s2; ++j) {
      u.at1(0, j) = 0;
      u.at1(n, j) = 0;
    }
    for (int i = 0; i < u.t1; ++i) {
      u.at2(i, 0) = 0;
      u.at2(i, n) = 0;
    }
    StaggeredField a = advect(u, g);
    for (int j = 0; j < a.s2; ++j) {
      CHECK(a.at1(0, j) == 0.0);
      CHECK(a.at1(n, j) == 0.0);
    }
    for (int i = 0; i < a.t1; ++i) {
      CHECK(a.at2(i, 0) == 0.0);
      CHECK(a.at2(i, n) == 0.0);
    }
    CHECK(std::isfinite(max_abs(a)));
  }
}

TEST_CASE("outflow side keeps a zero normal gradient closure") {
  // Uniform flow through an inflow/outflow channel stays advection free.
  const int n = 16;
  GridSpec g;
  g.n1 = g.n2 = n;
  g.h = Real(1) / n;
  g.bc = {SideBc::velocity, SideBc::traction_outflow, SideBc::slip, SideBc::slip};
  g.bc_value[side_x_lo] = Vec2(1, 0);
  StaggeredField u = fill(
      g, [](Vec2) { return 1.0; }, [](Vec2) { return 0.0; });
  StaggeredField a = advect(u, g);
  CHECK(max_abs(a) == 0.0);
}
