#include "ibfsi/advect.hpp"

#include <vector>

namespace ibfsi {
namespace {

inline int wrap(int i, int n) { return ((i % n) + n) % n; }

// Classic parabolic limiter: flatten at extrema, otherwise pull the near
// interface in when the parabola would overshoot inside the cell.
inline void ppm_limit(Real a, Real& al, Real& ar) {
  if ((ar - a) * (a - al) <= 0) {
    al = a;
    ar = a;
    return;
  }
  const Real d = ar - al;
  const Real m = a - 0.5 * (al + ar);
  if (d * m > d * d / 6) {
    al = 3 * a - 2 * ar;
  } else if (-d * d / 6 > d * m) {
    ar = 3 * a - 2 * al;
  }
}

// Upwinded interface values of a 1D profile. A holds the profile with three
// ghost entries on each side, A[k + 3] = profile(k) for k in [-3, n + 2].
// iv[I] is the advecting velocity at interface I (position k = I - 1/2),
// I in [0, n]. val[I] receives the limited upwind value there.
void ppm_upwind(const std::vector<Real>& A, const std::vector<Real>& iv,
                int n, std::vector<Real>& q, std::vector<Real>& aL,
                std::vector<Real>& aR, std::vector<Real>& val) {
  q.resize(n + 3);
  for (int I = -1; I <= n + 1; ++I)
    q[I + 1] =
        (7.0 / 12.0) * (A[I + 2] + A[I + 3]) - (1.0 / 12.0) * (A[I + 1] + A[I + 4]);
  aL.resize(n + 2);
  aR.resize(n + 2);
  for (int c = -1; c <= n; ++c) {
    Real l = q[c + 1];
    Real r = q[c + 2];
    ppm_limit(A[c + 3], l, r);
    aL[c + 1] = l;
    aR[c + 1] = r;
  }
  val.resize(n + 1);
  for (int I = 0; I <= n; ++I) {
    const Real v = iv[I];
    if (v > 0)
      val[I] = aR[I];
    else if (v < 0)
      val[I] = aL[I + 1];
    else
      val[I] = 0.5 * (aR[I] + aL[I + 1]);
  }
}

struct Sweeps {
  std::vector<Real> A, iv, q, aL, aR, val;
};

} // namespace

StaggeredField advect(const StaggeredField& u, const GridSpec& g) {
  const int n1 = g.n1, n2 = g.n2;
  const Real h = g.h;
  const bool per1 = g.periodic1(), per2 = g.periodic2();

  // Component values with boundary closures applied. Normal-direction ghosts
  // mirror through the boundary face value (velocity, slip) or copy it
  // (traction outflow); tangential ghosts follow tangential_ghost().
  auto u1n = [&](int i, int j) -> Real { // i may stick out in x, j real
    if (per1) return u.at1(wrap(i, n1), j);
    if (i < 0) {
      if (g.bc[side_x_lo] == SideBc::traction_outflow) return u.at1(0, j);
      return 2 * u.at1(0, j) - u.at1(-i, j);
    }
    if (i > n1) {
      if (g.bc[side_x_hi] == SideBc::traction_outflow) return u.at1(n1, j);
      return 2 * u.at1(n1, j) - u.at1(2 * n1 - i, j);
    }
    return u.at1(i, j);
  };
  auto u1t = [&](int i, int j) -> Real { // j may stick out in y, i real
    if (per2) return u.at1(i, wrap(j, n2));
    if (j < 0) return tangential_ghost(g.bc[side_y_lo], g.bc_value[side_y_lo].x(), u.at1(i, -j - 1));
    if (j >= n2)
      return tangential_ghost(g.bc[side_y_hi], g.bc_value[side_y_hi].x(), u.at1(i, 2 * n2 - 1 - j));
    return u.at1(i, j);
  };
  auto u2n = [&](int i, int j) -> Real {
    if (per2) return u.at2(i, wrap(j, n2));
    if (j < 0) {
      if (g.bc[side_y_lo] == SideBc::traction_outflow) return u.at2(i, 0);
      return 2 * u.at2(i, 0) - u.at2(i, -j);
    }
    if (j > n2) {
      if (g.bc[side_y_hi] == SideBc::traction_outflow) return u.at2(i, n2);
      return 2 * u.at2(i, n2) - u.at2(i, 2 * n2 - j);
    }
    return u.at2(i, j);
  };
  auto u2t = [&](int i, int j) -> Real {
    if (per1) return u.at2(wrap(i, n1), j);
    if (i < 0) return tangential_ghost(g.bc[side_x_lo], g.bc_value[side_x_lo].y(), u.at2(-i - 1, j));
    if (i >= n1)
      return tangential_ghost(g.bc[side_x_hi], g.bc_value[side_x_hi].y(), u.at2(2 * n1 - 1 - i, j));
    return u.at2(i, j);
  };
  // Transverse values at the other component's interface planes; the first
  // index may need one tangential ghost, the second one periodic wrap.
  auto u2tr = [&](int i, int J) -> Real {
    if (per2) J = wrap(J, n2);
    return u2t(i, J);
  };
  auto u1tr = [&](int I, int j) -> Real {
    if (per1) I = wrap(I, n1);
    return u1t(I, j);
  };

  StaggeredField out = StaggeredField::zeros(g);
  Sweeps w;

  // u . grad u1, x part: self-advection along rows of x-faces.
  const int nix = per1 ? n1 : n1 + 1; // top interface index
  for (int j = 0; j < u.s2; ++j) {
    w.A.resize(nix + 6);
    for (int k = -3; k <= nix + 2; ++k) w.A[k + 3] = u1n(k, j);
    w.iv.resize(nix + 1);
    for (int I = 0; I <= nix; ++I) w.iv[I] = 0.5 * (w.A[I + 2] + w.A[I + 3]);
    ppm_upwind(w.A, w.iv, nix, w.q, w.aL, w.aR, w.val);
    for (int i = 0; i < u.s1; ++i)
      out.at1(i, j) = u.at1(i, j) * (w.val[i + 1] - w.val[i]) / h;
  }
  // u . grad u1, y part: advected by u2 averaged to the interface planes.
  for (int i = 0; i < u.s1; ++i) {
    w.A.resize(n2 + 6);
    for (int k = -3; k <= n2 + 2; ++k) w.A[k + 3] = u1t(i, k);
    w.iv.resize(n2 + 1);
    for (int J = 0; J <= n2; ++J) w.iv[J] = 0.5 * (u2tr(i - 1, J) + u2tr(i, J));
    ppm_upwind(w.A, w.iv, n2, w.q, w.aL, w.aR, w.val);
    for (int j = 0; j < u.s2; ++j) {
      const Real vbar = 0.5 * (w.iv[j] + w.iv[j + 1]);
      out.at1(i, j) += vbar * (w.val[j + 1] - w.val[j]) / h;
    }
  }

  // u . grad u2, y part: self-advection along columns of y-faces.
  const int niy = per2 ? n2 : n2 + 1;
  for (int i = 0; i < u.t1; ++i) {
    w.A.resize(niy + 6);
    for (int k = -3; k <= niy + 2; ++k) w.A[k + 3] = u2n(i, k);
    w.iv.resize(niy + 1);
    for (int J = 0; J <= niy; ++J) w.iv[J] = 0.5 * (w.A[J + 2] + w.A[J + 3]);
    ppm_upwind(w.A, w.iv, niy, w.q, w.aL, w.aR, w.val);
    for (int j = 0; j < u.t2; ++j)
      out.at2(i, j) = u.at2(i, j) * (w.val[j + 1] - w.val[j]) / h;
  }
  // u . grad u2, x part.
  for (int j = 0; j < u.t2; ++j) {
    w.A.resize(n1 + 6);
    for (int k = -3; k <= n1 + 2; ++k) w.A[k + 3] = u2t(k, j);
    w.iv.resize(n1 + 1);
    for (int I = 0; I <= n1; ++I) w.iv[I] = 0.5 * (u1tr(I, j - 1) + u1tr(I, j));
    ppm_upwind(w.A, w.iv, n1, w.q, w.aL, w.aR, w.val);
    for (int i = 0; i < u.t1; ++i) {
      const Real vbar = 0.5 * (w.iv[i] + w.iv[i + 1]);
      out.at2(i, j) += vbar * (w.val[i + 1] - w.val[i]) / h;
    }
  }

  // Pinned boundary-normal faces carry no momentum equation.
  if (!per1 && g.bc[side_x_lo] != SideBc::traction_outflow)
    for (int j = 0; j < u.s2; ++j) out.at1(0, j) = 0;
  if (!per1 && g.bc[side_x_hi] != SideBc::traction_outflow)
    for (int j = 0; j < u.s2; ++j) out.at1(n1, j) = 0;
  if (!per2 && g.bc[side_y_lo] != SideBc::traction_outflow)
    for (int i = 0; i < u.t1; ++i) out.at2(i, 0) = 0;
  if (!per2 && g.bc[side_y_hi] != SideBc::traction_outflow)
    for (int i = 0; i < u.t1; ++i) out.at2(i, n2) = 0;

  return out;
}

} // namespace ibfsi
