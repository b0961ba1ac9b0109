#include "ibfsi/saddle.hpp"

#include "ibfsi/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

namespace ibfsi {

void validate(const FluidParams& fp) {
  if (!(fp.rho > 0) || !(fp.mu > 0))
    throw std::invalid_argument("fluid parameters must satisfy rho > 0 and mu > 0");
}

namespace {

using RowMat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Cplx   = std::complex<Real>;

// Right-preconditioned restarted FGMRES. x carries the seed in and the
// solution out; returns {iterations, relative residual estimate}. The caller
// recomputes the true residual for reporting.
template <class Apply, class Precond>
std::pair<int, Real> fgmres(Apply&& A, Precond&& M, const VecX& b, VecX& x,
                            Real tol, int max_iter, int restart) {
  const Real bnorm = b.norm();
  if (bnorm == 0) {
    x.setZero();
    return {0, 0};
  }
  int  total = 0;
  Real rel   = 0;
  while (true) {
    VecX r = b - A(x);
    rel    = r.norm() / bnorm;
    if (rel <= tol || total >= max_iter) return {total, rel};
    const int         mdim = std::min(restart, max_iter - total);
    std::vector<VecX> V, Z;
    V.reserve(mdim + 1);
    Z.reserve(mdim);
    V.push_back(r / r.norm());
    MatX H    = MatX::Zero(mdim + 1, mdim);
    VecX gvec = VecX::Zero(mdim + 1);
    gvec[0]   = r.norm();
    std::vector<Real> cs(mdim), sn(mdim);
    int               j     = 0;
    bool              happy = false;
    for (; j < mdim; ++j) {
      Z.push_back(M(V[j]));
      VecX w = A(Z[j]);
      for (int i = 0; i <= j; ++i) {
        H(i, j) = w.dot(V[i]);
        w -= H(i, j) * V[i];
      }
      H(j + 1, j) = w.norm();
      ++total;
      if (H(j + 1, j) > 0)
        V.push_back(w / H(j + 1, j));
      else
        happy = true;
      for (int i = 0; i < j; ++i) {
        const Real t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
        H(i + 1, j)  = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j)      = t;
      }
      const Real dn = std::hypot(H(j, j), H(j + 1, j));
      cs[j]         = dn == 0 ? 1 : H(j, j) / dn;
      sn[j]         = dn == 0 ? 0 : H(j + 1, j) / dn;
      H(j, j)       = cs[j] * H(j, j) + sn[j] * H(j + 1, j);
      H(j + 1, j)   = 0;
      gvec[j + 1]   = -sn[j] * gvec[j];
      gvec[j] *= cs[j];
      rel = std::abs(gvec[j + 1]) / bnorm;
      if (rel <= tol || happy) {
        ++j;
        break;
      }
    }
    VecX y(j);
    for (int i = j - 1; i >= 0; --i) {
      Real s = gvec[i];
      for (int k = i + 1; k < j; ++k) s -= H(i, k) * y[k];
      y[i] = s / H(i, i);
    }
    for (int i = 0; i < j; ++i) x += y[i] * Z[i];
  }
}

// Basis along one axis for a component tangential to that axis's walls.
TrigKind tangential_kind(SideBc lo, SideBc hi) {
  if (lo == SideBc::velocity && hi == SideBc::velocity) return TrigKind::dst2;
  if (lo == SideBc::slip && hi == SideBc::slip) return TrigKind::dct2;
  throw std::invalid_argument("unsupported boundary combination for the saddle solver");
}

VecX second_difference_eigenvalues(const TrigTransform& t, Real h) {
  VecX l(t.modes());
  for (int k = 0; k < t.modes(); ++k)
    l[k] = (2 * std::cos(t.theta(k)) - 2) / (h * h);
  return l;
}

} // namespace

struct SaddleSolver::Impl {
  GridSpec    g, g0; // g0: bc values zeroed, the homogeneous operator closures
  FluidParams fp;
  Real        dt = 0, tol = 0, alpha = 0, nu = 0;

  enum class Path { fourier, channel, projection };
  Path path  = Path::fourier;
  bool gauge = true; // pressure defined up to a constant (no traction side)

  int            s1 = 0, s2 = 0, t1 = 0, t2 = 0, n1 = 0, n2 = 0;
  std::ptrdiff_t off2 = 0, offp = 0, nslots = 0;
  bool           pin1_lo = false, pin1_hi = false, pin2_lo = false, pin2_hi = false;

  std::unique_ptr<Fft2> fft;

  std::unique_ptr<TrigTransform> ch_cos, ch_sin;
  std::vector<BandedLU>          ch_lu;

  std::unique_ptr<TrigTransform> pj_u1x, pj_u1y, pj_u2x, pj_u2y, pj_px, pj_py;
  VecX                           l_u1x, l_u1y, l_u2x, l_u2y, l_px, l_py;

  std::ptrdiff_t slot1(int i, int j) const { return j * s1 + i; }
  std::ptrdiff_t slot2(int i, int j) const { return off2 + j * t1 + i; }
  std::ptrdiff_t slotp(int i, int j) const { return offp + j * n1 + i; }

  void setup(const GridSpec& gin, FluidParams f, Real dtin, Real tolin);
  void build_channel_factors();

  VecX pack(const StaggeredField& u, const CellField& p) const;
  void unpack(const VecX& x, StaggeredField& u, CellField& p) const;

  VecX apply(const VecX& x) const;
  VecX build_rhs(const StaggeredField& rhs, const GridSpec& gnow) const;
  VecX seed(const StaggeredField& u0, const CellField& p0, const GridSpec& gnow) const;

  VecX channel_direct(const VecX& b) const;

  void separable_solve(const TrigTransform& tx, const TrigTransform& ty,
                       const VecX& lx, const VecX& ly, bool poisson, VecX& w,
                       int a, int b) const;
  void poisson_pressure(const VecX& rhs_cc, VecX& phi, VecX& dp) const;
  VecX project_precond(const VecX& r) const;

  void fourier_solve(const StaggeredField& rhs, StaggeredField& u, CellField& p) const;

  void subtract_p_mean(VecX& x) const {
    auto pb = x.segment(offp, static_cast<std::ptrdiff_t>(n1) * n2);
    pb.array() -= pb.mean();
  }
};

void SaddleSolver::Impl::setup(const GridSpec& gin, FluidParams f, Real dtin,
                               Real tolin) {
  gin.validate();
  validate(f);
  if (!(dtin > 0)) throw std::invalid_argument("dt must be positive");
  if (!(tolin > 0) || tolin > 1e-4)
    throw std::invalid_argument("saddle tolerance must lie in (0, 1e-4]");
  g  = gin;
  g0 = gin;
  g0.bc_value.fill(Vec2::Zero());
  fp    = f;
  dt    = dtin;
  tol   = tolin;
  alpha = fp.rho / dt;
  nu    = fp.mu / 2;

  n1 = g.n1;
  n2 = g.n2;
  StaggeredField shape = StaggeredField::zeros(g);
  s1     = shape.s1;
  s2     = shape.s2;
  t1     = shape.t1;
  t2     = shape.t2;
  off2   = static_cast<std::ptrdiff_t>(s1) * s2;
  offp   = off2 + static_cast<std::ptrdiff_t>(t1) * t2;
  nslots = offp + static_cast<std::ptrdiff_t>(n1) * n2;

  auto pinned = [](SideBc bc) {
    return bc == SideBc::velocity || bc == SideBc::slip;
  };
  pin1_lo = !g.periodic1() && pinned(g.bc[side_x_lo]);
  pin1_hi = !g.periodic1() && pinned(g.bc[side_x_hi]);
  pin2_lo = !g.periodic2() && pinned(g.bc[side_y_lo]);
  pin2_hi = !g.periodic2() && pinned(g.bc[side_y_hi]);

  int n_traction = 0;
  for (SideBc bc : g.bc)
    if (bc == SideBc::traction_outflow) ++n_traction;
  gauge = n_traction == 0;

  if (g.periodic1() && g.periodic2()) {
    path = Path::fourier;
    fft  = std::make_unique<Fft2>(n1, n2);
    return;
  }
  if (!g.periodic1() && !g.periodic2() && g.bc[side_y_lo] == SideBc::slip &&
      g.bc[side_y_hi] == SideBc::slip) {
    path = Path::channel;
    ch_cos = std::make_unique<TrigTransform>(TrigKind::dct2, n2);
    if (n2 > 1) ch_sin = std::make_unique<TrigTransform>(TrigKind::dst1, n2 - 1);
    build_channel_factors();
    return;
  }
  if (n_traction > 0)
    throw std::invalid_argument("unsupported boundary combination for the saddle solver");
  path = Path::projection;
  const Real h = g.h;
  if (g.periodic1()) {
    pj_u1x = std::make_unique<TrigTransform>(TrigKind::dft, n1);
    pj_u2x = std::make_unique<TrigTransform>(TrigKind::dft, n1);
    pj_px  = std::make_unique<TrigTransform>(TrigKind::dft, n1);
  } else {
    pj_u1x = std::make_unique<TrigTransform>(TrigKind::dst1, n1 - 1);
    pj_u2x = std::make_unique<TrigTransform>(
        tangential_kind(g.bc[side_x_lo], g.bc[side_x_hi]), n1);
    pj_px = std::make_unique<TrigTransform>(TrigKind::dct2, n1);
  }
  if (g.periodic2()) {
    pj_u1y = std::make_unique<TrigTransform>(TrigKind::dft, n2);
    pj_u2y = std::make_unique<TrigTransform>(TrigKind::dft, n2);
    pj_py  = std::make_unique<TrigTransform>(TrigKind::dft, n2);
  } else {
    pj_u1y = std::make_unique<TrigTransform>(
        tangential_kind(g.bc[side_y_lo], g.bc[side_y_hi]), n2);
    pj_u2y = std::make_unique<TrigTransform>(TrigKind::dst1, n2 - 1);
    pj_py  = std::make_unique<TrigTransform>(TrigKind::dct2, n2);
  }
  l_u1x = second_difference_eigenvalues(*pj_u1x, h);
  l_u1y = second_difference_eigenvalues(*pj_u1y, h);
  l_u2x = second_difference_eigenvalues(*pj_u2x, h);
  l_u2y = second_difference_eigenvalues(*pj_u2y, h);
  l_px  = second_difference_eigenvalues(*pj_px, h);
  l_py  = second_difference_eigenvalues(*pj_py, h);
}

// One banded factor per transverse mode. Slot order per mode:
// [u1_0, u2_0, p_0, u1_1, ..., u1_{n1-1}, u2_{n1-1}, p_{n1-1}, u1_{n1}],
// bandwidth 3 both ways. Pinned faces keep identity rows so their
// transformed boundary values ride through the solve.
void SaddleSolver::Impl::build_channel_factors() {
  const Real h   = g.h;
  const Real ih2 = 1 / (h * h);
  const int  N   = 3 * n1 + 1;
  ch_lu.clear();
  ch_lu.reserve(n2);
  for (int m = 0; m < n2; ++m) {
    const Real theta = M_PI * m / n2;
    const Real lam   = (2 * std::cos(theta) - 2) * ih2;
    const Real sth   = 2 * std::sin(theta / 2) / h;
    BandedLU   lu(N, 3, 3);
    // u1 rows
    for (int i = 0; i <= n1; ++i) {
      const int r = 3 * i;
      if (i == 0 && !pin1_lo) { // traction end, x low
        lu(r, r)     = -2 * fp.mu / h;
        lu(r, r + 3) = 2 * fp.mu / h;
        lu(r, r + 2) = -1;
      } else if (i == n1 && !pin1_hi) { // traction end, x high
        lu(r, r)     = 2 * fp.mu / h;
        lu(r, r - 3) = -2 * fp.mu / h;
        lu(r, r - 1) = -1;
      } else if (i == 0 || i == n1) { // pinned
        lu(r, r) = 1;
      } else {
        lu(r, r)     = alpha + 2 * nu * ih2 - nu * lam;
        lu(r, r - 3) = -nu * ih2;
        lu(r, r + 3) = -nu * ih2;
        lu(r, r + 2) = 1 / h;  // p_i
        lu(r, r - 1) = -1 / h; // p_{i-1}
      }
    }
    // u2 rows
    for (int i = 0; i < n1; ++i) {
      const int r = 3 * i + 1;
      if (m == 0) {
        lu(r, r) = 1; // no constant-in-x2 content in the sine directions
        continue;
      }
      Real xxd = -2 * ih2;
      if (i == 0) xxd = (g.bc[side_x_lo] == SideBc::slip ? -1 : -3) * ih2;
      if (i == n1 - 1) xxd = (g.bc[side_x_hi] == SideBc::slip ? -1 : -3) * ih2;
      lu(r, r) = alpha - nu * (xxd + lam);
      if (i > 0) lu(r, r - 3) = -nu * ih2;
      if (i < n1 - 1) lu(r, r + 3) = -nu * ih2;
      lu(r, r + 1) = -sth; // p_i, cosine mode paired down to the sine basis
    }
    // divergence rows; with no traction end the mode-0 system only fixes
    // pressure differences, so one row is traded for a gauge pin (the
    // dropped balance is implied by the others when the bc fluxes add up)
    for (int i = 0; i < n1; ++i) {
      const int r = 3 * i + 2;
      if (gauge && m == 0 && i == n1 - 1) {
        lu(r, r) = 1;
        continue;
      }
      lu(r, r - 2) = -1 / h; // u1_i
      lu(r, r + 1) = 1 / h;  // u1_{i+1}
      if (m > 0) lu(r, r - 1) = sth;
    }
    lu.factor();
    ch_lu.push_back(std::move(lu));
  }
}

VecX SaddleSolver::Impl::pack(const StaggeredField& u, const CellField& p) const {
  VecX x(nslots);
  x.segment(0, off2)               = u.u1;
  x.segment(off2, offp - off2)     = u.u2;
  x.segment(offp, nslots - offp)   = p.data;
  return x;
}

void SaddleSolver::Impl::unpack(const VecX& x, StaggeredField& u, CellField& p) const {
  u      = StaggeredField::zeros(g);
  p      = CellField::zeros(g);
  u.u1   = x.segment(0, off2);
  u.u2   = x.segment(off2, offp - off2);
  p.data = x.segment(offp, nslots - offp);
}

VecX SaddleSolver::Impl::apply(const VecX& x) const {
  StaggeredField U;
  CellField      P;
  unpack(x, U, P);
  const StaggeredField lap = laplacian(U, g0);
  const StaggeredField gp  = gradient(P, g0);
  const CellField      dv  = divergence(U, g0);
  const Real           tmu = 2 * fp.mu / g.h;

  VecX y(nslots);
  for (int j = 0; j < s2; ++j)
    for (int i = 0; i < s1; ++i) {
      Real v;
      if (!g.periodic1() && i == 0)
        v = pin1_lo ? U.at1(0, j) : tmu * (U.at1(1, j) - U.at1(0, j)) - P(0, j);
      else if (!g.periodic1() && i == n1)
        v = pin1_hi ? U.at1(n1, j)
                    : tmu * (U.at1(n1, j) - U.at1(n1 - 1, j)) - P(n1 - 1, j);
      else
        v = alpha * U.at1(i, j) - nu * lap.at1(i, j) + gp.at1(i, j);
      y[slot1(i, j)] = v;
    }
  for (int j = 0; j < t2; ++j)
    for (int i = 0; i < t1; ++i) {
      Real v;
      if (!g.periodic2() && j == 0)
        v = pin2_lo ? U.at2(i, 0) : tmu * (U.at2(i, 1) - U.at2(i, 0)) - P(i, 0);
      else if (!g.periodic2() && j == n2)
        v = pin2_hi ? U.at2(i, n2)
                    : tmu * (U.at2(i, n2) - U.at2(i, n2 - 1)) - P(i, n2 - 1);
      else
        v = alpha * U.at2(i, j) - nu * lap.at2(i, j) + gp.at2(i, j);
      y[slot2(i, j)] = v;
    }
  y.segment(offp, nslots - offp) = dv.data;
  return y;
}

VecX SaddleSolver::Impl::build_rhs(const StaggeredField& rhs,
                                   const GridSpec&       gnow) const {
  const Real ih2 = 1 / (g.h * g.h);
  VecX       b   = VecX::Zero(nslots);
  for (int j = 0; j < s2; ++j)
    for (int i = 0; i < s1; ++i) {
      Real v;
      if (!g.periodic1() && i == 0)
        v = pin1_lo && g.bc[side_x_lo] == SideBc::velocity
                ? gnow.bc_value[side_x_lo].x()
                : 0; // slip pin or traction row
      else if (!g.periodic1() && i == n1)
        v = pin1_hi && g.bc[side_x_hi] == SideBc::velocity
                ? gnow.bc_value[side_x_hi].x()
                : 0;
      else {
        v = rhs.at1(i, j);
        if (!g.periodic2()) {
          if (j == 0 && g.bc[side_y_lo] == SideBc::velocity)
            v += 2 * nu * gnow.bc_value[side_y_lo].x() * ih2;
          if (j == n2 - 1 && g.bc[side_y_hi] == SideBc::velocity)
            v += 2 * nu * gnow.bc_value[side_y_hi].x() * ih2;
        }
      }
      b[slot1(i, j)] = v;
    }
  for (int j = 0; j < t2; ++j)
    for (int i = 0; i < t1; ++i) {
      Real v;
      if (!g.periodic2() && j == 0)
        v = pin2_lo && g.bc[side_y_lo] == SideBc::velocity
                ? gnow.bc_value[side_y_lo].y()
                : 0;
      else if (!g.periodic2() && j == n2)
        v = pin2_hi && g.bc[side_y_hi] == SideBc::velocity
                ? gnow.bc_value[side_y_hi].y()
                : 0;
      else {
        v = rhs.at2(i, j);
        if (!g.periodic1()) {
          if (i == 0 && g.bc[side_x_lo] == SideBc::velocity)
            v += 2 * nu * gnow.bc_value[side_x_lo].y() * ih2;
          if (i == t1 - 1 && g.bc[side_x_hi] == SideBc::velocity)
            v += 2 * nu * gnow.bc_value[side_x_hi].y() * ih2;
        }
      }
      b[slot2(i, j)] = v;
    }
  return b;
}

VecX SaddleSolver::Impl::seed(const StaggeredField& u0, const CellField& p0,
                              const GridSpec& gnow) const {
  VecX x = pack(u0, p0);
  if (!g.periodic1())
    for (int j = 0; j < s2; ++j) {
      if (pin1_lo)
        x[slot1(0, j)] = g.bc[side_x_lo] == SideBc::velocity
                             ? gnow.bc_value[side_x_lo].x()
                             : 0;
      if (pin1_hi)
        x[slot1(n1, j)] = g.bc[side_x_hi] == SideBc::velocity
                              ? gnow.bc_value[side_x_hi].x()
                              : 0;
    }
  if (!g.periodic2())
    for (int i = 0; i < t1; ++i) {
      if (pin2_lo)
        x[slot2(i, 0)] = g.bc[side_y_lo] == SideBc::velocity
                             ? gnow.bc_value[side_y_lo].y()
                             : 0;
      if (pin2_hi)
        x[slot2(i, n2)] = g.bc[side_y_hi] == SideBc::velocity
                              ? gnow.bc_value[side_y_hi].y()
                              : 0;
    }
  if (gauge) subtract_p_mean(x);
  return x;
}

VecX SaddleSolver::Impl::channel_direct(const VecX& b) const {
  const int N = 3 * n1 + 1;
  MatX      V1(s1, n2);
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < s1; ++i) V1(i, j) = b[slot1(i, j)];
  MatX C1;
  ch_cos->analyze(V1, C1);
  MatX C2;
  if (ch_sin) {
    MatX V2(t1, n2 - 1);
    for (int j = 1; j < n2; ++j)
      for (int i = 0; i < t1; ++i) V2(i, j - 1) = b[slot2(i, j)];
    ch_sin->analyze(V2, C2);
  }
  MatX VP(n1, n2);
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) VP(i, j) = b[slotp(i, j)];
  MatX CP;
  ch_cos->analyze(VP, CP);

  MatX S1(s1, n2), S2(t1, std::max(n2 - 1, 0)), SP(n1, n2);
  VecX z(N);
  for (int m = 0; m < n2; ++m) {
    for (int i = 0; i < n1; ++i) {
      z[3 * i]     = C1(i, m);
      z[3 * i + 1] = m > 0 ? C2(i, m - 1) : 0;
      z[3 * i + 2] = CP(i, m);
    }
    z[3 * n1] = C1(n1, m);
    if (gauge && m == 0) z[3 * (n1 - 1) + 2] = 0; // gauge row rhs
    ch_lu[m].solve(z);
    for (int i = 0; i < n1; ++i) {
      S1(i, m) = z[3 * i];
      if (m > 0) S2(i, m - 1) = z[3 * i + 1];
      SP(i, m) = z[3 * i + 2];
    }
    S1(n1, m) = z[3 * n1];
  }

  VecX out = VecX::Zero(nslots);
  MatX W;
  ch_cos->synthesize(S1, W);
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < s1; ++i) out[slot1(i, j)] = W(i, j);
  if (ch_sin) {
    ch_sin->synthesize(S2, W);
    for (int j = 1; j < n2; ++j)
      for (int i = 0; i < t1; ++i) out[slot2(i, j)] = W(i, j - 1);
  }
  for (int i = 0; i < t1; ++i) { // pinned slip rows ride through unchanged
    out[slot2(i, 0)]  = b[slot2(i, 0)];
    out[slot2(i, n2)] = b[slot2(i, n2)];
  }
  ch_cos->synthesize(SP, W);
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) out[slotp(i, j)] = W(i, j);
  return out;
}

void SaddleSolver::Impl::separable_solve(const TrigTransform& tx,
                                         const TrigTransform& ty, const VecX& lx,
                                         const VecX& ly, bool poisson, VecX& w,
                                         int a, int b) const {
  Eigen::Map<const RowMat> W(w.data(), b, a);
  MatX                     Vx = W;
  MatX                     Cx;
  tx.analyze(Vx, Cx); // (b, a)
  MatX Vy = Cx.transpose();
  MatX Cy;
  ty.analyze(Vy, Cy); // (a, b): coefficient (k1, k2)
  for (int k2 = 0; k2 < b; ++k2)
    for (int k1 = 0; k1 < a; ++k1) {
      if (poisson) {
        const Real denom = lx[k1] + ly[k2];
        Cy(k1, k2)       = denom == 0 ? 0 : Cy(k1, k2) / denom;
      } else {
        Cy(k1, k2) /= alpha - nu * (lx[k1] + ly[k2]);
      }
    }
  MatX Sy;
  ty.synthesize(Cy, Sy);
  MatX Sx = Sy.transpose();
  MatX out;
  tx.synthesize(Sx, out);
  Eigen::Map<RowMat>(w.data(), b, a) = out;
}

// phi solves L_cc phi = rhs (Neumann/periodic closures, zero mode pinned);
// dp = phi - (nu/alpha) L_cc phi reuses the same coefficients.
void SaddleSolver::Impl::poisson_pressure(const VecX& rhs_cc, VecX& phi,
                                          VecX& dp) const {
  Eigen::Map<const RowMat> W(rhs_cc.data(), n2, n1);
  MatX                     Vx = W;
  MatX                     Cx;
  pj_px->analyze(Vx, Cx);
  MatX Vy = Cx.transpose();
  MatX Cy;
  pj_py->analyze(Vy, Cy); // (k1, k2)
  MatX Cphi(n1, n2), Cdp(n1, n2);
  for (int k2 = 0; k2 < n2; ++k2)
    for (int k1 = 0; k1 < n1; ++k1) {
      const Real denom = l_px[k1] + l_py[k2];
      const Real f     = denom == 0 ? 0 : Cy(k1, k2) / denom;
      Cphi(k1, k2)     = f;
      Cdp(k1, k2)      = f * (1 - (nu / alpha) * denom);
    }
  MatX Sy, Sx, out;
  pj_py->synthesize(Cphi, Sy);
  Sx = Sy.transpose();
  pj_px->synthesize(Sx, out);
  phi.resize(rhs_cc.size());
  Eigen::Map<RowMat>(phi.data(), n2, n1) = out;
  pj_py->synthesize(Cdp, Sy);
  Sx = Sy.transpose();
  pj_px->synthesize(Sx, out);
  dp.resize(rhs_cc.size());
  Eigen::Map<RowMat>(dp.data(), n2, n1) = out;
}

// Approximate projection: exact Helmholtz per component, exact Poisson for
// the pressure-like correction, first-order commutator error at walls.
VecX SaddleSolver::Impl::project_precond(const VecX& r) const {
  StaggeredField R;
  CellField      RP;
  unpack(r, R, RP);
  StaggeredField Z = R; // pinned slots act as identity

  {
    const int i0 = g.periodic1() ? 0 : 1;
    const int a  = g.periodic1() ? n1 : n1 - 1;
    VecX      w(static_cast<std::ptrdiff_t>(a) * n2);
    for (int j = 0; j < n2; ++j)
      for (int i = 0; i < a; ++i) w[j * a + i] = R.at1(i0 + i, j);
    separable_solve(*pj_u1x, *pj_u1y, l_u1x, l_u1y, false, w, a, n2);
    for (int j = 0; j < n2; ++j)
      for (int i = 0; i < a; ++i) Z.at1(i0 + i, j) = w[j * a + i];
  }
  {
    const int j0 = g.periodic2() ? 0 : 1;
    const int bb = g.periodic2() ? n2 : n2 - 1;
    VecX      w(static_cast<std::ptrdiff_t>(n1) * bb);
    for (int j = 0; j < bb; ++j)
      for (int i = 0; i < n1; ++i) w[j * n1 + i] = R.at2(i, j0 + j);
    separable_solve(*pj_u2x, *pj_u2y, l_u2x, l_u2y, false, w, n1, bb);
    for (int j = 0; j < bb; ++j)
      for (int i = 0; i < n1; ++i) Z.at2(i, j0 + j) = w[j * n1 + i];
  }

  const CellField dv     = divergence(Z, g0);
  VecX            rhs_cc = alpha * (dv.data - RP.data);
  VecX            phi, dp;
  poisson_pressure(rhs_cc, phi, dp);
  CellField PHI;
  PHI.n1   = n1;
  PHI.n2   = n2;
  PHI.data = phi;
  const StaggeredField gph = gradient(PHI, g0);
  Z.u1 -= gph.u1 / alpha;
  Z.u2 -= gph.u2 / alpha;

  CellField DP;
  DP.n1   = n1;
  DP.n2   = n2;
  DP.data = dp;
  return pack(Z, DP);
}

void SaddleSolver::Impl::fourier_solve(const StaggeredField& rhs,
                                       StaggeredField& u, CellField& p) const {
  Eigen::MatrixXcd S1, S2;
  fft->forward(rhs.u1, S1);
  fft->forward(rhs.u2, S2);
  Eigen::MatrixXcd SP(n1, n2);
  const Real       h = g.h;
  for (int k2 = 0; k2 < n2; ++k2) {
    const Real th2 = 2 * M_PI * k2 / n2;
    for (int k1 = 0; k1 < n1; ++k1) {
      const Real th1 = 2 * M_PI * k1 / n1;
      const Real lam = (2 * std::cos(th1) + 2 * std::cos(th2) - 4) / (h * h);
      const Real H   = alpha - nu * lam;
      if (k1 == 0 && k2 == 0) {
        SP(0, 0) = 0;
        S1(0, 0) /= H;
        S2(0, 0) /= H;
        continue;
      }
      const Cplx g1 = (Real(1) - std::exp(Cplx(0, -th1))) / h;
      const Cplx g2 = (Real(1) - std::exp(Cplx(0, -th2))) / h;
      const Cplx ph = (-std::conj(g1) * S1(k1, k2) - std::conj(g2) * S2(k1, k2)) / lam;
      SP(k1, k2)    = ph;
      S1(k1, k2)    = (S1(k1, k2) - g1 * ph) / H;
      S2(k1, k2)    = (S2(k1, k2) - g2 * ph) / H;
    }
  }
  u = StaggeredField::zeros(g);
  p = CellField::zeros(g);
  fft->inverse(S1, u.u1);
  fft->inverse(S2, u.u2);
  fft->inverse(SP, p.data);
}

SaddleSolver::SaddleSolver(const GridSpec& g, FluidParams fp, Real dt, Real tol)
    : impl_(std::make_unique<Impl>()) {
  impl_->setup(g, fp, dt, tol);
}

SaddleSolver::~SaddleSolver()                               = default;
SaddleSolver::SaddleSolver(SaddleSolver&&) noexcept            = default;
SaddleSolver& SaddleSolver::operator=(SaddleSolver&&) noexcept = default;

Real SaddleSolver::tol() const { return impl_->tol; }

SaddleSolveReport SaddleSolver::solve(const StaggeredField& rhs,
                                      const GridSpec& gnow,
                                      const StaggeredField& u0,
                                      const CellField& p0, StaggeredField& u,
                                      CellField& p) const {
  const Impl& im = *impl_;
  if (gnow.n1 != im.g.n1 || gnow.n2 != im.g.n2 || gnow.h != im.g.h ||
      gnow.bc != im.g.bc)
    throw std::invalid_argument("grid passed to solve() does not match setup");

  SaddleSolveReport rep;
  if (im.path == Impl::Path::fourier) {
    im.fourier_solve(rhs, u, p);
    rep.iterations = 1;
    const StaggeredField lap = laplacian(u, im.g0);
    const StaggeredField gp  = gradient(p, im.g0);
    const CellField      dv  = divergence(u, im.g0);
    Real                 rn = 0, bn = 0;
    for (std::ptrdiff_t k = 0; k < u.u1.size(); ++k) {
      const Real ri = im.alpha * u.u1[k] - im.nu * lap.u1[k] + gp.u1[k] - rhs.u1[k];
      rn += ri * ri;
      bn += rhs.u1[k] * rhs.u1[k];
    }
    for (std::ptrdiff_t k = 0; k < u.u2.size(); ++k) {
      const Real ri = im.alpha * u.u2[k] - im.nu * lap.u2[k] + gp.u2[k] - rhs.u2[k];
      rn += ri * ri;
      bn += rhs.u2[k] * rhs.u2[k];
    }
    rn += dv.data.squaredNorm();
    rep.residual   = bn > 0 ? std::sqrt(rn / bn) : 0;
    rep.divergence = dv.data.size() ? dv.data.cwiseAbs().maxCoeff() : 0;
    return rep;
  }

  const VecX b  = im.build_rhs(rhs, gnow);
  VecX       x  = im.seed(u0, p0, gnow);
  auto       Af = [&](const VecX& v) { return im.apply(v); };

  std::pair<int, Real> it{0, 0};
  if (im.path == Impl::Path::channel) {
    auto Mf = [&](const VecX& v) { return im.channel_direct(v); };
    it      = fgmres(Af, Mf, b, x, im.tol, 16, 8);
  } else {
    auto Mf = [&](const VecX& v) {
      VecX z = im.project_precond(v);
      if (im.gauge) im.subtract_p_mean(z);
      return z;
    };
    it = fgmres(Af, Mf, b, x, im.tol, 300, 60);
  }
  if (im.gauge) im.subtract_p_mean(x);

  rep.iterations   = it.first;
  const Real bnorm = b.norm();
  rep.residual     = bnorm > 0 ? (b - im.apply(x)).norm() / bnorm : 0;
  im.unpack(x, u, p);
  CellField dv   = divergence(u, im.g0);
  rep.divergence = dv.data.size() ? dv.data.cwiseAbs().maxCoeff() : 0;

  // Exact divergence cleanup, normally dormant: div grad equals the
  // cell-centered Laplacian the Poisson basis diagonalizes.
  const Real usc = std::sqrt(std::max<Real>(inner_product(u, u, im.g), 0));
  if (im.path == Impl::Path::projection &&
      rep.divergence > 10 * im.tol * usc / im.g.h) {
    VecX phi, dp;
    im.poisson_pressure(dv.data, phi, dp);
    CellField PHI;
    PHI.n1   = im.n1;
    PHI.n2   = im.n2;
    PHI.data = phi;
    const StaggeredField gph = gradient(PHI, im.g0);
    u.u1 -= gph.u1;
    u.u2 -= gph.u2;
    p.data += im.alpha * dp;
    if (im.gauge) p.data.array() -= p.data.mean();
    dv             = divergence(u, im.g0);
    rep.divergence = dv.data.cwiseAbs().maxCoeff();
    VecX x2        = im.pack(u, p);
    rep.residual   = bnorm > 0 ? (b - im.apply(x2)).norm() / bnorm : 0;
  }

  if (rep.residual > im.tol)
    throw SolverFailure("saddle solve did not reach the requested tolerance", rep);
  return rep;
}

} // namespace ibfsi
