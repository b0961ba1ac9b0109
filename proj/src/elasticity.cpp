#include "ibfsi/elasticity.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace ibfsi {

namespace {

Mat2 pk1_impl(const AnisotropicShell& m, const Mat2& F) {
  Mat2 P;
  P << F(0, 0), 0, F(1, 0), 0;
  return (m.mu_e / m.w) * P;
}

Mat2 pk1_impl(const OrthotropicShellNeoHookean& m, const Mat2& F) {
  return (m.mu_e / m.w) * F;
}

Mat2 pk1_impl(const NeoHookeanDisc& m, const Mat2& F) {
  if (m.p0 == 0) return m.mu_e * F;
  const Real J = F.determinant();
  if (J <= 0) throw std::runtime_error("inverted element: det F <= 0");
  Mat2 FinvT; // adjugate transpose over det
  FinvT << F(1, 1), -F(1, 0), -F(0, 1), F(0, 0);
  return m.mu_e * F - (m.p0 / J) * FinvT;
}

Real energy_impl(const AnisotropicShell& m, const Mat2& F) {
  return 0.5 * m.mu_e / m.w * (F(0, 0) * F(0, 0) + F(1, 0) * F(1, 0));
}

Real energy_impl(const OrthotropicShellNeoHookean& m, const Mat2& F) {
  return 0.5 * m.mu_e / m.w * F.squaredNorm();
}

Real energy_impl(const NeoHookeanDisc& m, const Mat2& F) {
  Real w = 0.5 * m.mu_e * F.squaredNorm();
  if (m.p0 != 0) {
    const Real J = F.determinant();
    if (J <= 0) throw std::runtime_error("inverted element: det F <= 0");
    w -= m.p0 * std::log(J);
  }
  return w;
}

} // namespace

void validate(const ConstitutiveModel& model) {
  std::visit(
      [](const auto& m) {
        if (!(m.mu_e > 0)) throw std::invalid_argument("material needs mu_e > 0");
        if constexpr (requires { m.w; })
          if (!(m.w > 0)) throw std::invalid_argument("material needs w > 0");
      },
      model);
}

Mat2 pk1(const ConstitutiveModel& model, const Mat2& F) {
  return std::visit([&](const auto& m) { return pk1_impl(m, F); }, model);
}

Real strain_energy(const ConstitutiveModel& model, const Mat2& F) {
  return std::visit([&](const auto& m) { return energy_impl(m, F); }, model);
}

Real pk1_gradient_check(const ConstitutiveModel& model, const Mat2& F) {
  const Mat2 P    = pk1(model, F);
  const Real step = 1e-6;
  Mat2       fd;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Mat2 Fp = F, Fm = F;
      Fp(i, j) += step;
      Fm(i, j) -= step;
      fd(i, j) = (strain_energy(model, Fp) - strain_energy(model, Fm)) / (2 * step);
    }
  return (P - fd).cwiseAbs().maxCoeff() /
         std::max<Real>(1.0, P.cwiseAbs().maxCoeff());
}

namespace {

// element corners eligible to bound facets, CCW, with reference coordinates
int corner_count(ElementKind kind) { return kind == ElementKind::q1_quad ? 4 : 3; }

Vec2 corner_ref(ElementKind kind, int c) {
  if (kind == ElementKind::q1_quad) {
    const Real xs[4] = {0, 1, 1, 0}, ys[4] = {0, 0, 1, 1};
    return Vec2(xs[c], ys[c]);
  }
  const Real xs[3] = {0, 1, 0}, ys[3] = {0, 0, 1};
  return Vec2(xs[c], ys[c]);
}

struct FacetHost {
  int  elem;
  Vec2 a_ref, b_ref; // element-reference corners matching facet nodes 0, 1
};

std::vector<FacetHost> facet_hosts(const FeMesh& mesh) {
  const int nc = corner_count(mesh.kind);
  std::map<std::pair<int, int>, std::pair<int, int>> edge_owner; // -> (elem, edge)
  for (int e = 0; e < mesh.n_elems(); ++e)
    for (int c = 0; c < nc; ++c) {
      const int a = mesh.elems(e, c), b = mesh.elems(e, (c + 1) % nc);
      edge_owner[{std::min(a, b), std::max(a, b)}] = {e, c};
    }
  std::vector<FacetHost> hosts(mesh.n_facets());
  for (int f = 0; f < mesh.n_facets(); ++f) {
    const int  a  = mesh.facets(f, 0), b = mesh.facets(f, 1);
    const auto it = edge_owner.find({std::min(a, b), std::max(a, b)});
    if (it == edge_owner.end())
      throw std::logic_error("facet without a host element");
    const auto [e, c] = it->second;
    FacetHost h;
    h.elem = e;
    if (mesh.elems(e, c) == a) {
      h.a_ref = corner_ref(mesh.kind, c);
      h.b_ref = corner_ref(mesh.kind, (c + 1) % nc);
    } else {
      h.a_ref = corner_ref(mesh.kind, (c + 1) % nc);
      h.b_ref = corner_ref(mesh.kind, c);
    }
    hosts[f] = h;
  }
  return hosts;
}

Mat2 def_grad_at(const FeMesh& mesh, const MatX& Xref, const Config& x, int elem,
                 Real xi, Real eta, VecX& phi, MatX& dphi) {
  shape_eval(mesh.kind, xi, eta, phi, dphi);
  Mat2 J = Mat2::Zero(), A = Mat2::Zero();
  for (int l = 0; l < Xref.rows(); ++l) {
    for (int d = 0; d < 2; ++d) {
      J.col(d) += Xref.row(l).transpose() * dphi(l, d);
      A.col(d) += x.row(mesh.elems(elem, l)).transpose() * dphi(l, d);
    }
  }
  return A * J.inverse();
}

} // namespace

WeakForms assemble_weak_forms(const FeMesh& mesh, const Config& x,
                              const ConstitutiveModel& model) {
  WeakForms wf;
  wf.volume   = NodeArray::Zero(mesh.n_nodes(), 2);
  wf.boundary = NodeArray::Zero(mesh.n_nodes(), 2);
  wf.traction = NodeArray::Zero(static_cast<int>(mesh.boundary_nodes.size()), 2);

  const QuadRule   rule = mass_rule(mesh.kind);
  const ShapeCache sc   = eval_shapes(mesh.kind, rule);
  const int        nn   = nodes_per_element(mesh.kind);
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const MatX Xref = element_ref_nodes(mesh, e, mesh.ref_period1);
    for (int q = 0; q < rule.npts(); ++q) {
      Mat2 J = Mat2::Zero(), A = Mat2::Zero();
      for (int l = 0; l < nn; ++l) {
        J.col(0) += Xref.row(l).transpose() * sc.dxi(q, l);
        J.col(1) += Xref.row(l).transpose() * sc.deta(q, l);
        A.col(0) += x.row(mesh.elems(e, l)).transpose() * sc.dxi(q, l);
        A.col(1) += x.row(mesh.elems(e, l)).transpose() * sc.deta(q, l);
      }
      const Mat2 Jinv = J.inverse();
      const Mat2 P    = pk1(model, A * Jinv);
      const Real gw   = J.determinant() * rule.w[q];
      for (int l = 0; l < nn; ++l) {
        const Vec2 g(sc.dxi(q, l), sc.deta(q, l));
        wf.volume.row(mesh.elems(e, l)) -=
            (gw * (P * (Jinv.transpose() * g))).transpose();
      }
    }
  }

  if (mesh.n_facets() == 0) return wf;
  const auto       hosts = facet_hosts(mesh);
  const QuadRule   frule = mass_rule(mesh.facet_kind);
  const ShapeCache fsc   = eval_shapes(mesh.facet_kind, frule);
  const int        fn    = nodes_per_element(mesh.facet_kind);
  VecX             phi;
  MatX             dphi;
  for (int f = 0; f < mesh.n_facets(); ++f) {
    MatX Xf(fn, 2);
    for (int l = 0; l < fn; ++l) Xf.row(l) = mesh.nodes.row(mesh.facets(f, l));
    if (mesh.ref_period1 > 0) {
      const Real x0 = Xf(0, 0);
      for (int l = 1; l < fn; ++l) {
        if (Xf(l, 0) - x0 > 0.5 * mesh.ref_period1) Xf(l, 0) -= mesh.ref_period1;
        if (Xf(l, 0) - x0 < -0.5 * mesh.ref_period1) Xf(l, 0) += mesh.ref_period1;
      }
    }
    const FacetHost& h     = hosts[f];
    const MatX       Xelem = element_ref_nodes(mesh, h.elem, mesh.ref_period1);
    for (int q = 0; q < frule.npts(); ++q) {
      const Real s = frule.pts(q, 0);
      Vec2       t = Vec2::Zero();
      for (int l = 0; l < fn; ++l) t += Xf.row(l).transpose() * fsc.dxi(q, l);
      const Vec2 NdA(t.y(), -t.x()); // outward by facet orientation
      const Vec2 rp   = h.a_ref + s * (h.b_ref - h.a_ref);
      const Mat2 P    = pk1(model, def_grad_at(mesh, Xelem, x, h.elem, rp.x(),
                                               rp.y(), phi, dphi));
      const Vec2 PN_w = frule.w[q] * (P * NdA);
      for (int l = 0; l < fn; ++l) {
        wf.boundary.row(mesh.facets(f, l)) += fsc.phi(q, l) * PN_w.transpose();
        wf.traction.row(mesh.trace_index[mesh.facets(f, l)]) -=
            fsc.phi(q, l) * PN_w.transpose();
      }
    }
  }
  return wf;
}

LagrangianForce assemble_partitioned(const FeMesh& mesh, const Config& x,
                                     const ConstitutiveModel& model,
                                     const MassSolver&        volume_mass,
                                     const MassSolver&        boundary_mass) {
  const WeakForms wf = assemble_weak_forms(mesh, x, model);
  LagrangianForce out;
  out.F = volume_mass.solve(NodeArray(wf.volume + wf.boundary));
  out.T = wf.traction.rows() > 0 ? boundary_mass.solve(wf.traction)
                                 : NodeArray(0, 2);
  return out;
}

LagrangianForce assemble_unified(const FeMesh& mesh, const Config& x,
                                 const ConstitutiveModel& model,
                                 const MassSolver&        volume_mass) {
  const WeakForms wf = assemble_weak_forms(mesh, x, model);
  LagrangianForce out;
  out.G = volume_mass.solve(wf.volume);
  return out;
}

LagrangianForce rigid_force(const RigidPenalty& penalty, const Config& x,
                            const NodeArray& velocity) {
  LagrangianForce out;
  out.F = penalty.kappa * (penalty.anchor - x) - penalty.eta * velocity;
  return out;
}

} // namespace ibfsi
