#include "ibfsi/fem_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>

namespace ibfsi {

int nodes_per_element(ElementKind kind) {
  switch (kind) {
  case ElementKind::q1_quad: return 4;
  case ElementKind::p2_tri:  return 6;
  case ElementKind::p2_edge: return 3;
  default:                   return 2;
  }
}

int element_dim(ElementKind kind) {
  return (kind == ElementKind::q1_quad || kind == ElementKind::p2_tri) ? 2 : 1;
}

const char* element_kind_name(ElementKind kind) {
  switch (kind) {
  case ElementKind::q1_quad: return "q1_quad";
  case ElementKind::p2_tri:  return "p2_tri";
  case ElementKind::p2_edge: return "p2_edge";
  default:                   return "p1_edge";
  }
}

void shape_eval(ElementKind kind, Real xi, Real eta, VecX& phi, MatX& dphi) {
  const int nn = nodes_per_element(kind);
  const int nd = element_dim(kind);
  phi.resize(nn);
  dphi.resize(nn, nd);
  switch (kind) {
  case ElementKind::q1_quad:
    phi << (1 - xi) * (1 - eta), xi * (1 - eta), xi * eta, (1 - xi) * eta;
    dphi.col(0) << -(1 - eta), (1 - eta), eta, -eta;
    dphi.col(1) << -(1 - xi), -xi, xi, (1 - xi);
    break;
  case ElementKind::p2_tri: {
    const Real l0 = 1 - xi - eta, l1 = xi, l2 = eta;
    phi << l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1), 4 * l0 * l1,
        4 * l1 * l2, 4 * l2 * l0;
    // dl0 = (-1,-1), dl1 = (1,0), dl2 = (0,1)
    dphi.col(0) << -(4 * l0 - 1), 4 * l1 - 1, 0, 4 * (l0 - l1), 4 * l2, -4 * l2;
    dphi.col(1) << -(4 * l0 - 1), 0, 4 * l2 - 1, -4 * l1, 4 * l1, 4 * (l0 - l2);
    break;
  }
  case ElementKind::p2_edge:
    phi << (1 - xi) * (1 - 2 * xi), xi * (2 * xi - 1), 4 * xi * (1 - xi);
    dphi.col(0) << 4 * xi - 3, 4 * xi - 1, 4 - 8 * xi;
    break;
  default:
    phi << 1 - xi, xi;
    dphi.col(0) << -1, 1;
    break;
  }
}

QuadRule gauss_legendre_1d(int n) {
  if (n < 1 || n > max_gauss_points)
    throw std::invalid_argument("Gauss point count outside 1..48; refine the "
                                "structure mesh instead");
  QuadRule r;
  r.pts = MatX::Zero(n, 2);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton iteration on P_n over [-1,1]
    Real x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    Real pp = 0;
    for (int it = 0; it < 100; ++it) {
      Real p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp             = n * (x * p1 - p0) / (x * x - 1);
      const Real dx  = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const Real w          = 2.0 / ((1 - x * x) * pp * pp);
    r.pts(i, 0)           = 0.5 * (1 - x); // descending root -> ascending point
    r.pts(n - 1 - i, 0)   = 0.5 * (1 + x);
    r.w[i]                = 0.5 * w;
    r.w[n - 1 - i]        = 0.5 * w;
  }
  return r;
}

QuadRule tensor_rule_quad(int n) {
  QuadRule g = gauss_legendre_1d(n);
  QuadRule r;
  r.pts.resize(n * n, 2);
  r.w.resize(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      r.pts(j * n + i, 0) = g.pts(i, 0);
      r.pts(j * n + i, 1) = g.pts(j, 0);
      r.w[j * n + i]      = g.w[i] * g.w[j];
    }
  return r;
}

QuadRule collapsed_rule_tri(int n) {
  // Duffy map (a,b) -> (a(1-b), b); the (1-b) Jacobian keeps reference-area
  // weights exact while preserving an n-per-direction point layout.
  QuadRule g = gauss_legendre_1d(n);
  QuadRule r;
  r.pts.resize(n * n, 2);
  r.w.resize(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Real a = g.pts(i, 0), b = g.pts(j, 0);
      r.pts(j * n + i, 0) = a * (1 - b);
      r.pts(j * n + i, 1) = b;
      r.w[j * n + i]      = g.w[i] * g.w[j] * (1 - b);
    }
  return r;
}

QuadRule mass_rule(ElementKind kind) {
  switch (kind) {
  case ElementKind::q1_quad: return tensor_rule_quad(2);
  case ElementKind::p2_tri: {
    // 6-point degree-4 rule, weights normalized to the unit-triangle area 1/2
    const Real a = 0.816847572980459, b = 0.091576213509771;
    const Real c = 0.108103018168070, d = 0.445948490915965;
    const Real wa = 0.109951743655322 * 0.5, wc = 0.223381589678011 * 0.5;
    QuadRule r;
    r.pts.resize(6, 2);
    r.w.resize(6);
    r.pts << b, b, a, b, b, a, d, d, c, d, d, c;
    r.w << wa, wa, wa, wc, wc, wc;
    return r;
  }
  case ElementKind::p2_edge: return gauss_legendre_1d(3);
  default:                   return gauss_legendre_1d(2);
  }
}

QuadRule rule_for(ElementKind kind, int n) {
  switch (kind) {
  case ElementKind::q1_quad: return tensor_rule_quad(n);
  case ElementKind::p2_tri:  return collapsed_rule_tri(n);
  default:                   return gauss_legendre_1d(n);
  }
}

ShapeCache eval_shapes(ElementKind kind, const QuadRule& rule) {
  const int  nn = nodes_per_element(kind);
  const int  nd = element_dim(kind);
  const int  np = rule.npts();
  ShapeCache sc;
  sc.phi.resize(np, nn);
  sc.dxi.resize(np, nn);
  sc.deta.resize(np, nd == 2 ? nn : 0);
  VecX phi;
  MatX dphi;
  for (int q = 0; q < np; ++q) {
    shape_eval(kind, rule.pts(q, 0), rule.pts(q, 1), phi, dphi);
    sc.phi.row(q) = phi.transpose();
    sc.dxi.row(q) = dphi.col(0).transpose();
    if (nd == 2) sc.deta.row(q) = dphi.col(1).transpose();
  }
  return sc;
}

void FeMesh::finalize() {
  boundary_nodes.clear();
  for (int f = 0; f < n_facets(); ++f)
    for (int c = 0; c < facets.cols(); ++c) boundary_nodes.push_back(facets(f, c));
  std::sort(boundary_nodes.begin(), boundary_nodes.end());
  boundary_nodes.erase(std::unique(boundary_nodes.begin(), boundary_nodes.end()),
                       boundary_nodes.end());
  trace_index.assign(n_nodes(), -1);
  for (int t = 0; t < static_cast<int>(boundary_nodes.size()); ++t)
    trace_index[boundary_nodes[t]] = t;
}

FeMesh shell_mesh(int m_circ, int m_rad, Real R, Real w) {
  if (m_circ < 3 || m_rad < 1) throw std::invalid_argument("shell mesh too coarse");
  FeMesh mesh;
  mesh.kind       = ElementKind::q1_quad;
  mesh.facet_kind = ElementKind::p1_edge;
  mesh.ref_period1 = 2 * M_PI * R;
  const Real ds1   = 2 * M_PI * R / m_circ;
  const Real ds2   = w / m_rad;
  mesh.nodes.resize(m_circ * (m_rad + 1), 2);
  for (int j = 0; j <= m_rad; ++j)
    for (int i = 0; i < m_circ; ++i) {
      mesh.nodes(j * m_circ + i, 0) = i * ds1;
      mesh.nodes(j * m_circ + i, 1) = j * ds2;
    }
  mesh.elems.resize(m_circ * m_rad, 4);
  auto id = [&](int i, int j) { return j * m_circ + (i % m_circ); };
  for (int j = 0; j < m_rad; ++j)
    for (int i = 0; i < m_circ; ++i)
      mesh.elems.row(j * m_circ + i) << id(i, j), id(i + 1, j), id(i + 1, j + 1),
          id(i, j + 1);
  mesh.facets.resize(2 * m_circ, 2);
  for (int i = 0; i < m_circ; ++i) {
    mesh.facets.row(i) << id(i, 0), id(i + 1, 0);                   // outward (0,-1)
    mesh.facets.row(m_circ + i) << id(i + 1, m_rad), id(i, m_rad);  // outward (0,+1)
  }
  mesh.finalize();
  return mesh;
}

namespace {

struct LinearTri {
  std::vector<Vec2>            verts;
  std::vector<Eigen::Vector3i> tris;
  std::vector<char>            on_boundary;
};

LinearTri ring_fan(Vec2 center, Real radius, int n_r) {
  LinearTri m;
  m.verts.push_back(center);
  m.on_boundary.push_back(0);
  std::vector<int> ring_start(n_r + 1, 0);
  for (int k = 1; k <= n_r; ++k) {
    ring_start[k]  = static_cast<int>(m.verts.size());
    const int   nk = 6 * k;
    const Real rk  = radius * k / n_r;
    for (int t = 0; t < nk; ++t) {
      const Real a = 2 * M_PI * t / nk;
      m.verts.push_back(center + rk * Vec2(std::cos(a), std::sin(a)));
      m.on_boundary.push_back(k == n_r);
    }
  }
  auto ring_id = [&](int k, int t) {
    if (k == 0) return 0;
    const int nk = 6 * k;
    return ring_start[k] + ((t % nk) + nk) % nk;
  };
  for (int k = 1; k <= n_r; ++k) {
    for (int s = 0; s < 6; ++s)
      for (int t = 0; t < k; ++t) {
        const int o0 = ring_id(k, s * k + t), o1 = ring_id(k, s * k + t + 1);
        const int i0 = ring_id(k - 1, s * (k - 1) + t);
        m.tris.emplace_back(o0, o1, i0);
        if (t < k - 1) {
          const int i1 = ring_id(k - 1, s * (k - 1) + t + 1);
          m.tris.emplace_back(o1, i1, i0);
        }
      }
  }
  return m;
}

void lloyd_pass(LinearTri& m) {
  // One pass of area-weighted incident-centroid averaging on interior
  // vertices; the simultaneous update keeps the result order-independent.
  std::vector<Vec2> num(m.verts.size(), Vec2::Zero());
  std::vector<Real> den(m.verts.size(), 0.0);
  for (const auto& t : m.tris) {
    const Vec2 a = m.verts[t[0]], b = m.verts[t[1]], c = m.verts[t[2]];
    const Real area = 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
    const Vec2 cen  = (a + b + c) / 3;
    for (int v = 0; v < 3; ++v) {
      num[t[v]] += area * cen;
      den[t[v]] += area;
    }
  }
  for (size_t v = 0; v < m.verts.size(); ++v)
    if (!m.on_boundary[v] && den[v] > 0) m.verts[v] = num[v] / den[v];
}

} // namespace

FeMesh disc_mesh(Vec2 center, Real radius, Real target_spacing) {
  if (!(target_spacing > 0) || target_spacing >= radius)
    throw std::invalid_argument("disc mesh spacing infeasible: need "
                                "0 < spacing < radius (refine the mesh)");
  const Real edge = 2 * target_spacing; // quadratic nodes halve the spacing
  const int  n_r  = std::max<int>(1, static_cast<int>(std::llround(radius / edge)));
  LinearTri  lin  = ring_fan(center, radius, n_r);
  lloyd_pass(lin);

  FeMesh mesh;
  mesh.kind       = ElementKind::p2_tri;
  mesh.facet_kind = ElementKind::p2_edge;

  // count edge incidence to find the boundary, then insert midside nodes
  std::map<std::pair<int, int>, int> edge_mid;  // sorted edge -> midside id
  std::map<std::pair<int, int>, int> edge_uses;
  auto key = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
  for (const auto& t : lin.tris)
    for (int e = 0; e < 3; ++e) ++edge_uses[key(t[e], t[(e + 1) % 3])];

  std::vector<Vec2> nodes(lin.verts);
  for (const auto& t : lin.tris)
    for (int e = 0; e < 3; ++e) {
      const auto k = key(t[e], t[(e + 1) % 3]);
      if (edge_mid.count(k)) continue;
      Vec2 mid = 0.5 * (lin.verts[k.first] + lin.verts[k.second]);
      if (edge_uses[k] == 1) // boundary edge: put the midside on the circle
        mid = center + radius * (mid - center).normalized();
      edge_mid[k] = static_cast<int>(nodes.size());
      nodes.push_back(mid);
    }

  mesh.nodes.resize(static_cast<int>(nodes.size()), 2);
  for (size_t v = 0; v < nodes.size(); ++v) mesh.nodes.row(static_cast<int>(v)) = nodes[v];

  mesh.elems.resize(static_cast<int>(lin.tris.size()), 6);
  std::vector<std::array<int, 3>> boundary_edges; // (v0, v1, mid), CCW
  for (size_t t = 0; t < lin.tris.size(); ++t) {
    const auto& tri = lin.tris[t];
    int         mid[3];
    for (int e = 0; e < 3; ++e) mid[e] = edge_mid[key(tri[e], tri[(e + 1) % 3])];
    mesh.elems.row(static_cast<int>(t)) << tri[0], tri[1], tri[2], mid[0], mid[1],
        mid[2];
    for (int e = 0; e < 3; ++e)
      if (edge_uses[key(tri[e], tri[(e + 1) % 3])] == 1)
        boundary_edges.push_back({tri[e], tri[(e + 1) % 3], mid[e]});
  }
  mesh.facets.resize(static_cast<int>(boundary_edges.size()), 3);
  for (size_t f = 0; f < boundary_edges.size(); ++f)
    mesh.facets.row(static_cast<int>(f)) << boundary_edges[f][0],
        boundary_edges[f][1], boundary_edges[f][2];
  mesh.finalize();

  // validity: positive reference Jacobian everywhere
  const QuadRule   rule = mass_rule(mesh.kind);
  const ShapeCache sc   = eval_shapes(mesh.kind, rule);
  for (int e = 0; e < mesh.n_elems(); ++e)
    for (int q = 0; q < rule.npts(); ++q) {
      Mat2 J = Mat2::Zero();
      for (int l = 0; l < 6; ++l) {
        const auto X = mesh.nodes.row(mesh.elems(e, l));
        J.col(0) += X.transpose() * sc.dxi(q, l);
        J.col(1) += X.transpose() * sc.deta(q, l);
      }
      if (J.determinant() <= 0)
        throw std::runtime_error("disc mesh has an inverted element");
    }
  return mesh;
}

FeMesh circle_mesh(Vec2 center, Real radius, Real target_spacing) {
  if (!(target_spacing > 0) || target_spacing >= radius)
    throw std::invalid_argument("circle mesh spacing infeasible: need "
                                "0 < spacing < radius (refine the mesh)");
  const int n_e = std::max<int>(3, static_cast<int>(std::llround(M_PI * radius /
                                                                 target_spacing)));
  FeMesh mesh;
  mesh.kind = ElementKind::p2_edge;
  const int  nn = 2 * n_e;
  const Real da = M_PI / n_e;     // node angular spacing
  const Real a0 = da / 3;         // breaks mirror symmetry of the node set
  mesh.nodes.resize(nn, 2);
  for (int m = 0; m < nn; ++m) {
    const Real a = a0 + m * da;
    mesh.nodes.row(m) << center.x() + radius * std::cos(a),
        center.y() + radius * std::sin(a);
  }
  mesh.elems.resize(n_e, 3);
  for (int e = 0; e < n_e; ++e)
    mesh.elems.row(e) << 2 * e, (2 * e + 2) % nn, 2 * e + 1;
  mesh.facets.resize(0, 3);
  mesh.finalize();
  return mesh;
}

MatX element_ref_nodes(const FeMesh& mesh, int elem, Real period1) {
  const int nn = nodes_per_element(mesh.kind);
  MatX      X(nn, 2);
  for (int l = 0; l < nn; ++l) X.row(l) = mesh.nodes.row(mesh.elems(elem, l));
  if (period1 > 0) {
    // unwrap the periodic reference coordinate about the first node
    const Real x0 = X(0, 0);
    for (int l = 1; l < nn; ++l) {
      Real d = X(l, 0) - x0;
      if (d > 0.5 * period1) X(l, 0) -= period1;
      if (d < -0.5 * period1) X(l, 0) += period1;
    }
  }
  return X;
}

void deformation_gradient(const FeMesh& mesh, const Config& x, int elem,
                          const QuadRule& rule, const ShapeCache& sc,
                          std::vector<Mat2>& F) {
  if (element_dim(mesh.kind) != 2)
    throw std::logic_error("deformation gradient needs a 2D reference element");
  const int nn = nodes_per_element(mesh.kind);
  F.resize(rule.npts());
  const MatX Xref = element_ref_nodes(mesh, elem, mesh.ref_period1);
  for (int q = 0; q < rule.npts(); ++q) {
    Mat2 J = Mat2::Zero(), A = Mat2::Zero();
    for (int l = 0; l < nn; ++l) {
      const Real di = sc.dxi(q, l), de = sc.deta(q, l);
      J.col(0) += Xref.row(l).transpose() * di;
      J.col(1) += Xref.row(l).transpose() * de;
      const auto xl = x.row(mesh.elems(elem, l));
      A.col(0) += xl.transpose() * di;
      A.col(1) += xl.transpose() * de;
    }
    F[q] = A * J.inverse();
  }
}

namespace {
// geometric weight det(J_ref) (2D) or |X'| (1D) at one rule point
Real ref_jacobian(ElementKind kind, const MatX& Xref, const ShapeCache& sc, int q) {
  const int nn = static_cast<int>(Xref.rows());
  if (element_dim(kind) == 2) {
    Mat2 J = Mat2::Zero();
    for (int l = 0; l < nn; ++l) {
      J.col(0) += Xref.row(l).transpose() * sc.dxi(q, l);
      J.col(1) += Xref.row(l).transpose() * sc.deta(q, l);
    }
    return J.determinant();
  }
  Vec2 t = Vec2::Zero();
  for (int l = 0; l < nn; ++l) t += Xref.row(l).transpose() * sc.dxi(q, l);
  return t.norm();
}
} // namespace

SparseMat mass_matrix(const FeMesh& mesh) {
  const QuadRule   rule = mass_rule(mesh.kind);
  const ShapeCache sc   = eval_shapes(mesh.kind, rule);
  const int        nn   = nodes_per_element(mesh.kind);
  std::vector<Eigen::Triplet<Real>> trip;
  trip.reserve(static_cast<size_t>(mesh.n_elems()) * nn * nn);
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const MatX Xref = element_ref_nodes(mesh, e, mesh.ref_period1);
    MatX       Me   = MatX::Zero(nn, nn);
    for (int q = 0; q < rule.npts(); ++q) {
      const Real gw = ref_jacobian(mesh.kind, Xref, sc, q) * rule.w[q];
      Me += gw * (sc.phi.row(q).transpose() * sc.phi.row(q));
    }
    for (int a = 0; a < nn; ++a)
      for (int b = 0; b < nn; ++b)
        trip.emplace_back(mesh.elems(e, a), mesh.elems(e, b), Me(a, b));
  }
  SparseMat M(mesh.n_nodes(), mesh.n_nodes());
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

SparseMat boundary_mass_matrix(const FeMesh& mesh) {
  const int nb = static_cast<int>(mesh.boundary_nodes.size());
  SparseMat M(nb, nb);
  if (mesh.n_facets() == 0) return M;
  const QuadRule   rule = mass_rule(mesh.facet_kind);
  const ShapeCache sc   = eval_shapes(mesh.facet_kind, rule);
  const int        fn   = nodes_per_element(mesh.facet_kind);
  std::vector<Eigen::Triplet<Real>> trip;
  for (int f = 0; f < mesh.n_facets(); ++f) {
    MatX Xref(fn, 2);
    for (int l = 0; l < fn; ++l) Xref.row(l) = mesh.nodes.row(mesh.facets(f, l));
    if (mesh.ref_period1 > 0) {
      const Real x0 = Xref(0, 0);
      for (int l = 1; l < fn; ++l) {
        if (Xref(l, 0) - x0 > 0.5 * mesh.ref_period1) Xref(l, 0) -= mesh.ref_period1;
        if (Xref(l, 0) - x0 < -0.5 * mesh.ref_period1) Xref(l, 0) += mesh.ref_period1;
      }
    }
    MatX Me = MatX::Zero(fn, fn);
    for (int q = 0; q < rule.npts(); ++q) {
      const Real gw = ref_jacobian(mesh.facet_kind, Xref, sc, q) * rule.w[q];
      Me += gw * (sc.phi.row(q).transpose() * sc.phi.row(q));
    }
    for (int a = 0; a < fn; ++a)
      for (int b = 0; b < fn; ++b)
        trip.emplace_back(mesh.trace_index[mesh.facets(f, a)],
                          mesh.trace_index[mesh.facets(f, b)], Me(a, b));
  }
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

MassSolver::MassSolver(const FeMesh& mesh, MassMode mode)
    : MassSolver(mass_matrix(mesh), mode) {}

MassSolver::MassSolver(SparseMat M, MassMode mode) : m_(std::move(M)), mode_(mode) {
  const int n = static_cast<int>(m_.rows());
  inv_diag_.resize(n);
  if (mode_ == MassMode::lumped) {
    VecX rowsum = m_ * VecX::Ones(n);
    for (int i = 0; i < n; ++i) inv_diag_[i] = 1.0 / rowsum[i];
  } else {
    VecX diag = m_.diagonal();
    for (int i = 0; i < n; ++i) inv_diag_[i] = 1.0 / diag[i];
  }
}

VecX MassSolver::solve(const VecX& rhs) const {
  if (mode_ == MassMode::lumped) return rhs.cwiseProduct(inv_diag_);
  const Real bnorm = rhs.norm();
  VecX       x     = VecX::Zero(rhs.size());
  if (bnorm == 0) return x;
  VecX r  = rhs;
  VecX z  = r.cwiseProduct(inv_diag_);
  VecX p  = z;
  Real rz = r.dot(z);
  const int max_it = 10 * static_cast<int>(rhs.size()) + 50;
  for (int it = 0; it < max_it; ++it) {
    const VecX q     = m_ * p;
    const Real alpha = rz / p.dot(q);
    x += alpha * p;
    r -= alpha * q;
    if (r.norm() <= 1e-12 * bnorm) return x;
    z             = r.cwiseProduct(inv_diag_);
    const Real nz = r.dot(z);
    p             = z + (nz / rz) * p;
    rz            = nz;
  }
  throw std::runtime_error("mass solve failed to reach 1e-12");
}

NodeArray MassSolver::solve(const NodeArray& rhs) const {
  NodeArray out(rhs.rows(), 2);
  out.col(0) = solve(VecX(rhs.col(0)));
  out.col(1) = solve(VecX(rhs.col(1)));
  return out;
}

Real lagrangian_inner_product(const SparseMat& M, const NodeArray& U,
                              const NodeArray& V) {
  Real acc = 0;
  for (int c = 0; c < 2; ++c)
    acc += VecX(U.col(c)).dot(M * VecX(V.col(c)));
  return acc;
}

Real mesh_measure(const FeMesh& mesh) {
  const QuadRule   rule = mass_rule(mesh.kind);
  const ShapeCache sc   = eval_shapes(mesh.kind, rule);
  Real             acc  = 0;
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const MatX Xref = element_ref_nodes(mesh, e, mesh.ref_period1);
    for (int q = 0; q < rule.npts(); ++q)
      acc += ref_jacobian(mesh.kind, Xref, sc, q) * rule.w[q];
  }
  return acc;
}

Real config_measure(const FeMesh& mesh, const Config& x) {
  const QuadRule    rule = mass_rule(mesh.kind);
  const ShapeCache  sc   = eval_shapes(mesh.kind, rule);
  std::vector<Mat2> F;
  Real              acc = 0;
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const MatX Xref = element_ref_nodes(mesh, e, mesh.ref_period1);
    deformation_gradient(mesh, x, e, rule, sc, F);
    for (int q = 0; q < rule.npts(); ++q)
      acc += F[q].determinant() * ref_jacobian(mesh.kind, Xref, sc, q) * rule.w[q];
  }
  return acc;
}

void dump_mesh(std::ostream& os, const FeMesh& mesh, const Config& x) {
  char buf[40];
  os << "mesh " << element_kind_name(mesh.kind) << " nodes " << mesh.n_nodes()
     << " elems " << mesh.n_elems() << " facets " << mesh.n_facets() << "\n";
  for (int v = 0; v < mesh.n_nodes(); ++v) {
    os << "node";
    const Real vals[4] = {mesh.nodes(v, 0), mesh.nodes(v, 1), x(v, 0), x(v, 1)};
    for (Real val : vals) {
      std::snprintf(buf, sizeof buf, " %.17g", val);
      os << buf;
    }
    os << "\n";
  }
  for (int e = 0; e < mesh.n_elems(); ++e) {
    os << "elem";
    for (int l = 0; l < mesh.elems.cols(); ++l) os << " " << mesh.elems(e, l);
    os << "\n";
  }
  for (int f = 0; f < mesh.n_facets(); ++f) {
    os << "facet";
    for (int l = 0; l < mesh.facets.cols(); ++l) os << " " << mesh.facets(f, l);
    os << "\n";
  }
}

} // namespace ibfsi
