#include "ibfsi/coupling.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ibfsi {

namespace {

const Eigen::MatrixXi& entity_table(const FeMesh& mesh, bool on_facets) {
  return on_facets ? mesh.facets : mesh.elems;
}

// reference nodes of one entity, seam-unwrapped
MatX entity_ref_nodes(const FeMesh& mesh, bool on_facets, int i) {
  const auto& tab = entity_table(mesh, on_facets);
  const int   nn  = static_cast<int>(tab.cols());
  MatX        X(nn, 2);
  for (int l = 0; l < nn; ++l) X.row(l) = mesh.nodes.row(tab(i, l));
  if (mesh.ref_period1 > 0) {
    const Real x0 = X(0, 0);
    for (int l = 1; l < nn; ++l) {
      if (X(l, 0) - x0 > 0.5 * mesh.ref_period1) X(l, 0) -= mesh.ref_period1;
      if (X(l, 0) - x0 < -0.5 * mesh.ref_period1) X(l, 0) += mesh.ref_period1;
    }
  }
  return X;
}

Real entity_extent(const FeMesh& mesh, bool on_facets, int i, const Config& x) {
  const auto& tab = entity_table(mesh, on_facets);
  Real lo[2] = {1e300, 1e300}, hi[2] = {-1e300, -1e300};
  for (int l = 0; l < tab.cols(); ++l)
    for (int d = 0; d < 2; ++d) {
      lo[d] = std::min(lo[d], x(tab(i, l), d));
      hi[d] = std::max(hi[d], x(tab(i, l), d));
    }
  return std::max(hi[0] - lo[0], hi[1] - lo[1]);
}

Real ref_weight(ElementKind kind, const MatX& Xref, const ShapeCache& sc, int q) {
  if (element_dim(kind) == 2) {
    Mat2 J = Mat2::Zero();
    for (int l = 0; l < Xref.rows(); ++l) {
      J.col(0) += Xref.row(l).transpose() * sc.dxi(q, l);
      J.col(1) += Xref.row(l).transpose() * sc.deta(q, l);
    }
    return J.determinant();
  }
  Vec2 t = Vec2::Zero();
  for (int l = 0; l < Xref.rows(); ++l) t += Xref.row(l).transpose() * sc.dxi(q, l);
  return t.norm();
}

InteractionRule build_rule(const FeMesh& mesh, const Config& x, Real h,
                           Real density, Real rebuild_threshold, bool on_facets) {
  if (!(h > 0)) throw std::invalid_argument("interaction rule needs h > 0");
  InteractionRule rule;
  rule.kind              = on_facets ? mesh.facet_kind : mesh.kind;
  rule.on_facets         = on_facets;
  rule.h                 = h;
  rule.density           = density;
  rule.rebuild_threshold = rebuild_threshold;

  const int ne = static_cast<int>(entity_table(mesh, on_facets).rows());
  rule.order.resize(ne);
  rule.weights.resize(ne);
  rule.built_extent.resize(ne);
  std::map<int, QuadRule> rules;
  for (int e = 0; e < ne; ++e) {
    const Real extent = entity_extent(mesh, on_facets, e, x);
    const int  n =
        std::max(2, static_cast<int>(std::ceil(density * extent / h - 1e-12)));
    if (n > max_gauss_points)
      throw std::invalid_argument(
          "element " + std::to_string(e) + " needs " + std::to_string(n) +
          " interaction points per direction (cap " +
          std::to_string(max_gauss_points) + "); refine the structure mesh");
    if (!rules.count(n)) {
      rules[n]       = rule_for(rule.kind, n);
      rule.shapes[n] = eval_shapes(rule.kind, rules[n]);
    }
    const QuadRule&   qr = rules[n];
    const ShapeCache& sc = rule.shapes[n];
    const MatX        Xref = entity_ref_nodes(mesh, on_facets, e);
    VecX              w(qr.npts());
    for (int q = 0; q < qr.npts(); ++q)
      w[q] = ref_weight(rule.kind, Xref, sc, q) * qr.w[q];
    rule.order[e]        = n;
    rule.weights[e]      = std::move(w);
    rule.built_extent[e] = extent;
  }
  return rule;
}

// one-component kernel deposit / gather helpers

struct FaceAxis {
  int  n;
  bool periodic;
};

void deposit(VecX& comp, const FaceAxis& ax1, const FaceAxis& ax2, Real s1,
             Real s2, KernelKind kernel, Real amount) {
  const Stencil1D w1 = kernel_stencil(kernel, s1, ax1.n, ax1.periodic);
  const Stencil1D w2 = kernel_stencil(kernel, s2, ax2.n, ax2.periodic);
  for (int b = 0; b < w2.count; ++b) {
    const int j = ax2.periodic ? ((w2.start + b) % ax2.n + ax2.n) % ax2.n
                               : w2.start + b;
    for (int a = 0; a < w1.count; ++a) {
      const int i = ax1.periodic ? ((w1.start + a) % ax1.n + ax1.n) % ax1.n
                                 : w1.start + a;
      comp[j * ax1.n + i] += amount * w1.w[a] * w2.w[b];
    }
  }
}

Real gather(const VecX& comp, const FaceAxis& ax1, const FaceAxis& ax2, Real s1,
            Real s2, KernelKind kernel) {
  const Stencil1D w1 = kernel_stencil(kernel, s1, ax1.n, ax1.periodic);
  const Stencil1D w2 = kernel_stencil(kernel, s2, ax2.n, ax2.periodic);
  Real            acc = 0;
  for (int b = 0; b < w2.count; ++b) {
    const int j = ax2.periodic ? ((w2.start + b) % ax2.n + ax2.n) % ax2.n
                               : w2.start + b;
    for (int a = 0; a < w1.count; ++a) {
      const int i = ax1.periodic ? ((w1.start + a) % ax1.n + ax1.n) % ax1.n
                                 : w1.start + a;
      acc += comp[j * ax1.n + i] * w1.w[a] * w2.w[b];
    }
  }
  return acc;
}

// index-space coordinates of a point for both face families
struct FaceCoords {
  Real u1s1, u1s2, u2s1, u2s2;
};

FaceCoords face_coords(const GridSpec& g, Vec2 p) {
  const Real sx = (p.x() - g.origin.x()) / g.h;
  const Real sy = (p.y() - g.origin.y()) / g.h;
  return {sx, sy - 0.5, sx - 0.5, sy};
}

void check_inside(const GridSpec& g, Vec2 p, bool on_facets, int entity) {
  const bool out1 = !g.periodic1() && (p.x() < g.origin.x() ||
                                       p.x() > g.origin.x() + g.extent1());
  const bool out2 = !g.periodic2() && (p.y() < g.origin.y() ||
                                       p.y() > g.origin.y() + g.extent2());
  if (out1 || out2)
    throw std::runtime_error("interaction point of " +
                             std::string(on_facets ? "facet " : "element ") +
                             std::to_string(entity) + " left the fluid domain");
}

void require_rule(const InteractionRule& rule, const FeMesh& mesh,
                  bool on_facets) {
  if (rule.on_facets != on_facets)
    throw std::logic_error(on_facets ? "rule was not built over facets"
                                     : "rule was not built over elements");
  if (rule.n_entities() !=
      static_cast<int>(entity_table(mesh, on_facets).rows()))
    throw std::logic_error("interaction rule does not match the mesh");
}

StaggeredField spread_impl(const InteractionRule& rule, const FeMesh& mesh,
                           const Config& x, const NodeArray& values,
                           const GridSpec& grid, KernelKind kernel,
                           bool on_facets) {
  require_rule(rule, mesh, on_facets);
  StaggeredField f   = StaggeredField::zeros(grid);
  const auto&    tab = entity_table(mesh, on_facets);
  const int      nn  = static_cast<int>(tab.cols());
  const FaceAxis u1x{grid.u1_n1(), grid.periodic1()};
  const FaceAxis u1y{grid.u1_n2(), grid.periodic2()};
  const FaceAxis u2x{grid.u2_n1(), grid.periodic1()};
  const FaceAxis u2y{grid.u2_n2(), grid.periodic2()};

  MatX xe(nn, 2), ve(nn, 2);
  for (int e = 0; e < rule.n_entities(); ++e) {
    for (int l = 0; l < nn; ++l) {
      const int node = tab(e, l);
      xe.row(l)      = x.row(node);
      ve.row(l) = values.row(on_facets ? mesh.trace_index[node] : node);
    }
    const ShapeCache& sc = rule.shapes.at(rule.order[e]);
    const VecX&       w  = rule.weights[e];
    for (int q = 0; q < w.size(); ++q) {
      const Vec2 p   = (sc.phi.row(q) * xe).transpose();
      const Vec2 val = (sc.phi.row(q) * ve).transpose();
      check_inside(grid, p, on_facets, e);
      const FaceCoords fc  = face_coords(grid, p);
      const Real       wq  = w[q] / (grid.h * grid.h); // delta_h = phi phi / h^2
      deposit(f.u1, u1x, u1y, fc.u1s1, fc.u1s2, kernel, val.x() * wq);
      deposit(f.u2, u2x, u2y, fc.u2s1, fc.u2s2, kernel, val.y() * wq);
    }
  }
  return f;
}

} // namespace

int InteractionRule::total_points() const {
  int n = 0;
  for (const VecX& w : weights) n += static_cast<int>(w.size());
  return n;
}

InteractionRule build_interaction_rule(const FeMesh& mesh, const Config& x,
                                       Real h, Real density,
                                       Real rebuild_threshold) {
  return build_rule(mesh, x, h, density, rebuild_threshold, false);
}

InteractionRule build_boundary_interaction_rule(const FeMesh& mesh,
                                                const Config& x, Real h,
                                                Real density,
                                                Real rebuild_threshold) {
  return build_rule(mesh, x, h, density, rebuild_threshold, true);
}

bool needs_rebuild(const InteractionRule& rule, const FeMesh& mesh,
                   const Config& x) {
  require_rule(rule, mesh, rule.on_facets);
  for (int e = 0; e < rule.n_entities(); ++e)
    if (entity_extent(mesh, rule.on_facets, e, x) >
        rule.built_extent[e] * (1 + rule.rebuild_threshold))
      return true;
  return false;
}

StaggeredField spread_volume(const InteractionRule& rule, const FeMesh& mesh,
                             const Config& x, const NodeArray& values,
                             const GridSpec& grid, KernelKind kernel) {
  return spread_impl(rule, mesh, x, values, grid, kernel, false);
}

StaggeredField spread_surface(const InteractionRule& rule, const FeMesh& mesh,
                              const Config& x, const NodeArray& traction,
                              const GridSpec& grid, KernelKind kernel) {
  return spread_impl(rule, mesh, x, traction, grid, kernel, true);
}

Vec2 interp_velocity(const StaggeredField& u, const GridSpec& grid,
                     KernelKind kernel, Vec2 p) {
  const FaceAxis   u1x{grid.u1_n1(), grid.periodic1()};
  const FaceAxis   u1y{grid.u1_n2(), grid.periodic2()};
  const FaceAxis   u2x{grid.u2_n1(), grid.periodic1()};
  const FaceAxis   u2y{grid.u2_n2(), grid.periodic2()};
  const FaceCoords fc = face_coords(grid, p);
  return Vec2(gather(u.u1, u1x, u1y, fc.u1s1, fc.u1s2, kernel),
              gather(u.u2, u2x, u2y, fc.u2s1, fc.u2s2, kernel));
}

NodeArray restrict_velocity(const InteractionRule& rule, const FeMesh& mesh,
                            const Config& x, const StaggeredField& u,
                            const MassSolver& mass, const GridSpec& grid,
                            KernelKind kernel) {
  require_rule(rule, mesh, false);
  NodeArray   rhs = NodeArray::Zero(mesh.n_nodes(), 2);
  const auto& tab = mesh.elems;
  const int   nn  = static_cast<int>(tab.cols());
  MatX        xe(nn, 2);
  for (int e = 0; e < rule.n_entities(); ++e) {
    for (int l = 0; l < nn; ++l) xe.row(l) = x.row(tab(e, l));
    const ShapeCache& sc = rule.shapes.at(rule.order[e]);
    const VecX&       w  = rule.weights[e];
    for (int q = 0; q < w.size(); ++q) {
      const Vec2 p = (sc.phi.row(q) * xe).transpose();
      check_inside(grid, p, false, e);
      const Vec2 uib = interp_velocity(u, grid, kernel, p);
      for (int l = 0; l < nn; ++l)
        rhs.row(tab(e, l)) += (w[q] * sc.phi(q, l)) * uib.transpose();
    }
  }
  return mass.solve(rhs);
}

} // namespace ibfsi
