#include "ibfsi/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <iostream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

namespace ibfsi {

namespace {
constexpr Real pi = 3.14159265358979323846;

void check_shell_geometry(Real R, Real w, Real mu_e) {
  if (!(R > 0) || !(w > 0) || !(mu_e > 0))
    throw std::invalid_argument("shell pressure needs positive R, w, mu_e");
}
} // namespace

Real shell_exact_p0(ShellKind kind, Real R, Real w, Real mu_e) {
  check_shell_geometry(R, w, mu_e);
  const Real b  = R + w;
  Real       p0 = pi * mu_e / (3 * w) * (R * R - b * b * b / R);
  if (kind == ShellKind::orthotropic)
    p0 -= pi * mu_e * R;
  return p0;
}

Real shell_exact_pressure(ShellKind kind, Real R, Real w, Real mu_e, Vec2 x,
                          Vec2 center) {
  check_shell_geometry(R, w, mu_e);
  const Real b  = R + w;
  const Real p0 = shell_exact_p0(kind, R, w, mu_e);
  const Real r  = (x - center).norm();
  if (kind == ShellKind::anisotropic) {
    if (r <= R)
      return p0 + mu_e / R;
    if (r <= b)
      return p0 + mu_e / w * (b - r) / R;
    return p0;
  }
  if (r <= R)
    return p0 + mu_e * (1 / R - 1 / b);
  if (r <= b)
    return p0 + mu_e / w * ((b - r) / R + R / b);
  return p0;
}

namespace {

GridSpec refined(GridSpec g, int factor) {
  g.n1 *= factor;
  g.n2 *= factor;
  g.h /= factor;
  return g;
}

[[noreturn]] void shape_mismatch() {
  throw std::invalid_argument(
      "field shape matches neither the grid nor a power-of-two refinement");
}

// power-of-two refinement factor of `a` relative to the grid, from shape
int refinement_factor(const CellField& a, const GridSpec& g) {
  for (int f = 1; f <= 64; f *= 2)
    if (a.n1 == g.n1 * f && a.n2 == g.n2 * f)
      return f;
  shape_mismatch();
}

int refinement_factor(const StaggeredField& a, const GridSpec& g) {
  for (int f = 1; f <= 64; f *= 2) {
    const GridSpec gf = refined(g, f);
    if (a.s1 == gf.u1_n1() && a.s2 == gf.u1_n2() && a.t1 == gf.u2_n1() &&
        a.t2 == gf.u2_n2())
      return f;
  }
  shape_mismatch();
}

CellField restrict_to(CellField a, const GridSpec&, int factor) {
  for (int f = factor; f > 1; f /= 2)
    a = restrict_cell(a);
  return a;
}

StaggeredField restrict_to(StaggeredField a, const GridSpec& g, int factor) {
  for (int f = factor; f > 1; f /= 2)
    a = restrict_staggered(a, refined(g, f));
  return a;
}

FieldNorms difference_norms(const CellField& a, const CellField& b,
                            const GridSpec& g) {
  CellField d = a;
  d.data -= b.data;
  return norms(d, g);
}

FieldNorms difference_norms(const StaggeredField& a, const StaggeredField& b,
                            const GridSpec& g) {
  StaggeredField d = a;
  d.u1 -= b.u1;
  d.u2 -= b.u2;
  return norms(d, g);
}

template <class Field>
FieldNorms error_norms_impl(Field a, const Field& b, const GridSpec& g) {
  if (refinement_factor(b, g) != 1)
    throw std::invalid_argument("reference field does not match the grid");
  a = restrict_to(std::move(a), g, refinement_factor(a, g));
  return difference_norms(a, b, g);
}

Real order_of(Real ec, Real ef, bool& degenerate) {
  if (ec == 0 || ef == 0) {
    degenerate = true;
    return std::numeric_limits<Real>::quiet_NaN();
  }
  return std::log2(ec / ef);
}

template <class Field>
RichardsonOrders richardson_impl(const Field& coarse, const Field& medium,
                                 const Field& fine, const GridSpec& g) {
  const GridSpec g2 = refined(g, 2);
  if (refinement_factor(coarse, g) != 1 || refinement_factor(medium, g2) != 1 ||
      refinement_factor(fine, refined(g, 4)) != 1)
    throw std::invalid_argument("richardson_order needs fields on N, 2N, 4N");
  RichardsonOrders r;
  r.e_coarse = difference_norms(restrict_to(medium, g, 2), coarse, g);
  r.e_fine   = difference_norms(restrict_to(fine, g2, 2), medium, g2);
  bool degenerate = false;
  r.order.l1   = order_of(r.e_coarse.l1, r.e_fine.l1, degenerate);
  r.order.l2   = order_of(r.e_coarse.l2, r.e_fine.l2, degenerate);
  r.order.linf = order_of(r.e_coarse.linf, r.e_fine.linf, degenerate);
  if (degenerate)
    std::cerr << "richardson_order: vanishing restriction difference, "
                 "order undefined (NaN)\n";
  return r;
}

} // namespace

FieldNorms error_norms(CellField a, const CellField& b, const GridSpec& g) {
  return error_norms_impl(std::move(a), b, g);
}

FieldNorms error_norms(StaggeredField a, const StaggeredField& b,
                       const GridSpec& g) {
  return error_norms_impl(std::move(a), b, g);
}

RichardsonOrders richardson_order(const CellField& coarse,
                                  const CellField& medium,
                                  const CellField& fine, const GridSpec& g) {
  return richardson_impl(coarse, medium, fine, g);
}

RichardsonOrders richardson_order(const StaggeredField& coarse,
                                  const StaggeredField& medium,
                                  const StaggeredField& fine,
                                  const GridSpec& g) {
  return richardson_impl(coarse, medium, fine, g);
}

Real structure_volume(const FeMesh& mesh, const Config& x) {
  if (element_dim(mesh.kind) != 2)
    throw std::invalid_argument("structure_volume: mesh has no area");
  if (x.rows() != mesh.nodes.rows())
    throw std::invalid_argument("structure_volume: configuration size");
  const QuadRule   rule = mass_rule(mesh.kind);
  const ShapeCache sc   = eval_shapes(mesh.kind, rule);
  const int        nen  = nodes_per_element(mesh.kind);

  Real vol = 0, sign = 0;
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const MatX Xe = element_ref_nodes(mesh, e, mesh.ref_period1);
    for (int q = 0; q < rule.npts(); ++q) {
      Mat2 J = Mat2::Zero(), A = Mat2::Zero();
      for (int l = 0; l < nen; ++l) {
        const Vec2 dl(sc.dxi(q, l), sc.deta(q, l));
        J += Xe.row(l).transpose() * dl.transpose();
        A += x.row(mesh.elems(e, l)).transpose() * dl.transpose();
      }
      const Real detJ = J.determinant();
      const Real detF = (A * J.inverse()).determinant();
      if (sign == 0)
        sign = detF > 0 ? 1 : -1;
      if (sign * detF <= 0)
        throw std::runtime_error("structure_volume: inverted element " +
                                 std::to_string(e));
      vol += sign * detF * detJ * rule.w[q];
    }
  }
  return vol;
}

LiftDrag lift_drag(const InteractionRule& rule, const FeMesh& mesh,
                   const NodeArray& tether_force, Real rho, Real u_inf,
                   Real d) {
  if (rule.on_facets)
    throw std::invalid_argument("lift_drag expects a volume rule");
  if (!(rho > 0) || !(u_inf > 0) || !(d > 0))
    throw std::invalid_argument("lift_drag normalization must be positive");
  if (rule.n_entities() != mesh.n_elems() ||
      tether_force.rows() != mesh.nodes.rows())
    throw std::invalid_argument("lift_drag: rule/mesh/force mismatch");
  const int nen = nodes_per_element(rule.kind);

  Vec2 total = Vec2::Zero();
  for (int e = 0; e < rule.n_entities(); ++e) {
    const ShapeCache& sc = rule.shapes.at(rule.order[e]);
    const VecX&       w  = rule.weights[e];
    for (int q = 0; q < w.size(); ++q) {
      Vec2 f = Vec2::Zero();
      for (int l = 0; l < nen; ++l)
        f += sc.phi(q, l) * tether_force.row(mesh.elems(e, l)).transpose();
      total += w[q] * f;
    }
  }
  LiftDrag out;
  out.force = -total;
  const Real scale = 0.5 * rho * u_inf * u_inf * d;
  out.cd = out.force.x() / scale;
  out.cl = out.force.y() / scale;
  return out;
}

std::optional<Real> strouhal(const std::vector<Real>& t,
                             const std::vector<Real>& lift, Real d, Real u_inf,
                             Real discard) {
  if (t.size() != lift.size())
    throw std::invalid_argument("strouhal: series size mismatch");
  if (!(d > 0) || !(u_inf > 0) || !(discard >= 0) || !(discard < 1))
    throw std::invalid_argument("strouhal: bad parameters");
  const int total = static_cast<int>(t.size());
  const int start = static_cast<int>(std::floor(total * discard));
  const int n     = total - start;
  if (n < 16)
    throw std::invalid_argument("strouhal: fewer than 16 retained samples");
  const Real dt = (t[total - 1] - t[start]) / (n - 1);
  if (!(dt > 0))
    throw std::invalid_argument("strouhal: non-increasing timestamps");
  for (int i = start; i + 1 < total; ++i)
    if (std::abs(t[i + 1] - t[i] - dt) > 1e-6 * dt)
      throw std::invalid_argument("strouhal: non-uniform sampling");

  Real mean = 0;
  for (int i = start; i < total; ++i)
    mean += lift[i];
  mean /= n;
  Real rms = 0;
  for (int i = start; i < total; ++i)
    rms += (lift[i] - mean) * (lift[i] - mean);
  rms = std::sqrt(rms / n);
  if (rms <= 1e-10 * std::max<Real>(1, std::abs(mean)))
    return std::nullopt;

  Eigen::VectorXcd in(n), out(n);
  for (int i = 0; i < n; ++i) {
    const Real hann = 0.5 * (1 - std::cos(2 * pi * i / (n - 1)));
    in[i] = std::complex<Real>((lift[start + i] - mean) * hann, 0);
  }
  Eigen::FFT<Real> fft;
  fft.fwd(out.data(), in.data(), n);

  const int nh = n / 2;
  VecX power(nh + 1);
  for (int k = 0; k <= nh; ++k)
    power[k] = std::norm(out[k]);
  int kpk = 1;
  for (int k = 2; k < nh; ++k)
    if (power[k] > power[kpk])
      kpk = k;

  // noise-floor guard: the peak must dominate the median retained bin
  VecX sorted = power.segment(1, nh - 1);
  std::sort(sorted.begin(), sorted.end());
  const Real median = sorted[(nh - 1) / 2];
  if (!(power[kpk] > 25 * median) || power[kpk] <= 0)
    return std::nullopt;

  Real shift = 0;
  if (kpk > 1 && kpk < nh - 1 && power[kpk - 1] > 0 && power[kpk + 1] > 0) {
    const Real la = std::log(power[kpk - 1]);
    const Real lb = std::log(power[kpk]);
    const Real lc = std::log(power[kpk + 1]);
    const Real den = la - 2 * lb + lc;
    if (den < 0)
      shift = std::clamp(0.5 * (la - lc) / den, -0.5, 0.5);
  }
  const Real freq = (kpk + shift) / (n * dt);
  return freq * d / u_inf;
}

void DiagnosticsSeries::append(const DiagnosticsRecord& r) {
  if (!rows.empty() && !(r.t > rows.back().t))
    throw std::invalid_argument("diagnostics timestamps must increase");
  rows.push_back(r);
}

namespace {
void put17(std::ostream& os, Real v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}
} // namespace

void write_csv(std::ostream& os, const DiagnosticsSeries& s) {
  os << "t,CL,CD,volume,ke,umax\n";
  for (const DiagnosticsRecord& r : s.rows) {
    const Real vals[] = {r.t, r.cl, r.cd, r.volume, r.ke, r.umax};
    for (int i = 0; i < 6; ++i) {
      if (i)
        os << ',';
      put17(os, vals[i]);
    }
    os << '\n';
  }
}

DiagnosticsSeries read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "t,CL,CD,volume,ke,umax")
    throw std::runtime_error("diagnostics csv: bad header");
  DiagnosticsSeries s;
  while (std::getline(is, line)) {
    if (line.empty())
      continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    DiagnosticsRecord  r;
    if (!(ls >> r.t >> r.cl >> r.cd >> r.volume >> r.ke >> r.umax))
      throw std::runtime_error("diagnostics csv: bad row '" + line + "'");
    s.append(r);
  }
  return s;
}

std::vector<FieldRecord> read_fields(std::istream& is) {
  std::vector<FieldRecord> recs;
  std::string              tok;
  while (is >> tok) {
    if (tok != "field")
      throw std::runtime_error("field dump: expected 'field', got '" + tok +
                               "'");
    FieldRecord rec;
    std::string kn1, kn2, kh;
    if (!(is >> rec.name >> kn1 >> rec.n1 >> kn2 >> rec.n2 >> kh >> rec.h) ||
        kn1 != "n1" || kn2 != "n2" || kh != "h")
      throw std::runtime_error("field dump: malformed header");
    if (rec.n1 <= 0 || rec.n2 <= 0)
      throw std::runtime_error("field dump: bad shape");
    rec.data.resize(static_cast<Eigen::Index>(rec.n1) * rec.n2);
    for (Eigen::Index k = 0; k < rec.data.size(); ++k)
      if (!(is >> rec.data[k]))
        throw std::runtime_error("field dump: truncated record '" + rec.name +
                                 "'");
    recs.push_back(std::move(rec));
  }
  return recs;
}

const FieldRecord& find_record(const std::vector<FieldRecord>& recs,
                               std::string_view name) {
  for (const FieldRecord& r : recs)
    if (r.name == name)
      return r;
  throw std::runtime_error("field dump: no record named '" +
                           std::string(name) + "'");
}

CellField to_cell(const FieldRecord& rec, const GridSpec& g) {
  if (rec.n1 != g.n1 || rec.n2 != g.n2)
    throw std::runtime_error("field record '" + rec.name +
                             "' does not match the grid");
  CellField f = CellField::zeros(g);
  f.data      = rec.data;
  return f;
}

StaggeredField to_staggered(const FieldRecord& rec1, const FieldRecord& rec2,
                            const GridSpec& g) {
  StaggeredField u = StaggeredField::zeros(g);
  if (rec1.n1 != u.s1 || rec1.n2 != u.s2 || rec2.n1 != u.t1 ||
      rec2.n2 != u.t2)
    throw std::runtime_error("field records '" + rec1.name + "'/'" +
                             rec2.name + "' do not match the grid");
  u.u1 = rec1.data;
  u.u2 = rec2.data;
  return u;
}

} // namespace ibfsi
