#include "ibfsi/ins_solver.hpp"

#include <optional>
#include <sstream>
#include <utility>

namespace ibfsi {

namespace {

const FeMesh& mesh_of(const Structure& s) {
  return std::visit([](const auto& a) -> const FeMesh& { return a.mesh; }, s);
}

bool uses_transmission(const Structure& s) {
  const auto* es = std::get_if<ElasticStructure>(&s);
  return es && es->formulation == Formulation::partitioned &&
         es->mesh.n_facets() > 0;
}

void axpy(StaggeredField& y, Real a, const StaggeredField& x) {
  y.u1 += a * x.u1;
  y.u2 += a * x.u2;
}

} // namespace

struct IbSolver::Impl {
  GridSpec               g;
  FluidParams            fp;
  Real                   dt = 0, cfl_max = 0.5, alpha = 0, nu = 0;
  std::vector<Structure> structures;
  CouplingParams         cp;
  SaddleSolver           saddle;

  std::function<void(Real, GridSpec&)> bc_update;

  struct StructOps {
    MassSolver                vol_mass;
    std::optional<MassSolver> bnd_mass;
    InteractionRule           vol_rule, bnd_rule;
    bool                      built = false;
  };
  std::vector<StructOps> ops;

  Impl(const GridSpec& grid, FluidParams f, Real dtin,
       std::vector<Structure> st, CouplingParams c, Real tol, Real cfl)
      : g(grid), fp(f), dt(dtin), cfl_max(cfl), alpha(f.rho / dtin),
        nu(f.mu / 2), structures(std::move(st)), cp(c),
        saddle(grid, f, dtin, tol) {
    if (!(cfl_max > 0)) throw std::invalid_argument("cfl_max must be positive");
    ops.reserve(structures.size());
    for (const Structure& s : structures) {
      StructOps so{MassSolver(mesh_of(s)), {}, {}, {}, false};
      if (uses_transmission(s))
        so.bnd_mass.emplace(boundary_mass_matrix(mesh_of(s)));
      ops.push_back(std::move(so));
    }
  }

  GridSpec at(Real t) const {
    GridSpec gg = g;
    if (bc_update) bc_update(t, gg);
    return gg;
  }

  void ensure_rules(std::size_t k, const Config& x) {
    StructOps&    so = ops[k];
    const FeMesh& m  = mesh_of(structures[k]);
    bool          need = !so.built || needs_rebuild(so.vol_rule, m, x);
    if (!need && uses_transmission(structures[k]))
      need = needs_rebuild(so.bnd_rule, m, x);
    if (!need) return;
    so.vol_rule =
        build_interaction_rule(m, x, g.h, cp.density, cp.rebuild_threshold);
    if (uses_transmission(structures[k]))
      so.bnd_rule = build_boundary_interaction_rule(m, x, g.h, cp.density,
                                                    cp.rebuild_threshold);
    so.built = true;
  }

  NodeArray restrict_at(std::size_t k, const Config& x,
                        const StaggeredField& u) {
    ensure_rules(k, x);
    return restrict_velocity(ops[k].vol_rule, mesh_of(structures[k]), x, u,
                             ops[k].vol_mass, g, cp.kernel);
  }

  StaggeredField spread_all(const std::vector<Config>&    chi,
                            const std::vector<NodeArray>& vel) {
    StaggeredField f = StaggeredField::zeros(g);
    for (std::size_t k = 0; k < structures.size(); ++k) {
      ensure_rules(k, chi[k]);
      const StructOps& so = ops[k];
      if (const auto* es = std::get_if<ElasticStructure>(&structures[k])) {
        if (es->formulation == Formulation::partitioned) {
          const LagrangianForce lf = assemble_partitioned(
              es->mesh, chi[k], es->model, so.vol_mass, *so.bnd_mass);
          axpy(f, 1,
               spread_volume(so.vol_rule, es->mesh, chi[k], lf.F, g, cp.kernel));
          if (es->mesh.n_facets() > 0)
            axpy(f, 1,
                 spread_surface(so.bnd_rule, es->mesh, chi[k], lf.T, g,
                                cp.kernel));
        } else {
          const LagrangianForce lf =
              assemble_unified(es->mesh, chi[k], es->model, so.vol_mass);
          axpy(f, 1,
               spread_volume(so.vol_rule, es->mesh, chi[k], lf.G, g, cp.kernel));
        }
      } else {
        const auto&           ps = std::get<PenaltyStructure>(structures[k]);
        const LagrangianForce lf = rigid_force(ps.penalty, chi[k], vel[k]);
        axpy(f, 1,
             spread_volume(so.vol_rule, ps.mesh, chi[k], lf.F, g, cp.kernel));
      }
    }
    return f;
  }

  // alpha u^n + nu L u^n - rho A + f, boundary ghosts from gn
  StaggeredField cn_rhs(const StaggeredField& un, const StaggeredField& A,
                        const StaggeredField& f, const GridSpec& gn) const {
    const StaggeredField lap = laplacian(un, gn);
    StaggeredField       r   = StaggeredField::zeros(g);
    r.u1 = alpha * un.u1 + nu * lap.u1 - fp.rho * A.u1 + f.u1;
    r.u2 = alpha * un.u2 + nu * lap.u2 - fp.rho * A.u2 + f.u2;
    return r;
  }

  void cfl_check(const StaggeredField& u) const {
    const Real c = max_abs(u) * dt / g.h;
    if (c > cfl_max) {
      std::ostringstream os;
      os << "CFL bound exceeded: max|u| dt / h = " << c << " > " << cfl_max;
      throw std::runtime_error(os.str());
    }
  }

  void check_state(const TimeStepState& s) const {
    if (s.dt != dt)
      throw std::invalid_argument("state dt does not match the solver");
    if (s.chi.size() != structures.size() ||
        s.chi_dot.size() != structures.size())
      throw std::invalid_argument("state structure count mismatch");
  }
};

IbSolver::IbSolver(const GridSpec& g, FluidParams fp, Real dt,
                   std::vector<Structure> structures, CouplingParams cp,
                   Real solver_tol, Real cfl_max)
    : impl_(std::make_unique<Impl>(g, fp, dt, std::move(structures), cp,
                                   solver_tol, cfl_max)) {}

IbSolver::~IbSolver()                              = default;
IbSolver::IbSolver(IbSolver&&) noexcept            = default;
IbSolver& IbSolver::operator=(IbSolver&&) noexcept = default;

void IbSolver::set_boundary_values(std::function<void(Real, GridSpec&)> update) {
  impl_->bc_update = std::move(update);
}

TimeStepState IbSolver::make_state(const StaggeredField&  u0,
                                   std::vector<Config> chi0) const {
  const Impl&    im    = *impl_;
  StaggeredField shape = StaggeredField::zeros(im.g);
  if (u0.s1 != shape.s1 || u0.s2 != shape.s2 || u0.t1 != shape.t1 ||
      u0.t2 != shape.t2)
    throw std::invalid_argument("initial velocity does not match the grid");
  if (chi0.size() != im.structures.size())
    throw std::invalid_argument("one initial configuration per structure required");
  for (std::size_t k = 0; k < chi0.size(); ++k)
    if (chi0[k].rows() != mesh_of(im.structures[k]).n_nodes() ||
        chi0[k].cols() != 2)
      throw std::invalid_argument("initial configuration shape mismatch");
  TimeStepState s;
  s.u   = u0;
  s.p   = CellField::zeros(im.g);
  s.adv = StaggeredField::zeros(im.g);
  s.chi = std::move(chi0);
  s.chi_dot.reserve(s.chi.size());
  for (const Config& c : s.chi) s.chi_dot.push_back(NodeArray::Zero(c.rows(), 2));
  s.t    = 0;
  s.dt   = im.dt;
  s.step = 0;
  return s;
}

SaddleSolveReport IbSolver::ib_initial_step(TimeStepState& s) {
  Impl& im = *impl_;
  if (s.step != 0)
    throw std::invalid_argument("initial step requires step index 0");
  im.check_state(s);
  im.cfl_check(s.u);
  const Real     dt = im.dt;
  const GridSpec g0 = im.at(s.t), gh = im.at(s.t + dt / 2),
                 g1 = im.at(s.t + dt);

  for (std::size_t k = 0; k < im.structures.size(); ++k)
    s.chi_dot[k] = im.restrict_at(k, s.chi[k], s.u);

  // predictor: everything at time n, pressure guess 0
  StaggeredField A0   = advect(s.u, g0);
  StaggeredField rhs0 = im.cn_rhs(s.u, A0, im.spread_all(s.chi, s.chi_dot), g0);
  StaggeredField ut;
  CellField      pt;
  im.saddle.solve(rhs0, g1, s.u, CellField::zeros(im.g), ut, pt);

  // corrector: advection and forces at the predicted midpoint
  std::vector<Config> chi_half = s.chi;
  for (std::size_t k = 0; k < chi_half.size(); ++k)
    chi_half[k] += (dt / 2) * s.chi_dot[k];
  StaggeredField uhalf = StaggeredField::zeros(im.g);
  uhalf.u1             = (ut.u1 + s.u.u1) / 2;
  uhalf.u2             = (ut.u2 + s.u.u2) / 2;
  const StaggeredField Ah = advect(uhalf, gh);
  StaggeredField       rhs1 =
      im.cn_rhs(s.u, Ah, im.spread_all(chi_half, s.chi_dot), g0);
  StaggeredField          unew;
  CellField               pnew;
  const SaddleSolveReport rep = im.saddle.solve(rhs1, g1, ut, pt, unew, pnew);

  StaggeredField ubar = StaggeredField::zeros(im.g);
  ubar.u1             = (unew.u1 + s.u.u1) / 2;
  ubar.u2             = (unew.u2 + s.u.u2) / 2;
  for (std::size_t k = 0; k < im.structures.size(); ++k)
    s.chi[k] += dt * im.restrict_at(k, chi_half[k], ubar);

  s.u   = std::move(unew);
  s.p   = std::move(pnew);
  s.adv = std::move(A0);
  s.t += dt;
  s.step = 1;
  return rep;
}

SaddleSolveReport IbSolver::ib_step(TimeStepState& s) {
  Impl& im = *impl_;
  if (s.step < 1)
    throw std::invalid_argument("ib_step requires a completed initial step");
  im.check_state(s);
  im.cfl_check(s.u);
  const Real     dt = im.dt;
  const GridSpec gn = im.at(s.t), g1 = im.at(s.t + dt);

  std::vector<Config> chi_half = s.chi;
  for (std::size_t k = 0; k < im.structures.size(); ++k) {
    s.chi_dot[k] = im.restrict_at(k, s.chi[k], s.u);
    chi_half[k] += (dt / 2) * s.chi_dot[k];
  }

  StaggeredField adv_n = advect(s.u, gn);
  StaggeredField A     = StaggeredField::zeros(im.g);
  A.u1                 = Real(1.5) * adv_n.u1 - Real(0.5) * s.adv.u1;
  A.u2                 = Real(1.5) * adv_n.u2 - Real(0.5) * s.adv.u2;

  const StaggeredField rhs =
      im.cn_rhs(s.u, A, im.spread_all(chi_half, s.chi_dot), gn);
  StaggeredField          unew;
  CellField               pnew;
  const SaddleSolveReport rep = im.saddle.solve(rhs, g1, s.u, s.p, unew, pnew);

  StaggeredField ubar = StaggeredField::zeros(im.g);
  ubar.u1             = (unew.u1 + s.u.u1) / 2;
  ubar.u2             = (unew.u2 + s.u.u2) / 2;
  for (std::size_t k = 0; k < im.structures.size(); ++k)
    s.chi[k] += dt * im.restrict_at(k, chi_half[k], ubar);

  s.u   = std::move(unew);
  s.p   = std::move(pnew);
  s.adv = std::move(adv_n);
  s.t += dt;
  s.step += 1;
  return rep;
}

SaddleSolveReport IbSolver::step(TimeStepState& s) {
  return s.step == 0 ? ib_initial_step(s) : ib_step(s);
}

const GridSpec& IbSolver::grid() const { return impl_->g; }
GridSpec        IbSolver::grid_at(Real t) const { return impl_->at(t); }
const std::vector<Structure>& IbSolver::structures() const {
  return impl_->structures;
}
Real IbSolver::dt() const { return impl_->dt; }
Real IbSolver::cfl_max() const { return impl_->cfl_max; }

} // namespace ibfsi
