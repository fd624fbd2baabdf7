#include "crackdyn/model.hpp"

#include <cmath>

namespace crackdyn {

Model::Model(CrackedMesh mesh, Material material, ContactParams contact, ProblemData data,
             AssemblyMode mode)
    : mesh_(std::move(mesh)),
      material_(material),
      data_(std::move(data)),
      interface_(CrackQuadrature{}, ContactParams{}) {
  validate(mesh_);
  material_.validate();
  contact.validate();
  for (const auto* e : {&data_.f, &data_.F, &data_.u0, &data_.v0}) {
    if (e->size() != 2) throw ConfigError("data vectors need exactly 2 components");
  }
  dofs_ = DofMap(mesh_);
  mass_ = assemble_mass(mesh_, material_, mode);
  stiffness_ = assemble_stiffness(mesh_, material_, mode);
  mass_pinned_ = mass_.pinned(dofs_.constrained());
  stiffness_pinned_ = stiffness_.pinned(dofs_.constrained());
  auto quad = CrackQuadrature::build(mesh_);
  threshold_values(contact, quad, 0.0);
  interface_ = CrackInterface(std::move(quad), std::move(contact));
}

Vector Model::load(double t) const {
  Vector l = assemble_load(mesh_, material_, data_.f, data_.F, t);
  dofs_.zero_constrained(l);
  return l;
}

Vector Model::interpolate(const VectorExpr& e, double t) const {
  Vector out(dofs_.size(), 0.0);
  for (std::size_t v = 0; v < mesh_.vertices.size(); ++v)
    for (int a = 0; a < 2; ++a) out[DofMap::dof(v, a)] = e[std::size_t(a)].eval(t, mesh_.vertices[v]);
  dofs_.zero_constrained(out);
  return out;
}

SemiDiscreteSystem Model::system() const {
  SemiDiscreteSystem sys;
  sys.mass = &mass_pinned_;
  sys.stiffness = &stiffness_pinned_;
  sys.constrained = dofs_.constrained();
  sys.load = [this](double t) { return load(t); };
  sys.interface = quadrature().points.empty() ? nullptr : &interface_;
  return sys;
}

State Model::initial_state(std::vector<std::string>* warnings) const {
  State s;
  s.t = 0.0;
  s.u = interpolate(data_.u0);
  s.v = interpolate(data_.v0);
  if (warnings) {
    double worst = 0.0;
    for (std::size_t v = 0; v < mesh_.vertices.size(); ++v) {
      if (!dofs_.is_constrained(DofMap::dof(v, 0))) continue;
      for (const auto* e : {&data_.u0, &data_.v0})
        for (int a = 0; a < 2; ++a)
          worst = std::max(worst, std::abs((*e)[std::size_t(a)].eval(0.0, mesh_.vertices[v])));
    }
    if (worst > 1e-12) {
      warnings->push_back("initial data nonzero on the Dirichlet boundary (max " +
                          std::to_string(worst) + "); clamped to zero");
    }
    auto w = compatibility_warnings(quadrature(), contact().gamma, s.u, s.v);
    warnings->insert(warnings->end(), w.begin(), w.end());
  }
  s.a = initial_acceleration(system(), s.u, s.v, 0.0);
  return s;
}

double Model::norm_V(std::span<const double> w) const {
  return std::sqrt(std::max(0.0, quadratic_form(stiffness_pinned_, w)));
}

double Model::norm_H(std::span<const double> w) const {
  return std::sqrt(std::max(0.0, quadratic_form(mass_pinned_, w) / material_.rho));
}

}  // namespace crackdyn
