#include "dissdim/json_io.hpp"

namespace dissdim::json_io {

ordered_json to_json(const ExtendedReal& v) {
  if (v.is_infinite()) return "inf";
  return v.value();
}

ordered_json to_json(const SpaceTimePoint& p) { return ordered_json{{"x", p.x}, {"t", p.t}}; }

ordered_json to_json(const std::vector<exponents::Term>& terms) {
  ordered_json out = ordered_json::array();
  for (const auto& t : terms) out.push_back({{"label", t.label}, {"value", t.value}});
  return out;
}

ordered_json to_json(const exponents::ExponentReport& rep) {
  ordered_json j;
  j["regime"] = exponents::to_string(rep.regime);
  j["d"] = rep.d;
  j["q"] = to_json(rep.q);
  j["r"] = to_json(rep.r);
  j["alpha"] = rep.alpha;
  j["s"] = rep.s;
  j["terms"] = to_json(rep.terms);
  j["convention_applied"] = rep.convention_applied;
  j["vacuous"] = rep.vacuous;
  j["open_exponent"] = rep.open_exponent;
  j["endpoint_limit"] = rep.endpoint_limit;
  j["closed_form_s"] = rep.closed_form_s ? ordered_json(*rep.closed_form_s) : ordered_json(nullptr);
  return j;
}

ordered_json to_json(const weak::BalanceReport& rep) {
  ordered_json j;
  j["mode"] = rep.mode;
  j["center"] = to_json(rep.center);
  j["delta"] = rep.delta;
  j["alpha"] = rep.alpha;
  j["nu"] = rep.nu;
  j["profile"] = rep.profile;
  j["terms"] = to_json(rep.terms);
  j["weak_mass"] = rep.weak_mass;
  j["abs_scale"] = rep.abs_scale;
  j["holder_bound"] = rep.holder_bound ? ordered_json(*rep.holder_bound) : ordered_json(nullptr);
  j["bound_terms"] = to_json(rep.bound_terms);
  if (rep.local_norms) {
    const auto& n = *rep.local_norms;
    j["local_norms"] = {{"q", to_json(n.q)},
                        {"r", to_json(n.r)},
                        {"u", n.u},
                        {"p", n.p},
                        {"space_measure", n.space_measure},
                        {"time_measure", n.time_measure}};
  } else {
    j["local_norms"] = nullptr;
  }
  j["constants"] = to_json(rep.constants);
  j["viscous_pairing"] = rep.viscous_pairing ? ordered_json(*rep.viscous_pairing) : ordered_json(nullptr);
  j["morrey"] = rep.morrey ? ordered_json(*rep.morrey) : ordered_json(nullptr);
  return j;
}

ordered_json to_json(const weak::BoundaryBalance& b) {
  return ordered_json{{"interior", b.interior},
                      {"terminal", b.terminal},
                      {"viscous_pairing", b.viscous_pairing},
                      {"relative_residual", b.relative_residual}};
}

ordered_json to_json(const aniso::BoxCount& bc) {
  return ordered_json{
      {"scales", bc.scales}, {"counts", bc.counts}, {"dim_estimate", bc.dim_estimate}, {"fit_residual", bc.fit_residual}};
}

ordered_json to_json(const aniso::DensityLadder& ladder) {
  return ordered_json{{"alpha", ladder.alpha},
                      {"s", ladder.s},
                      {"scales", ladder.scales},
                      {"sup_mass", ladder.sup_mass},
                      {"densities", ladder.densities},
                      {"fitted_slope", ladder.fitted_slope},
                      {"fit_residual", ladder.fit_residual},
                      {"positive_scales", ladder.positive_scales},
                      {"non_increasing", ladder.non_increasing},
                      {"n_centers", ladder.n_centers}};
}

ordered_json to_json(const aniso::Certification& c) {
  return ordered_json{{"certified_s", c.certified_s}, {"verdict", aniso::to_string(c.verdict)}, {"constant", c.constant}};
}

ordered_json run_manifest(const fixtures::ViscousRun& run, const fixtures::RiemannDatum& datum) {
  ordered_json j;
  j["schema"] = kSchema;
  j["kind"] = "viscous_burgers_run";
  j["datum"] = {{"u_l", datum.u_l}, {"u_r", datum.u_r}, {"x0", datum.x0}};
  j["nu"] = run.nu;
  j["grid"] = {{"a", run.config.a},
               {"b", run.config.b},
               {"h", run.h},
               {"nx", run.field.nx()},
               {"T", run.config.T},
               {"n_frames", run.config.n_frames},
               {"boundary", run.config.boundary == fixtures::Boundary::periodic ? "periodic" : "dirichlet_states"}};
  j["dt"] = run.dt;
  j["steps"] = run.steps;
  j["stability_margin"] = run.stability_margin;
  j["total_dissipation"] = run.total_dissipation;
  j["energy_initial"] = run.energy_initial;
  j["energy_final"] = run.energy_final;
  j["dissipation_atoms"] = run.dissipation.size();
  return j;
}

ordered_json error_object(const std::string& kind, int exit_code, const std::string& message) {
  ordered_json j;
  j["schema"] = kSchema;
  j["error"] = {{"kind", kind}, {"exit_code", exit_code}, {"message", message}};
  return j;
}

ordered_json document(const ordered_json& body) {
  ordered_json j;
  j["schema"] = kSchema;
  for (const auto& [k, v] : body.items()) j[k] = v;
  return j;
}

}  // namespace dissdim::json_io
