#include "dgm/verification.hpp"

#include "dgm/environment.hpp"
#include "dgm/error.hpp"
#include "dgm/system_model.hpp"

#include <algorithm>
#include <cmath>

namespace dgm {

Json Requirement::to_json() const {
  return Json{{"id", id}, {"weight", weight}, {"scenario", scenario}, {"score", score}};
}

Requirement Requirement::from_json(const Json& j) {
  Requirement r;
  r.id = j.at("id").get<std::string>();
  r.weight = j.at("weight").get<double>();
  r.scenario = j.at("scenario");
  r.score = j.value("score", 0);
  return r;
}

const Requirement* RequirementSet::find(const std::string& id) const {
  for (const auto& r : requirements)
    if (r.id == id) return &r;
  return nullptr;
}

double RequirementSet::total_weight() const {
  double w = 0;
  for (const auto& r : requirements) w += r.weight;
  return w;
}

void RequirementSet::validate() const {
  if (location != "machine-internal" && location != "environment-held")
    raise(Errc::bad_input, "unknown requirement-set location: " + location);
  std::vector<std::string> ids;
  for (const auto& r : requirements) {
    if (r.weight < 0) raise(Errc::bad_input, "negative requirement weight: " + r.id);
    if (!r.scenario.is_object() || !r.scenario.contains("type"))
      raise(Errc::bad_input, "requirement scenario missing a type: " + r.id);
    ids.push_back(r.id);
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
    raise(Errc::bad_input, "duplicate requirement id");
}

Json RequirementSet::to_json() const {
  Json arr = Json::array();
  for (const auto& r : requirements) arr.push_back(r.to_json());
  return Json{{"location", location}, {"requirements", arr}};
}

RequirementSet RequirementSet::from_json(const Json& j) {
  RequirementSet rs;
  rs.location = j.at("location").get<std::string>();
  for (const auto& jr : j.at("requirements")) rs.requirements.push_back(Requirement::from_json(jr));
  rs.validate();
  return rs;
}

namespace {

// Positional layout of the compiled machine's I/O tuple, recovered from
// the concept's terminal nodes (source-like kinds feed inputs, sink-like
// kinds consume outputs, both ordered by their "idx" property when
// present).
struct TerminalLayout {
  std::vector<std::string> in_idx;   // factor position -> idx tag
  std::vector<std::string> out_idx;  // factor position -> idx tag
};

TerminalLayout terminal_layout(const Concept& c, const Domain& domain) {
  TerminalLayout tl;
  std::vector<const ConceptNode*> ins, outs;
  for (const auto& n : c.nodes()) {
    const Symbol& s = domain.alphabet().component(n.kind);
    if (s.inputs.empty() && !s.outputs.empty()) ins.push_back(&n);
    if (s.outputs.empty() && !s.inputs.empty()) outs.push_back(&n);
  }
  auto tag = [](const ConceptNode* n) {
    auto it = n->props.find("idx");
    return it == n->props.end() ? n->id : it->second;
  };
  auto by_tag = [&](const ConceptNode* a, const ConceptNode* b) { return tag(a) < tag(b); };
  std::sort(ins.begin(), ins.end(), by_tag);
  std::sort(outs.begin(), outs.end(), by_tag);
  for (const auto* n : ins) tl.in_idx.push_back(tag(n));
  for (const auto* n : outs) tl.out_idx.push_back(tag(n));
  return tl;
}

bool table_row_satisfied(const Requirement& req, const Concept& c, const Domain& domain) {
  MealySystem m = compile_concept(c, domain, 1);
  TerminalLayout tl = terminal_layout(c, domain);
  const Json& in = req.scenario.at("in");
  std::vector<std::string> bits;
  for (const auto& tag : tl.in_idx) {
    auto it = in.find(tag);
    bits.push_back(it == in.end() ? "0" : it->get<std::string>());
  }
  std::string iv = tuple_join(bits);
  if (!m.input.contains(iv)) return false;
  std::string ov = step(m, m.q0, iv, 0).first;
  auto out = tuple_split(ov, tl.out_idx.size());
  const std::string want_idx = req.scenario.at("out_idx").get<std::string>();
  for (std::size_t i = 0; i < tl.out_idx.size(); ++i)
    if (tl.out_idx[i] == want_idx)
      return out[i] == req.scenario.at("expect").get<std::string>();
  return false;  // no terminal carries the required index
}

bool io_stream_satisfied(const Requirement& req, const Concept& c, const Domain& domain) {
  std::vector<std::string> inputs = req.scenario.at("inputs").get<std::vector<std::string>>();
  std::vector<std::string> expect = req.scenario.at("outputs").get<std::vector<std::string>>();
  if (inputs.empty() || inputs.size() != expect.size())
    raise(Errc::bad_input, "io_stream scenario needs matching non-empty streams");
  MealySystem m = compile_concept(c, domain, inputs.size());
  for (const auto& v : inputs)
    if (!m.input.contains(v)) return false;
  Trace tr = simulate(m, inputs);
  return tr.outputs == expect;
}

}  // namespace

bool requirement_satisfied(const Requirement& req, const Concept& c, const Domain& domain) {
  const std::string type = req.scenario.at("type").get<std::string>();
  if (type == "table_row") return table_row_satisfied(req, c, domain);
  if (type == "io_stream") return io_stream_satisfied(req, c, domain);
  if (type == "cost_bound")
    return domain.cost(c) <= req.scenario.at("max_cost").get<double>();
  if (type == "pipeline_ok") {
    try {
      compile_concept(c, domain, 1);
    } catch (const Error& e) {
      if (e.code() == Errc::compile_error || e.code() == Errc::dangling_port) return false;
      throw;
    }
    return domain.cost(c) <= req.scenario.at("budget").get<double>();
  }
  raise(Errc::bad_input, "unknown scenario type: " + type);
}

double verify_external(const Concept& c, const RequirementSet& phi_env, const Domain& domain) {
  if (c.is_empty()) return 0.0;
  double total = 0;
  for (const auto& r : phi_env.requirements)
    if (requirement_satisfied(r, c, domain)) total += r.weight;
  return total - domain.cost(c);
}

double utility_cpe(const Concept& c, const Requirement& phi, double requirement_share,
                   const ModelSet& models) {
  if (c.is_empty()) return 0.0;
  double u = 0;
  for (const auto& mu : models.models) {
    auto domain = make_domain(mu.domain);
    bool sat = false;
    try {
      sat = requirement_satisfied(phi, c, *domain);
    } catch (const Error& e) {
      if (e.code() != Errc::compile_error && e.code() != Errc::dangling_port &&
          e.code() != Errc::unknown_kind && e.code() != Errc::unknown_symbol)
        throw;
    }
    u += mu.weight * (phi.weight * (sat ? 1.0 : 0.0) - requirement_share * domain->cost(c));
  }
  return u;
}

double verify_internal_raw(const Concept& c, const RequirementSet& phi_int,
                           const ModelSet& models) {
  const double W = phi_int.total_weight();
  if (phi_int.requirements.empty() || W <= 0) return 0.0;
  double total = 0;
  for (const auto& phi : phi_int.requirements)
    total += phi.weight * utility_cpe(c, phi, phi.weight / W, models);
  return total;
}

double verify_internal(const Concept& c, const RequirementSet& phi_int, const ModelSet& models) {
  const double W = phi_int.total_weight();
  if (phi_int.requirements.empty() || W <= 0) return 0.0;
  const double n = static_cast<double>(phi_int.requirements.size());
  return verify_internal_raw(c, phi_int, models) * n / W;
}

RequirementSet revise_requirements(const RequirementSet& phi_int, double observed_reward,
                                   const Concept& submitted, const Domain& domain) {
  if (phi_int.location == "environment-held") return phi_int;
  RequirementSet out;
  out.location = phi_int.location;
  const bool rewarded = observed_reward > 0;
  for (Requirement r : phi_int.requirements) {
    bool predicted = false;
    try {
      predicted = requirement_satisfied(r, submitted, domain);
    } catch (const Error& e) {
      if (e.code() != Errc::compile_error && e.code() != Errc::dangling_port) throw;
    }
    r.score += (predicted == rewarded) ? 1 : -1;
    if (r.score <= -3) continue;
    out.requirements.push_back(std::move(r));
  }
  return out;
}

}  // namespace dgm
