#include "dgm/system_model.hpp"

#include "dgm/error.hpp"
#include "dgm/hash.hpp"

#include <algorithm>
#include <set>

namespace dgm {

std::string tuple_join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += "|";
    out += parts[i];
  }
  return out;
}

std::vector<std::string> tuple_split(const std::string& v, std::size_t arity) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t bar = v.find('|', start);
    if (bar == std::string::npos) {
      out.push_back(v.substr(start));
      break;
    }
    out.push_back(v.substr(start, bar - start));
    start = bar + 1;
  }
  if (out.size() != arity) raise(Errc::out_of_domain, "tuple arity mismatch: " + v);
  return out;
}

DataSet DataSet::atomic(std::vector<std::string> values) {
  if (values.empty()) raise(Errc::bad_input, "dataset must be non-empty");
  DataSet d;
  d.values = std::move(values);
  return d;
}

DataSet DataSet::product_of(const std::vector<std::vector<std::string>>& factors) {
  if (factors.empty()) raise(Errc::bad_input, "product needs at least one factor");
  if (factors.size() == 1) return atomic(factors[0]);
  DataSet d;
  d.factors = factors;
  std::vector<std::string> acc{""};
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i].empty()) raise(Errc::bad_input, "dataset factor must be non-empty");
    std::vector<std::string> next;
    for (const auto& prefix : acc)
      for (const auto& v : factors[i]) next.push_back(i == 0 ? v : prefix + "|" + v);
    acc = std::move(next);
  }
  d.values = std::move(acc);
  return d;
}

bool DataSet::contains(const std::string& v) const {
  return std::find(values.begin(), values.end(), v) != values.end();
}

std::size_t DataSet::index_of(const std::string& v) const {
  auto it = std::find(values.begin(), values.end(), v);
  if (it == values.end()) raise(Errc::out_of_domain, "value not in dataset: " + v);
  return static_cast<std::size_t>(it - values.begin());
}

Json DataSet::to_json() const {
  Json j;
  j["values"] = values;
  if (!factors.empty()) j["factors"] = factors;
  return j;
}

DataSet DataSet::from_json(const Json& j) {
  DataSet d;
  d.values = j.at("values").get<std::vector<std::string>>();
  if (d.values.empty()) raise(Errc::bad_input, "dataset must be non-empty");
  if (j.contains("factors"))
    d.factors = j["factors"].get<std::vector<std::vector<std::string>>>();
  return d;
}

std::size_t MealySystem::state_index(const std::string& s) const {
  auto it = std::find(states.begin(), states.end(), s);
  if (it == states.end()) raise(Errc::out_of_domain, "unknown state: " + s);
  return static_cast<std::size_t>(it - states.begin());
}

void MealySystem::validate() const {
  if (horizon < 1) raise(Errc::bad_input, "horizon must be >= 1");
  if (states.empty()) raise(Errc::bad_input, "state set must be non-empty");
  state_index(q0);
  const std::size_t want = input.values.size() * states.size() * (horizon + 1);
  if (f_table.size() != want || q_table.size() != want)
    raise(Errc::bad_input, "behavior tables must be total");
  for (const auto& v : f_table)
    if (!output.contains(v)) raise(Errc::out_of_domain, "F value not in output set: " + v);
  for (const auto& s : q_table) state_index(s);
}

Json MealySystem::to_json() const {
  Json j;
  j["T"] = horizon;
  j["input"] = input.to_json();
  j["output"] = output.to_json();
  j["states"] = states;
  j["q0"] = q0;
  j["F"] = f_table;
  j["Q"] = q_table;
  return j;
}

MealySystem MealySystem::from_json(const Json& j) {
  MealySystem m;
  m.horizon = j.at("T").get<std::size_t>();
  m.input = DataSet::from_json(j.at("input"));
  m.output = DataSet::from_json(j.at("output"));
  m.states = j.at("states").get<std::vector<std::string>>();
  m.q0 = j.at("q0").get<std::string>();
  m.f_table = j.at("F").get<std::vector<std::string>>();
  m.q_table = j.at("Q").get<std::vector<std::string>>();
  m.validate();
  return m;
}

std::string MealySystem::hash() const { return content_hash(to_json()); }

MealySystem make_machine(
    std::size_t horizon, DataSet input, DataSet output, std::vector<std::string> states,
    std::string q0,
    const std::function<std::string(const std::string&, const std::string&, std::size_t)>& f,
    const std::function<std::string(const std::string&, const std::string&, std::size_t)>& q) {
  MealySystem m;
  m.horizon = horizon;
  m.input = std::move(input);
  m.output = std::move(output);
  m.states = std::move(states);
  m.q0 = std::move(q0);
  m.f_table.reserve(m.input.values.size() * m.states.size() * (horizon + 1));
  for (const auto& in : m.input.values)
    for (const auto& st : m.states)
      for (std::size_t t = 0; t <= horizon; ++t) {
        m.f_table.push_back(f(in, st, t));
        m.q_table.push_back(q(in, st, t));
      }
  m.validate();
  return m;
}

MealySystem make_stateless(std::size_t horizon, DataSet input, DataSet output,
                           const std::function<std::string(const std::string&)>& fn) {
  return make_machine(
      horizon, std::move(input), std::move(output), {"s"}, "s",
      [&](const std::string& in, const std::string&, std::size_t) { return fn(in); },
      [](const std::string&, const std::string& st, std::size_t) { return st; });
}

std::size_t AbstractSystem::state_index(const std::string& s) const {
  auto it = std::find(states.begin(), states.end(), s);
  if (it == states.end()) raise(Errc::out_of_domain, "unknown state: " + s);
  return static_cast<std::size_t>(it - states.begin());
}

Json AbstractSystem::to_json() const {
  Json j;
  j["T"] = horizon;
  j["input"] = input.to_json();
  j["output"] = output.to_json();
  j["states"] = states;
  j["q0"] = q0;
  j["F"] = f_table;
  j["Q"] = q_table;
  j["deterministic"] = deterministic;
  return j;
}

Json Trace::to_json() const {
  return Json{{"inputs", inputs}, {"outputs", outputs}, {"states", states}};
}

std::pair<std::string, std::string> step(const MealySystem& sys, const std::string& state,
                                         const std::string& in, std::size_t t) {
  if (t > sys.horizon) raise(Errc::out_of_domain, "time beyond horizon");
  std::size_t ii = sys.input.index_of(in);
  std::size_t si = sys.state_index(state);
  return {sys.f(ii, si, t), sys.q(ii, si, t)};
}

Trace simulate(const MealySystem& sys, const std::vector<std::string>& inputs) {
  if (inputs.size() > sys.horizon) raise(Errc::out_of_domain, "input stream longer than horizon");
  Trace tr;
  tr.inputs = inputs;
  std::string state = sys.q0;
  tr.states.push_back(state);
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    auto [out, next] = step(sys, state, inputs[t], t);
    tr.outputs.push_back(out);
    state = next;
    tr.states.push_back(state);
  }
  return tr;
}

namespace {

std::vector<std::vector<std::string>> factor_list(const DataSet& d) {
  if (!d.factors.empty()) return d.factors;
  return {d.values};
}

DataSet from_factors(std::vector<std::vector<std::string>> fs) {
  if (fs.empty()) return DataSet::atomic({kEpsilon});
  return DataSet::product_of(fs);
}

std::string pair_state(const std::string& a, const std::string& b) { return a + "|" + b; }

}  // namespace

MealySystem product(const MealySystem& y, const MealySystem& z) {
  if (y.horizon != z.horizon) raise(Errc::type_mismatch, "time scale mismatch in product");
  auto in_f = factor_list(y.input);
  auto zin = factor_list(z.input);
  in_f.insert(in_f.end(), zin.begin(), zin.end());
  auto out_f = factor_list(y.output);
  auto zout = factor_list(z.output);
  out_f.insert(out_f.end(), zout.begin(), zout.end());

  std::vector<std::string> states;
  for (const auto& sy : y.states)
    for (const auto& sz : z.states) states.push_back(pair_state(sy, sz));

  const std::size_t y_arity = y.input.arity();
  return make_machine(
      y.horizon, from_factors(in_f), from_factors(out_f), states, pair_state(y.q0, z.q0),
      [&](const std::string& in, const std::string& st, std::size_t t) {
        auto iv = tuple_split(in, y.input.arity() + z.input.arity());
        std::vector<std::string> ia(iv.begin(), iv.begin() + y_arity);
        std::vector<std::string> ib(iv.begin() + y_arity, iv.end());
        auto sv = tuple_split(st, 2);
        auto [oy, _1] = step(y, sv[0], tuple_join(ia), t);
        auto [oz, _2] = step(z, sv[1], tuple_join(ib), t);
        return oy + "|" + oz;
      },
      [&](const std::string& in, const std::string& st, std::size_t t) {
        auto iv = tuple_split(in, y.input.arity() + z.input.arity());
        std::vector<std::string> ia(iv.begin(), iv.begin() + y_arity);
        std::vector<std::string> ib(iv.begin() + y_arity, iv.end());
        auto sv = tuple_split(st, 2);
        auto [_1, ny] = step(y, sv[0], tuple_join(ia), t);
        auto [_2, nz] = step(z, sv[1], tuple_join(ib), t);
        return pair_state(ny, nz);
      });
}

MealySystem connect(const MealySystem& y, const MealySystem& z,
                    const std::map<std::string, std::string>& wiring) {
  if (&y == &z)
    raise(Errc::self_wiring, "wiring a machine into itself without a delay; use feedback");
  if (y.horizon != z.horizon) raise(Errc::type_mismatch, "time scale mismatch in connect");
  auto translate = [&](const std::string& v) -> std::string {
    auto it = wiring.find(v);
    const std::string& w = it == wiring.end() ? v : it->second;
    if (!z.input.contains(w))
      raise(Errc::type_mismatch, "wired output value not accepted by input: " + v);
    return w;
  };
  // Totality of the wiring is checked up front.
  for (const auto& v : y.output.values) translate(v);

  std::vector<std::string> states;
  for (const auto& sy : y.states)
    for (const auto& sz : z.states) states.push_back(pair_state(sy, sz));

  return make_machine(
      y.horizon, y.input, z.output, states, pair_state(y.q0, z.q0),
      [&](const std::string& in, const std::string& st, std::size_t t) {
        auto sv = tuple_split(st, 2);
        auto [mid, _] = step(y, sv[0], in, t);
        auto [out, _2] = step(z, sv[1], translate(mid), t);
        return out;
      },
      [&](const std::string& in, const std::string& st, std::size_t t) {
        auto sv = tuple_split(st, 2);
        auto [mid, ny] = step(y, sv[0], in, t);
        auto [_, nz] = step(z, sv[1], translate(mid), t);
        return pair_state(ny, nz);
      });
}

MealySystem feedback(const MealySystem& sys, std::size_t out_factor, std::size_t in_factor,
                     const std::map<std::string, std::string>& wiring) {
  auto in_fs = factor_list(sys.input);
  auto out_fs = factor_list(sys.output);
  if (out_factor >= out_fs.size() || in_factor >= in_fs.size())
    raise(Errc::out_of_domain, "feedback factor index out of range");

  const std::size_t in_arity = in_fs.size();
  const std::size_t out_arity = out_fs.size();

  auto translate = [&](const std::string& v) -> std::string {
    auto it = wiring.find(v);
    const std::string& w = it == wiring.end() ? v : it->second;
    if (std::find(in_fs[in_factor].begin(), in_fs[in_factor].end(), w) ==
        in_fs[in_factor].end())
      raise(Errc::type_mismatch, "looped output value not accepted by input: " + v);
    return w;
  };

  // Structural delay check: the looped output component may not depend on
  // the looped input component within the same step. Complete for
  // table-defined machines.
  for (const auto& st : sys.states)
    for (std::size_t t = 0; t <= sys.horizon; ++t)
      for (const auto& in : sys.input.values) {
        auto parts = tuple_split(in, in_arity);
        std::string base;
        for (const auto& b : in_fs[in_factor]) {
          auto p = parts;
          p[in_factor] = b;
          auto [out, _] = step(sys, st, tuple_join(p), t);
          std::string looped = tuple_split(out, out_arity)[out_factor];
          if (base.empty()) base = looped;
          else if (base != looped)
            raise(Errc::algebraic_loop, "feedback loop has no delay element");
        }
      }

  std::vector<std::vector<std::string>> rem_in;
  for (std::size_t i = 0; i < in_fs.size(); ++i)
    if (i != in_factor) rem_in.push_back(in_fs[i]);
  std::vector<std::vector<std::string>> rem_out;
  for (std::size_t i = 0; i < out_fs.size(); ++i)
    if (i != out_factor) rem_out.push_back(out_fs[i]);

  auto expand_input = [&, in_arity](const std::string& in, const std::string& st,
                                    std::size_t t) {
    std::vector<std::string> parts(in_arity);
    if (rem_in.empty()) {
      // only the looped component exists; `in` is eps
    } else {
      auto rem = tuple_split(in, rem_in.size());
      std::size_t k = 0;
      for (std::size_t i = 0; i < in_arity; ++i)
        if (i != in_factor) parts[i] = rem[k++];
    }
    parts[in_factor] = in_fs[in_factor].front();  // placeholder, output is independent of it
    auto [out, _] = step(sys, st, tuple_join(parts), t);
    parts[in_factor] = translate(tuple_split(out, out_arity)[out_factor]);
    return parts;
  };

  return make_machine(
      sys.horizon, from_factors(rem_in), from_factors(rem_out), sys.states, sys.q0,
      [&](const std::string& in, const std::string& st, std::size_t t) {
        auto parts = expand_input(in, st, t);
        auto [out, _] = step(sys, st, tuple_join(parts), t);
        auto ov = tuple_split(out, out_arity);
        std::vector<std::string> rem;
        for (std::size_t i = 0; i < out_arity; ++i)
          if (i != out_factor) rem.push_back(ov[i]);
        return rem.empty() ? kEpsilon : tuple_join(rem);
      },
      [&](const std::string& in, const std::string& st, std::size_t t) {
        auto parts = expand_input(in, st, t);
        auto [_, next] = step(sys, st, tuple_join(parts), t);
        return next;
      });
}

namespace {

std::pair<MealySystem, MealySystem> decompose_product(const MealySystem& x, const Json& split) {
  auto in_fs = factor_list(x.input);
  auto out_fs = factor_list(x.output);
  const std::size_t in_split = split.at("in_split").get<std::size_t>();
  const std::size_t out_split = split.at("out_split").get<std::size_t>();
  if (in_split == 0 || in_split >= in_fs.size() || out_split == 0 || out_split >= out_fs.size())
    raise(Errc::invalid_partition, "seam index does not split the signature");

  std::map<std::string, std::pair<std::string, std::string>> smap;
  std::vector<std::string> sy, sz;
  for (const auto& [s, pair] : split.at("state_map").items()) {
    x.state_index(s);
    std::string a = pair.at(0).get<std::string>();
    std::string b = pair.at(1).get<std::string>();
    smap[s] = {a, b};
    if (std::find(sy.begin(), sy.end(), a) == sy.end()) sy.push_back(a);
    if (std::find(sz.begin(), sz.end(), b) == sz.end()) sz.push_back(b);
  }
  if (smap.size() != x.states.size())
    raise(Errc::invalid_partition, "state map must cover every state");
  {
    std::set<std::pair<std::string, std::string>> uniq;
    for (const auto& [_, p] : smap)
      if (!uniq.insert(p).second)
        raise(Errc::invalid_partition, "state map must be injective into the pair space");
  }

  DataSet in_y = from_factors({in_fs.begin(), in_fs.begin() + in_split});
  DataSet in_z = from_factors({in_fs.begin() + in_split, in_fs.end()});
  DataSet out_y = from_factors({out_fs.begin(), out_fs.begin() + out_split});
  DataSet out_z = from_factors({out_fs.begin() + out_split, out_fs.end()});

  // Project x's tables through the seam; inconsistency across the hidden
  // coordinate means the seam does not preserve behavior.
  auto lookup_pair = [&](const std::string& a, const std::string& b) -> const std::string* {
    for (const auto& [s, p] : smap)
      if (p.first == a && p.second == b) return &s;
    return nullptr;
  };

  auto derive = [&](bool left) -> MealySystem {
    const DataSet& my_in = left ? in_y : in_z;
    const DataSet& my_out = left ? out_y : out_z;
    const auto& my_states = left ? sy : sz;
    const auto& other_in = left ? in_z : in_y;
    const auto& other_states = left ? sz : sy;
    auto behavior = [&](const std::string& in, const std::string& st, std::size_t t,
                        bool want_state) -> std::string {
      std::string result;
      for (const auto& oin : other_in.values)
        for (const auto& ost : other_states) {
          const std::string* xs = left ? lookup_pair(st, ost) : lookup_pair(ost, st);
          if (!xs) continue;
          std::string full_in = left ? in + "|" + oin : oin + "|" + in;
          auto [out, next] = step(x, *xs, full_in, t);
          std::string piece;
          if (want_state) {
            const auto& np = smap.at(next);
            piece = left ? np.first : np.second;
          } else {
            auto ov = tuple_split(out, out_fs.size());
            std::vector<std::string> mine;
            for (std::size_t i = 0; i < out_fs.size(); ++i)
              if (left ? (i < out_split) : (i >= out_split)) mine.push_back(ov[i]);
            piece = tuple_join(mine);
          }
          if (result.empty()) result = piece;
          else if (result != piece)
            raise(Errc::invalid_partition, "behavior does not factor across the seam");
        }
      if (result.empty()) raise(Errc::invalid_partition, "state map leaves a component state unreachable");
      return result;
    };
    std::string q0 = left ? smap.at(x.q0).first : smap.at(x.q0).second;
    return make_machine(
        x.horizon, my_in, my_out, my_states, q0,
        [&](const std::string& in, const std::string& st, std::size_t t) {
          return behavior(in, st, t, false);
        },
        [&](const std::string& in, const std::string& st, std::size_t t) {
          return behavior(in, st, t, true);
        });
  };
  return {derive(true), derive(false)};
}

std::pair<MealySystem, MealySystem> decompose_series(const MealySystem& x, const Json& split) {
  DataSet mid = DataSet::atomic(split.at("mid").get<std::vector<std::string>>());
  std::map<std::string, std::string> first;
  for (const auto& [k, v] : split.at("first").items()) first[k] = v.get<std::string>();
  for (const auto& in : x.input.values) {
    auto it = first.find(in);
    if (it == first.end() || !mid.contains(it->second))
      raise(Errc::invalid_partition, "series seam must map every input into mid");
  }
  MealySystem y = make_stateless(x.horizon, x.input, mid,
                                 [&](const std::string& in) { return first.at(in); });
  // Derive the second stage: x's behavior must factor through the seam.
  auto behavior = [&](const std::string& m, const std::string& st, std::size_t t,
                      bool want_state) -> std::string {
    std::string result;
    bool have = false;
    for (const auto& in : x.input.values) {
      if (first.at(in) != m) continue;
      auto [out, next] = step(x, st, in, t);
      const std::string& piece = want_state ? next : out;
      if (!have) {
        result = piece;
        have = true;
      } else if (result != piece) {
        raise(Errc::invalid_partition, "behavior does not factor through the series seam");
      }
    }
    if (!have) {
      // Unreached mid value: any total completion works; pick the first.
      auto [out, next] = step(x, st, x.input.values.front(), t);
      result = want_state ? next : out;
    }
    return result;
  };
  MealySystem z = make_machine(
      x.horizon, mid, x.output, x.states, x.q0,
      [&](const std::string& m, const std::string& st, std::size_t t) {
        return behavior(m, st, t, false);
      },
      [&](const std::string& m, const std::string& st, std::size_t t) {
        return behavior(m, st, t, true);
      });
  return {y, z};
}

}  // namespace

MealySystem recompose(const MealySystem& y, const MealySystem& z, const Json& split) {
  const std::string mode = split.at("mode").get<std::string>();
  if (mode == "product") return product(y, z);
  if (mode == "series") return connect(y, z);
  raise(Errc::bad_input, "unknown split mode: " + mode);
}

std::pair<MealySystem, MealySystem> decompose(const MealySystem& x, const Json& split) {
  const std::string mode = split.at("mode").get<std::string>();
  std::pair<MealySystem, MealySystem> parts =
      mode == "product" ? decompose_product(x, split)
      : mode == "series" ? decompose_series(x, split)
                         : (raise(Errc::bad_input, "unknown split mode: " + mode),
                            std::pair<MealySystem, MealySystem>{});
  // Post-check: the recomposition must reproduce x up to the horizon.
  if (!equivalent(recompose(parts.first, parts.second, split), x, x.horizon))
    raise(Errc::invalid_partition, "recomposition is not equivalent to the original");
  return parts;
}

AbstractSystem abstract_system(const MealySystem& sys,
                               const std::map<std::string, std::string>& state_merge,
                               const std::map<std::string, std::string>& out_projection) {
  auto merge = [&](const std::string& s) {
    auto it = state_merge.find(s);
    return it == state_merge.end() ? s : it->second;
  };
  auto project = [&](const std::string& o) {
    auto it = out_projection.find(o);
    return it == out_projection.end() ? o : it->second;
  };
  AbstractSystem a;
  a.horizon = sys.horizon;
  a.input = sys.input;
  std::vector<std::string> out_vals;
  for (const auto& o : sys.output.values)
    if (std::find(out_vals.begin(), out_vals.end(), project(o)) == out_vals.end())
      out_vals.push_back(project(o));
  a.output = DataSet::atomic(out_vals);
  for (const auto& s : sys.states)
    if (std::find(a.states.begin(), a.states.end(), merge(s)) == a.states.end())
      a.states.push_back(merge(s));
  a.q0 = merge(sys.q0);

  const std::size_t n = a.input.values.size() * a.states.size() * (sys.horizon + 1);
  a.f_table.resize(n);
  a.q_table.resize(n);
  a.deterministic = true;
  for (std::size_t ii = 0; ii < sys.input.values.size(); ++ii)
    for (std::size_t si = 0; si < sys.states.size(); ++si)
      for (std::size_t t = 0; t <= sys.horizon; ++t) {
        std::size_t ai = a.table_index(ii, a.state_index(merge(sys.states[si])), t);
        auto add = [](std::vector<std::string>& v, const std::string& x) {
          if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
        };
        add(a.f_table[ai], project(sys.f(ii, si, t)));
        add(a.q_table[ai], merge(sys.q(ii, si, t)));
      }
  for (auto& v : a.f_table) {
    std::sort(v.begin(), v.end());
    if (v.size() > 1) a.deterministic = false;
  }
  for (auto& v : a.q_table) {
    std::sort(v.begin(), v.end());
    if (v.size() > 1) a.deterministic = false;
  }
  return a;
}

bool equivalent(const MealySystem& a, const MealySystem& b, std::size_t horizon,
                std::size_t ceiling) {
  if (a.input.values != b.input.values || a.output.values != b.output.values)
    raise(Errc::type_mismatch, "signature mismatch");
  if (horizon > a.horizon || horizon > b.horizon)
    raise(Errc::out_of_domain, "horizon beyond a machine's time scale");
  double streams = 1;
  for (std::size_t i = 0; i < horizon; ++i) {
    streams *= static_cast<double>(a.input.values.size());
    if (streams > static_cast<double>(ceiling))
      raise(Errc::budget_exceeded, "stream enumeration ceiling exceeded");
  }
  // Joint reachability search; equivalent to enumerating all streams.
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> visited;
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> stack{
      {a.state_index(a.q0), b.state_index(b.q0), 0}};
  while (!stack.empty()) {
    auto [sa, sb, t] = stack.back();
    stack.pop_back();
    if (t >= horizon) continue;
    if (!visited.insert({sa, sb, t}).second) continue;
    for (std::size_t ii = 0; ii < a.input.values.size(); ++ii) {
      if (a.f(ii, sa, t) != b.f(ii, sb, t)) return false;
      stack.push_back({a.state_index(a.q(ii, sa, t)), b.state_index(b.q(ii, sb, t)), t + 1});
    }
  }
  return true;
}

}  // namespace dgm
