#pragma once

#include <dgm/design_language.hpp>
#include <dgm/system_model.hpp>

#include <random>
#include <string>
#include <vector>

namespace dgm::testing {

/// Five-NAND half adder: out0 = a xor b, out1 = a and b.
inline Concept half_adder_concept() {
  Concept c;
  c.add_node({"a", "IN", {{"idx", "0"}}});
  c.add_node({"b", "IN", {{"idx", "1"}}});
  for (const char* g : {"n1", "n2", "n3", "n4", "n5"}) c.add_node({g, "NAND", {}});
  c.add_node({"s", "OUT", {{"idx", "0"}}});
  c.add_node({"co", "OUT", {{"idx", "1"}}});
  c.add_edge({"a", "out", "n1", "in1"});
  c.add_edge({"b", "out", "n1", "in2"});
  c.add_edge({"a", "out", "n2", "in1"});
  c.add_edge({"n1", "out", "n2", "in2"});
  c.add_edge({"b", "out", "n3", "in1"});
  c.add_edge({"n1", "out", "n3", "in2"});
  c.add_edge({"n2", "out", "n4", "in1"});
  c.add_edge({"n3", "out", "n4", "in2"});
  c.add_edge({"n1", "out", "n5", "in1"});
  c.add_edge({"n1", "out", "n5", "in2"});
  c.add_edge({"n4", "out", "s", "in"});
  c.add_edge({"n5", "out", "co", "in"});
  return c;
}

/// SRC(int) -> XF parity (int->bit) -> SNK(bit).
inline Concept parity_pipeline_concept() {
  Concept c;
  c.add_node({"src", "SRC", {{"type_out", "int"}}});
  c.add_node({"xf", "XF", {{"fn", "parity"}, {"type_in", "int"}, {"type_out", "bit"}}});
  c.add_node({"snk", "SNK", {{"type_in", "bit"}}});
  c.add_edge({"src", "out", "xf", "in"});
  c.add_edge({"xf", "out", "snk", "in"});
  return c;
}

/// Random total Mealy machine over small atomic value sets.
inline MealySystem random_machine(std::mt19937& rng, std::size_t horizon,
                                  std::size_t max_states = 4, std::size_t max_in = 3,
                                  std::size_t max_out = 3) {
  auto vals = [&](const char* prefix, std::size_t max_n) {
    std::size_t n = 1 + rng() % max_n;
    std::vector<std::string> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(prefix + std::to_string(i));
    return v;
  };
  std::vector<std::string> in = vals("i", max_in);
  std::vector<std::string> out = vals("o", max_out);
  std::vector<std::string> states = vals("s", max_states);
  auto pick = [&](const std::vector<std::string>& v) { return v[rng() % v.size()]; };
  std::string q0 = pick(states);
  // Tabulate ahead of time so the lambdas stay pure.
  std::map<std::tuple<std::string, std::string, std::size_t>, std::pair<std::string, std::string>>
      table;
  for (const auto& i : in)
    for (const auto& s : states)
      for (std::size_t t = 0; t <= horizon; ++t) table[{i, s, t}] = {pick(out), pick(states)};
  return make_machine(
      horizon, DataSet::atomic(in), DataSet::atomic(out), states, q0,
      [&](const std::string& i, const std::string& s, std::size_t t) {
        return table.at({i, s, t}).first;
      },
      [&](const std::string& i, const std::string& s, std::size_t t) {
        return table.at({i, s, t}).second;
      });
}

inline std::vector<std::string> random_stream(std::mt19937& rng, const DataSet& in,
                                              std::size_t len) {
  std::vector<std::string> v;
  for (std::size_t i = 0; i < len; ++i) v.push_back(in.values[rng() % in.values.size()]);
  return v;
}

}  // namespace dgm::testing
