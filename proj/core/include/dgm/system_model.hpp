#pragma once

#include "dgm/serial.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace dgm {

/// Absence marker usable inside datasets.
inline const std::string kEpsilon = "eps";

/// Finite value set. A dataset may be a product of factors, in which case
/// values are the factor tuples joined with '|' in row-major order.
struct DataSet {
  std::vector<std::string> values;
  std::vector<std::vector<std::string>> factors;  // empty => atomic

  static DataSet atomic(std::vector<std::string> values);
  static DataSet product_of(const std::vector<std::vector<std::string>>& factors);

  bool contains(const std::string& v) const;
  std::size_t index_of(const std::string& v) const;  // throws out_of_domain
  std::size_t arity() const { return factors.empty() ? 1 : factors.size(); }

  bool operator==(const DataSet&) const = default;
  Json to_json() const;
  static DataSet from_json(const Json& j);
};

std::string tuple_join(const std::vector<std::string>& parts);
std::vector<std::string> tuple_split(const std::string& v, std::size_t arity);

/// Timed Mealy machine with explicit total tables over
/// In x S x {0..T}. Tables are stored row-major sorted by (input, state,
/// time) so serialization is byte-stable.
struct MealySystem {
  std::size_t horizon = 1;  // T >= 1
  DataSet input, output;
  std::vector<std::string> states;
  std::string q0;
  std::vector<std::string> f_table;
  std::vector<std::string> q_table;

  std::size_t state_index(const std::string& s) const;  // throws out_of_domain
  std::size_t table_index(std::size_t in, std::size_t st, std::size_t t) const {
    return (in * states.size() + st) * (horizon + 1) + t;
  }
  const std::string& f(std::size_t in, std::size_t st, std::size_t t) const {
    return f_table[table_index(in, st, t)];
  }
  const std::string& q(std::size_t in, std::size_t st, std::size_t t) const {
    return q_table[table_index(in, st, t)];
  }

  void validate() const;  // totality, q0 in S, values in range
  Json to_json() const;
  static MealySystem from_json(const Json& j);
  std::string hash() const;
};

/// Builds a machine from behavior functions, tabulating over the full
/// domain. The functions must be total on In x S x {0..T}.
MealySystem make_machine(
    std::size_t horizon, DataSet input, DataSet output, std::vector<std::string> states,
    std::string q0,
    const std::function<std::string(const std::string&, const std::string&, std::size_t)>& f,
    const std::function<std::string(const std::string&, const std::string&, std::size_t)>& q);

MealySystem make_stateless(
    std::size_t horizon, DataSet input, DataSet output,
    const std::function<std::string(const std::string&)>& fn);

/// Nondeterministic variant produced by abstraction: images are non-empty
/// value sets.
struct AbstractSystem {
  std::size_t horizon = 1;
  DataSet input, output;
  std::vector<std::string> states;
  std::string q0;
  std::vector<std::vector<std::string>> f_table;
  std::vector<std::vector<std::string>> q_table;
  bool deterministic = false;

  std::size_t table_index(std::size_t in, std::size_t st, std::size_t t) const {
    return (in * states.size() + st) * (horizon + 1) + t;
  }
  std::size_t state_index(const std::string& s) const;
  Json to_json() const;
};

struct Trace {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<std::string> states;  // visited states, length inputs.size()+1

  Json to_json() const;
};

/// One transition: (F(i,s,t), Q(i,s,t)). Throws out_of_domain.
std::pair<std::string, std::string> step(const MealySystem& sys, const std::string& state,
                                         const std::string& in, std::size_t t);

/// Iterated step from q0, one input per time step starting at t=0.
Trace simulate(const MealySystem& sys, const std::vector<std::string>& inputs);

/// Parallel composition: componentwise behavior on paired values.
MealySystem product(const MealySystem& y, const MealySystem& z);

/// Series composition: y's output feeds z's input within the same step.
/// `wiring` translates y-output values to z-input values; identity where a
/// value is not mapped. Throws type_mismatch / self_wiring.
MealySystem connect(const MealySystem& y, const MealySystem& z,
                    const std::map<std::string, std::string>& wiring = {});

/// Closes a loop from one output factor to one input factor. The looped
/// output must be structurally independent of the looped input at the same
/// step (the unit-delay check); otherwise algebraic_loop is thrown.
MealySystem feedback(const MealySystem& sys, std::size_t out_factor, std::size_t in_factor,
                     const std::map<std::string, std::string>& wiring = {});

/// Splits x into components whose recomposition is behaviorally equivalent
/// to x up to the horizon. The split spec selects a product seam
/// ({"mode":"product","in_split":k,"out_split":k,"state_map":{s:[sy,sz]}})
/// or a series seam ({"mode":"series","mid":[...],"first":{in:mid}}).
/// Throws invalid_partition when behavior cannot be preserved.
std::pair<MealySystem, MealySystem> decompose(const MealySystem& x, const Json& split);

/// Recomposition matching the decompose seam (product or connect).
MealySystem recompose(const MealySystem& y, const MealySystem& z, const Json& split);

/// State-merge and/or output-projection abstraction. Every concrete trace
/// of sys maps into an allowed abstract trace.
AbstractSystem abstract_system(const MealySystem& sys,
                               const std::map<std::string, std::string>& state_merge,
                               const std::map<std::string, std::string>& out_projection);

/// Bounded behavioral equivalence: identical output streams on all input
/// streams of length <= horizon. Throws budget_exceeded when |In|^horizon
/// exceeds the ceiling, type_mismatch on signature mismatch.
bool equivalent(const MealySystem& a, const MealySystem& b, std::size_t horizon,
                std::size_t ceiling = 50'000'000);

}  // namespace dgm
