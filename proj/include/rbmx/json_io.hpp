#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rbmx/bayes.hpp"
#include "rbmx/elaborate.hpp"
#include "rbmx/embeddings.hpp"
#include "rbmx/factor_graph.hpp"
#include "rbmx/simulation.hpp"

// JSON forms of the model objects. Every top-level object carries "kind".
// Rationals are "num/den" strings; values are JSON booleans, integers or
// strings (symbols). Malformed input raises InvalidInput.
namespace rbmx::json {

using nlohmann::json;

json value_to_json(const Value& v);
Value value_from_json(const json& j);

json domains_to_json(const VarSet& vars);
json vars_to_json(const VarSet& vars);
VarSet vars_from_json(const json& domains, const json& vars);

json state_to_json(const VarSet& vars, const State& q);
State state_from_json(const VarSet& vars, const json& j);
Valuation valuation_from_json(const json& j);

// {"kind":"system","domains","vars","omega","pi","rel"}; with header = false only
// omega, pi and rel (the variables come from the enclosing object).
json system_to_json(const MixedSystem& s, bool header = true);
// `vars` supplies the variables of a headerless system.
MixedSystem system_from_json(const json& j, const VarSet* vars = nullptr);
// Optional "blocks": [{"outcomes":[ids], "polarity":"angel"|"demon"}].
PolarizedRelation polarized_from_json(const json& j, const MixedSystem& s);

json network_to_json(const BayesianNetwork& n);
BayesianNetwork network_from_json(const json& j);

json automaton_to_json(const MixedAutomaton& m);
MixedAutomaton automaton_from_json(const json& j);

json spa_to_json(const Spa& p);
Spa spa_from_json(const json& j);
json pa_to_json(const Pa& p);
Pa pa_from_json(const json& j);

json factor_graph_to_json(const FactorGraph& g);
FactorGraph factor_graph_from_json(const json& j);

json verdict_to_json(const SimulationVerdict& v, const VarSet& v1, const VarSet& v2);
json index_relation_to_json(bool holds, const IndexRelation& r, const std::vector<std::string>& s1,
                            const std::vector<std::string>& s2);

json run_to_json(const rb::ProgramRun& r);

// "x=b & y!=1 | z=true": disjunction of conjunctions of (in)equalities; values
// match the rendering of domain values. "true" alone is the full set.
StatePredicate parse_query(const VarSet& vars, std::string_view text);

json parse_text(std::string_view text);

}  // namespace rbmx::json
