#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "marton/channel.hpp"
#include "marton/coding.hpp"
#include "marton/covering.hpp"
#include "marton/divergence.hpp"
#include "marton/experiment.hpp"
#include "marton/pmf.hpp"
#include "marton/region.hpp"

namespace marton {

using Json = nlohmann::ordered_json;

// Every parser throws ParseError naming `where` and the offending field.
Json load_json(const std::filesystem::path& path);

Pmf parse_pmf(const Json& j, const std::string& where);
// {"rows": [...], "cols": [...], "p": [[...], ...]}; labels optional.
JointPmf parse_joint(const Json& j, const std::string& where);
// Entries are numbers or [re, im].
ComplexMatrix parse_matrix(const Json& j, const std::string& where);

// {"x", "y", "z", "p": p[x][y][z]} or {"x", "y", "z", "bob": p(y|x),
// "charlie": p(z|x)} for conditionally independent outputs.
ClassicalBroadcastChannel parse_classical_channel(const Json& j, const std::string& where);
// {"x", "dim_b", "dim_c", "states": [...]} or with "bob_states" and
// "charlie_states" for product outputs.
CqBroadcastChannel parse_cq_channel(const Json& j, const std::string& where);
// {"u", "v", "p", "f"}; f is {"u,v": x} or a |U| x |V| array of x labels
// (null for unmapped zero-mass cells).
InputDesign parse_design(const Json& j, const std::string& where,
                         const std::vector<std::string>& x_alphabet);

Json to_json(const DivergenceResult& r);
Json to_json(const RateParams& p);
Json to_json(const ConstraintCheck& c);
Json to_json(const std::vector<ConstraintCheck>& cs);
Json to_json(const BandSelection& b);
Json to_json(const Estimate& e);
Json to_json(const EventBounds& b);
Json to_json(const EventCounts& c);
Json to_json(const BoundCheck& c);
Json to_json(const ExperimentReport& r);
Json to_json(const CoveringResult& r);
Json to_json(const BandCoveringResult& r);
Json to_json(const RateRegion& r);
Json to_json(const RegionComparison& c);
Json to_json(const std::vector<CurveRow>& rows);

// event,bound,value,applicable,successes,trials,rate,lower,upper,upper_one_sided,violated
std::string checks_csv(const ExperimentReport& r);
std::string curve_csv(const std::vector<CurveRow>& rows);
std::string covering_csv(const std::vector<CoveringResult>& rs);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace marton
