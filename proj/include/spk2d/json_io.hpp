#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "spk2d/analysis.hpp"
#include "spk2d/models.hpp"
#include "spk2d/transport.hpp"

namespace spk2d {

using Json = nlohmann::ordered_json;

// Compact rendering with every floating-point number printed as %.17g.
std::string dump(const Json& j);

// Parsing throws ParseError on malformed or unknown content and DomainError
// when the content parses but violates a model invariant.
Json parse_json_text(const std::string& text);

Json to_json(const HarmonicExpansion& h);
Json to_json(const ScalarExpression& e);
Json to_json(const SpecialKahlerData& d);
Json to_json(const ModelSpec& m);
Json to_json(const Path& p);
Json to_json(const Mat2& m);
Json to_json(const TransportResult& t);
Json to_json(const HolonomyClass& c);
Json to_json(const AdmissibleClasses& c);
Json to_json(const SingularityFit& f);
Json to_json(const std::vector<KodairaRow>& rows);

HarmonicExpansion harmonic_from_json(const Json& j);
ScalarExpression scalar_from_json(const Json& j);
SpecialKahlerData data_from_json(const Json& j);
ModelSpec model_from_json(const Json& j);
Path path_from_json(const Json& j);
Mat2 matrix_from_json(const Json& j);

}  // namespace spk2d
