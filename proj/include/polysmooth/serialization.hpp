#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "json.hpp"
#include "polysmooth/cover.hpp"
#include "polysmooth/crossings.hpp"
#include "polysmooth/piecewise_map.hpp"

namespace polysmooth {

using Json = nlohmann::ordered_json;

/// Rationals are written as strings ("3/4", "-2"). Accepted on input:
/// integers, strings (fractions or decimals, converted exactly) and
/// [numerator, denominator] pairs. JSON floating point numbers are rejected
/// with Error(ParseError).
Json rational_to_json(const Rational& q);
Rational rational_from_json(const Json& j, const std::string& where = "value");
Json point_to_json(const Point& p);
Point point_from_json(const Json& j, const std::string& where = "point");

Json complex_to_json(const SimplicialComplex& k);
/// Validates the complex; structural errors propagate from complex_core.
SimplicialComplex complex_from_json(const Json& j);

struct MapFile {
  std::shared_ptr<const PiecewiseMap> map;  // null for tabulated maps
  std::optional<OpaqueMap> table;           // kind "opaque-table"
  ComplexPtr target;                        // embedded target complex, if any

  /// The map as an input to simplicial approximation.
  EvaluableMap evaluable() const;
};

/// Kinds "pl" (vertex "images", or a "vertex_map" into the target),
/// "polynomial" (per maximal simplex) and "opaque-table" ("points" with
/// "values" and a "lipschitz" constant; defined only on the listed points).
/// `target` is used for vertex maps when the file embeds none.
Json map_to_json(const PiecewiseMap& g, const SimplicialComplex* target = nullptr);
MapFile map_from_json(const Json& j, const ComplexPtr& source, const ComplexPtr& target = nullptr);

Json cover_to_json(const SkeletonCover& cover);
/// Elements are rebuilt from their parameters; the cover is not verified.
SkeletonCover cover_from_json(const Json& j);
Json cover_report_to_json(const CoverReport& report);

struct DivisorFile {
  CoordinateDivisor divisor;
  Rational eta;
  int nu = 1;
};

/// {"dim": d, "components": [1-based indices], "eta": r, "nu": v, "box": [[lo], [hi]]}
Json divisor_to_json(const DivisorFile& d);
DivisorFile divisor_from_json(const Json& j);

/// Throws Error(ParseError) with the path in the message.
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string dump(const Json& j);

}  // namespace polysmooth
