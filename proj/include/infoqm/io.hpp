#pragma once

#include <string>

#include <json.hpp>

#include "infoqm/maxent.hpp"

namespace infoqm::io {

using Json = nlohmann::json;

/// v rounded to `digits` significant decimal digits (through printf "%.*g").
double round_significant(double v, int digits);

/// Copy of j with every floating-point number rounded to `digits`
/// significant digits.
Json rounded(const Json& j, int digits = 12);

/// Sorted keys, two-space indent, numbers rounded to 12 digits, trailing LF.
std::string dump(const Json& j);

/// "%.*g" with '.' as the decimal point regardless of locale.
std::string format_number(double v, int digits);

Json read_json_file(const std::string& path);
/// ValidationError when the file cannot be written.
void write_file(const std::string& path, const std::string& content);

/// A support bound: a number or one of the strings "inf", "-inf".
double parse_bound(const Json& j);
Json bound_to_json(double v);

/// {"support": [lo, hi], "moments": [{"order", "value"}...],
///  "factors": {"zeros": [{"location", "multiplicity"}],
///              "singularities": [{"location", "exponent"}]}}
MomentSpec1D parse_moment_spec_1d(const Json& j);
EndpointFactors parse_factors(const Json& j);

/// {"support": [[x_lo, x_hi], [y_lo, y_hi]], "moments": [{"i", "j", "value"}...]}
MomentSpec2D parse_moment_spec_2d(const Json& j);

/// True when "support" is a pair of pairs.
bool is_2d_spec(const Json& j);

Json to_json(const ExpFamilyDensity1D& d, const MomentSpec1D& spec);
Json to_json(const ExpFamilyDensity2D& d, const MomentSpec2D& spec);

}  // namespace infoqm::io
