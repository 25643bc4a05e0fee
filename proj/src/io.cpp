#include "infoqm/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "infoqm/error.hpp"

namespace infoqm::io {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class T>
T field(const Json& j, const char* key, const char* context) {
    if (!j.is_object() || !j.contains(key))
        throw ValidationError(std::string(context) + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ValidationError(std::string(context) + ": field '" + key + "' has the wrong type");
    }
}

}  // namespace

double round_significant(double v, int digits) {
    if (v == 0.0) return 0.0;
    if (!std::isfinite(v)) return v;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, v);
    return std::strtod(buf, nullptr);
}

Json rounded(const Json& j, int digits) {
    if (j.is_number_float()) return round_significant(j.get<double>(), digits);
    if (j.is_array() || j.is_object()) {
        Json out = j;
        for (auto& item : out) item = rounded(item, digits);
        return out;
    }
    return j;
}

std::string dump(const Json& j) { return rounded(j).dump(2) + "\n"; }

std::string format_number(double v, int digits) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    std::string s = buf;
    for (char& c : s)
        if (c == ',') c = '.';
    return s;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
    }
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << content;
    out.flush();
    if (!out) throw ValidationError("write to '" + path + "' failed");
}

double parse_bound(const Json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf" || s == "+inf") return kInf;
        if (s == "-inf") return -kInf;
    }
    throw ValidationError("support bound must be a number, \"inf\" or \"-inf\"");
}

Json bound_to_json(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

EndpointFactors parse_factors(const Json& j) {
    EndpointFactors f;
    if (j.is_null()) return f;
    if (!j.is_object()) throw ValidationError("factors: expected an object");
    if (j.contains("zeros"))
        for (const Json& z : j.at("zeros"))
            f.zeros.push_back({field<double>(z, "location", "zero factor"),
                               field<double>(z, "multiplicity", "zero factor")});
    if (j.contains("singularities"))
        for (const Json& s : j.at("singularities"))
            f.singularities.push_back({field<double>(s, "location", "singularity factor"),
                                       field<double>(s, "exponent", "singularity factor")});
    return f;
}

bool is_2d_spec(const Json& j) {
    return j.is_object() && j.contains("support") && j.at("support").is_array() &&
           !j.at("support").empty() && j.at("support").front().is_array();
}

MomentSpec1D parse_moment_spec_1d(const Json& j) {
    const Json support = field<Json>(j, "support", "moment spec");
    if (!support.is_array() || support.size() != 2)
        throw ValidationError("moment spec: support must be [lo, hi]");
    MomentSpec1D spec{parse_bound(support[0]), parse_bound(support[1]), {}};
    for (const Json& m : field<Json>(j, "moments", "moment spec"))
        spec.constraints.push_back(
            {field<int>(m, "order", "moment"), field<double>(m, "value", "moment")});
    spec.validate();
    return spec;
}

MomentSpec2D parse_moment_spec_2d(const Json& j) {
    const Json support = field<Json>(j, "support", "2D moment spec");
    if (support.size() != 2 || support[0].size() != 2 || support[1].size() != 2)
        throw ValidationError("2D moment spec: support must be [[x_lo, x_hi], [y_lo, y_hi]]");
    MomentSpec2D spec{parse_bound(support[0][0]), parse_bound(support[0][1]),
                      parse_bound(support[1][0]), parse_bound(support[1][1]), {}};
    for (const Json& m : field<Json>(j, "moments", "2D moment spec"))
        spec.constraints.push_back({field<int>(m, "i", "moment"), field<int>(m, "j", "moment"),
                                    field<double>(m, "value", "moment")});
    spec.validate();
    return spec;
}

Json to_json(const ExpFamilyDensity1D& d, const MomentSpec1D& spec) {
    Json moments = Json::array();
    for (const MomentConstraint& c : spec.constraints)
        moments.push_back({{"order", c.order}, {"target", c.value}, {"fitted", d.moment(c.order)}});
    Json zeros = Json::array(), singularities = Json::array();
    for (const ZeroFactor& z : d.factors().zeros)
        zeros.push_back({{"location", z.location}, {"multiplicity", z.multiplicity}});
    for (const SingularityFactor& s : d.factors().singularities)
        singularities.push_back({{"location", s.location}, {"exponent", s.exponent}});
    return {
        {"support", {bound_to_json(d.support_lo()), bound_to_json(d.support_hi())}},
        {"window", {d.window_lo(), d.window_hi()}},
        {"multipliers", d.multipliers()},
        {"moments", moments},
        {"factors", {{"zeros", zeros}, {"singularities", singularities}}},
        {"information", information(d)},
        {"modified_information", modified_information(d)},
        {"diagnostics",
         {{"iterations", d.diagnostics.iterations},
          {"max_moment_residual", d.diagnostics.max_moment_residual},
          {"normalization_error", d.diagnostics.normalization_error},
          {"tail_mass", d.diagnostics.tail_mass}}},
    };
}

Json to_json(const ExpFamilyDensity2D& d, const MomentSpec2D& spec) {
    Json coefficients = Json::array();
    for (int i = 0; i <= kMaxTotalDegree2D; ++i)
        for (int j = 0; i + j <= kMaxTotalDegree2D; ++j)
            if (d.coefficient(i, j) != 0.0)
                coefficients.push_back({{"i", i}, {"j", j}, {"value", d.coefficient(i, j)}});
    Json moments = Json::array();
    for (const MomentConstraint2D& c : spec.constraints)
        moments.push_back(
            {{"i", c.i}, {"j", c.j}, {"target", c.value}, {"fitted", d.moment(c.i, c.j)}});
    return {
        {"support", {{d.x_lo(), d.x_hi()}, {d.y_lo(), d.y_hi()}}},
        {"coefficients", coefficients},
        {"moments", moments},
        {"diagnostics",
         {{"iterations", d.diagnostics.iterations},
          {"max_moment_residual", d.diagnostics.max_moment_residual},
          {"normalization_error", d.diagnostics.normalization_error}}},
    };
}

}  // namespace infoqm::io
