#include "boundedsnr/serialize.hpp"

#include "boundedsnr/errors.hpp"

#include <fmt/format.h>

#include <cmath>

namespace snr {

using nlohmann::json;

namespace {

json number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

const json& field(const json& j, const char* name, const std::string& where) {
    if (!j.contains(name)) throw ConfigurationError(fmt::format("{}: missing field '{}'", where, name));
    return j.at(name);
}

double real_field(const json& j, const char* name, const std::string& where) {
    const json& v = field(j, name, where);
    if (!v.is_number()) throw ConfigurationError(fmt::format("{}: field '{}' must be a number", where, name));
    return v.get<double>();
}

std::vector<double> real_array(const json& j, const char* name, const std::string& where) {
    const json& v = field(j, name, where);
    if (!v.is_array()) throw ConfigurationError(fmt::format("{}: field '{}' must be an array", where, name));
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number())
            throw ConfigurationError(fmt::format("{}: field '{}' must contain numbers", where, name));
        out.push_back(e.get<double>());
    }
    return out;
}

std::string kind_of(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigurationError(fmt::format("{}: expected a JSON object", where));
    const json& k = field(j, "kind", where);
    if (!k.is_string()) throw ConfigurationError(fmt::format("{}: field 'kind' must be a string", where));
    return k.get<std::string>();
}

}  // namespace

json to_json(const RadialPrior& prior) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                return {{"kind", "point_mass"}, {"r", v.r}};
            } else if constexpr (std::is_same_v<T, BallUniform>) {
                return {{"kind", "ball_uniform"}};
            } else {
                return {{"kind", "tabulated"}, {"r", v.r}, {"density", v.density}};
            }
        },
        prior);
}

json to_json(const EstimatorSpec& spec) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, kind::Unbiased>) {
                return {{"kind", "unbiased"}};
            } else if constexpr (std::is_same_v<T, kind::Affine>) {
                return {{"kind", "affine"}, {"a", v.a}};
            } else if constexpr (std::is_same_v<T, kind::Mle>) {
                return {{"kind", "mle"}};
            } else if constexpr (std::is_same_v<T, kind::BoundaryUniform>) {
                json j{{"kind", "boundary_uniform"}, {"l", v.l}};
                if (v.radius) j["radius"] = *v.radius;
                return j;
            } else if constexpr (std::is_same_v<T, kind::RadialMixture>) {
                return {{"kind", "radial_mixture"}, {"l", v.l}, {"prior", to_json(v.prior)}};
            } else if constexpr (std::is_same_v<T, kind::Truncated>) {
                return {{"kind", "truncated"}, {"base", to_json(*v.base)}};
            } else {
                json t = json::array();
                for (double x : v.t) t.push_back(number(x));
                return {{"kind", "tabulated"}, {"t", t}, {"h", v.h}};
            }
        },
        spec.value);
}

RadialPrior prior_from_json(const json& j) {
    const std::string where = "prior";
    const std::string k = kind_of(j, where);
    if (k == "point_mass") return PointMass{real_field(j, "r", where)};
    if (k == "ball_uniform") return BallUniform{};
    if (k == "tabulated") return TabulatedDensity{real_array(j, "r", where), real_array(j, "density", where)};
    throw ConfigurationError(fmt::format("prior: unknown kind '{}'", k));
}

EstimatorSpec spec_from_json(const json& j) {
    const std::string where = "spec";
    const std::string k = kind_of(j, where);
    if (k == "unbiased") return EstimatorSpec::unbiased();
    if (k == "affine") return EstimatorSpec::affine(real_field(j, "a", where));
    if (k == "mle") return EstimatorSpec::mle();
    if (k == "boundary_uniform") {
        const double l = j.contains("l") ? real_field(j, "l", where) : 0.0;
        std::optional<double> radius;
        if (j.contains("radius")) radius = real_field(j, "radius", where);
        return EstimatorSpec::boundary_uniform(l, radius);
    }
    if (k == "radial_mixture") {
        const double l = j.contains("l") ? real_field(j, "l", where) : 0.0;
        RadialPrior prior = BallUniform{};
        if (j.contains("prior")) prior = prior_from_json(j.at("prior"));
        return EstimatorSpec::radial_mixture(l, std::move(prior));
    }
    if (k == "truncated") return EstimatorSpec::truncated(spec_from_json(field(j, "base", where)));
    if (k == "tabulated") {
        return EstimatorSpec::tabulated(real_array(j, "t", where), real_array(j, "h", where));
    }
    throw ConfigurationError(fmt::format("spec: unknown kind '{}'", k));
}

EstimatorSpec parse_spec(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\n\r");
    if (first != std::string::npos && text[first] == '{') {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigurationError(fmt::format("spec: invalid JSON ({})", e.what()));
        }
        return spec_from_json(j);
    }
    return spec_from_json(json{{"kind", text}});
}

json to_json(const analysis::VerificationReport& report) {
    json violations = json::array();
    for (const auto& v : report.violations) {
        json inputs = json::object();
        for (const auto& [name, value] : v.inputs) inputs[name] = number(value);
        violations.push_back(
            {{"check", v.check}, {"inputs", inputs}, {"lhs", number(v.lhs)}, {"rhs", number(v.rhs)}});
    }
    return {{"name", report.name},        {"grid", report.grid_description},
            {"passed", report.passed},    {"exploratory", report.exploratory},
            {"checks", report.checks},    {"violations", violations}};
}

json to_json(const analysis::Truncation& truncation) {
    json t = json::array();
    for (double x : truncation.violations) t.push_back(number(x));
    json j{{"spec", to_json(truncation.spec)}, {"identity", truncation.identity}, {"violations", t}};
    if (!truncation.advisory.empty()) j["advisory"] = truncation.advisory;
    return j;
}

}  // namespace snr
