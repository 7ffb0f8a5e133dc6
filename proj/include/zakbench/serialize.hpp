#pragma once

#include <json.hpp>

#include <string>

#include "constructions.hpp"
#include "error.hpp"
#include "rational.hpp"

namespace zakbench {

using json = nlohmann::ordered_json;

inline json to_json(const Rational& r) { return r.str(); }

inline Rational rational_from_json(const json& j, const std::string& field) {
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    fail("field '" + field + "' must be a rational string \"p/q\"");
}

namespace detail {

template <class T>
T get_field(const json& j, const char* key, const T& fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        fail(std::string("field '") + key + "' has the wrong type");
    }
}

inline const json& require_field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) fail(std::string("missing field '") + key + "'");
    return j.at(key);
}

inline json cells_to_json(const CellTable& t) {
    json a = json::array();
    for (const auto& c : t.cells)
        a.push_back({{"re", c.scale.real()}, {"im", c.scale.imag()}, {"omega_power", c.omega_power}});
    return {{"cells", a}};
}

inline CellTable cells_from_json(const json& j) {
    CellTable t;
    for (const auto& c : require_field(j, "cells"))
        t.cells.push_back({cplx{get_field(c, "re", 0.0), get_field(c, "im", 0.0)},
                           get_field<std::int64_t>(c, "omega_power", 0)});
    require(!t.cells.empty(), "cell table must not be empty");
    return t;
}

}  // namespace detail

inline json to_json(const WindowSpec& spec) {
    json params = json::object();
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, PiecewiseShape>) {
                json pieces = json::array();
                for (const auto& p : s.pieces)
                    pieces.push_back({{"a", p.a.str()}, {"b", p.b.str()}, {"re", p.value.real()}, {"im", p.value.imag()}});
                params["pieces"] = pieces;
            } else if constexpr (std::is_same_v<T, GaussianShape>) {
                params = {{"width", s.width}, {"amplitude", s.amplitude}, {"cutoff", s.cutoff.str()}};
            } else if constexpr (std::is_same_v<T, BSplineShape>) {
                params = {{"order", s.order}, {"scale", s.scale.str()}, {"amplitude", s.amplitude}};
            } else if constexpr (std::is_same_v<T, Example2Shape>) {
                params = {{"eps", s.eps}, {"sign", s.sign}, {"L", s.nl}};
            } else {
                json re = json::array(), im = json::array();
                for (const auto& v : s.samples) {
                    re.push_back(v.real());
                    im.push_back(v.imag());
                }
                params = {{"rate", s.rate}, {"start", s.start}, {"re", re}, {"im", im}};
            }
        },
        spec.shape);
    return {{"variant", variant_name(spec)}, {"params", params}, {"N", spec.n}, {"label", spec.label}};
}

inline WindowSpec window_spec_from_json(const json& j) {
    WindowSpec spec;
    const std::string variant = detail::require_field(j, "variant").get<std::string>();
    const json params = j.contains("params") ? j.at("params") : json::object();
    spec.n = detail::get_field<std::int64_t>(j, "N", 720);
    spec.label = detail::get_field<std::string>(j, "label", "");
    if (variant == "piecewise") {
        PiecewiseShape s;
        for (const auto& p : detail::require_field(params, "pieces"))
            s.pieces.push_back({rational_from_json(detail::require_field(p, "a"), "a"),
                                rational_from_json(detail::require_field(p, "b"), "b"),
                                cplx{detail::get_field(p, "re", 0.0), detail::get_field(p, "im", 0.0)}});
        spec.shape = s;
    } else if (variant == "gaussian") {
        GaussianShape s;
        s.width = detail::get_field(params, "width", 1.0);
        s.amplitude = detail::get_field(params, "amplitude", 1.0);
        if (params.contains("cutoff")) s.cutoff = rational_from_json(params.at("cutoff"), "cutoff");
        spec.shape = s;
    } else if (variant == "bspline") {
        BSplineShape s;
        s.order = detail::get_field(params, "order", 2);
        if (params.contains("scale")) s.scale = rational_from_json(params.at("scale"), "scale");
        s.amplitude = detail::get_field(params, "amplitude", 1.0);
        spec.shape = s;
    } else if (variant == "example2") {
        Example2Shape s;
        s.eps = detail::get_field(params, "eps", 0.3);
        s.sign = detail::get_field(params, "sign", -1);
        s.nl = detail::get_field<std::int64_t>(params, "L", 64);
        spec.shape = s;
    } else if (variant == "raw") {
        RawShape s;
        s.rate = detail::get_field<std::int64_t>(params, "rate", spec.n);
        s.start = detail::get_field<std::int64_t>(params, "start", 0);
        const auto re = detail::require_field(params, "re").get<std::vector<double>>();
        const auto im = params.contains("im") ? params.at("im").get<std::vector<double>>() : std::vector<double>(re.size());
        require(re.size() == im.size(), "raw window: re and im must have the same length");
        for (std::size_t i = 0; i < re.size(); ++i) s.samples.emplace_back(re[i], im[i]);
        spec.shape = s;
    } else {
        fail("unknown window variant '" + variant + "' (expected piecewise, gaussian, bspline, example2 or raw)");
    }
    return spec;
}

inline json to_json(const SQPSpec& spec) {
    json j = {{"R", spec.R}, {"P", spec.P}, {"sign", spec.sign}};
    if (const auto* t = std::get_if<CellTable>(&spec.h)) j["h"] = detail::cells_to_json(*t);
    else j["h"] = {{"formula", "smooth"}, {"eps", std::get<SmoothMultiplier>(spec.h).eps}};
    if (const auto* t = std::get_if<CellTable>(&spec.seed)) j["seed"] = detail::cells_to_json(*t);
    else j["seed"] = {{"formula", "bump"}};
    return j;
}

inline SQPSpec sqp_spec_from_json(const json& j) {
    SQPSpec s;
    s.R = detail::get_field<std::int64_t>(j, "R", 2);
    s.P = detail::get_field<std::int64_t>(j, "P", 3);
    s.sign = detail::get_field(j, "sign", -1);
    const json& h = detail::require_field(j, "h");
    if (h.contains("cells")) s.h = detail::cells_from_json(h);
    else if (detail::get_field<std::string>(h, "formula", "") == "smooth") s.h = SmoothMultiplier{detail::get_field(h, "eps", 0.3)};
    else fail("multiplier must be a cell table or {\"formula\": \"smooth\"}");
    const json& seed = detail::require_field(j, "seed");
    if (seed.contains("cells")) s.seed = detail::cells_from_json(seed);
    else if (detail::get_field<std::string>(seed, "formula", "") == "bump") s.seed = BumpSeed{};
    else fail("seed must be a cell table or {\"formula\": \"bump\"}");
    return s;
}

}  // namespace zakbench
