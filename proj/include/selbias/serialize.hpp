#pragma once

// JSON conversions (nlohmann::json) for the public types. Readers are strict:
// a missing or mistyped field raises invalid_input naming the field.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "selbias/bounds.hpp"
#include "selbias/dataset.hpp"
#include "selbias/errors.hpp"
#include "selbias/estimand.hpp"
#include "selbias/mstructure.hpp"
#include "selbias/oracle.hpp"
#include "selbias/sharpness.hpp"

namespace selbias {

using json = nlohmann::json;

namespace detail {

[[noreturn]] inline void bad_field(std::string_view field, const std::string& message) {
    throw Error(ErrorCode::invalid_input, std::string(field) + ": " + message, std::string(field));
}

inline const json& field(const json& j, std::string_view key) {
    if (!j.is_object()) bad_field("body", "expected a JSON object");
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) bad_field(key, "missing");
    return *it;
}

inline double as_number(const json& v, std::string_view name) {
    if (!v.is_number()) bad_field(name, "expected a number");
    return v.get<double>();
}

inline double number_field(const json& j, std::string_view key) { return as_number(field(j, key), key); }

inline std::optional<double> optional_number(const json& j, std::string_view key) {
    if (!j.is_object()) bad_field("body", "expected a JSON object");
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return as_number(*it, key);
}

inline std::vector<double> number_array(const json& v, std::string_view name, std::size_t expected) {
    if (!v.is_array() || v.size() != expected) {
        bad_field(name, "expected an array of " + std::to_string(expected) + " numbers");
    }
    std::vector<double> out;
    for (const auto& x : v) out.push_back(as_number(x, name));
    return out;
}

inline std::string string_field(const json& j, std::string_view key) {
    const auto& v = field(j, key);
    if (!v.is_string()) bad_field(key, "expected a string");
    return v.get<std::string>();
}

inline DiscreteDist dist_from_json(const json& v, std::string_view name) {
    if (!v.is_array()) bad_field(name, "expected an array of [value, prob] pairs");
    DiscreteDist d;
    for (const auto& row : v) {
        const auto pair = number_array(row, name, 2);
        if (pair[0] != static_cast<double>(static_cast<int>(pair[0]))) bad_field(name, "values must be integers");
        d.entries.push_back({static_cast<int>(pair[0]), pair[1]});
    }
    return d;
}

inline json dist_to_json(const DiscreteDist& d) {
    json out = json::array();
    for (const auto& e : d.entries) out.push_back({e.value, e.prob});
    return out;
}

}  // namespace detail

inline void to_json(json& j, EstimandKind e) { j = std::string(to_string(e)); }
inline void from_json(const json& j, EstimandKind& e) {
    if (!j.is_string()) detail::bad_field("estimand", "expected a string");
    e = parse_estimand(j.get<std::string>());
}

inline void to_json(json& j, const MStructureSpec& s) {
    json scoef = json::array();
    for (const auto& r : s.s_coef) scoef.push_back({r.intercept, r.v, r.u, r.t});
    j = {{"Vval", detail::dist_to_json(s.v_dist)},
         {"Uval", detail::dist_to_json(s.u_dist)},
         {"Tcoef", {s.t_coef.intercept, s.t_coef.v}},
         {"Ycoef", {s.y_coef.intercept, s.y_coef.t, s.y_coef.u}},
         {"Scoef", scoef},
         {"Mmodel", s.link == LinkKind::logistic ? "L" : "P"}};
}

inline void from_json(const json& j, MStructureSpec& s) {
    s.v_dist = detail::dist_from_json(detail::field(j, "Vval"), "Vval");
    s.u_dist = detail::dist_from_json(detail::field(j, "Uval"), "Uval");
    const auto t = detail::number_array(detail::field(j, "Tcoef"), "Tcoef", 2);
    s.t_coef = {t[0], t[1]};
    const auto y = detail::number_array(detail::field(j, "Ycoef"), "Ycoef", 3);
    s.y_coef = {y[0], y[1], y[2]};
    const auto& sc = detail::field(j, "Scoef");
    if (!sc.is_array() || sc.empty()) detail::bad_field("Scoef", "expected a non-empty array of 4-arrays");
    s.s_coef.clear();
    for (const auto& row : sc) {
        const auto r = detail::number_array(row, "Scoef", 4);
        s.s_coef.push_back({r[0], r[1], r[2], r[3]});
    }
    s.link = LinkKind::logistic;
    if (j.contains("Mmodel") && !j.at("Mmodel").is_null()) {
        const auto m = detail::string_field(j, "Mmodel");
        if (m == "L") s.link = LinkKind::logistic;
        else if (m == "P") s.link = LinkKind::probit;
        else detail::bad_field("Mmodel", "expected \"L\" or \"P\"");
    }
    s.validate();
}

inline void to_json(json& j, const SensitivityParamsTotal& p) {
    j = {{"rr_uy_t1", p.rr_uy_t1}, {"rr_uy_t0", p.rr_uy_t0}, {"rr_su_t1", p.rr_su_t1}, {"rr_su_t0", p.rr_su_t0}};
}
inline void from_json(const json& j, SensitivityParamsTotal& p) {
    p.rr_uy_t1 = detail::number_field(j, "rr_uy_t1");
    p.rr_uy_t0 = detail::number_field(j, "rr_uy_t0");
    p.rr_su_t1 = detail::number_field(j, "rr_su_t1");
    p.rr_su_t0 = detail::number_field(j, "rr_su_t0");
}

inline void to_json(json& j, const SensitivityParamsSub& p) {
    j = {{"rr_uy_s1", p.rr_uy_s1}, {"rr_tu_s1", p.rr_tu_s1}};
}
inline void from_json(const json& j, SensitivityParamsSub& p) {
    p.rr_uy_s1 = detail::number_field(j, "rr_uy_s1");
    p.rr_tu_s1 = detail::number_field(j, "rr_tu_s1");
}

inline json params_to_json(const SensitivityParams& p) {
    return std::visit([](const auto& x) { return json(x); }, p);
}

// Parameter variant matching the estimand's population.
inline SensitivityParams params_from_json(const json& j, EstimandKind estimand) {
    if (is_subpopulation(estimand)) return j.get<SensitivityParamsSub>();
    return j.get<SensitivityParamsTotal>();
}

inline void to_json(json& j, const ObservedSummary& o) {
    j = {{"pY1_T1_S1", o.py1_t1_s1}, {"pY1_T0_S1", o.py1_t0_s1}};
    if (o.pt1_s1) j["pT1_S1"] = *o.pt1_s1;
    if (o.ps1) j["pS1"] = *o.ps1;
}
inline void from_json(const json& j, ObservedSummary& o) {
    o.py1_t1_s1 = detail::number_field(j, "pY1_T1_S1");
    o.py1_t0_s1 = detail::number_field(j, "pY1_T0_S1");
    o.pt1_s1 = detail::optional_number(j, "pT1_S1");
    o.ps1 = detail::optional_number(j, "pS1");
}

inline void to_json(json& j, const BoundResult& r) {
    j = {{"estimand", r.estimand}, {"method", r.method == BoundMethod::sv ? "SV" : "AF"}, {"value", r.value}};
    if (r.bf1) j["BF_1"] = *r.bf1;
    if (r.bf0) j["BF_0"] = *r.bf0;
    if (r.bf_u) j["BF_U"] = *r.bf_u;
    if (r.params) j["params"] = params_to_json(*r.params);
    if (r.observed) j["observed"] = *r.observed;
    j["warnings"] = r.warnings;
}

inline void to_json(json& j, const SvParametersResult& r) {
    j = {{"estimand", r.estimand}, {"params", params_to_json(r.params)}, {"reversed", r.reversed},
         {"causal_value", r.causal_value}, {"observed_value", r.observed_value}, {"notes", r.notes}};
    if (r.bf1) j["BF_1"] = *r.bf1;
    if (r.bf0) j["BF_0"] = *r.bf0;
    if (r.bf_u) j["BF_U"] = *r.bf_u;
}

inline void to_json(json& j, const SharpnessVerdict& v) {
    j = {{"verdict", std::string(to_string(v.verdict))},
         {"message", v.message()},
         {"reason", v.reason},
         {"sharp_limit", v.sharp_limit},
         {"sv_bound", v.sv_bound ? json(*v.sv_bound) : json(nullptr)},
         {"af_bound", v.af_bound ? json(*v.af_bound) : json(nullptr)}};
}

inline void to_json(json& j, const GridAxis& a) { j = {{"min", a.min}, {"max", a.max}, {"steps", a.steps}}; }
inline void from_json(const json& j, GridAxis& a) {
    a.min = detail::number_field(j, "min");
    a.max = detail::number_field(j, "max");
    const double steps = detail::number_field(j, "steps");
    if (steps < 1 || steps != static_cast<double>(static_cast<long long>(steps))) {
        detail::bad_field("steps", "expected a positive integer");
    }
    a.steps = static_cast<std::size_t>(steps);
}

// Axes plus row-major matrices: rows follow RR_TU|S=1, columns RR_UY|S=1.
inline void to_json(json& j, const SharpnessGrid& g) {
    json bounds = json::array(), verdicts = json::array();
    for (std::size_t r = 0; r < g.tu_values.size(); ++r) {
        json brow = json::array(), vrow = json::array();
        for (std::size_t c = 0; c < g.uy_values.size(); ++c) {
            brow.push_back(g.at(r, c).bound);
            vrow.push_back(std::string(to_string(g.at(r, c).verdict)));
        }
        bounds.push_back(std::move(brow));
        verdicts.push_back(std::move(vrow));
    }
    j = {{"uy_axis", g.uy_axis}, {"tu_axis", g.tu_axis}, {"uy_values", g.uy_values},
         {"tu_values", g.tu_values}, {"pY1_T0_S1", g.py1_t0_s1}, {"sharp_limit", 1.0 / g.py1_t0_s1},
         {"af_bound", g.af_bound ? json(*g.af_bound) : json(nullptr)},
         {"bounds", std::move(bounds)}, {"verdicts", std::move(verdicts)}};
}

inline void to_json(json& j, const EstimandReport& r) {
    j = {{"beta_R", r.beta_r},         {"beta_D", r.beta_d},         {"beta_RS", r.beta_rs},
         {"beta_DS", r.beta_ds},       {"beta_R_obs", r.beta_r_obs}, {"beta_D_obs", r.beta_d_obs},
         {"pY1_T1_S1", r.py1_t1_s1}, {"pY1_T0_S1", r.py1_t0_s1}};
}

inline void to_json(json& j, const ArmProportions& a) {
    j = {{"weight", a.weight}, {"microcephaly", a.microcephaly}, {"urban", a.urban}, {"ses", a.ses}};
}

inline void to_json(json& j, const DataSummary& s) {
    j = {{"stage", s.stage},
         {"n_rows", s.n_rows},
         {"n_selected", s.n_selected},
         {"observed", s.observed},
         {"proportions",
          {{"T0", s.proportions.arms[0]}, {"T1", s.proportions.arms[1]}, {"overall", s.proportions.arms[2]}}}};
}

inline void to_json(json& j, const Dataset& d) {
    j = {{"n", d.rows()}, {"zika", d.zika}, {"mic_ceph", d.mic_ceph}};
    for (std::size_t k = 0; k < d.selections.size(); ++k) j[selection_column_name(k)] = d.selections[k];
    j["sel_ind"] = d.sel_ind;
    j["urban"] = d.urban;
    j["ses"] = d.ses;
}

namespace oracle {

inline void to_json(json& j, const JointDistTotal& d) {
    // cells listed as {y, t, u, s, p}
    json cells = json::array();
    for (int y = 0; y < 2; ++y)
        for (int t = 0; t < 2; ++t)
            for (int u = 0; u < static_cast<int>(JointDistTotal::kULevels); ++u)
                for (int s = 0; s < 2; ++s) cells.push_back({{"y", y}, {"t", t}, {"u", u}, {"s", s}, {"p", d.cells[y][t][u][s]}});
    j = {{"epsilon", d.epsilon}, {"cells", cells}};
}

inline void from_json(const json& j, JointDistTotal& d) {
    d = {};
    d.epsilon = selbias::detail::number_field(j, "epsilon");
    const auto& cells = selbias::detail::field(j, "cells");
    if (!cells.is_array()) selbias::detail::bad_field("cells", "expected an array");
    for (const auto& c : cells) {
        const int y = static_cast<int>(selbias::detail::number_field(c, "y"));
        const int t = static_cast<int>(selbias::detail::number_field(c, "t"));
        const int u = static_cast<int>(selbias::detail::number_field(c, "u"));
        const int s = static_cast<int>(selbias::detail::number_field(c, "s"));
        if (y < 0 || y > 1 || t < 0 || t > 1 || s < 0 || s > 1 || u < 0 ||
            u >= static_cast<int>(JointDistTotal::kULevels)) {
            selbias::detail::bad_field("cells", "index out of range");
        }
        d.cells[y][t][u][s] = selbias::detail::number_field(c, "p");
    }
}

inline void to_json(json& j, const JointDistSub& d) {
    j = {{"p_t1", d.p_t1},
         {"p_u_given_t", {d.p_u_given_t[0], d.p_u_given_t[1]}},
         {"p_y1_given_tu", {d.p_y1_given_tu[0], d.p_y1_given_tu[1]}},
         {"epsilon", d.epsilon}};
}

inline void from_json(const json& j, JointDistSub& d) {
    d.p_t1 = selbias::detail::number_field(j, "p_t1");
    d.epsilon = selbias::detail::optional_number(j, "epsilon").value_or(0.0);
    const auto& pu = selbias::detail::field(j, "p_u_given_t");
    const auto& py = selbias::detail::field(j, "p_y1_given_tu");
    if (!pu.is_array() || pu.size() != 2 || !py.is_array() || py.size() != 2) {
        selbias::detail::bad_field("p_u_given_t", "expected one row per treatment level");
    }
    const std::size_t levels = pu[0].is_array() ? pu[0].size() : 0;
    for (int t = 0; t < 2; ++t) {
        d.p_u_given_t[t] = selbias::detail::number_array(pu[t], "p_u_given_t", levels);
        d.p_y1_given_tu[t] = selbias::detail::number_array(py[t], "p_y1_given_tu", levels);
    }
}

}  // namespace oracle

// Error payload used by the CLI (stderr) and the service envelope.
inline json error_to_json(const Error& e) {
    return {{"code", std::string(to_string(e.code()))}, {"message", e.what()}, {"field", e.field()}};
}

}  // namespace selbias
