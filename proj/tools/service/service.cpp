#include "service.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include <httplib.h>

#include "selbias/selbias.hpp"

namespace selbias::service {
namespace {

using Handler = std::function<json(const json&, const Options&)>;

json ok(json result) { return {{"ok", true}, {"result", std::move(result)}}; }

Response envelope_error(int status, std::string_view code, const std::string& message, const std::string& field) {
    json body = {{"ok", false}, {"error", {{"code", code}, {"message", message}, {"field", field}}}};
    return {status, body.dump()};
}

// 400 for malformed requests, 422 for well-formed requests the mathematics rejects.
int status_for(ErrorCode code) {
    return code == ErrorCode::invalid_input || code == ErrorCode::parse ? 400 : 422;
}

EstimandKind estimand_of(const json& body) {
    return parse_estimand(detail::string_field(body, "estimand"));
}

MStructureSpec model_of(const json& body) {
    if (!body.contains("model") || body.at("model").is_null()) return zika_learner_spec();
    return body.at("model").get<MStructureSpec>();
}

std::optional<bool> optional_bool(const json& body, std::string_view key) {
    const auto it = body.find(key);
    if (it == body.end() || it->is_null()) return std::nullopt;
    if (!it->is_boolean()) detail::bad_field(key, "expected true or false");
    return it->get<bool>();
}

std::size_t count_field(const json& body, std::string_view key, std::size_t fallback) {
    const auto v = detail::optional_number(body, key);
    if (!v) return fallback;
    if (*v < 0 || *v != static_cast<double>(static_cast<long long>(*v))) {
        detail::bad_field(key, "expected a non-negative integer");
    }
    return static_cast<std::size_t>(*v);
}

json sv_params(const json& body, const Options&) {
    const auto r = sv_bound_parameters_m(model_of(body), estimand_of(body), detail::number_field(body, "pY1_T1_S1"),
                                         detail::number_field(body, "pY1_T0_S1"));
    return r;
}

json sv_bound_route(const json& body, const Options&) {
    const auto estimand = estimand_of(body);
    const auto params = params_from_json(body, estimand);
    std::optional<ObservedSummary> observed;
    if (!is_relative_risk(estimand) || body.contains("pY1_T1_S1") || body.contains("pY1_T0_S1")) {
        observed = ObservedSummary{detail::number_field(body, "pY1_T1_S1"),
                                   detail::number_field(body, "pY1_T0_S1"), {}, {}};
    }
    return sv_bound(estimand, params, observed, detail::optional_number(body, "exact_bias"));
}

json af_bound_route(const json& body, const Options&) {
    const auto estimand = estimand_of(body);
    if (!body.contains("csv")) return af_bound(estimand, body.get<ObservedSummary>());

    const auto table = parse_csv(detail::string_field(body, "csv"));
    const auto column = [&](std::string_view key, const char* fallback) {
        return body.contains(key) ? detail::string_field(body, key) : std::string(fallback);
    };
    const BinaryColumn y = binary_column(table, column("outcome", "mic_ceph"));
    BinaryColumn t = binary_column(table, column("treatment", "zika"));
    if (optional_bool(body, "reverse_treatment").value_or(false)) t = recode_binary(t);
    if (const auto p = detail::optional_number(body, "selection_prob")) {
        return af_bound_from_data(estimand, y, t, *p);
    }
    const BinaryColumn s = binary_column(table, column("selection", "sel_ind"));
    return af_bound_from_data(estimand, y, t, std::span<const std::uint8_t>(s));
}

json sharp_route(const json& body, const Options&) {
    if (body.contains("estimand")) require_sharpness_supported(estimand_of(body));
    return sv_bound_sharp(detail::number_field(body, "bf_u"), detail::number_field(body, "p0"),
                          detail::optional_number(body, "sv"), detail::optional_number(body, "af"));
}

json grid_route(const json& body, const Options& options) {
    const auto uy = detail::field(body, "uy_axis").get<GridAxis>();
    const auto tu = detail::field(body, "tu_axis").get<GridAxis>();
    detail::require(uy.steps <= options.max_grid_steps, ErrorCode::invalid_input, "uy_axis.steps",
                    "at most " + std::to_string(options.max_grid_steps) + " steps per axis");
    detail::require(tu.steps <= options.max_grid_steps, ErrorCode::invalid_input, "tu_axis.steps",
                    "at most " + std::to_string(options.max_grid_steps) + " steps per axis");
    return sharpness_grid(uy, tu, detail::number_field(body, "p0"), detail::optional_number(body, "af"));
}

json simulate_route(const json& body, const Options& options) {
    const std::size_t n = count_field(body, "n", 5000);
    detail::require(n <= options.max_simulate_rows, ErrorCode::invalid_input, "n",
                    "at most " + std::to_string(options.max_simulate_rows) + " rows");
    const auto seed = static_cast<std::uint64_t>(count_field(body, "seed", 1));
    const auto data = simulate(model_of(body), n, seed);
    return {{"n", n}, {"seed", seed}, {"csv", format_csv(dataset_to_table(data))}};
}

json summarize_route(const json& body, const Options&) {
    const std::size_t stage = count_field(body, "stage", 0);
    if (optional_bool(body, "population").value_or(false)) return population_summary(model_of(body), stage);
    return summarize(table_to_dataset(parse_csv(detail::string_field(body, "csv"))), stage);
}

json estimands_route(const json& body, const Options&) {
    auto spec = model_of(body);
    const std::size_t stage = count_field(body, "stage", 0);
    if (stage > 0) spec = spec.with_selections(stage);
    return causal_estimands(evaluate_tables(spec));
}

const std::map<std::string, Handler, std::less<>>& post_routes() {
    static const std::map<std::string, Handler, std::less<>> routes = {
        {"/api/sv-params", sv_params},
        {"/api/sv-bound", sv_bound_route},
        {"/api/af-bound", af_bound_route},
        {"/api/sharp", sharp_route},
        {"/api/sharpness-grid", grid_route},
        {"/api/simulate", simulate_route},
        {"/api/summarize", summarize_route},
        {"/api/estimands", estimands_route},
    };
    return routes;
}

}  // namespace

Response handle(std::string_view method, std::string_view path, std::string_view body, const Options& options) {
    if (path == "/api/health") {
        if (method != "GET") return envelope_error(405, "method_not_allowed", "use GET", "");
        return {200, ok({{"status", "ok"}}).dump()};
    }
    if (path == "/api/example-model") {
        if (method != "GET") return envelope_error(405, "method_not_allowed", "use GET", "");
        return {200, ok(zika_learner_spec()).dump()};
    }
    const auto& routes = post_routes();
    const auto route = routes.find(path);
    if (route == routes.end()) return envelope_error(404, "not_found", "no such endpoint", "");
    if (method != "POST") return envelope_error(405, "method_not_allowed", "use POST", "");
    if (body.size() > options.max_body_bytes) {
        return envelope_error(413, "payload_too_large",
                              "request body exceeds " + std::to_string(options.max_body_bytes) + " bytes", "");
    }

    try {
        const json request = json::parse(body.empty() ? std::string_view("{}") : body);
        if (!request.is_object()) return envelope_error(400, "invalid_input", "body: expected a JSON object", "body");
        return {200, ok(route->second(request, options)).dump()};
    } catch (const json::parse_error& e) {
        return envelope_error(400, to_string(ErrorCode::parse), std::string("body: ") + e.what(), "body");
    } catch (const Error& e) {
        return envelope_error(status_for(e.code()), to_string(e.code()), e.what(), e.field());
    } catch (const json::exception& e) {
        return envelope_error(400, to_string(ErrorCode::invalid_input), e.what(), "");
    } catch (const std::exception&) {
        return envelope_error(500, "internal_error", "internal error", "");
    }
}

void install(httplib::Server& server, const Options& options) {
    server.set_payload_max_length(options.max_body_bytes);
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    if (!options.static_dir.empty()) server.set_mount_point("/", options.static_dir);

    auto forward = [options](const httplib::Request& req, httplib::Response& res) {
        const Response r = handle(req.method, req.path, req.body, options);
        res.status = r.status;
        res.set_content(r.body, "application/json");
    };
    server.Get(R"(/api/.*)", forward);
    server.Post(R"(/api/.*)", forward);
    server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
        res.status = 500;
        res.set_content(R"({"ok":false,"error":{"code":"internal_error","message":"internal error","field":""}})",
                        "application/json");
    });
}

}  // namespace selbias::service
