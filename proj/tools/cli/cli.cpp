#include "cli.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "selbias/selbias.hpp"

namespace selbias::cli {
namespace {

struct Output {
    std::string format = "json";
    std::optional<int> round;
};

double rounded(double x, const std::optional<int>& digits) {
    if (!digits) return x;
    const double scale = std::pow(10.0, *digits);
    return std::round(x * scale) / scale;
}

std::string number(double x, const std::optional<int>& digits) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, rounded(x, digits));
    return std::string(buf, ptr);
}

void round_json(json& j, const std::optional<int>& digits) {
    if (!digits) return;
    if (j.is_number_float()) {
        j = rounded(j.get<double>(), digits);
    } else if (j.is_structured()) {
        for (auto& child : j) round_json(child, digits);
    }
}

void emit_json(std::ostream& out, json j, const Output& o) {
    round_json(j, o.round);
    out << j.dump(2) << '\n';
}

// Named rows in the style of an R named vector: "label" value
void emit_named(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& rows) {
    std::size_t width = 0;
    for (const auto& r : rows) width = std::max(width, r.first.size() + 2);
    for (const auto& [label, value] : rows) {
        out << std::left << std::setw(static_cast<int>(width)) << ('"' + label + '"') << ' ' << value << '\n';
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::parse, "cannot open '" + path + "'", "path");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

MStructureSpec load_model(const std::string& path) {
    if (path.empty()) return zika_learner_spec();
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::parse, path + ": " + e.what(), "model");
    }
    return j.get<MStructureSpec>();
}

// Returns the value of an option only when it was given on the command line.
std::optional<double> given(const CLI::Option* opt, double value) {
    return opt->count() > 0 ? std::optional<double>(value) : std::nullopt;
}

double required(const CLI::Option* opt, double value, const std::string& name) {
    if (opt->count() == 0) {
        throw Error(ErrorCode::invalid_input, name + ": required for this estimand", name);
    }
    return value;
}

struct Flags {
    std::string estimand = "rr-sub";
    std::string model;
    double p1 = 0, p0 = 0, pt1 = 0, ps1 = 0;
    double rr_uy_s1 = 1, rr_tu_s1 = 1, rr_uy_t1 = 1, rr_uy_t0 = 1, rr_su_t1 = 1, rr_su_t0 = 1;
    double exact_bias = 0;
    std::string csv, outcome = "mic_ceph", treatment = "zika", selection = "sel_ind";
    double selection_prob = 0;
    bool reverse_treatment = false;
    double bf_u = 1, sv = 0, af = 0;
    GridAxis uy_axis{1, 1, 1}, tu_axis{1, 1, 1};
    std::size_t n = 5000, stage = 0;
    std::uint64_t seed = 1;
    std::string out_path;
    bool population = false;
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Selection bias bounds for binary outcomes", "selbias"};
    app.require_subcommand(1);
    app.fallthrough();
    Output o;
    Flags f;
    app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "text"}));
    int round_digits = 0;
    auto* round_opt = app.add_option("--round", round_digits, "Round printed numbers to this many decimals")
                          ->check(CLI::Range(0, 15));

    auto estimand_opt = [&](CLI::App* sub) {
        sub->add_option("--estimand,-e", f.estimand, "rr-tot, rd-tot, rr-sub or rd-sub");
    };

    // sv-params
    auto* sv_params = app.add_subcommand("sv-params", "Sensitivity parameters implied by an M-structure model");
    estimand_opt(sv_params);
    sv_params->add_option("--model,-m", f.model, "Model JSON file (default: the zika_learner model)");
    sv_params->add_option("--p1,--py1-t1-s1", f.p1, "P(Y=1|T=1,I_S=1)")->required();
    sv_params->add_option("--p0,--py1-t0-s1", f.p0, "P(Y=1|T=0,I_S=1)")->required();

    // sv-bound
    auto* sv = app.add_subcommand("sv-bound", "SV bound from sensitivity parameters");
    estimand_opt(sv);
    auto* o_uy_s1 = sv->add_option("--rr-uy-s1", f.rr_uy_s1, "RR_UY|S=1");
    auto* o_tu_s1 = sv->add_option("--rr-tu-s1", f.rr_tu_s1, "RR_TU|S=1");
    auto* o_uy_t1 = sv->add_option("--rr-uy-t1", f.rr_uy_t1, "RR_UY|T=1");
    auto* o_uy_t0 = sv->add_option("--rr-uy-t0", f.rr_uy_t0, "RR_UY|T=0");
    auto* o_su_t1 = sv->add_option("--rr-su-t1", f.rr_su_t1, "RR_SU|T=1");
    auto* o_su_t0 = sv->add_option("--rr-su-t0", f.rr_su_t0, "RR_SU|T=0");
    auto* o_sv_p1 = sv->add_option("--p1,--py1-t1-s1", f.p1, "P(Y=1|T=1,I_S=1), risk differences only");
    auto* o_sv_p0 = sv->add_option("--p0,--py1-t0-s1", f.p0, "P(Y=1|T=0,I_S=1), risk differences only");
    auto* o_bias = sv->add_option("--exact-bias", f.exact_bias, "Known bias, checked for orientation");

    // af-bound
    auto* af = app.add_subcommand("af-bound", "Assumption-free bound from data or observed probabilities");
    estimand_opt(af);
    auto* o_csv = af->add_option("--csv", f.csv, "CSV file with outcome, treatment and selection columns");
    af->add_option("--outcome", f.outcome, "Outcome column")->capture_default_str();
    af->add_option("--treatment", f.treatment, "Treatment column")->capture_default_str();
    auto* o_sel = af->add_option("--selection", f.selection, "Selection indicator column")->capture_default_str();
    auto* o_selp = af->add_option("--selection-prob", f.selection_prob,
                                  "P(I_S=1); the CSV then holds selected rows only");
    af->add_flag("--reverse-treatment", f.reverse_treatment, "Recode the treatment column as 1 - T");
    auto* o_af_p1 = af->add_option("--p1,--py1-t1-s1", f.p1, "P(Y=1|T=1,I_S=1)");
    auto* o_af_p0 = af->add_option("--p0,--py1-t0-s1", f.p0, "P(Y=1|T=0,I_S=1)");
    auto* o_af_pt1 = af->add_option("--pt1,--pt1-s1", f.pt1, "P(T=1|I_S=1)");
    auto* o_af_ps1 = af->add_option("--ps1", f.ps1, "P(I_S=1)");
    o_sel->excludes(o_selp);

    // sharp
    auto* sharp = app.add_subcommand("sharp", "Sharpness of the subpopulation SV bound");
    auto* o_sharp_est = sharp->add_option("--estimand,-e", f.estimand, "rr-sub or rd-sub");
    sharp->add_option("--bf-u", f.bf_u, "BF_U")->required();
    sharp->add_option("--p0,--py1-t0-s1", f.p0, "P(Y=1|T=0,I_S=1)")->required();
    auto* o_sharp_sv = sharp->add_option("--sv", f.sv, "SV bound");
    auto* o_sharp_af = sharp->add_option("--af", f.af, "AF bound");

    // grid
    auto* grid = app.add_subcommand("grid", "Sharpness classification over a grid of RR_UY|S=1 x RR_TU|S=1");
    grid->add_option("--uy-min", f.uy_axis.min)->required();
    grid->add_option("--uy-max", f.uy_axis.max)->required();
    grid->add_option("--uy-steps", f.uy_axis.steps)->required();
    grid->add_option("--tu-min", f.tu_axis.min)->required();
    grid->add_option("--tu-max", f.tu_axis.max)->required();
    grid->add_option("--tu-steps", f.tu_axis.steps)->required();
    grid->add_option("--p0,--py1-t0-s1", f.p0, "P(Y=1|T=0,I_S=1)")->required();
    auto* o_grid_af = grid->add_option("--af", f.af, "AF bound");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Simulate a register from a model and write it as CSV");
    sim->add_option("--model,-m", f.model, "Model JSON file (default: the zika_learner model)");
    sim->add_option("--n", f.n, "Number of rows")->capture_default_str();
    sim->add_option("--seed", f.seed, "Seed")->capture_default_str();
    sim->add_option("--out,-o", f.out_path, "Output CSV path (default: stdout)");

    // summarize
    auto* summ = app.add_subcommand("summarize", "Proportions and observed probabilities at a selection stage");
    auto* o_summ_csv = summ->add_option("--csv", f.csv, "Register CSV");
    summ->add_option("--stage", f.stage, "0 = no selection, k = first k selections")->capture_default_str();
    summ->add_option("--model,-m", f.model, "Model JSON file for --population");
    summ->add_flag("--population", f.population, "Exact population proportions from the model");

    // estimands
    auto* est = app.add_subcommand("estimands", "Causal and observed estimands of a model");
    est->add_option("--model,-m", f.model, "Model JSON file (default: the zika_learner model)");
    est->add_option("--stage", f.stage, "Number of selection criteria applied (default: all)");

    auto* example = app.add_subcommand("example-model", "Print the zika_learner model as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    if (round_opt->count() > 0) o.round = round_digits;
    const bool text = o.format == "text";

    try {
        if (sv_params->parsed()) {
            const auto estimand = parse_estimand(f.estimand);
            const auto r = sv_bound_parameters_m(load_model(f.model), estimand, f.p1, f.p0);
            if (!text) {
                emit_json(out, r, o);
                return kExitOk;
            }
            std::vector<std::pair<std::string, std::string>> rows;
            if (const auto* p = std::get_if<SensitivityParamsSub>(&r.params)) {
                rows = {{"BF_U", number(*r.bf_u, o.round)},
                        {"RR_UY|S=1", number(p->rr_uy_s1, o.round)},
                        {"RR_TU|S=1", number(p->rr_tu_s1, o.round)}};
            } else {
                const auto& q = std::get<SensitivityParamsTotal>(r.params);
                rows = {{"BF_1", number(*r.bf1, o.round)},        {"BF_0", number(*r.bf0, o.round)},
                        {"RR_UY|T=1", number(q.rr_uy_t1, o.round)}, {"RR_UY|T=0", number(q.rr_uy_t0, o.round)},
                        {"RR_SU|T=1", number(q.rr_su_t1, o.round)}, {"RR_SU|T=0", number(q.rr_su_t0, o.round)}};
            }
            rows.emplace_back("Reverse treatment", r.reversed ? "TRUE" : "FALSE");
            emit_named(out, rows);
            return kExitOk;
        }

        if (sv->parsed()) {
            const auto estimand = parse_estimand(f.estimand);
            SensitivityParams params;
            if (is_subpopulation(estimand)) {
                params = SensitivityParamsSub{required(o_uy_s1, f.rr_uy_s1, "rr-uy-s1"),
                                              required(o_tu_s1, f.rr_tu_s1, "rr-tu-s1")};
            } else {
                params = SensitivityParamsTotal{required(o_uy_t1, f.rr_uy_t1, "rr-uy-t1"),
                                                required(o_uy_t0, f.rr_uy_t0, "rr-uy-t0"),
                                                required(o_su_t1, f.rr_su_t1, "rr-su-t1"),
                                                required(o_su_t0, f.rr_su_t0, "rr-su-t0")};
            }
            std::optional<ObservedSummary> observed;
            if (!is_relative_risk(estimand) || o_sv_p1->count() || o_sv_p0->count()) {
                observed = ObservedSummary{required(o_sv_p1, f.p1, "p1"), required(o_sv_p0, f.p0, "p0"), {}, {}};
            }
            const auto r = sv_bound(estimand, params, observed, given(o_bias, f.exact_bias));
            for (const auto& w : r.warnings) err << "warning: " << w << '\n';
            if (text) emit_named(out, {{"SV bound", number(r.value, o.round)}});
            else emit_json(out, r, o);
            return kExitOk;
        }

        if (af->parsed()) {
            const auto estimand = parse_estimand(f.estimand);
            BoundResult r;
            if (o_csv->count()) {
                const auto table = read_csv(f.csv);
                BinaryColumn y = binary_column(table, f.outcome);
                BinaryColumn t = binary_column(table, f.treatment);
                if (f.reverse_treatment) t = recode_binary(t);
                if (o_selp->count()) {
                    r = af_bound_from_data(estimand, y, t, f.selection_prob);
                } else {
                    const BinaryColumn s = binary_column(table, f.selection);
                    r = af_bound_from_data(estimand, y, t, std::span<const std::uint8_t>(s));
                }
            } else {
                ObservedSummary obs{required(o_af_p1, f.p1, "p1"), required(o_af_p0, f.p0, "p0"),
                                    required(o_af_pt1, f.pt1, "pt1"), given(o_af_ps1, f.ps1)};
                r = af_bound(estimand, obs);
            }
            if (text) emit_named(out, {{"AF bound", number(r.value, o.round)}});
            else emit_json(out, r, o);
            return kExitOk;
        }

        if (sharp->parsed()) {
            if (o_sharp_est->count()) require_sharpness_supported(parse_estimand(f.estimand));
            const auto v = sv_bound_sharp(f.bf_u, f.p0, given(o_sharp_sv, f.sv), given(o_sharp_af, f.af));
            if (text) out << '"' << v.message() << "\"\n";
            else emit_json(out, v, o);
            return kExitOk;
        }

        if (grid->parsed()) {
            const auto g = sharpness_grid(f.uy_axis, f.tu_axis, f.p0, given(o_grid_af, f.af));
            if (!text) {
                emit_json(out, g, o);
                return kExitOk;
            }
            out << "rr_tu_s1,rr_uy_s1,bound,verdict\n";
            for (std::size_t r = 0; r < g.tu_values.size(); ++r) {
                for (std::size_t c = 0; c < g.uy_values.size(); ++c) {
                    out << number(g.tu_values[r], o.round) << ',' << number(g.uy_values[c], o.round) << ','
                        << number(g.at(r, c).bound, o.round) << ',' << to_string(g.at(r, c).verdict) << '\n';
                }
            }
            return kExitOk;
        }

        if (sim->parsed()) {
            const auto data = simulate(load_model(f.model), f.n, f.seed);
            const auto table = dataset_to_table(data);
            if (f.out_path.empty()) {
                out << format_csv(table);
            } else {
                write_csv(table, f.out_path);
                if (text) out << "wrote " << data.rows() << " rows to " << f.out_path << '\n';
                else emit_json(out, {{"rows", data.rows()}, {"seed", f.seed}, {"path", f.out_path}}, o);
            }
            return kExitOk;
        }

        if (summ->parsed()) {
            DataSummary s;
            if (f.population) {
                s = population_summary(load_model(f.model), f.stage);
            } else {
                if (o_summ_csv->count() == 0) {
                    throw Error(ErrorCode::invalid_input, "csv: give --csv FILE or --population", "csv");
                }
                s = summarize(table_to_dataset(read_csv(f.csv)), f.stage);
            }
            if (!text) {
                emit_json(out, s, o);
                return kExitOk;
            }
            const auto& a = s.proportions.arms;
            out << "stage " << s.stage << "\n";
            const std::array<std::pair<const char*, double ArmProportions::*>, 3> rows{{
                {"Microcephaly", &ArmProportions::microcephaly},
                {"Urban", &ArmProportions::urban},
                {"SES", &ArmProportions::ses},
            }};
            std::vector<std::vector<std::string>> table{{"Variable", "T=0", "T=1", "Overall"}};
            for (const auto& [name, field] : rows) {
                table.push_back({name, number(a[0].*field, o.round), number(a[1].*field, o.round),
                                 number(a[2].*field, o.round)});
            }
            std::array<std::size_t, 4> width{};
            for (const auto& r : table)
                for (std::size_t c = 0; c < 4; ++c) width[c] = std::max(width[c], r[c].size());
            for (const auto& r : table) {
                for (std::size_t c = 0; c < 4; ++c) {
                    out << r[c];
                    if (c < 3) out << std::string(width[c] - r[c].size() + 2, ' ');
                }
                out << '\n';
            }
            return kExitOk;
        }

        if (est->parsed()) {
            auto spec = load_model(f.model);
            if (f.stage > 0) spec = spec.with_selections(f.stage);
            const auto r = causal_estimands(evaluate_tables(spec));
            if (!text) {
                emit_json(out, r, o);
                return kExitOk;
            }
            emit_named(out, {{"beta_R", number(r.beta_r, o.round)},
                             {"beta_D", number(r.beta_d, o.round)},
                             {"beta_RS", number(r.beta_rs, o.round)},
                             {"beta_DS", number(r.beta_ds, o.round)},
                             {"beta_R_obs", number(r.beta_r_obs, o.round)},
                             {"beta_D_obs", number(r.beta_d_obs, o.round)}});
            return kExitOk;
        }

        if (example->parsed()) {
            out << json(zika_learner_spec()).dump(2) << '\n';
            return kExitOk;
        }
    } catch (const Error& e) {
        if (text) err << "selbias: " << to_string(e.code()) << ": " << e.what() << '\n';
        else err << error_to_json(e).dump() << '\n';
        return is_validation(e.code()) ? kExitUsage : kExitComputation;
    } catch (const std::exception& e) {
        err << "selbias: error: " << e.what() << '\n';
        return kExitComputation;
    }
    return kExitUsage;
}

}  // namespace selbias::cli
