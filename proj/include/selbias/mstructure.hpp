#pragma once

// Generalized M-structure as an exactly enumerable discrete model.
//
//   V ~ P(V), U ~ P(U) independent
//   T | V            ~ Bernoulli(g(t0 + t1 V))
//   Y | T, U         ~ Bernoulli(g(y0 + y1 T + y2 U))
//   S_k | V, U, T    ~ Bernoulli(g(s0 + s1 V + s2 U + s3 T)),  k = 1..K
//   I_S = prod_k S_k
//
// The selection criteria are conditionally independent given (V, U, T), so
// P(I_S=1 | v, u, t) is the product of the per-criterion probabilities.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "selbias/bounds.hpp"
#include "selbias/errors.hpp"
#include "selbias/estimand.hpp"
#include "selbias/link.hpp"

namespace selbias {

struct DiscreteDist {
    struct Entry {
        int value = 0;
        double prob = 0.0;
        friend bool operator==(const Entry&, const Entry&) = default;
    };
    std::vector<Entry> entries;

    std::size_t size() const { return entries.size(); }

    void validate(std::string_view name) const {
        detail::require(entries.size() >= 2, ErrorCode::invalid_input, name,
                        "needs at least 2 values");
        std::set<int> seen;
        double total = 0.0;
        for (const auto& e : entries) {
            detail::require_probability(e.prob, name);
            detail::require(seen.insert(e.value).second, ErrorCode::invalid_input, name,
                            "duplicate value " + std::to_string(e.value));
            total += e.prob;
        }
        detail::require(std::abs(total - 1.0) <= 1e-9, ErrorCode::invalid_input, name,
                        "probabilities must sum to 1, got " + std::to_string(total));
    }

    static DiscreteDist binary(double p_one) { return {{{1, p_one}, {0, 1.0 - p_one}}}; }

    friend bool operator==(const DiscreteDist&, const DiscreteDist&) = default;
};

struct TreatmentCoef {
    double intercept = 0.0;
    double v = 0.0;
    friend bool operator==(const TreatmentCoef&, const TreatmentCoef&) = default;
};

struct OutcomeCoef {
    double intercept = 0.0;
    double t = 0.0;
    double u = 0.0;
    friend bool operator==(const OutcomeCoef&, const OutcomeCoef&) = default;
};

struct SelectionCoef {
    double intercept = 0.0;
    double v = 0.0;
    double u = 0.0;
    double t = 0.0;
    friend bool operator==(const SelectionCoef&, const SelectionCoef&) = default;
};

struct MStructureSpec {
    DiscreteDist v_dist;
    DiscreteDist u_dist;
    TreatmentCoef t_coef;
    OutcomeCoef y_coef;
    std::vector<SelectionCoef> s_coef;  // one row per selection criterion
    LinkKind link = LinkKind::logistic;

    void validate() const {
        v_dist.validate("Vval");
        u_dist.validate("Uval");
        detail::require_finite(t_coef.intercept, "Tcoef");
        detail::require_finite(t_coef.v, "Tcoef");
        detail::require_finite(y_coef.intercept, "Ycoef");
        detail::require_finite(y_coef.t, "Ycoef");
        detail::require_finite(y_coef.u, "Ycoef");
        detail::require(!s_coef.empty(), ErrorCode::invalid_input, "Scoef",
                        "needs at least one selection criterion");
        for (const auto& s : s_coef) {
            for (double c : {s.intercept, s.v, s.u, s.t}) detail::require_finite(c, "Scoef");
        }
    }

    // Same model restricted to the first `k` selection criteria.
    MStructureSpec with_selections(std::size_t k) const {
        detail::require(k >= 1 && k <= s_coef.size(), ErrorCode::invalid_input, "stage",
                        "must be between 1 and the number of selection criteria");
        MStructureSpec out = *this;
        out.s_coef.resize(k);
        return out;
    }

    friend bool operator==(const MStructureSpec&, const MStructureSpec&) = default;
};

// The zika_learner data generating process: V = urban, U = SES, T = zika,
// Y = microcephaly, S1 = birth, S2 = public hospital. Logistic links.
inline MStructureSpec zika_learner_spec() {
    MStructureSpec spec;
    spec.v_dist = {{{1, 0.85}, {0, 0.15}}};
    spec.u_dist = {{{1, 0.5}, {0, 0.5}}};
    spec.t_coef = {-6.2, 1.75};
    spec.y_coef = {-5.2, 5.0, -1.0};
    spec.s_coef = {{1.2, 0.0, 2.0, -4.0}, {2.2, 0.5, -2.75, 0.0}};
    spec.link = LinkKind::logistic;
    return spec;
}

// Evaluated conditional probability tables. Indices into v_dist/u_dist
// entries, treatment index t in {0, 1}.
struct ConditionalTables {
    DiscreteDist v_dist;
    DiscreteDist u_dist;
    std::vector<std::array<double, 2>> p_t_given_v;                // [v][t]
    std::array<std::vector<double>, 2> p_y1_given_tu;              // [t][u]
    std::vector<std::vector<std::array<double, 2>>> p_sel_given_vut;  // [v][u][t], P(I_S=1|.)
    bool reversed = false;

    friend bool operator==(const ConditionalTables&, const ConditionalTables&) = default;
};

inline ConditionalTables evaluate_tables(const MStructureSpec& spec) {
    spec.validate();
    const std::size_t nv = spec.v_dist.size();
    const std::size_t nu = spec.u_dist.size();

    ConditionalTables tables;
    tables.v_dist = spec.v_dist;
    tables.u_dist = spec.u_dist;
    tables.p_t_given_v.resize(nv);
    for (std::size_t i = 0; i < nv; ++i) {
        const double v = spec.v_dist.entries[i].value;
        const double eta = spec.t_coef.intercept + spec.t_coef.v * v;
        tables.p_t_given_v[i] = {link_complement(spec.link, eta), link_eval(spec.link, eta)};
    }
    for (int t = 0; t < 2; ++t) {
        tables.p_y1_given_tu[t].resize(nu);
        for (std::size_t j = 0; j < nu; ++j) {
            const double u = spec.u_dist.entries[j].value;
            tables.p_y1_given_tu[t][j] =
                link_eval(spec.link, spec.y_coef.intercept + spec.y_coef.t * t + spec.y_coef.u * u);
        }
    }
    tables.p_sel_given_vut.assign(nv, std::vector<std::array<double, 2>>(nu));
    for (std::size_t i = 0; i < nv; ++i) {
        const double v = spec.v_dist.entries[i].value;
        for (std::size_t j = 0; j < nu; ++j) {
            const double u = spec.u_dist.entries[j].value;
            for (int t = 0; t < 2; ++t) {
                double p = 1.0;
                for (const auto& s : spec.s_coef) {
                    p *= link_eval(spec.link, s.intercept + s.v * v + s.u * u + s.t * t);
                }
                tables.p_sel_given_vut[i][j][t] = p;
            }
        }
    }
    return tables;
}

// Recode the treatment t -> 1 - t. Pure relabelling: applying it twice gives
// back the input bit for bit.
inline ConditionalTables reverse_treatment(const ConditionalTables& tables) {
    ConditionalTables out = tables;
    for (auto& row : out.p_t_given_v) std::swap(row[0], row[1]);
    std::swap(out.p_y1_given_tu[0], out.p_y1_given_tu[1]);
    for (auto& by_u : out.p_sel_given_vut) {
        for (auto& cell : by_u) std::swap(cell[0], cell[1]);
    }
    out.reversed = !tables.reversed;
    return out;
}

// Joint probabilities P(v, u, t, y, s) for the full model, s = I_S.
class JointTable {
public:
    explicit JointTable(const ConditionalTables& tables)
        : nv_(tables.v_dist.size()), nu_(tables.u_dist.size()), cells_(nv_ * nu_ * 8, 0.0) {
        for (std::size_t i = 0; i < nv_; ++i) {
            const double pv = tables.v_dist.entries[i].prob;
            for (std::size_t j = 0; j < nu_; ++j) {
                const double pu = tables.u_dist.entries[j].prob;
                for (int t = 0; t < 2; ++t) {
                    const double pt = tables.p_t_given_v[i][t];
                    const double py1 = tables.p_y1_given_tu[t][j];
                    const double ps1 = tables.p_sel_given_vut[i][j][t];
                    for (int y = 0; y < 2; ++y) {
                        const double py = y == 1 ? py1 : 1.0 - py1;
                        for (int s = 0; s < 2; ++s) {
                            const double ps = s == 1 ? ps1 : 1.0 - ps1;
                            cells_[index(i, j, t, y, s)] = pv * pu * pt * py * ps;
                        }
                    }
                }
            }
        }
    }

    std::size_t v_levels() const { return nv_; }
    std::size_t u_levels() const { return nu_; }

    double at(std::size_t v, std::size_t u, int t, int y, int s) const {
        return cells_[index(v, u, t, y, s)];
    }

    double total() const { return std::accumulate(cells_.begin(), cells_.end(), 0.0); }

    // Marginal probability of all cells matching the given coordinates;
    // -1 leaves a coordinate free.
    double mass(long v = -1, long u = -1, int t = -1, int y = -1, int s = -1) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < nv_; ++i) {
            if (v >= 0 && static_cast<std::size_t>(v) != i) continue;
            for (std::size_t j = 0; j < nu_; ++j) {
                if (u >= 0 && static_cast<std::size_t>(u) != j) continue;
                for (int tt = 0; tt < 2; ++tt) {
                    if (t >= 0 && t != tt) continue;
                    for (int yy = 0; yy < 2; ++yy) {
                        if (y >= 0 && y != yy) continue;
                        for (int ss = 0; ss < 2; ++ss) {
                            if (s >= 0 && s != ss) continue;
                            acc += at(i, j, tt, yy, ss);
                        }
                    }
                }
            }
        }
        return acc;
    }

    double p_s(int s) const { return mass(-1, -1, -1, -1, s); }

    double p_y1_given_ts(int t, int s) const {
        return mass(-1, -1, t, 1, s) / stratum(t, s);
    }

    double p_t1_given_s(int s) const {
        return mass(-1, -1, 1, -1, s) / require_positive(p_s(s), "I_S=" + std::to_string(s));
    }

    double p_u_given_ts(std::size_t u, int t, int s) const {
        return mass(-1, static_cast<long>(u), t, -1, s) / stratum(t, s);
    }

    double p_u_given_s(std::size_t u, int s) const {
        return mass(-1, static_cast<long>(u), -1, -1, s) /
               require_positive(p_s(s), "I_S=" + std::to_string(s));
    }

private:
    std::size_t index(std::size_t v, std::size_t u, int t, int y, int s) const {
        return (((v * nu_ + u) * 2 + static_cast<std::size_t>(t)) * 2 + static_cast<std::size_t>(y)) * 2 +
               static_cast<std::size_t>(s);
    }

    double stratum(int t, int s) const {
        return require_positive(mass(-1, -1, t, -1, s),
                                "T=" + std::to_string(t) + ",I_S=" + std::to_string(s));
    }

    static double require_positive(double p, const std::string& name) {
        if (!(p > 0.0)) {
            throw Error(ErrorCode::degenerate_stratum, "stratum " + name + " has probability zero",
                        name);
        }
        return p;
    }

    std::size_t nv_;
    std::size_t nu_;
    std::vector<double> cells_;
};

inline JointTable enumerate_joint(const ConditionalTables& tables) { return JointTable(tables); }

// Population-level causal and observed estimands.
struct EstimandReport {
    double beta_r = 0.0;      // P(Y(1)=1) / P(Y(0)=1)
    double beta_d = 0.0;      // P(Y(1)=1) - P(Y(0)=1)
    double beta_rs = 0.0;     // same, conditional on I_S=1
    double beta_ds = 0.0;
    double beta_r_obs = 0.0;  // P(Y=1|T=1,I_S=1) / P(Y=1|T=0,I_S=1)
    double beta_d_obs = 0.0;
    double py1_t1_s1 = 0.0;
    double py1_t0_s1 = 0.0;

    double causal(EstimandKind e) const {
        switch (e) {
            case EstimandKind::rr_tot: return beta_r;
            case EstimandKind::rd_tot: return beta_d;
            case EstimandKind::rr_sub: return beta_rs;
            case EstimandKind::rd_sub: return beta_ds;
        }
        return 0.0;
    }
    double observed(EstimandKind e) const { return is_relative_risk(e) ? beta_r_obs : beta_d_obs; }
};

namespace detail {

// Levels of U with positive probability; ratios over u only range over these.
inline std::vector<std::size_t> support(const DiscreteDist& d) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < d.size(); ++j) {
        if (d.entries[j].prob > 0.0) out.push_back(j);
    }
    return out;
}

// max_u P(Y=1|T=t,U=u) / min_u P(Y=1|T=t,U=u)
inline double outcome_ratio(const ConditionalTables& tables, int t) {
    double hi = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t j : support(tables.u_dist)) {
        hi = std::max(hi, tables.p_y1_given_tu[t][j]);
        lo = std::min(lo, tables.p_y1_given_tu[t][j]);
    }
    return checked_ratio(hi, lo, "min_u P(Y=1|T=" + std::to_string(t) + ",U=u)");
}

// max_u num(u) / den(u), skipping levels where both are zero.
template <class Num, class Den>
double max_ratio_over_u(const std::vector<std::size_t>& levels, Num num, Den den,
                        const std::string& what) {
    double best = 0.0;
    for (std::size_t j : levels) {
        const double a = num(j);
        const double b = den(j);
        if (a == 0.0 && b == 0.0) continue;
        best = std::max(best, checked_ratio(a, b, what));
    }
    return best;
}

}  // namespace detail

inline EstimandReport causal_estimands(const ConditionalTables& tables) {
    const JointTable joint(tables);
    const auto levels = detail::support(tables.u_dist);
    const auto& py = tables.p_y1_given_tu;

    EstimandReport r;
    double py1 = 0.0, py0 = 0.0, py1_s = 0.0, py0_s = 0.0;
    for (std::size_t j : levels) {
        const double pu = tables.u_dist.entries[j].prob;
        const double pu_s = joint.p_u_given_s(j, 1);
        py1 += pu * py[1][j];
        py0 += pu * py[0][j];
        // Y(t) is independent of I_S given U, so P(Y(t)=1|I_S=1) reweights by P(U|I_S=1).
        py1_s += pu_s * py[1][j];
        py0_s += pu_s * py[0][j];
    }
    r.beta_r = detail::checked_ratio(py1, py0, "P(Y(0)=1)");
    r.beta_d = py1 - py0;
    r.beta_rs = detail::checked_ratio(py1_s, py0_s, "P(Y(0)=1|I_S=1)");
    r.beta_ds = py1_s - py0_s;
    r.py1_t1_s1 = joint.p_y1_given_ts(1, 1);
    r.py1_t0_s1 = joint.p_y1_given_ts(0, 1);
    r.beta_r_obs = detail::checked_ratio(r.py1_t1_s1, r.py1_t0_s1, "P(Y=1|T=0,I_S=1)");
    r.beta_d_obs = r.py1_t1_s1 - r.py1_t0_s1;
    return r;
}

inline SensitivityParamsTotal sv_params_total(const ConditionalTables& tables) {
    const JointTable joint(tables);
    const auto levels = detail::support(tables.u_dist);
    SensitivityParamsTotal p;
    p.rr_uy_t1 = detail::outcome_ratio(tables, 1);
    p.rr_uy_t0 = detail::outcome_ratio(tables, 0);
    p.rr_su_t1 = detail::max_ratio_over_u(
        levels, [&](std::size_t u) { return joint.p_u_given_ts(u, 1, 1); },
        [&](std::size_t u) { return joint.p_u_given_ts(u, 1, 0); }, "P(U=u|T=1,I_S=0)");
    p.rr_su_t0 = detail::max_ratio_over_u(
        levels, [&](std::size_t u) { return joint.p_u_given_ts(u, 0, 0); },
        [&](std::size_t u) { return joint.p_u_given_ts(u, 0, 1); }, "P(U=u|T=0,I_S=1)");
    return p;
}

inline SensitivityParamsSub sv_params_sub(const ConditionalTables& tables) {
    const JointTable joint(tables);
    const auto levels = detail::support(tables.u_dist);
    SensitivityParamsSub p;
    // Y is independent of I_S given (T, U): the outcome table is unchanged by selection.
    p.rr_uy_s1 = std::max(detail::outcome_ratio(tables, 0), detail::outcome_ratio(tables, 1));
    p.rr_tu_s1 = detail::max_ratio_over_u(
        levels, [&](std::size_t u) { return joint.p_u_given_ts(u, 1, 1); },
        [&](std::size_t u) { return joint.p_u_given_ts(u, 0, 1); }, "P(U=u|T=0,I_S=1)");
    return p;
}

struct SvParametersResult {
    EstimandKind estimand = EstimandKind::rr_sub;
    SensitivityParams params;
    std::optional<double> bf1;
    std::optional<double> bf0;
    std::optional<double> bf_u;
    bool reversed = false;
    double causal_value = 0.0;    // model causal estimand, original coding
    double observed_value = 0.0;  // from the supplied probabilities, original coding
    std::vector<std::string> notes;
};

// Sensitivity parameters for an assumed model. The supplied observed
// probabilities decide the treatment orientation: when the observed estimand
// falls below the model's causal estimand the bias is negative, so the
// treatment is recoded before the parameters are extracted.
inline SvParametersResult sv_bound_parameters_m(const MStructureSpec& spec, EstimandKind estimand,
                                                double py1_t1_s1, double py1_t0_s1) {
    detail::require_probability(py1_t1_s1, "pY1_T1_S1");
    detail::require_probability(py1_t0_s1, "pY1_T0_S1");
    if (is_relative_risk(estimand)) {
        detail::require(py1_t1_s1 > 0.0 && py1_t1_s1 < 1.0, ErrorCode::invalid_input, "pY1_T1_S1",
                        "must lie in (0, 1) for relative-risk estimands");
        detail::require(py1_t0_s1 > 0.0 && py1_t0_s1 < 1.0, ErrorCode::invalid_input, "pY1_T0_S1",
                        "must lie in (0, 1) for relative-risk estimands");
    }

    const ConditionalTables original = evaluate_tables(spec);
    const EstimandReport report = causal_estimands(original);

    SvParametersResult out;
    out.estimand = estimand;
    out.causal_value = report.causal(estimand);
    out.observed_value =
        is_relative_risk(estimand) ? py1_t1_s1 / py1_t0_s1 : py1_t1_s1 - py1_t0_s1;
    out.reversed = out.observed_value < out.causal_value;
    if (out.observed_value == out.causal_value) out.notes.push_back("zero bias: no treatment reversal");
    if (!is_relative_risk(estimand)) {
        out.notes.push_back("orientation decided on the risk-difference contrast");
    }

    const ConditionalTables tables = out.reversed ? reverse_treatment(original) : original;
    if (is_subpopulation(estimand)) {
        const auto p = sv_params_sub(tables);
        out.params = p;
        out.bf_u = bounding_factor(p.rr_uy_s1, p.rr_tu_s1);
    } else {
        const auto p = sv_params_total(tables);
        out.params = p;
        out.bf1 = bounding_factor(p.rr_uy_t1, p.rr_su_t1);
        out.bf0 = bounding_factor(p.rr_uy_t0, p.rr_su_t0);
    }
    return out;
}

}  // namespace selbias
