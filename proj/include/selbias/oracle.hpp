#pragma once

// Constructive oracles for the sensitivity parameters.
//
// Each construct_* function builds an explicit distribution over an
// unmeasured categorical U that reproduces a prescribed observed
// distribution together with prescribed sensitivity parameters (variation
// independence), or whose bias reaches the subpopulation SV bound
// (sharpness). The params_from_* and bias_from_* functions evaluate the
// defining formulas literally on such tables, so a construction followed by
// an evaluation is a round trip that does not go through the closed-form
// bound code in bounds.hpp or the M-structure code in mstructure.hpp.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "selbias/bounds.hpp"
#include "selbias/errors.hpp"

namespace selbias::oracle {

// Cells are kept away from 0 and 1 by at least this much.
inline constexpr double kCellMargin = 1e-12;
inline constexpr double kInitialEpsilon = 1e-3;
inline constexpr int kMaxHalvings = 60;

// Observed P*(Y, T, I_S), parameterised by its conditionals.
struct ObservedTotal {
    double p_t1 = 0.5;                                 // P(T=1)
    std::array<double, 2> p_s1_given_t{0.5, 0.5};      // P(I_S=1|T=t)
    std::array<std::array<double, 2>, 2> p_y1_given_ts{};  // [t][s] P(Y=1|T=t,I_S=s)

    void validate_interior() const {
        auto interior = [](double p, const char* name) {
            detail::require(std::isfinite(p) && p > 0.0 && p < 1.0, ErrorCode::domain, name,
                            "observed probabilities must be strictly inside (0, 1)");
        };
        interior(p_t1, "P(T=1)");
        for (int t = 0; t < 2; ++t) {
            interior(p_s1_given_t[t], "P(I_S=1|T)");
            for (int s = 0; s < 2; ++s) interior(p_y1_given_ts[t][s], "P(Y=1|T,I_S)");
        }
    }
};

// Observed P*(Y, T | I_S=1).
struct ObservedSub {
    double p_t1 = 0.5;                          // P(T=1|I_S=1)
    std::array<double, 2> p_y1_given_t{};       // P(Y=1|T=t,I_S=1)

    void validate_interior() const {
        auto interior = [](double p, const char* name) {
            detail::require(std::isfinite(p) && p > 0.0 && p < 1.0, ErrorCode::domain, name,
                            "observed probabilities must be strictly inside (0, 1)");
        };
        interior(p_t1, "P(T=1|I_S=1)");
        interior(p_y1_given_t[0], "P(Y=1|T=0,I_S=1)");
        interior(p_y1_given_t[1], "P(Y=1|T=1,I_S=1)");
    }
};

// Joint table over (Y, T, U, I_S) with U in {0, 1, 2}.
struct JointDistTotal {
    static constexpr std::size_t kULevels = 3;
    // cells[y][t][u][s]
    std::array<std::array<std::array<std::array<double, 2>, kULevels>, 2>, 2> cells{};
    double epsilon = 0.0;

    double sum(int y, int t, int u, int s) const {
        double acc = 0.0;
        for (int yy = 0; yy < 2; ++yy) {
            if (y >= 0 && y != yy) continue;
            for (int tt = 0; tt < 2; ++tt) {
                if (t >= 0 && t != tt) continue;
                for (int uu = 0; uu < static_cast<int>(kULevels); ++uu) {
                    if (u >= 0 && u != uu) continue;
                    for (int ss = 0; ss < 2; ++ss) {
                        if (s >= 0 && s != ss) continue;
                        acc += cells[yy][tt][uu][ss];
                    }
                }
            }
        }
        return acc;
    }
};

// Conditional description of P(Y, T, U | I_S=1).
struct JointDistSub {
    double p_t1 = 0.5;                                  // P(T=1|I_S=1)
    std::array<std::vector<double>, 2> p_u_given_t;     // [t][u] P(U=u|T=t,I_S=1)
    std::array<std::vector<double>, 2> p_y1_given_tu;   // [t][u] P(Y=1|T=t,U=u,I_S=1)
    double epsilon = 0.0;

    std::size_t u_levels() const { return p_u_given_t[0].size(); }

    double p_t(int t) const { return t == 1 ? p_t1 : 1.0 - p_t1; }

    // P(U=u|I_S=1)
    double p_u(std::size_t u) const {
        return p_t(0) * p_u_given_t[0][u] + p_t(1) * p_u_given_t[1][u];
    }

    // P(Y=1|T=t,I_S=1)
    double p_y1_given_t(int t) const {
        double acc = 0.0;
        for (std::size_t u = 0; u < u_levels(); ++u) acc += p_y1_given_tu[t][u] * p_u_given_t[t][u];
        return acc;
    }
};

struct BiasPair {
    double rr = 1.0;
    double rd = 0.0;
};

struct SharpConstruction {
    JointDistSub joint;
    double achieved_bias_rr = 1.0;
    double achieved_bias_rd = 0.0;
};

namespace detail {

using selbias::detail::checked_ratio;

inline double degenerate_guard(double p, const std::string& name) {
    if (!(p > 0.0)) {
        throw Error(ErrorCode::degenerate_stratum, "stratum " + name + " has probability zero", name);
    }
    return p;
}

inline bool strictly_inside(double p) { return p >= kCellMargin && p <= 1.0 - kCellMargin; }

inline void require_above_one(double rr, const char* name) {
    selbias::detail::require(std::isfinite(rr) && rr > 1.0, ErrorCode::domain, name,
                             "construction targets must be strictly greater than 1");
}

inline double ratio_max_over_min(const std::vector<double>& values, const std::string& what) {
    if (values.empty()) throw Error(ErrorCode::degenerate_stratum, what + ": no level of U has positive mass", what);
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return checked_ratio(*hi, *lo, what);
}

}  // namespace detail

// Literal evaluation of the four total-population sensitivity parameters.
inline SensitivityParamsTotal params_from_joint_total(const JointDistTotal& joint) {
    constexpr int nu = static_cast<int>(JointDistTotal::kULevels);
    auto p_y1_given_tu = [&](int t, int u) {
        const double den = detail::degenerate_guard(
            joint.sum(-1, t, u, -1), "T=" + std::to_string(t) + ",U=" + std::to_string(u));
        return joint.sum(1, t, u, -1) / den;
    };
    auto p_u_given_ts = [&](int u, int t, int s) {
        const double den = detail::degenerate_guard(
            joint.sum(-1, t, -1, s), "T=" + std::to_string(t) + ",I_S=" + std::to_string(s));
        return joint.sum(-1, t, u, s) / den;
    };

    SensitivityParamsTotal out;
    for (int t = 0; t < 2; ++t) {
        std::vector<double> ys;
        for (int u = 0; u < nu; ++u) {
            if (joint.sum(-1, t, u, -1) > 0.0) ys.push_back(p_y1_given_tu(t, u));
        }
        const double rr = detail::ratio_max_over_min(ys, "min_u P(Y=1|T,U=u)");
        (t == 1 ? out.rr_uy_t1 : out.rr_uy_t0) = rr;
    }
    double su1 = 0.0, su0 = 0.0;
    for (int u = 0; u < nu; ++u) {
        const double a1 = p_u_given_ts(u, 1, 1), b1 = p_u_given_ts(u, 1, 0);
        if (a1 > 0.0 || b1 > 0.0) su1 = std::max(su1, detail::checked_ratio(a1, b1, "P(U=u|T=1,I_S=0)"));
        const double a0 = p_u_given_ts(u, 0, 0), b0 = p_u_given_ts(u, 0, 1);
        if (a0 > 0.0 || b0 > 0.0) su0 = std::max(su0, detail::checked_ratio(a0, b0, "P(U=u|T=0,I_S=1)"));
    }
    out.rr_su_t1 = su1;
    out.rr_su_t0 = su0;
    return out;
}

// Observed P(Y, T, I_S) implied by a joint table.
inline ObservedTotal observed_from_joint_total(const JointDistTotal& joint) {
    ObservedTotal out;
    out.p_t1 = joint.sum(-1, 1, -1, -1) / joint.sum(-1, -1, -1, -1);
    for (int t = 0; t < 2; ++t) {
        const double pt = detail::degenerate_guard(joint.sum(-1, t, -1, -1), "T=" + std::to_string(t));
        out.p_s1_given_t[t] = joint.sum(-1, t, -1, 1) / pt;
        for (int s = 0; s < 2; ++s) {
            const double pts = detail::degenerate_guard(
                joint.sum(-1, t, -1, s), "T=" + std::to_string(t) + ",I_S=" + std::to_string(s));
            out.p_y1_given_ts[t][s] = joint.sum(1, t, -1, s) / pts;
        }
    }
    return out;
}

// Literal evaluation of the two subpopulation sensitivity parameters. The
// outcome ratio ranges over every U level stored in the table.
inline SensitivityParamsSub params_from_joint_sub(const JointDistSub& joint) {
    SensitivityParamsSub out;
    out.rr_uy_s1 = std::max(detail::ratio_max_over_min(joint.p_y1_given_tu[0], "min_u P(Y=1|T=0,U=u,I_S=1)"),
                            detail::ratio_max_over_min(joint.p_y1_given_tu[1], "min_u P(Y=1|T=1,U=u,I_S=1)"));
    double tu = 0.0;
    for (std::size_t u = 0; u < joint.u_levels(); ++u) {
        const double a = joint.p_u_given_t[1][u];
        const double b = joint.p_u_given_t[0][u];
        if (a == 0.0 && b == 0.0) continue;
        tu = std::max(tu, detail::checked_ratio(a, b, "P(U=u|T=0,I_S=1)"));
    }
    out.rr_tu_s1 = tu;
    return out;
}

inline ObservedSub observed_from_joint_sub(const JointDistSub& joint) {
    return {joint.p_t1, {joint.p_y1_given_t(0), joint.p_y1_given_t(1)}};
}

// Bias of the subpopulation relative risk and risk difference. The potential
// outcome risks are P(Y(t)=1|I_S=1) = sum_u P(Y=1|T=t,U=u,I_S=1) P(U=u|I_S=1).
inline BiasPair bias_from_joint_sub(const JointDistSub& joint) {
    double causal[2] = {0.0, 0.0};
    for (int t = 0; t < 2; ++t) {
        for (std::size_t u = 0; u < joint.u_levels(); ++u) causal[t] += joint.p_y1_given_tu[t][u] * joint.p_u(u);
    }
    const double obs1 = joint.p_y1_given_t(1);
    const double obs0 = joint.p_y1_given_t(0);
    BiasPair out;
    const double rr_obs = detail::checked_ratio(obs1, obs0, "P(Y=1|T=0,I_S=1)");
    const double rr_causal = detail::checked_ratio(causal[1], causal[0], "P(Y(0)=1|I_S=1)");
    out.rr = rr_obs / rr_causal;
    out.rd = (obs1 - obs0) - (causal[1] - causal[0]);
    return out;
}

// Joint over (Y, T, U, I_S) with prescribed total-population parameters and
// observed margins P*(Y, T, I_S).
//
// U has a bulk level (u=0) and two low-mass levels of size O(epsilon):
//   u=1 carries the selection association: P(U=1|T=1,I_S=1)/P(U=1|T=1,I_S=0)
//       = RR_SU|T=1, and P(U=1|T=0,I_S=0)/P(U=1|T=0,I_S=1) = RR_SU|T=0;
//   u=2 has mass epsilon in every (T, I_S) stratum.
// Within each arm the outcome risk on the low-mass levels is a common value
// x in both selection strata, and the bulk level absorbs whatever is needed
// to hit P*(Y=1|T,I_S=s) exactly. x is set to RR_UY|T=t times (or divided
// by) the bulk-level marginal risk, so max_u/min_u P(Y=1|T=t,U=u) = RR_UY|T=t.
// Y is allowed to depend on I_S given (T, U); the observed P(Y|T,I_S=0) is
// otherwise not reachable for arbitrary targets.
inline JointDistTotal construct_vi_total(const SensitivityParamsTotal& targets, const ObservedTotal& observed) {
    detail::require_above_one(targets.rr_uy_t1, "RR_UY|T=1");
    detail::require_above_one(targets.rr_uy_t0, "RR_UY|T=0");
    detail::require_above_one(targets.rr_su_t1, "RR_SU|T=1");
    detail::require_above_one(targets.rr_su_t0, "RR_SU|T=0");
    observed.validate_interior();

    double eps = kInitialEpsilon;
    for (int attempt = 0; attempt <= kMaxHalvings; ++attempt, eps *= 0.5) {
        JointDistTotal joint;
        joint.epsilon = eps;
        bool ok = true;
        for (int t = 0; t < 2 && ok; ++t) {
            const double rr_su = t == 1 ? targets.rr_su_t1 : targets.rr_su_t0;
            const double rr_uy = t == 1 ? targets.rr_uy_t1 : targets.rr_uy_t0;
            // Stratum in the numerator of RR_SU|T=t.
            const int enriched = t == 1 ? 1 : 0;
            std::array<std::array<double, 3>, 2> w{};  // [s][u] P(U=u|T=t,I_S=s)
            for (int s = 0; s < 2; ++s) {
                const double low = s == enriched ? rr_su * eps : eps;
                w[s] = {1.0 - low - eps, low, eps};
            }
            const double p_t = t == 1 ? observed.p_t1 : 1.0 - observed.p_t1;
            const std::array<double, 2> sigma{1.0 - observed.p_s1_given_t[t], observed.p_s1_given_t[t]};
            const auto& p_y = observed.p_y1_given_ts[t];

            const double m_total = sigma[0] * p_y[0] + sigma[1] * p_y[1];   // P*(Y=1|T=t)
            const double bulk = sigma[0] * w[0][0] + sigma[1] * w[1][0];     // P(U=0|T=t)
            double m_bulk = m_total / (bulk + rr_uy * (1.0 - bulk));
            double x = rr_uy * m_bulk;
            if (!detail::strictly_inside(x)) {
                m_bulk = m_total / (bulk + (1.0 - bulk) / rr_uy);
                x = m_bulk / rr_uy;
            }
            for (int s = 0; s < 2 && ok; ++s) {
                const double y_bulk = (p_y[s] - x * (w[s][1] + w[s][2])) / w[s][0];
                const std::array<double, 3> y{y_bulk, x, x};
                for (int u = 0; u < 3; ++u) {
                    ok = ok && detail::strictly_inside(w[s][u]) && detail::strictly_inside(y[u]);
                    const double base = p_t * sigma[s] * w[s][u];
                    joint.cells[1][t][u][s] = base * y[u];
                    joint.cells[0][t][u][s] = base * (1.0 - y[u]);
                }
            }
        }
        if (ok) return joint;
    }
    throw Error(ErrorCode::construction_failure,
                "construct_vi_total: no epsilon keeps every cell inside (0, 1)", "epsilon");
}

// Three-level U construction for the subpopulation parameters:
//   P(U|T=0,I_S=1) = ((1-e) R/(R+1), (1-e)/(R+1), e)
//   P(U|T=1,I_S=1) = ((1-e)/(R+1), (1-e) R/(R+1), e)     R = RR_TU|S=1
// The outcome is flat in U for T=0; for T=1 levels 1 and 2 are scaled by
// Q(a+e)/(Qa+e) and (a+e)/(Qa+e), a = P(U=1|T=1,I_S=1), Q = RR_UY|S=1, which
// keeps P(Y=1|T=1,I_S=1) fixed and makes their ratio Q.
inline JointDistSub construct_vi_sub(const SensitivityParamsSub& targets, const ObservedSub& observed) {
    detail::require_above_one(targets.rr_uy_s1, "RR_UY|S=1");
    detail::require_above_one(targets.rr_tu_s1, "RR_TU|S=1");
    observed.validate_interior();
    const double r = targets.rr_tu_s1;
    const double q = targets.rr_uy_s1;
    const double p0 = observed.p_y1_given_t[0];
    const double p1 = observed.p_y1_given_t[1];

    double eps = kInitialEpsilon;
    for (int attempt = 0; attempt <= kMaxHalvings; ++attempt, eps *= 0.5) {
        JointDistSub joint;
        joint.epsilon = eps;
        joint.p_t1 = observed.p_t1;
        joint.p_u_given_t[0] = {(1.0 - eps) * r / (r + 1.0), (1.0 - eps) / (r + 1.0), eps};
        joint.p_u_given_t[1] = {(1.0 - eps) / (r + 1.0), (1.0 - eps) * r / (r + 1.0), eps};
        const double a = joint.p_u_given_t[1][1];
        joint.p_y1_given_tu[0] = {p0, p0, p0};
        joint.p_y1_given_tu[1] = {p1, p1 * q * (a + eps) / (q * a + eps), p1 * (a + eps) / (q * a + eps)};

        bool ok = true;
        for (int t = 0; t < 2; ++t) {
            for (std::size_t u = 0; u < 3; ++u) {
                ok = ok && detail::strictly_inside(joint.p_u_given_t[t][u]) &&
                     detail::strictly_inside(joint.p_y1_given_tu[t][u]);
            }
        }
        if (ok) return joint;
    }
    throw Error(ErrorCode::construction_failure,
                "construct_vi_sub: no epsilon keeps every cell inside (0, 1)", "epsilon");
}

// Two-level U distribution whose subpopulation bias equals BF_U, available
// whenever BF_U <= 1/P*(Y=1|T=0,I_S=1):
//   P(U=1|T=1,I_S=1) = 1,  P(U=1|T=0,I_S=1) = 1/RR_TU
//   P(Y=1|T=0,U=0) = p0 BF_U/RR_UY,  P(Y=1|T=0,U=1) = p0 BF_U
//   P(Y=1|T=1,U=0) = p1/RR_UY,       P(Y=1|T=1,U=1) = p1
// The achieved biases are evaluated on the constructed table.
inline SharpConstruction construct_sharp(double rr_tu, double rr_uy, const ObservedSub& observed) {
    selbias::detail::require_risk_ratio(rr_tu, "RR_TU|S=1");
    selbias::detail::require_risk_ratio(rr_uy, "RR_UY|S=1");
    observed.validate_interior();
    const double bf_u = bounding_factor(rr_uy, rr_tu);
    const double p0 = observed.p_y1_given_t[0];
    const double p1 = observed.p_y1_given_t[1];
    if (bf_u > 1.0 / p0) {
        throw Error(ErrorCode::domain,
                    "BF_U: sharpness condition BF_U <= 1/P(Y=1|T=0,I_S=1) violated (BF_U = " +
                        std::to_string(bf_u) + ", limit = " + std::to_string(1.0 / p0) + ")",
                    "BF_U");
    }

    SharpConstruction out;
    auto& joint = out.joint;
    joint.p_t1 = observed.p_t1;
    joint.p_u_given_t[1] = {0.0, 1.0};
    joint.p_u_given_t[0] = {1.0 - 1.0 / rr_tu, 1.0 / rr_tu};
    joint.p_y1_given_tu[0] = {p0 * bf_u / rr_uy, std::min(p0 * bf_u, 1.0)};
    joint.p_y1_given_tu[1] = {p1 / rr_uy, p1};

    const auto achieved = bias_from_joint_sub(joint);
    out.achieved_bias_rr = achieved.rr;
    out.achieved_bias_rd = achieved.rd;
    return out;
}

}  // namespace selbias::oracle
