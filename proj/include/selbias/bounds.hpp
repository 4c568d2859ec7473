#pragma once

// Closed-form bias bounds for binary outcomes under selection.
//
// SV bounds take relative-risk sensitivity parameters describing how an
// unmeasured U links treatment, selection and outcome. AF (assumption-free)
// bounds need only observed probabilities. Every bound is an upper bound on
// a *positive* bias; orienting the treatment coding so that the bias is
// positive is the caller's job.

#include <algorithm>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "selbias/errors.hpp"
#include "selbias/estimand.hpp"

namespace selbias {

// Sensitivity parameters for total-population estimands. Each is >= 1.
struct SensitivityParamsTotal {
    double rr_uy_t1 = 1.0;  // max_u P(Y=1|T=1,U=u) / min_u P(Y=1|T=1,U=u)
    double rr_uy_t0 = 1.0;  // same within T=0
    double rr_su_t1 = 1.0;  // max_u P(U=u|T=1,I_S=1) / P(U=u|T=1,I_S=0)
    double rr_su_t0 = 1.0;  // max_u P(U=u|T=0,I_S=0) / P(U=u|T=0,I_S=1)

    void validate() const {
        detail::require_risk_ratio(rr_uy_t1, "RR_UY|T=1");
        detail::require_risk_ratio(rr_uy_t0, "RR_UY|T=0");
        detail::require_risk_ratio(rr_su_t1, "RR_SU|T=1");
        detail::require_risk_ratio(rr_su_t0, "RR_SU|T=0");
    }
    friend bool operator==(const SensitivityParamsTotal&, const SensitivityParamsTotal&) = default;
};

// Sensitivity parameters for subpopulation estimands. Each is >= 1.
struct SensitivityParamsSub {
    double rr_uy_s1 = 1.0;  // max_t of the within-t max/min outcome ratio over u, given I_S=1
    double rr_tu_s1 = 1.0;  // max_u P(U=u|T=1,I_S=1) / P(U=u|T=0,I_S=1)

    void validate() const {
        detail::require_risk_ratio(rr_uy_s1, "RR_UY|S=1");
        detail::require_risk_ratio(rr_tu_s1, "RR_TU|S=1");
    }
    friend bool operator==(const SensitivityParamsSub&, const SensitivityParamsSub&) = default;
};

using SensitivityParams = std::variant<SensitivityParamsTotal, SensitivityParamsSub>;

// Observed-data probabilities. pT1_S1 and pS1 are only needed by the AF bounds.
struct ObservedSummary {
    double py1_t1_s1 = 0.0;            // P(Y=1|T=1,I_S=1)
    double py1_t0_s1 = 0.0;            // P(Y=1|T=0,I_S=1)
    std::optional<double> pt1_s1;      // P(T=1|I_S=1)
    std::optional<double> ps1;         // P(I_S=1)

    void validate() const {
        detail::require_probability(py1_t1_s1, "pY1_T1_S1");
        detail::require_probability(py1_t0_s1, "pY1_T0_S1");
        if (pt1_s1) detail::require_probability(*pt1_s1, "pT1_S1");
        if (ps1) detail::require_probability(*ps1, "pS1");
    }
    friend bool operator==(const ObservedSummary&, const ObservedSummary&) = default;
};

enum class BoundMethod { sv, af };

struct BoundResult {
    EstimandKind estimand = EstimandKind::rr_sub;
    BoundMethod method = BoundMethod::sv;
    double value = 0.0;
    std::optional<double> bf1;   // total-population SV bounds
    std::optional<double> bf0;
    std::optional<double> bf_u;  // subpopulation SV bounds
    std::optional<SensitivityParams> params;
    std::optional<ObservedSummary> observed;
    std::vector<std::string> warnings;
};

// a*b / (a + b - 1). Symmetric, in [1, min(a, b)], equal to 1 iff a or b is 1.
inline double bounding_factor(double rr_a, double rr_b) {
    detail::require_risk_ratio(rr_a, "rr_a");
    detail::require_risk_ratio(rr_b, "rr_b");
    // Clamped so rounding never leaves the exact range.
    return std::clamp(rr_a * rr_b / (rr_a + rr_b - 1.0), 1.0, std::min(rr_a, rr_b));
}

// Selection bias of an observed estimand relative to its causal counterpart:
// ratio for relative risks, difference for risk differences.
inline double bias(EstimandKind estimand, double causal, double observed) {
    detail::require_finite(causal, "causal");
    detail::require_finite(observed, "observed");
    if (is_relative_risk(estimand)) return detail::checked_ratio(observed, causal, "causal");
    return observed - causal;
}

// Warning text when a known bias points the wrong way for an upper bound.
inline std::optional<std::string> orientation_warning(EstimandKind estimand, double exact_bias) {
    const bool negative = is_relative_risk(estimand) ? exact_bias < 1.0 : exact_bias < 0.0;
    if (!negative) return std::nullopt;
    return "bias is negative (" + std::to_string(exact_bias) +
           "); recode the treatment (T -> 1 - T) so the bound applies";
}

namespace detail {

inline const ObservedSummary& require_observed(const std::optional<ObservedSummary>& observed,
                                               EstimandKind estimand) {
    if (!observed) {
        throw Error(ErrorCode::invalid_input,
                    std::string("observed: ") + std::string(to_string(estimand)) +
                        " requires pY1_T1_S1 and pY1_T0_S1",
                    "observed");
    }
    observed->validate();
    return *observed;
}

}  // namespace detail

// SV bound for the requested estimand. Risk-difference estimands also need
// the observed outcome probabilities. The total-population risk-difference
// bound is evaluated as BF1 - p1/BF1 + p0*BF0.
inline BoundResult sv_bound(EstimandKind estimand, const SensitivityParams& params,
                            const std::optional<ObservedSummary>& observed = std::nullopt,
                            std::optional<double> exact_bias = std::nullopt) {
    BoundResult out;
    out.estimand = estimand;
    out.method = BoundMethod::sv;
    out.params = params;

    if (is_subpopulation(estimand)) {
        const auto* p = std::get_if<SensitivityParamsSub>(&params);
        if (p == nullptr) {
            throw Error(ErrorCode::invalid_input,
                        "params: subpopulation estimands need RR_UY|S=1 and RR_TU|S=1", "params");
        }
        p->validate();
        const double bf_u = bounding_factor(p->rr_uy_s1, p->rr_tu_s1);
        out.bf_u = bf_u;
        if (estimand == EstimandKind::rr_sub) {
            out.value = bf_u;
        } else {
            const auto& obs = detail::require_observed(observed, estimand);
            out.observed = obs;
            out.value = std::max(obs.py1_t0_s1 * (bf_u - 1.0), obs.py1_t1_s1 * (1.0 - 1.0 / bf_u));
        }
    } else {
        const auto* p = std::get_if<SensitivityParamsTotal>(&params);
        if (p == nullptr) {
            throw Error(ErrorCode::invalid_input,
                        "params: total-population estimands need RR_UY|T=t and RR_SU|T=t",
                        "params");
        }
        p->validate();
        const double bf1 = bounding_factor(p->rr_uy_t1, p->rr_su_t1);
        const double bf0 = bounding_factor(p->rr_uy_t0, p->rr_su_t0);
        out.bf1 = bf1;
        out.bf0 = bf0;
        if (estimand == EstimandKind::rr_tot) {
            out.value = bf1 * bf0;
        } else {
            const auto& obs = detail::require_observed(observed, estimand);
            out.observed = obs;
            out.value = bf1 - obs.py1_t1_s1 / bf1 + obs.py1_t0_s1 * bf0;
        }
    }
    if (exact_bias) {
        if (auto w = orientation_warning(estimand, *exact_bias)) out.warnings.push_back(*w);
    }
    return out;
}

// Assumption-free bound from observed probabilities only.
inline BoundResult af_bound(EstimandKind estimand, const ObservedSummary& observed) {
    observed.validate();
    if (!observed.pt1_s1) {
        throw Error(ErrorCode::invalid_input, "pT1_S1: required for AF bounds", "pT1_S1");
    }
    const double p1 = observed.py1_t1_s1;
    const double p0 = observed.py1_t0_s1;
    const double pt1 = *observed.pt1_s1;
    const double pt0 = 1.0 - pt1;

    BoundResult out;
    out.estimand = estimand;
    out.method = BoundMethod::af;
    out.observed = observed;

    if (is_subpopulation(estimand)) {
        // Largest value P(Y(0)=1|I_S=1) can take given the observed data.
        const double py0_max = std::min(pt1 + p0 * pt0, 1.0);
        if (estimand == EstimandKind::rr_sub) {
            if (p0 == 0.0) throw Error(ErrorCode::division_by_zero, "pY1_T0_S1: is zero", "pY1_T0_S1");
            if (pt1 == 0.0) throw Error(ErrorCode::division_by_zero, "pT1_S1: is zero", "pT1_S1");
            out.value = py0_max / (p0 * pt1);
        } else {
            out.value = py0_max + p1 * (1.0 - pt1) - p0;
        }
        return out;
    }

    if (!observed.ps1) {
        throw Error(ErrorCode::invalid_input, "pS1: required for total-population AF bounds", "pS1");
    }
    const double ps1 = *observed.ps1;
    const double ps0 = 1.0 - ps1;
    // Largest value P(Y(0)=1) can take given the observed data.
    const double py0_max = std::min(pt1 * ps1 + 2.0 * ps0 + p0 * pt0 * ps1, 1.0);
    if (estimand == EstimandKind::rr_tot) {
        if (p0 == 0.0) throw Error(ErrorCode::division_by_zero, "pY1_T0_S1: is zero", "pY1_T0_S1");
        if (pt1 == 0.0) throw Error(ErrorCode::division_by_zero, "pT1_S1: is zero", "pT1_S1");
        if (ps1 == 0.0) throw Error(ErrorCode::division_by_zero, "pS1: is zero", "pS1");
        out.value = py0_max / (p0 * pt1 * ps1);
    } else {
        out.value = py0_max + p1 * (1.0 - pt1 * ps1) - p0;
    }
    return out;
}

}  // namespace selbias
