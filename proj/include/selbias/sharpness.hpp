#pragma once

// Sharpness classification of the subpopulation SV bound.
//
//   BF_U <= 1 / P(Y=1|T=0,I_S=1)         -> sharp (the bias can reach the bound)
//   SV bound  >  AF bound                 -> not sharp (exceeds the largest possible bias)
//   otherwise                             -> inconclusive

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "selbias/bounds.hpp"
#include "selbias/errors.hpp"
#include "selbias/estimand.hpp"

namespace selbias {

enum class Verdict { sharp, inconclusive, not_sharp };

inline std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::sharp: return "sharp";
        case Verdict::inconclusive: return "inconclusive";
        case Verdict::not_sharp: return "not_sharp";
    }
    return "?";
}

struct SharpnessVerdict {
    Verdict verdict = Verdict::inconclusive;
    std::string reason;
    double sharp_limit = 0.0;  // 1 / P(Y=1|T=0,I_S=1)
    std::optional<double> sv_bound;
    std::optional<double> af_bound;

    std::string message() const {
        switch (verdict) {
            case Verdict::sharp: return "SV bound is sharp.";
            case Verdict::not_sharp: return "SV bound is not sharp.";
            case Verdict::inconclusive: break;
        }
        return "SV bound might be sharp, inconclusive.";
    }
};

// Only the subpopulation bounds have a sharpness criterion; the total
// population bounds are strictly above the attainable bias whenever
// selection changes the outcome risk within a treatment arm.
inline void require_sharpness_supported(EstimandKind estimand) {
    if (!is_subpopulation(estimand)) {
        throw Error(ErrorCode::unsupported_estimand,
                    "estimand: sharpness is only defined for subpopulation estimands; "
                    "total-population SV bounds are generally not attainable",
                    "estimand");
    }
}

inline SharpnessVerdict sv_bound_sharp(double bf_u, double py1_t0_s1,
                                       std::optional<double> sv_bound = std::nullopt,
                                       std::optional<double> af_bound = std::nullopt) {
    detail::require_risk_ratio(bf_u, "BF_U");
    detail::require(std::isfinite(py1_t0_s1) && py1_t0_s1 > 0.0 && py1_t0_s1 <= 1.0,
                    ErrorCode::domain, "pY1_T0_S1", "must lie in (0, 1]");
    if (sv_bound) detail::require_finite(*sv_bound, "SVbound");
    if (af_bound) detail::require_finite(*af_bound, "AFbound");

    SharpnessVerdict out;
    out.sharp_limit = 1.0 / py1_t0_s1;
    out.sv_bound = sv_bound;
    out.af_bound = af_bound;
    if (bf_u <= out.sharp_limit) {
        out.verdict = Verdict::sharp;
        out.reason = "BF_U <= 1/P(Y=1|T=0,I_S=1)";
    } else if (sv_bound && af_bound && *sv_bound > *af_bound) {
        out.verdict = Verdict::not_sharp;
        out.reason = "SV bound exceeds the AF bound";
    } else {
        out.verdict = Verdict::inconclusive;
        out.reason = (sv_bound && af_bound) ? "SV bound lies between the sharp limit and the AF bound"
                                            : "BF_U above the sharp limit; supply SV and AF bounds "
                                              "to test for non-sharpness";
    }
    return out;
}

struct GridAxis {
    double min = 1.0;
    double max = 1.0;
    std::size_t steps = 1;

    void validate(std::string_view name) const {
        detail::require_risk_ratio(min, name);
        detail::require_risk_ratio(max, name);
        detail::require(steps >= 1, ErrorCode::invalid_input, name, "steps must be >= 1");
        detail::require(steps == 1 ? min <= max : min < max, ErrorCode::invalid_input, name,
                        "axis must be strictly increasing");
    }

    std::vector<double> values() const {
        std::vector<double> out(steps);
        if (steps == 1) {
            out[0] = min;
            return out;
        }
        const double step = (max - min) / static_cast<double>(steps - 1);
        for (std::size_t i = 0; i < steps; ++i) out[i] = min + step * static_cast<double>(i);
        out.back() = max;
        return out;
    }
};

struct GridCell {
    double bound = 1.0;  // SV bound for RR_sub, i.e. BF_U
    Verdict verdict = Verdict::sharp;
};

struct SharpnessGrid {
    GridAxis uy_axis;  // RR_UY|S=1, columns
    GridAxis tu_axis;  // RR_TU|S=1, rows
    std::vector<double> uy_values;
    std::vector<double> tu_values;
    double py1_t0_s1 = 0.0;
    std::optional<double> af_bound;
    std::vector<GridCell> cells;  // row-major: cells[row(tu) * uy_values.size() + col(uy)]

    const GridCell& at(std::size_t tu_index, std::size_t uy_index) const {
        return cells[tu_index * uy_values.size() + uy_index];
    }
};

inline SharpnessGrid sharpness_grid(const GridAxis& uy_axis, const GridAxis& tu_axis,
                                    double py1_t0_s1, std::optional<double> af_bound = std::nullopt) {
    uy_axis.validate("uy_axis");
    tu_axis.validate("tu_axis");
    SharpnessGrid grid;
    grid.uy_axis = uy_axis;
    grid.tu_axis = tu_axis;
    grid.uy_values = uy_axis.values();
    grid.tu_values = tu_axis.values();
    grid.py1_t0_s1 = py1_t0_s1;
    grid.af_bound = af_bound;
    grid.cells.reserve(grid.uy_values.size() * grid.tu_values.size());
    for (double tu : grid.tu_values) {
        for (double uy : grid.uy_values) {
            const double bf_u = bounding_factor(uy, tu);
            const auto v = af_bound ? sv_bound_sharp(bf_u, py1_t0_s1, bf_u, af_bound)
                                    : sv_bound_sharp(bf_u, py1_t0_s1);
            grid.cells.push_back({bf_u, v.verdict});
        }
    }
    return grid;
}

}  // namespace selbias
