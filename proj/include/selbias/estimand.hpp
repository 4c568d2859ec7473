#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>

#include "selbias/errors.hpp"

namespace selbias {

// Causal contrast of interest: relative risk (RR) or risk difference (RD),
// in the total population or in the selected subpopulation (I_S = 1).
enum class EstimandKind { rr_tot, rd_tot, rr_sub, rd_sub };

constexpr bool is_relative_risk(EstimandKind e) {
    return e == EstimandKind::rr_tot || e == EstimandKind::rr_sub;
}

constexpr bool is_subpopulation(EstimandKind e) {
    return e == EstimandKind::rr_sub || e == EstimandKind::rd_sub;
}

inline std::string_view to_string(EstimandKind e) {
    switch (e) {
        case EstimandKind::rr_tot: return "RR_tot";
        case EstimandKind::rd_tot: return "RD_tot";
        case EstimandKind::rr_sub: return "RR_sub";
        case EstimandKind::rd_sub: return "RD_sub";
    }
    return "?";
}

// Accepts "RR_sub", "rr-sub", "rr_sub" (case-insensitive).
inline EstimandKind parse_estimand(std::string_view text) {
    std::string key(text);
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) {
        return c == '-' ? '_' : static_cast<char>(std::tolower(c));
    });
    if (key == "rr_tot") return EstimandKind::rr_tot;
    if (key == "rd_tot") return EstimandKind::rd_tot;
    if (key == "rr_sub") return EstimandKind::rr_sub;
    if (key == "rd_sub") return EstimandKind::rd_sub;
    throw Error(ErrorCode::invalid_input,
                "estimand: unknown estimand '" + std::string(text) +
                    "' (expected RR_tot, RD_tot, RR_sub or RD_sub)",
                "estimand");
}

}  // namespace selbias
