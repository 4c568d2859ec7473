#pragma once

#include <cmath>
#include <numbers>
#include <string_view>

#include "selbias/errors.hpp"

namespace selbias {

enum class LinkKind { logistic, probit };

inline std::string_view to_string(LinkKind link) {
    return link == LinkKind::logistic ? "logistic" : "probit";
}

// Inverse link g(x): P(event) for linear predictor x.
inline double link_eval(LinkKind link, double x) {
    detail::require_finite(x, "linear_predictor");
    if (link == LinkKind::probit) {
        // Phi(x) = erfc(-x / sqrt 2) / 2, accurate to a few ulps over the whole line.
        return 0.5 * std::erfc(-x / std::numbers::sqrt2);
    }
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// 1 - g(x), evaluated as g(-x) so small complements keep their precision.
// Both links are symmetric about zero.
inline double link_complement(LinkKind link, double x) {
    detail::require_finite(x, "linear_predictor");
    return link_eval(link, -x);
}

}  // namespace selbias
