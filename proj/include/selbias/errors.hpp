#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace selbias {

enum class ErrorCode {
    invalid_input,         // malformed or missing input values
    parse,                 // unreadable file / malformed text
    domain,                // value outside the mathematical domain (e.g. RR < 1)
    unsupported_estimand,  // operation not defined for the requested estimand
    degenerate_stratum,    // conditioning event has probability zero
    division_by_zero,      // a ratio denominator is zero
    construction_failure,  // an oracle construction could not be completed
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_input: return "invalid_input";
        case ErrorCode::parse: return "parse_error";
        case ErrorCode::domain: return "domain_error";
        case ErrorCode::unsupported_estimand: return "unsupported_estimand";
        case ErrorCode::degenerate_stratum: return "degenerate_stratum";
        case ErrorCode::division_by_zero: return "division_by_zero";
        case ErrorCode::construction_failure: return "construction_failure";
    }
    return "unknown";
}

// Validation errors are caused by what the caller passed in; the rest are
// raised while computing on otherwise well-formed input.
inline bool is_validation(ErrorCode code) {
    return code == ErrorCode::invalid_input || code == ErrorCode::parse ||
           code == ErrorCode::domain || code == ErrorCode::unsupported_estimand;
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message, std::string field = {})
        : std::runtime_error(std::move(message)), code_(code), field_(std::move(field)) {}

    ErrorCode code() const noexcept { return code_; }
    // Name of the offending input, empty when not attributable to one field.
    const std::string& field() const noexcept { return field_; }

private:
    ErrorCode code_;
    std::string field_;
};

namespace detail {

inline void require(bool ok, ErrorCode code, std::string_view field, const std::string& message) {
    if (!ok) throw Error(code, std::string(field) + ": " + message, std::string(field));
}

inline void require_finite(double x, std::string_view field) {
    require(std::isfinite(x), ErrorCode::invalid_input, field, "must be finite");
}

inline void require_probability(double p, std::string_view field) {
    require(std::isfinite(p) && p >= 0.0 && p <= 1.0, ErrorCode::invalid_input, field,
            "must be a probability in [0, 1], got " + std::to_string(p));
}

inline void require_risk_ratio(double rr, std::string_view field) {
    require_finite(rr, field);
    require(rr >= 1.0, ErrorCode::domain, field, "must be >= 1, got " + std::to_string(rr));
}

inline double checked_ratio(double num, double den, std::string_view what) {
    if (den == 0.0) {
        throw Error(ErrorCode::division_by_zero, std::string(what) + ": denominator is zero",
                    std::string(what));
    }
    return num / den;
}

}  // namespace detail
}  // namespace selbias
