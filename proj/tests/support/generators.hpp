#pragma once

// Seeded random instances for the property suites.

#include <cmath>
#include <cstdint>
#include <random>

#include "selbias/bounds.hpp"
#include "selbias/mstructure.hpp"
#include "selbias/oracle.hpp"

namespace gen {

using Rng = std::mt19937_64;

inline double prob(Rng& rng) { return std::uniform_real_distribution<double>(0.05, 0.95)(rng); }

// Log-uniform on [1.01, 20].
inline double risk_ratio(Rng& rng) {
    return std::exp(std::uniform_real_distribution<double>(std::log(1.01), std::log(20.0))(rng));
}

inline double coef(Rng& rng, double scale = 2.0) {
    return std::uniform_real_distribution<double>(-scale, scale)(rng);
}

inline selbias::DiscreteDist dist(Rng& rng, int levels) {
    selbias::DiscreteDist d;
    double total = 0.0;
    std::vector<double> w(levels);
    for (auto& x : w) total += (x = prob(rng));
    double used = 0.0;
    for (int i = 0; i < levels; ++i) {
        const double p = i + 1 == levels ? 1.0 - used : w[i] / total;
        used += p;
        d.entries.push_back({i, p});
    }
    return d;
}

inline selbias::MStructureSpec spec(Rng& rng) {
    selbias::MStructureSpec s;
    s.v_dist = dist(rng, std::uniform_int_distribution<int>(2, 3)(rng));
    s.u_dist = dist(rng, std::uniform_int_distribution<int>(2, 3)(rng));
    s.t_coef = {coef(rng), coef(rng)};
    s.y_coef = {coef(rng), coef(rng), coef(rng)};
    const int k = std::uniform_int_distribution<int>(1, 3)(rng);
    for (int i = 0; i < k; ++i) s.s_coef.push_back({coef(rng) + 1.0, coef(rng), coef(rng), coef(rng)});
    s.link = std::bernoulli_distribution(0.5)(rng) ? selbias::LinkKind::logistic : selbias::LinkKind::probit;
    return s;
}

inline selbias::SensitivityParamsTotal params_total(Rng& rng) {
    return {risk_ratio(rng), risk_ratio(rng), risk_ratio(rng), risk_ratio(rng)};
}

inline selbias::SensitivityParamsSub params_sub(Rng& rng) { return {risk_ratio(rng), risk_ratio(rng)}; }

inline selbias::oracle::ObservedTotal observed_total(Rng& rng) {
    selbias::oracle::ObservedTotal o;
    o.p_t1 = prob(rng);
    o.p_s1_given_t = {prob(rng), prob(rng)};
    o.p_y1_given_ts = {{{prob(rng), prob(rng)}, {prob(rng), prob(rng)}}};
    return o;
}

inline selbias::oracle::ObservedSub observed_sub(Rng& rng) { return {prob(rng), {prob(rng), prob(rng)}}; }

inline selbias::ObservedSummary summary(Rng& rng) { return {prob(rng), prob(rng), prob(rng), prob(rng)}; }

}  // namespace gen
