#pragma once

// Simulated registers drawn from an M-structure, their per-stage
// proportions by treatment arm, and AF bounds from raw indicator columns.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "selbias/bounds.hpp"
#include "selbias/errors.hpp"
#include "selbias/estimand.hpp"
#include "selbias/mstructure.hpp"
#include "selbias/random.hpp"

namespace selbias {

using BinaryColumn = std::vector<std::uint8_t>;

struct Dataset {
    BinaryColumn zika;                     // T
    BinaryColumn mic_ceph;                 // Y
    std::vector<BinaryColumn> selections;  // S_1..S_K (birth, hospital, ...)
    BinaryColumn sel_ind;                  // I_S = prod_k S_k
    std::vector<int> urban;                // V code
    std::vector<int> ses;                  // U code

    std::size_t rows() const { return zika.size(); }

    void validate() const {
        const std::size_t n = rows();
        auto same = [&](std::size_t m, const char* name) {
            detail::require(m == n, ErrorCode::invalid_input, name, "column length differs from zika");
        };
        same(mic_ceph.size(), "mic_ceph");
        same(sel_ind.size(), "sel_ind");
        same(urban.size(), "urban");
        same(ses.size(), "ses");
        for (const auto& s : selections) same(s.size(), "selection");
    }

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Name of the k-th (0-based) selection column in files.
inline std::string selection_column_name(std::size_t k) {
    if (k == 0) return "birth";
    if (k == 1) return "hospital";
    return "sel_" + std::to_string(k + 1);
}

namespace detail {

inline int draw_discrete(const DiscreteDist& d, double u) {
    double cum = 0.0;
    for (const auto& e : d.entries) {
        cum += e.prob;
        if (u < cum) return e.value;
    }
    return d.entries.back().value;
}

inline std::size_t index_of(const DiscreteDist& d, int value) {
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d.entries[i].value == value) return i;
    }
    return 0;
}

}  // namespace detail

// Draws n independent rows in causal order V, U, T|V, Y|T,U, S_k|V,U,T.
// Row i only reads counter_uniform(seed, i, stream), so the output is the
// same for any thread count.
inline Dataset simulate(const MStructureSpec& spec, std::size_t n, std::uint64_t seed,
                        unsigned threads = 0) {
    const ConditionalTables tables = evaluate_tables(spec);
    const std::size_t nv = spec.v_dist.size();
    const std::size_t nu = spec.u_dist.size();
    const std::size_t k = spec.s_coef.size();

    // P(S_k=1 | v, u, t), flattened [v][u][t][k].
    std::vector<double> p_sel(nv * nu * 2 * k);
    for (std::size_t i = 0; i < nv; ++i) {
        for (std::size_t j = 0; j < nu; ++j) {
            for (int t = 0; t < 2; ++t) {
                for (std::size_t c = 0; c < k; ++c) {
                    const auto& s = spec.s_coef[c];
                    p_sel[((i * nu + j) * 2 + t) * k + c] = link_eval(
                        spec.link, s.intercept + s.v * spec.v_dist.entries[i].value +
                                       s.u * spec.u_dist.entries[j].value + s.t * t);
                }
            }
        }
    }

    Dataset data;
    data.zika.resize(n);
    data.mic_ceph.resize(n);
    data.sel_ind.resize(n);
    data.urban.resize(n);
    data.ses.resize(n);
    data.selections.assign(k, BinaryColumn(n));

    auto fill = [&](std::size_t begin, std::size_t end) {
        for (std::size_t row = begin; row < end; ++row) {
            const int v = detail::draw_discrete(spec.v_dist, counter_uniform(seed, row, stream::v));
            const int u = detail::draw_discrete(spec.u_dist, counter_uniform(seed, row, stream::u));
            const std::size_t vi = detail::index_of(spec.v_dist, v);
            const std::size_t ui = detail::index_of(spec.u_dist, u);
            const int t = counter_uniform(seed, row, stream::t) < tables.p_t_given_v[vi][1] ? 1 : 0;
            const int y = counter_uniform(seed, row, stream::y) < tables.p_y1_given_tu[t][ui] ? 1 : 0;
            std::uint8_t all = 1;
            for (std::size_t c = 0; c < k; ++c) {
                const double p = p_sel[((vi * nu + ui) * 2 + t) * k + c];
                const std::uint8_t s = counter_uniform(seed, row, stream::s0 + c) < p ? 1 : 0;
                data.selections[c][row] = s;
                all &= s;
            }
            data.urban[row] = v;
            data.ses[row] = u;
            data.zika[row] = static_cast<std::uint8_t>(t);
            data.mic_ceph[row] = static_cast<std::uint8_t>(y);
            data.sel_ind[row] = all;
        }
    };

    if (threads == 0) threads = n >= 200000 ? std::max(1u, std::thread::hardware_concurrency()) : 1u;
    if (threads <= 1 || n < threads) {
        fill(0, n);
        return data;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t begin = 0; begin < n; begin += chunk) {
        pool.emplace_back(fill, begin, std::min(n, begin + chunk));
    }
    for (auto& th : pool) th.join();
    return data;
}

// Proportions within one treatment arm (or overall) of one selection stage.
struct ArmProportions {
    double weight = 0.0;        // row count, or population probability mass
    double microcephaly = 0.0;  // P(Y=1 | arm)
    double urban = 0.0;         // E[V | arm]; a proportion for binary V
    double ses = 0.0;           // E[U | arm]
};

// Stage 0 is the full register, stage k keeps rows with S_1 = ... = S_k = 1.
struct StageProportions {
    std::size_t stage = 0;
    std::array<ArmProportions, 3> arms{};  // T=0, T=1, overall

    const ArmProportions& untreated() const { return arms[0]; }
    const ArmProportions& treated() const { return arms[1]; }
    const ArmProportions& overall() const { return arms[2]; }
};

struct DataSummary {
    std::size_t stage = 0;
    std::size_t n_rows = 0;
    std::size_t n_selected = 0;
    ObservedSummary observed;
    StageProportions proportions;
};

namespace detail {

inline void require_stage(std::size_t stage, std::size_t k) {
    require(stage <= k, ErrorCode::invalid_input, "stage",
            "must be between 0 and the number of selection criteria (" + std::to_string(k) + ")");
}

inline double count_ratio(std::size_t num, std::size_t den, const std::string& stratum) {
    if (den == 0) {
        throw Error(ErrorCode::degenerate_stratum, "stratum " + stratum + " is empty", stratum);
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace detail

// Counts by exact integer tallies; each proportion is a single division.
inline DataSummary summarize(const Dataset& data, std::size_t stage) {
    data.validate();
    detail::require_stage(stage, data.selections.size());
    const std::size_t n = data.rows();

    struct Tally {
        std::size_t rows = 0, y = 0;
        long long v = 0, u = 0;
    };
    std::array<Tally, 3> tally{};
    std::size_t selected = 0;
    for (std::size_t i = 0; i < n; ++i) {
        bool keep = true;
        for (std::size_t c = 0; c < stage; ++c) keep = keep && data.selections[c][i] == 1;
        if (!keep) continue;
        ++selected;
        for (std::size_t arm : {static_cast<std::size_t>(data.zika[i]), std::size_t{2}}) {
            auto& a = tally[arm];
            ++a.rows;
            a.y += data.mic_ceph[i];
            a.v += data.urban[i];
            a.u += data.ses[i];
        }
    }

    const std::string sel = stage == 0 ? "" : ",I_S=1";
    const std::array<std::string, 3> names{"T=0" + sel, "T=1" + sel, stage == 0 ? "all" : "I_S=1"};
    DataSummary out;
    out.stage = stage;
    out.n_rows = n;
    out.n_selected = selected;
    out.proportions.stage = stage;
    for (std::size_t arm = 0; arm < 3; ++arm) {
        const auto& a = tally[arm];
        auto& p = out.proportions.arms[arm];
        p.weight = static_cast<double>(a.rows);
        p.microcephaly = detail::count_ratio(a.y, a.rows, names[arm]);
        p.urban = static_cast<double>(a.v) / static_cast<double>(a.rows);
        p.ses = static_cast<double>(a.u) / static_cast<double>(a.rows);
    }
    out.observed.py1_t1_s1 = out.proportions.arms[1].microcephaly;
    out.observed.py1_t0_s1 = out.proportions.arms[0].microcephaly;
    out.observed.pt1_s1 = detail::count_ratio(tally[1].rows, selected, names[2]);
    out.observed.ps1 = detail::count_ratio(selected, n, "all");
    return out;
}

// Exact population counterpart of summarize(), by enumeration.
inline DataSummary population_summary(const MStructureSpec& spec, std::size_t stage) {
    spec.validate();
    detail::require_stage(stage, spec.s_coef.size());
    const JointTable joint(evaluate_tables(spec.with_selections(std::max<std::size_t>(stage, 1))));
    const int s = stage == 0 ? -1 : 1;
    const auto& vd = spec.v_dist;
    const auto& ud = spec.u_dist;

    DataSummary out;
    out.stage = stage;
    out.proportions.stage = stage;
    const std::string sel = stage == 0 ? "" : ",I_S=1";
    const std::array<std::string, 3> names{"T=0" + sel, "T=1" + sel, stage == 0 ? "all" : "I_S=1"};
    for (int arm = 0; arm < 3; ++arm) {
        const int t = arm == 2 ? -1 : arm;
        const double mass = joint.mass(-1, -1, t, -1, s);
        if (!(mass > 0.0)) {
            throw Error(ErrorCode::degenerate_stratum, "stratum " + names[arm] + " has probability zero",
                        names[arm]);
        }
        auto& p = out.proportions.arms[arm];
        p.weight = mass;
        p.microcephaly = joint.mass(-1, -1, t, 1, s) / mass;
        double ev = 0.0, eu = 0.0;
        for (std::size_t i = 0; i < vd.size(); ++i) ev += vd.entries[i].value * joint.mass(static_cast<long>(i), -1, t, -1, s);
        for (std::size_t j = 0; j < ud.size(); ++j) eu += ud.entries[j].value * joint.mass(-1, static_cast<long>(j), t, -1, s);
        p.urban = ev / mass;
        p.ses = eu / mass;
    }
    out.observed.py1_t1_s1 = out.proportions.arms[1].microcephaly;
    out.observed.py1_t0_s1 = out.proportions.arms[0].microcephaly;
    out.observed.pt1_s1 = out.proportions.arms[1].weight / out.proportions.arms[2].weight;
    out.observed.ps1 = out.proportions.arms[2].weight;
    return out;
}

// Selection given either as a per-row indicator over the whole sample, or as
// a probability P(I_S=1) with the outcome/treatment rows already restricted
// to the selected subjects.
using SelectionInput = std::variant<std::span<const std::uint8_t>, double>;

// mean of a 0/1 indicator, as count / n
inline double selection_mean(std::span<const std::uint8_t> indicator) {
    std::size_t count = 0;
    for (auto s : indicator) count += s;
    return detail::count_ratio(count, indicator.size(), "all");
}

inline ObservedSummary observed_from_data(std::span<const std::uint8_t> outcome,
                                          std::span<const std::uint8_t> treatment,
                                          const SelectionInput& selection) {
    detail::require(outcome.size() == treatment.size(), ErrorCode::invalid_input, "treatment",
                    "length " + std::to_string(treatment.size()) + " differs from outcome length " +
                        std::to_string(outcome.size()));
    const auto* indicator = std::get_if<std::span<const std::uint8_t>>(&selection);
    if (indicator) {
        detail::require(indicator->size() == outcome.size(), ErrorCode::invalid_input, "selection",
                        "length " + std::to_string(indicator->size()) + " differs from outcome length " +
                            std::to_string(outcome.size()));
    }
    auto binary = [](std::span<const std::uint8_t> col, const char* name) {
        for (std::size_t i = 0; i < col.size(); ++i) {
            detail::require(col[i] <= 1, ErrorCode::invalid_input, name,
                            "non-binary value at row " + std::to_string(i + 1));
        }
    };
    binary(outcome, "outcome");
    binary(treatment, "treatment");
    if (indicator) binary(*indicator, "selection");

    std::size_t n_t[2] = {0, 0}, y_t[2] = {0, 0};
    for (std::size_t i = 0; i < outcome.size(); ++i) {
        if (indicator && (*indicator)[i] == 0) continue;
        ++n_t[treatment[i]];
        y_t[treatment[i]] += outcome[i];
    }
    ObservedSummary obs;
    obs.py1_t1_s1 = detail::count_ratio(y_t[1], n_t[1], "T=1,I_S=1");
    obs.py1_t0_s1 = detail::count_ratio(y_t[0], n_t[0], "T=0,I_S=1");
    obs.pt1_s1 = detail::count_ratio(n_t[1], n_t[0] + n_t[1], "I_S=1");
    if (indicator) {
        obs.ps1 = selection_mean(*indicator);
    } else {
        const double p = std::get<double>(selection);
        detail::require(std::isfinite(p) && p > 0.0 && p <= 1.0, ErrorCode::invalid_input, "selection",
                        "selection probability must lie in (0, 1]");
        obs.ps1 = p;
    }
    return obs;
}

// AF bound straight from columns. The treatment must already be coded so
// that the bias is positive.
inline BoundResult af_bound_from_data(EstimandKind estimand, std::span<const std::uint8_t> outcome,
                                      std::span<const std::uint8_t> treatment,
                                      const SelectionInput& selection) {
    return af_bound(estimand, observed_from_data(outcome, treatment, selection));
}

inline BinaryColumn recode_binary(std::span<const std::uint8_t> column) {
    BinaryColumn out(column.size());
    std::transform(column.begin(), column.end(), out.begin(),
                   [](std::uint8_t x) { return static_cast<std::uint8_t>(1 - x); });
    return out;
}

// Rows with indicator == 1.
inline BinaryColumn filter_selected(std::span<const std::uint8_t> column,
                                    std::span<const std::uint8_t> indicator) {
    BinaryColumn out;
    for (std::size_t i = 0; i < column.size(); ++i) {
        if (indicator[i] == 1) out.push_back(column[i]);
    }
    return out;
}

}  // namespace selbias
