// Zika/microcephaly walkthrough: assumed model, SV parameters and bound,
// AF bound from the frozen learner dataset, and the sharpness verdict.
//
//   zika_walkthrough [path/to/zika_learner.csv]

#include <cstdio>
#include <span>
#include <string>

#include "selbias/selbias.hpp"

using namespace selbias;

int main(int argc, char** argv) {
    const std::string csv = argc > 1 ? argv[1] : SELBIAS_DATA_DIR "/zika_learner.csv";
    const auto spec = zika_learner_spec();

    const auto truth = causal_estimands(evaluate_tables(spec));
    std::printf("causal RR, whole population   %.3f\n", truth.beta_r);
    std::printf("causal RR, selected subjects  %.3f\n", truth.beta_rs);
    std::printf("observed RR                   %.3f\n\n", truth.beta_r_obs);

    // Observed probabilities as they would come from the study.
    const auto params = sv_bound_parameters_m(spec, EstimandKind::rr_sub, 0.286, 0.004);
    const auto& p = std::get<SensitivityParamsSub>(params.params);
    std::printf("RR_UY|S=1 %.4f  RR_TU|S=1 %.4f  BF_U %.4f  reversed %s\n", p.rr_uy_s1, p.rr_tu_s1,
                *params.bf_u, params.reversed ? "yes" : "no");
    const double sv = sv_bound(EstimandKind::rr_sub, p).value;
    std::printf("SV bound %.4f\n", sv);

    try {
        const auto data = table_to_dataset(read_csv(csv));
        // The bias is negative with the original coding, so flip the exposure.
        const auto t = recode_binary(data.zika);
        const auto obs = observed_from_data(data.mic_ceph, t, std::span<const std::uint8_t>(data.sel_ind));
        const double af = af_bound(EstimandKind::rr_sub, obs).value;
        std::printf("AF bound %.4f  (n = %zu, %zu selected)\n", af, data.rows(),
                    static_cast<std::size_t>(*obs.ps1 * static_cast<double>(data.rows()) + 0.5));

        const auto verdict = sv_bound_sharp(*params.bf_u, obs.py1_t0_s1, sv, af);
        std::printf("%s\n", verdict.message().c_str());
    } catch (const Error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    }
}
