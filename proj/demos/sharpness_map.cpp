// Prints the sharpness grid for the single-selection population inputs as
// CSV (rr_tu_s1, rr_uy_s1, bound, verdict), ready for a heatmap.

#include <cstdio>

#include "selbias/selbias.hpp"

using namespace selbias;

int main() {
    const auto spec = zika_learner_spec().with_selections(1);
    const JointTable joint(reverse_treatment(evaluate_tables(spec)));
    const double p0 = joint.p_y1_given_ts(0, 1);
    const ObservedSummary obs{joint.p_y1_given_ts(1, 1), p0, joint.p_t1_given_s(1), {}};
    const double af = af_bound(EstimandKind::rr_sub, obs).value;
    std::fprintf(stderr, "sharp limit 1/p0 = %.4f, AF bound = %.4f\n", 1.0 / p0, af);

    const auto grid = sharpness_grid({1, 30, 59}, {1, 30, 59}, p0, af);
    std::printf("rr_tu_s1,rr_uy_s1,bound,verdict\n");
    for (std::size_t r = 0; r < grid.tu_values.size(); ++r) {
        for (std::size_t c = 0; c < grid.uy_values.size(); ++c) {
            const auto& cell = grid.at(r, c);
            std::printf("%g,%g,%.6f,%s\n", grid.tu_values[r], grid.uy_values[c], cell.bound,
                        std::string(to_string(cell.verdict)).c_str());
        }
    }
}
