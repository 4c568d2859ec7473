#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "selbias/mstructure.hpp"
#include "support/enumeration.hpp"
#include "support/generators.hpp"

using namespace selbias;

namespace {

MStructureSpec one_selection_zika() { return zika_learner_spec().with_selections(1); }

MStructureSpec null_effect_zika() {
    auto s = zika_learner_spec();
    s.y_coef.t = 0.0;
    return s;
}

}  // namespace

TEST(Link, SymmetricAtZero) {
    EXPECT_EQ(link_eval(LinkKind::logistic, 0.0), 0.5);
    EXPECT_EQ(link_eval(LinkKind::probit, 0.0), 0.5);
}

TEST(Link, LogisticScalar) {
    EXPECT_NEAR(link_eval(LinkKind::logistic, -6.2 + 1.75), 1.0 / (1.0 + std::exp(4.45)), 1e-15);
    EXPECT_NEAR(link_eval(LinkKind::logistic, -6.2 + 1.75), 0.011543752483922289, 1e-15);
}

TEST(Link, ProbitMatchesKnownQuantiles) {
    EXPECT_NEAR(link_eval(LinkKind::probit, 1.959963984540054), 0.975, 1e-12);
    EXPECT_NEAR(link_eval(LinkKind::probit, -1.0), 0.15865525393145707, 1e-12);
    EXPECT_NEAR(link_eval(LinkKind::probit, -8.0), 6.22096057427178e-16, 1e-25);
}

TEST(Link, ExtremeArgumentsStayInRange) {
    for (auto link : {LinkKind::logistic, LinkKind::probit}) {
        EXPECT_GE(link_eval(link, -700.0), 0.0);
        EXPECT_LE(link_eval(link, 700.0), 1.0);
        EXPECT_NEAR(link_eval(link, 3.0) + link_complement(link, 3.0), 1.0, 1e-15);
    }
}

TEST(Link, NonFiniteRejected) {
    EXPECT_THROW(link_eval(LinkKind::logistic, std::numeric_limits<double>::quiet_NaN()), Error);
    EXPECT_THROW(link_eval(LinkKind::probit, std::numeric_limits<double>::infinity()), Error);
}

TEST(Spec, ValidationNamesField) {
    auto s = zika_learner_spec();
    s.v_dist.entries[0].prob = 0.9;
    try {
        s.validate();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::invalid_input);
        EXPECT_EQ(e.field(), "Vval");
    }
    s = zika_learner_spec();
    s.s_coef.clear();
    EXPECT_THROW(s.validate(), Error);
    s = zika_learner_spec();
    s.u_dist.entries[1].value = 1;
    EXPECT_THROW(s.validate(), Error);
}

TEST(EvaluateTables, ZikaTreatmentProbability) {
    const auto t = evaluate_tables(zika_learner_spec());
    EXPECT_NEAR(t.p_t_given_v[0][1], 0.011543752483922289, 1e-15);  // v = 1 is the first entry
    EXPECT_FALSE(t.reversed);
}

TEST(EvaluateTables, OutcomeWithoutCovariatesIsConstant) {
    auto s = zika_learner_spec();
    s.y_coef = {-1.3, 0.0, 0.0};
    const auto t = evaluate_tables(s);
    for (int tt = 0; tt < 2; ++tt)
        for (double p : t.p_y1_given_tu[tt]) EXPECT_DOUBLE_EQ(p, link_eval(LinkKind::logistic, -1.3));
}

TEST(EvaluateTables, SelectionIsProductOfCriteria) {
    auto s = zika_learner_spec();
    s.s_coef[1] = {-800.0, 0.0, 0.0, 0.0};
    const auto t = evaluate_tables(s);
    for (const auto& by_u : t.p_sel_given_vut)
        for (const auto& cell : by_u) {
            EXPECT_LT(cell[0], 1e-300);
            EXPECT_LT(cell[1], 1e-300);
        }
}

TEST(ReverseTreatment, TwiceIsIdentity) {
    const auto t = evaluate_tables(zika_learner_spec());
    const auto back = reverse_treatment(reverse_treatment(t));
    EXPECT_TRUE(back == t);
}

TEST(ReverseTreatment, ZikaOnce) {
    const auto r = reverse_treatment(evaluate_tables(zika_learner_spec()));
    EXPECT_TRUE(r.reversed);
    EXPECT_NEAR(r.p_t_given_v[0][1], 1.0 - 0.011543752483922289, 1e-15);
}

TEST(ReverseTreatment, SymmetricFixedPoint) {
    MStructureSpec s = zika_learner_spec();
    s.t_coef = {0.0, 0.0};
    s.y_coef = {0.3, 0.0, 0.7};
    for (auto& r : s.s_coef) r.t = 0.0;
    const auto t = evaluate_tables(s);
    auto r = reverse_treatment(t);
    EXPECT_TRUE(r.reversed);
    r.reversed = false;
    EXPECT_TRUE(r == t);
}

TEST(EnumerateJoint, SumsToOne) {
    const auto j = enumerate_joint(evaluate_tables(zika_learner_spec()));
    EXPECT_NEAR(j.total(), 1.0, 1e-12);
}

TEST(EnumerateJoint, ZikaSelectionProbabilityMatchesReference) {
    const auto j = enumerate_joint(evaluate_tables(zika_learner_spec()));
    const auto ref = reference::quantities(zika_learner_spec());
    EXPECT_NEAR(j.p_s(1), ref.p_s1, 1e-12);
    // Frozen value from the independent enumeration.
    EXPECT_NEAR(j.p_s(1), 0.5784238596065132, 1e-12);
}

TEST(EnumerateJoint, SingleSelectionUntreatedRiskAfterReversal) {
    const auto j = enumerate_joint(reverse_treatment(evaluate_tables(one_selection_zika())));
    EXPECT_NEAR(j.p_y1_given_ts(0, 1), 0.26560147078472485, 1e-12);
    EXPECT_NEAR(1.0 / j.p_y1_given_ts(0, 1), 3.7650393917077345, 1e-9);
}

TEST(EnumerateJoint, EmptyStratumIsDegenerate) {
    auto s = zika_learner_spec();
    s.s_coef = {{-1e3, 0.0, 0.0, 0.0}};
    const auto j = enumerate_joint(evaluate_tables(s));
    try {
        j.p_y1_given_ts(1, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::degenerate_stratum);
        EXPECT_EQ(e.field(), "T=1,I_S=1");
    }
}

TEST(CausalEstimands, ZikaModel) {
    EXPECT_NEAR(causal_estimands(evaluate_tables(zika_learner_spec())).beta_r, 90.7, 0.05);
    EXPECT_NEAR(causal_estimands(evaluate_tables(one_selection_zika())).beta_rs, 92.3, 0.05);
    EXPECT_NEAR(causal_estimands(evaluate_tables(zika_learner_spec())).beta_rs, 88.1, 0.05);
}

TEST(CausalEstimands, ObservedMatchesReference) {
    // The population observed relative risk after two selections; the sample
    // value quoted alongside the causal estimands comes from one draw.
    const auto r = causal_estimands(evaluate_tables(zika_learner_spec()));
    const auto ref = reference::quantities(zika_learner_spec());
    EXPECT_NEAR(r.beta_r_obs, ref.p1 / ref.p0, 1e-9);
    EXPECT_NEAR(r.beta_r_obs, 69.67488594941952, 1e-9);
    EXPECT_NEAR(causal_estimands(evaluate_tables(one_selection_zika())).beta_r_obs, 74.53650269863884, 1e-9);
}

TEST(CausalEstimands, NullTreatmentEffect) {
    const auto r = causal_estimands(evaluate_tables(null_effect_zika()));
    EXPECT_NEAR(r.beta_r, 1.0, 1e-15);
    EXPECT_NEAR(r.beta_d, 0.0, 1e-15);
}

TEST(CausalEstimands, ZeroBaselineRiskIsDivisionError) {
    auto s = zika_learner_spec();
    s.y_coef = {-1e4, 2e4, 0.0};
    try {
        causal_estimands(evaluate_tables(s));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::division_by_zero);
    }
}

TEST(SvParamsTotal, InertUGivesUnitOutcomeRatios) {
    auto s = zika_learner_spec();
    s.y_coef.u = 0.0;
    const auto p = sv_params_total(evaluate_tables(s));
    EXPECT_DOUBLE_EQ(p.rr_uy_t1, 1.0);
    EXPECT_DOUBLE_EQ(p.rr_uy_t0, 1.0);
}

TEST(SvParamsTotal, SelectionFreeOfUAndV) {
    auto s = zika_learner_spec();
    for (auto& r : s.s_coef) r.u = r.v = 0.0;
    const auto p = sv_params_total(evaluate_tables(s));
    EXPECT_NEAR(p.rr_su_t1, 1.0, 1e-12);
    EXPECT_NEAR(p.rr_su_t0, 1.0, 1e-12);
}

TEST(SvParamsTotal, ZikaFrozenFixture) {
    // Values from the independent enumeration, two selections, original coding.
    const auto p = sv_params_total(evaluate_tables(zika_learner_spec()));
    EXPECT_NEAR(p.rr_uy_t1, 1.9447697662510302, 1e-9);
    EXPECT_NEAR(p.rr_uy_t0, 2.708854820754625, 1e-9);
    EXPECT_NEAR(p.rr_su_t1, 1.5566196045669574, 1e-9);
    EXPECT_NEAR(p.rr_su_t0, 1.7057657760595253, 1e-9);
}

TEST(SvParamsSub, ZikaAfterReversal) {
    const auto p = sv_params_sub(reverse_treatment(evaluate_tables(zika_learner_spec())));
    EXPECT_NEAR(p.rr_uy_s1, 2.7089, 5e-5);
    EXPECT_NEAR(p.rr_tu_s1, 2.3293, 5e-5);
}

TEST(SvParamsSub, InertU) {
    auto s = zika_learner_spec();
    s.y_coef.u = 0.0;
    for (auto& r : s.s_coef) r.u = 0.0;
    const auto p = sv_params_sub(evaluate_tables(s));
    EXPECT_DOUBLE_EQ(p.rr_uy_s1, 1.0);
    EXPECT_NEAR(p.rr_tu_s1, 1.0, 1e-12);
}

TEST(SvParamsSub, HandBuiltTableMatchesDirectEvaluation) {
    ConditionalTables t;
    t.v_dist = DiscreteDist::binary(0.5);
    t.u_dist = DiscreteDist::binary(0.5);
    t.p_t_given_v = {{0.4, 0.6}, {0.7, 0.3}};
    t.p_y1_given_tu = {std::vector<double>{0.2, 0.1}, std::vector<double>{0.6, 0.3}};
    t.p_sel_given_vut = {{{0.9, 0.5}, {0.4, 0.8}}, {{0.6, 0.6}, {0.3, 0.9}}};
    const auto p = sv_params_sub(t);
    EXPECT_DOUBLE_EQ(p.rr_uy_s1, 2.0);

    // P(U=u|T=t,I_S=1) by hand: weight(v,u,t) = P(v)P(u)P(t|v)P(S=1|v,u,t).
    auto w = [&](int u, int t_) {
        double acc = 0.0;
        for (int v = 0; v < 2; ++v) acc += 0.25 * t.p_t_given_v[v][t_] * t.p_sel_given_vut[v][u][t_];
        return acc;
    };
    auto pu = [&](int u, int t_) { return w(u, t_) / (w(0, t_) + w(1, t_)); };
    const double expected = std::max(pu(0, 1) / pu(0, 0), pu(1, 1) / pu(1, 0));
    EXPECT_NEAR(p.rr_tu_s1, expected, 1e-14);
}

TEST(SvBoundParametersM, ZikaRrSub) {
    const auto r = sv_bound_parameters_m(zika_learner_spec(), EstimandKind::rr_sub, 0.286, 0.004);
    const auto& p = std::get<SensitivityParamsSub>(r.params);
    EXPECT_NEAR(p.rr_uy_s1, 2.7089, 5e-5);
    EXPECT_NEAR(p.rr_tu_s1, 2.3293, 5e-5);
    EXPECT_NEAR(*r.bf_u, 1.5625, 5e-5);
    EXPECT_TRUE(r.reversed);
}

TEST(SvBoundParametersM, ZikaRrTotMatchesRelabelledEnumeration) {
    const auto r = sv_bound_parameters_m(zika_learner_spec(), EstimandKind::rr_tot, 0.286, 0.004);
    EXPECT_TRUE(r.reversed);
    const auto& p = std::get<SensitivityParamsTotal>(r.params);
    const auto ref = reference::quantities(zika_learner_spec(), true);
    EXPECT_NEAR(p.rr_uy_t1, ref.rr_uy_t1, 1e-9);
    EXPECT_NEAR(p.rr_uy_t0, ref.rr_uy_t0, 1e-9);
    EXPECT_NEAR(p.rr_su_t1, ref.rr_su_t1, 1e-9);
    EXPECT_NEAR(p.rr_su_t0, ref.rr_su_t0, 1e-9);
    EXPECT_NEAR(p.rr_su_t1, 1.799800407633267, 1e-9);
    EXPECT_NEAR(p.rr_su_t0, 1.999784275521562, 1e-9);
    EXPECT_NEAR(*r.bf1 * *r.bf0, 1.8352751941593088, 1e-9);
}

TEST(SvBoundParametersM, ZeroBiasDoesNotReverse) {
    const double p = 0.3;
    const auto r = sv_bound_parameters_m(null_effect_zika(), EstimandKind::rr_sub, p, p);
    EXPECT_FALSE(r.reversed);
    EXPECT_NE(std::find(r.notes.begin(), r.notes.end(), "zero bias: no treatment reversal"), r.notes.end());
    const auto expected = sv_params_sub(evaluate_tables(null_effect_zika()));
    EXPECT_TRUE(std::get<SensitivityParamsSub>(r.params) == expected);
}

TEST(SvBoundParametersM, RiskDifferenceNotesContrast) {
    const auto r = sv_bound_parameters_m(zika_learner_spec(), EstimandKind::rd_sub, 0.286, 0.004);
    EXPECT_TRUE(r.reversed);  // 0.282 < 0.361
    EXPECT_NE(std::find(r.notes.begin(), r.notes.end(), "orientation decided on the risk-difference contrast"),
              r.notes.end());
}

TEST(SvBoundParametersM, RelativeRiskRejectsBoundaryProbabilities) {
    EXPECT_THROW(sv_bound_parameters_m(zika_learner_spec(), EstimandKind::rr_sub, 0.3, 0.0), Error);
    EXPECT_THROW(sv_bound_parameters_m(zika_learner_spec(), EstimandKind::rr_sub, 1.2, 0.1), Error);
}

TEST(ReferenceEnumeration, AgreesOnRandomSpecs) {
    gen::Rng rng(11);
    for (int i = 0; i < 50; ++i) {
        const auto s = gen::spec(rng);
        const auto t = evaluate_tables(s);
        const auto ref = reference::quantities(s);
        const auto r = causal_estimands(t);
        EXPECT_NEAR(r.beta_r, ref.beta_r, 1e-9 * ref.beta_r);
        EXPECT_NEAR(r.beta_rs, ref.beta_rs, 1e-9 * ref.beta_rs);
        EXPECT_NEAR(r.beta_ds, ref.beta_ds, 1e-12);
        const auto pt = sv_params_total(t);
        EXPECT_NEAR(pt.rr_su_t1, ref.rr_su_t1, 1e-9 * ref.rr_su_t1);
        EXPECT_NEAR(pt.rr_su_t0, ref.rr_su_t0, 1e-9 * ref.rr_su_t0);
        const auto ps = sv_params_sub(t);
        EXPECT_NEAR(ps.rr_tu_s1, ref.rr_tu_s1, 1e-9 * ref.rr_tu_s1);
        EXPECT_NEAR(ps.rr_uy_s1, ref.rr_uy_s1, 1e-9 * ref.rr_uy_s1);
    }
}
