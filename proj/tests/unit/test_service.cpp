#include <atomic>
#include <thread>
#include <vector>

#include <gtest/gtest.h>
#include <httplib.h>

#include "selbias/serialize.hpp"
#include "service.hpp"

using selbias::json;
using selbias::service::handle;
using selbias::service::Options;

namespace {

json post(const std::string& path, const json& body, int expect_status = 200) {
    const auto r = handle("POST", path, body.dump(), Options{});
    EXPECT_EQ(r.status, expect_status) << path << " " << r.body;
    return json::parse(r.body);
}

}  // namespace

TEST(Service, Health) {
    const auto r = handle("GET", "/api/health", "", Options{});
    EXPECT_EQ(r.status, 200);
    EXPECT_EQ(json::parse(r.body)["result"]["status"], "ok");
}

TEST(Service, ExampleModelRoundTrips) {
    const auto r = json::parse(handle("GET", "/api/example-model", "", Options{}).body);
    const auto spec = r.at("result").get<selbias::MStructureSpec>();
    EXPECT_EQ(spec, selbias::zika_learner_spec());
}

TEST(Service, SvParams) {
    const auto r = post("/api/sv-params", {{"estimand", "RR_sub"}, {"pY1_T1_S1", 0.286}, {"pY1_T0_S1", 0.004}});
    EXPECT_TRUE(r["ok"].get<bool>());
    EXPECT_NEAR(r["result"]["BF_U"].get<double>(), 1.5625329603872766, 1e-15);
    EXPECT_NEAR(r["result"]["params"]["rr_uy_s1"].get<double>(), 2.7088548207546244, 1e-15);
    EXPECT_TRUE(r["result"]["reversed"].get<bool>());
}

TEST(Service, SvBoundAndSharp) {
    const auto b = post("/api/sv-bound", {{"estimand", "RR_sub"}, {"rr_uy_s1", 2.71}, {"rr_tu_s1", 2.33}});
    EXPECT_NEAR(b["result"]["value"].get<double>(), 1.56, 0.005);
    const auto s = post("/api/sharp", {{"bf_u", 1.56}, {"p0", 0.27}, {"sv", 1.56}, {"af", 3.5}});
    EXPECT_EQ(s["result"]["verdict"], "sharp");
    EXPECT_EQ(s["result"]["message"], "SV bound is sharp.");
}

TEST(Service, AfBoundFromCsvAndSummary) {
    const std::string csv = "zika,mic_ceph,sel_ind\n1,1,1\n1,0,1\n0,1,1\n0,0,1\n0,1,0\n";
    const auto r = post("/api/af-bound", {{"estimand", "RR_sub"}, {"csv", csv}});
    EXPECT_DOUBLE_EQ(r["result"]["value"].get<double>(), 3.0);
    const auto s =
        post("/api/af-bound", {{"estimand", "RR_sub"}, {"pY1_T1_S1", 0.3}, {"pY1_T0_S1", 0.5}, {"pT1_S1", 0.5}});
    EXPECT_DOUBLE_EQ(s["result"]["value"].get<double>(), 3.0);
}

TEST(Service, Grid) {
    const auto r = post("/api/sharpness-grid", {{"uy_axis", {{"min", 1}, {"max", 3}, {"steps", 2}}},
                                                {"tu_axis", {{"min", 1}, {"max", 3}, {"steps", 2}}},
                                                {"p0", 0.5}});
    EXPECT_DOUBLE_EQ(r["result"]["bounds"][1][1].get<double>(), 1.8);
    post("/api/sharpness-grid",
         {{"uy_axis", {{"min", 1}, {"max", 3}, {"steps", 501}}}, {"tu_axis", {{"min", 1}, {"max", 3}, {"steps", 2}}},
          {"p0", 0.5}},
         400);
}

TEST(Service, SimulateAndSummarize) {
    const auto sim = post("/api/simulate", {{"n", 2000}, {"seed", 4}});
    const auto csv = sim["result"]["csv"].get<std::string>();
    const auto sum = post("/api/summarize", {{"csv", csv}, {"stage", 1}});
    EXPECT_EQ(sum["result"]["n_rows"], 2000);
    const auto pop = post("/api/summarize", {{"population", true}, {"stage", 0}});
    EXPECT_NEAR(pop["result"]["proportions"]["overall"]["urban"].get<double>(), 0.85, 1e-12);
    post("/api/simulate", {{"n", 2000000}}, 400);
    post("/api/simulate", {{"n", -1}}, 400);
}

TEST(Service, Estimands) {
    const auto r = post("/api/estimands", {{"stage", 2}});
    EXPECT_NEAR(r["result"]["beta_RS"].get<double>(), 88.14586656921, 1e-9);
}

TEST(Service, ErrorStatuses) {
    EXPECT_EQ(handle("POST", "/api/sv-bound", "{not json", Options{}).status, 400);
    EXPECT_EQ(handle("POST", "/api/sv-bound", "[1,2]", Options{}).status, 400);
    EXPECT_EQ(handle("GET", "/api/sv-bound", "", Options{}).status, 405);
    EXPECT_EQ(handle("POST", "/api/health", "", Options{}).status, 405);
    EXPECT_EQ(handle("POST", "/api/nope", "{}", Options{}).status, 404);
    Options tiny;
    tiny.max_body_bytes = 4;
    EXPECT_EQ(handle("POST", "/api/sv-bound", "{\"a\": 1}", tiny).status, 413);

    const auto missing = post("/api/sv-bound", {{"estimand", "RR_sub"}, {"rr_uy_s1", "x"}}, 400);
    EXPECT_EQ(missing["error"]["field"], "rr_uy_s1");
    const auto domain = post("/api/sv-bound", {{"estimand", "RR_sub"}, {"rr_uy_s1", 0.5}, {"rr_tu_s1", 2}}, 422);
    EXPECT_EQ(domain["error"]["code"], "domain_error");
    const auto unsupported = post("/api/sharp", {{"estimand", "RR_tot"}, {"bf_u", 1.5}, {"p0", 0.2}}, 422);
    EXPECT_EQ(unsupported["error"]["code"], "unsupported_estimand");
    const auto zero = post("/api/af-bound", {{"estimand", "RR_sub"}, {"pY1_T1_S1", 0.3}, {"pY1_T0_S1", 0.0}, {"pT1_S1", 0.5}}, 422);
    EXPECT_EQ(zero["error"]["field"], "pY1_T0_S1");
}

TEST(Service, ConcurrentRequestsOverSocket) {
    httplib::Server server;
    selbias::service::install(server, Options{});
    const int port = server.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port, 0);
    std::thread listener([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    std::atomic<int> good{0};
    std::vector<std::thread> clients;
    for (int i = 0; i < 8; ++i) {
        clients.emplace_back([&, i] {
            httplib::Client cli("127.0.0.1", port);
            for (int k = 0; k < 10; ++k) {
                const double uy = 1.0 + i + k;
                const json body = {{"estimand", "RR_sub"}, {"rr_uy_s1", uy}, {"rr_tu_s1", 2.0}};
                const auto res = cli.Post("/api/sv-bound", body.dump(), "application/json");
                if (!res || res->status != 200) continue;
                const double want = uy * 2.0 / (uy + 1.0);
                if (std::abs(json::parse(res->body)["result"]["value"].get<double>() - want) < 1e-12) ++good;
            }
        });
    }
    for (auto& c : clients) c.join();

    httplib::Client cli("127.0.0.1", port);
    const auto opt = cli.Options("/api/sv-bound");
    ASSERT_TRUE(opt);
    EXPECT_EQ(opt->status, 204);
    EXPECT_EQ(opt->get_header_value("Access-Control-Allow-Origin"), "*");

    server.stop();
    listener.join();
    EXPECT_EQ(good.load(), 80);
}
