#include "chedra/io.hpp"
#include "chedra/service.hpp"

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>

using namespace chedra;
using nlohmann::json;

namespace {

std::string read_data(const char* name) {
  std::ifstream f(std::string(CHEDRA_TEST_DATA_DIR "/") + name, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string create(DesignService& svc, const char* name) {
  const HttpResponse r = svc.create_net(read_data(name));
  EXPECT_EQ(r.status, 201) << r.body;
  return json::parse(r.body)["id"].get<std::string>();
}

}  // namespace

TEST(Service, CreateE1) {
  DesignService svc;
  const HttpResponse r = svc.create_net(read_data("e1.json"));
  ASSERT_EQ(r.status, 201) << r.body;
  const json doc = json::parse(r.body);
  EXPECT_EQ(doc["id"].get<std::string>().size(), 16u);
  EXPECT_EQ(doc["classification"]["label"], "Scaling_1a");
  EXPECT_TRUE(doc["classification"]["flexible"].get<bool>());
  ASSERT_EQ(doc["linkage_range"].size(), 1u);
  EXPECT_EQ(doc["linkage_range"][0]["lo"].get<double>(), 0.0);
  EXPECT_NEAR(doc["linkage_range"][0]["hi"].get<double>(), 2 * std::sqrt(2.0), 1e-9);
  EXPECT_EQ(doc["range"].size(), 1u);
  EXPECT_EQ(doc["geometry"]["a"].get<double>(), 2.0);
  EXPECT_TRUE(doc["geometry"]["report"]["pass"].get<bool>());
  EXPECT_EQ(doc["geometry"]["rows"].size(), 4u);
  EXPECT_EQ(svc.session_count(), 1u);
}

TEST(Service, CreateErrors) {
  DesignService svc;
  const HttpResponse bad = svc.create_net("{\"a_ref\": 2");
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(json::parse(bad.body)["error"], "SchemaError");

  std::string text = read_data("e1.json");
  text.replace(text.find("\"u\": 2"), 6, "\"u\": 0");
  const HttpResponse inv = svc.create_net(text);
  EXPECT_EQ(inv.status, 400);
  EXPECT_EQ(json::parse(inv.body)["error"], "InvariantError");

  const HttpResponse rigid = svc.create_net(read_data("e1_perturbed.json"));
  EXPECT_EQ(rigid.status, 422);
  const json doc = json::parse(rigid.body);
  EXPECT_EQ(doc["error"], "NotFlexible");
  EXPECT_EQ(doc["classification"]["label"], "NotFlexible");
  EXPECT_GT(doc["classification"]["max_coeff_residual"].get<double>(), 1e-6);
  EXPECT_EQ(svc.session_count(), 0u);

  const HttpResponse allowed = svc.create_net(read_data("e1_perturbed.json"), {{"allow_rigid", "true"}});
  EXPECT_EQ(allowed.status, 201) << allowed.body;
  EXPECT_FALSE(json::parse(allowed.body)["classification"]["flexible"].get<bool>());
  // the cached rigid session still needs the flag
  EXPECT_EQ(svc.create_net(read_data("e1_perturbed.json")).status, 422);
}

TEST(Service, GetNet) {
  DesignService svc;
  const std::string id = create(svc, "e2.json");
  const HttpResponse at_ref = svc.get_net(id, {});
  ASSERT_EQ(at_ref.status, 200);
  EXPECT_EQ(json::parse(at_ref.body)["a"].get<double>(), 2.0);

  const HttpResponse moved = svc.get_net(id, {{"a", "1.9"}});
  ASSERT_EQ(moved.status, 200);
  const GeometrySnapshot g = parse_geometry(moved.body);
  EXPECT_EQ(g.a, 1.9);
  EXPECT_TRUE(json::parse(moved.body)["report"]["pass"].get<bool>());

  EXPECT_EQ(svc.get_net("0000000000000000", {}).status, 404);
  EXPECT_EQ(svc.get_net(id, {{"a", "abc"}}).status, 400);

  const HttpResponse far = svc.get_net(id, {{"a", "1.0"}});
  EXPECT_EQ(far.status, 409);
  const json doc = json::parse(far.body);
  EXPECT_EQ(doc["error"], "OutOfRange");
  EXPECT_NEAR(doc["nearest"].get<double>(), std::sqrt(3.0), 1e-9);
}

TEST(Service, Frames) {
  DesignService svc;
  const std::string id = create(svc, "e1.json");
  const HttpResponse one = svc.get_frames(id, {{"n", "1"}});
  ASSERT_EQ(one.status, 200);
  EXPECT_EQ(json::parse(one.body).size(), 1u);

  const HttpResponse many = svc.get_frames(id, {{"n", "20"}});
  ASSERT_EQ(many.status, 200);
  const json frames = json::parse(many.body);
  ASSERT_EQ(frames.size(), 20u);
  double prev = -1.0;
  for (const json& f : frames) {
    EXPECT_TRUE(f["report"]["pass"].get<bool>());
    EXPECT_GT(f["a"].get<double>(), prev);
    prev = f["a"].get<double>();
  }

  const HttpResponse explicit_bounds = svc.get_frames(id, {{"from", "1"}, {"to", "2"}, {"n", "3"}});
  ASSERT_EQ(explicit_bounds.status, 200);
  const json e = json::parse(explicit_bounds.body);
  EXPECT_EQ(e[0]["a"].get<double>(), 1.0);
  EXPECT_EQ(e[1]["a"].get<double>(), 1.5);
  EXPECT_EQ(e[2]["a"].get<double>(), 2.0);

  EXPECT_EQ(svc.get_frames(id, {{"from", "2"}, {"to", "1"}}).status, 400);
  EXPECT_EQ(svc.get_frames(id, {{"n", "0"}}).status, 400);
  EXPECT_EQ(svc.get_frames(id, {{"n", "2.5"}}).status, 400);
  EXPECT_EQ(svc.get_frames(id, {{"from", "1"}, {"to", "5"}}).status, 409);
  EXPECT_EQ(svc.get_frames("ffffffffffffffff", {}).status, 404);
}

TEST(Service, Parallel) {
  DesignService svc;
  const std::string id = create(svc, "e1.json");
  const HttpResponse unit = svc.create_parallel(id, R"({"row_scales":[1,1,1],"col_scales":[1,1,1]})");
  ASSERT_EQ(unit.status, 201) << unit.body;
  const json u = json::parse(unit.body);
  EXPECT_EQ(u["master_id"], id);
  EXPECT_NE(u["id"], id);
  // unit scales reproduce the master geometry
  const json master = json::parse(svc.get_net(id, {{"a", "1.7"}}).body);
  const json copy = json::parse(svc.get_net(u["id"].get<std::string>(), {{"a", "1.7"}}).body);
  for (std::size_t r = 0; r < master["rows"].size(); ++r) {
    for (std::size_t c = 0; c < master["rows"][r].size(); ++c) {
      for (int k = 0; k < 3; ++k) {
        EXPECT_NEAR(master["rows"][r][c][k].get<double>(), copy["rows"][r][c][k].get<double>(), 1e-12);
      }
    }
  }
  EXPECT_TRUE(copy["report"]["pass"].get<bool>());

  const HttpResponse scaled = svc.create_parallel(id, R"({"row_scales":[1.3,0.8,1.1],"col_scales":[0.9,1.2,1.0]})");
  ASSERT_EQ(scaled.status, 201);
  const std::string sid = json::parse(scaled.body)["id"];
  const json frames = json::parse(svc.get_frames(sid, {{"n", "10"}}).body);
  for (const json& f : frames) EXPECT_TRUE(f["report"]["pass"].get<bool>());

  const HttpResponse zero = svc.create_parallel(id, R"({"row_scales":[1,0,1],"col_scales":[1,1,1]})");
  EXPECT_EQ(zero.status, 422);
  EXPECT_EQ(json::parse(zero.body)["error"], "ClosureFailure");
  EXPECT_EQ(svc.create_parallel(id, R"({"row_scales":[1,1],"col_scales":[1,1,1]})").status, 400);
  EXPECT_EQ(svc.create_parallel(id, R"({"row_scales":[1,1,1]})").status, 400);
  EXPECT_EQ(svc.create_parallel(id, "nope").status, 400);
  EXPECT_EQ(svc.create_parallel("0123456789abcdef", "{}").status, 404);
}

TEST(Service, ParallelFromSpecBlock) {
  DesignService svc;
  const HttpResponse r = svc.create_net(read_data("e1_parallel.json"));
  ASSERT_EQ(r.status, 201) << r.body;
  EXPECT_TRUE(json::parse(r.body)["geometry"]["report"]["pass"].get<bool>());
}

TEST(Service, Validate) {
  DesignService svc;
  const std::string id = create(svc, "e3.json");
  const HttpResponse r = svc.validate(id, {});
  ASSERT_EQ(r.status, 200);
  const json doc = json::parse(r.body);
  EXPECT_TRUE(doc["report"]["pass"].get<bool>());
  EXPECT_FALSE(doc["boundary"].get<bool>());
  EXPECT_EQ(svc.validate(id, {{"a", "2.0"}}).status, 409);
}

TEST(Service, RepeatedRequestsAreIdentical) {
  DesignService svc;
  const HttpResponse a = svc.create_net(read_data("pnet_chain.json"));
  const HttpResponse b = svc.create_net(read_data("pnet_chain.json"));
  EXPECT_EQ(a.status, 201);
  EXPECT_EQ(a.body, b.body);
  EXPECT_EQ(svc.session_count(), 1u);
  DesignService other;
  EXPECT_EQ(other.create_net(read_data("pnet_chain.json")).body, a.body);
  const std::string id = json::parse(a.body)["id"];
  EXPECT_EQ(svc.get_frames(id, {{"n", "4"}}).body, svc.get_frames(id, {{"n", "4"}}).body);
}

TEST(Service, LruCap) {
  ServiceConfig cfg;
  cfg.max_sessions = 2;
  DesignService svc(cfg);
  const std::string e1 = create(svc, "e1.json");
  const std::string e2 = create(svc, "e2.json");
  EXPECT_EQ(svc.get_net(e1, {}).status, 200);  // e1 is now most recent
  const std::string e3 = create(svc, "e3.json");
  EXPECT_EQ(svc.session_count(), 2u);
  EXPECT_EQ(svc.get_net(e2, {}).status, 404);
  EXPECT_EQ(svc.get_net(e1, {}).status, 200);
  EXPECT_EQ(svc.get_net(e3, {}).status, 200);
}

TEST(HttpServerTest, EndToEnd) {
  DesignService svc;
  HttpServer server(svc);
  const int port = server.bind("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  std::thread th([&] { server.listen(); });

  httplib::Client cli("127.0.0.1", port);
  cli.set_connection_timeout(5);
  httplib::Result created;
  for (int attempt = 0; attempt < 50 && !created; ++attempt) {
    created = cli.Post("/api/nets", read_data("e1.json"), "application/json");
    if (!created) std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  EXPECT_EQ(created->get_header_value("Access-Control-Allow-Origin"), "*");
  EXPECT_EQ(created->get_header_value("Content-Type"), "application/json");
  const std::string id = json::parse(created->body)["id"];

  auto got = cli.Get(("/api/nets/" + id + "?a=1.5").c_str());
  ASSERT_TRUE(got);
  EXPECT_EQ(got->status, 200);
  EXPECT_EQ(json::parse(got->body)["a"].get<double>(), 1.5);

  auto frames = cli.Get(("/api/nets/" + id + "/frames?n=5").c_str());
  ASSERT_TRUE(frames);
  EXPECT_EQ(json::parse(frames->body).size(), 5u);

  auto par = cli.Post(("/api/nets/" + id + "/parallel").c_str(), R"({"row_scales":[1.3,0.8,1.1],"col_scales":[0.9,1.2,1.0]})",
                      "application/json");
  ASSERT_TRUE(par);
  EXPECT_EQ(par->status, 201);

  auto val = cli.Get(("/api/nets/" + id + "/validate?a=1").c_str());
  ASSERT_TRUE(val);
  EXPECT_EQ(val->status, 200);

  auto missing = cli.Get("/api/nets/deadbeefdeadbeef");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);

  auto far = cli.Get(("/api/nets/" + id + "?a=9").c_str());
  ASSERT_TRUE(far);
  EXPECT_EQ(far->status, 409);

  auto bad = cli.Post("/api/nets", "{}", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);

  auto pre = cli.Options("/api/nets");
  ASSERT_TRUE(pre);
  EXPECT_EQ(pre->status, 204);
  EXPECT_NE(pre->get_header_value("Access-Control-Allow-Methods").find("POST"), std::string::npos);

  server.stop();
  th.join();
}
