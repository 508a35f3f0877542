#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <thread>

#include "refnav/http_server.hpp"
#include "refnav/service.hpp"
#include "support/synthetic.hpp"

using namespace refnav;
using nlohmann::json;

namespace {

Clock fixed_clock() {
  return [] { return std::string("2024-02-03T04:05:06.007Z"); };
}

}  // namespace

class ServiceTest : public ::testing::Test {
 protected:
  ServiceTest() {
    std::mt19937_64 rng(101);
    corpus = fixtures::random_corpus(rng, 40, *th, 1, 5);
    service = std::make_unique<Service>(th, corpus, albums, SessionConfig{}, fixed_clock());
  }

  ApiResponse get(const std::string& path, std::map<std::string, std::string> params = {}) {
    return service->handle({"GET", path, std::move(params), ""});
  }
  ApiResponse post(const std::string& path, const json& body) { return service->handle({"POST", path, {}, body.dump()}); }

  std::string new_session(const json& body = json::object()) {
    auto r = post("/sessions", body);
    EXPECT_EQ(r.status, 201);
    return r.body["id"].get<std::string>();
  }
  ApiResponse step(const std::string& sid, json body) { return post("/sessions/" + sid + "/transitions", body); }

  static std::string code(const ApiResponse& r) { return r.body["error"]["code"].get<std::string>(); }

  std::string image(std::size_t i) const { return corpus->records()[i].id; }

  std::shared_ptr<const Thesaurus> th = fixtures::make_thesaurus();
  std::shared_ptr<const Corpus> corpus;
  std::shared_ptr<AlbumStore> albums = std::make_shared<AlbumStore>();
  std::unique_ptr<Service> service;
};

TEST_F(ServiceTest, HealthAndCatalogue) {
  auto h = get("/health");
  EXPECT_EQ(h.status, 200);
  EXPECT_EQ(h.body["corpus_size"], 40);
  EXPECT_EQ(h.body["thesaurus_version"], "test-1");
  EXPECT_EQ(h.body["corpus_checksum"], corpus_checksum(*corpus));
  EXPECT_EQ(get("/thesaurus").body.dump(), to_json(*th).dump());

  auto page = get("/images", {{"offset", "35"}, {"limit", "10"}});
  EXPECT_EQ(page.body["total"], 40);
  EXPECT_EQ(page.body["images"].size(), 5u);
  EXPECT_EQ(page.body["images"][0]["id"], image(35));
  EXPECT_EQ(get("/images", {{"limit", "x"}}).status, 400);
  EXPECT_EQ(get("/images/" + image(3)).body.dump(), to_json(corpus->records()[3]).dump());
  EXPECT_EQ(code(get("/images/nope")), "UnknownImage");
  EXPECT_EQ(get("/images/nope").status, 404);
  EXPECT_EQ(code(get("/nowhere")), "NotFound");
}

TEST_F(ServiceTest, SessionsAreSequentialAndConfigurable) {
  EXPECT_EQ(new_session(), "session-000001");
  auto sid = new_session({{"config", {{"mosaic_size", 4}, {"restriction", {"c0", "c1"}}}}});
  EXPECT_EQ(sid, "session-000002");
  auto s = get("/sessions/" + sid).body;
  EXPECT_EQ(s["config"]["mosaic_size"], 4);
  EXPECT_EQ(s["config"]["graph_k"], 8);
  EXPECT_EQ(post("/sessions", {{"config", {{"mosaic_size", "big"}}}}).status, 400);
  EXPECT_EQ(code(post("/sessions", {{"config", {{"restriction", {"c99"}}}}})), "UnknownCategory");
  EXPECT_EQ(code(get("/sessions/session-999999")), "UnknownSession");
  EXPECT_EQ(code(service->handle({"POST", "/sessions", {}, "{oops"})), "InvalidArgument");
}

TEST_F(ServiceTest, TransitionsMatchEngine) {
  auto sid = new_session();
  Navigator nav(th, corpus, std::make_shared<AlbumStore>(), fixed_clock());
  auto local = nav.new_session(sid);

  auto r = step(sid, {{"letter", "b"}, {"image", image(0)}});
  ASSERT_EQ(r.status, 200);
  nav.mosaic_from_image(local, image(0));
  auto tiles = local.mosaic->tiles;
  json judgments = {{tiles[0], "positive"}, {tiles[1], "negative"}, {tiles[2], "neutral"}};
  r = step(sid, {{"letter", "k"}, {"judgments", judgments}});
  ASSERT_EQ(r.status, 200) << r.body.dump();
  nav.refresh_mosaic(local, {{tiles[0], Judgment::Positive}, {tiles[1], Judgment::Negative}, {tiles[2], Judgment::Neutral}});
  r = step(sid, {{"letter", "h"}, {"origin", "groups"}});
  nav.graph_from(local, Origin::Groups);
  r = step(sid, {{"letter", "d"}, {"node", tiles[0]}});
  nav.expand_node(local, tiles[0]);
  EXPECT_EQ(r.body["session"].dump(), to_json(local).dump());
  EXPECT_TRUE(r.body["warnings"].empty());

  EXPECT_EQ(get("/sessions/" + sid + "/ranked").body.dump(), to_json(*local.ranked).dump());
  EXPECT_EQ(get("/sessions/" + sid + "/mosaic").body.dump(), to_json(*local.mosaic).dump());
  EXPECT_EQ(get("/sessions/" + sid + "/groups").body.dump(), to_json(local.groups).dump());
  EXPECT_EQ(get("/sessions/" + sid + "/graph").body.dump(), to_json(*local.graph).dump());
}

TEST_F(ServiceTest, AlbumsThroughTheApi) {
  auto sid = new_session();
  step(sid, {{"letter", "a"}, {"image", image(1)}});
  auto created = post("/albums", {{"session", sid}, {"origin", "ranked"}, {"name", "n"}, {"annotation", "a"}});
  ASSERT_EQ(created.status, 201) << created.body.dump();
  auto id = created.body["album"]["id"].get<std::string>();
  EXPECT_EQ(id, "album-000001");
  EXPECT_EQ(get("/albums/" + id).body, created.body["album"]);
  EXPECT_EQ(get("/albums").body.size(), 1u);
  EXPECT_EQ(code(get("/albums/album-000404")), "UnknownAlbum");

  auto other = new_session();
  auto r = step(other, {{"letter", "j"}, {"album", id}});
  EXPECT_EQ(r.status, 200);
  EXPECT_FALSE(r.body["session"]["ranked"].is_null());
  EXPECT_EQ(code(post("/albums", {{"session", other}, {"origin", "groups"}})), "EmptySource");
}

TEST_F(ServiceTest, ErrorsCarryStableCodes) {
  auto sid = new_session();
  auto expect = [&](json body, const char* expected, int status) {
    auto r = step(sid, body);
    EXPECT_EQ(r.status, status) << body.dump();
    EXPECT_EQ(code(r), expected) << body.dump();
  };
  expect({{"letter", "z"}}, "InvalidArgument", 400);
  expect({{"image", "x"}}, "InvalidArgument", 400);
  expect({{"letter", "a"}}, "InvalidArgument", 400);
  expect({{"letter", "a"}, {"image", "ghost"}}, "UnknownImage", 404);
  expect({{"letter", "d"}, {"node", image(0)}}, "NoGraph", 409);
  expect({{"letter", "e"}, {"source", "ranked"}}, "NoSource", 409);
  expect({{"letter", "e"}, {"source", "sideways"}}, "InvalidArgument", 400);
  expect({{"letter", "f"}}, "NoMosaic", 409);
  expect({{"letter", "g"}}, "NoRankedList", 409);
  expect({{"letter", "h"}, {"origin", "mosaic"}}, "NoSource", 409);
  expect({{"letter", "h"}, {"origin", "groups"}}, "EmptySource", 409);
  expect({{"letter", "j"}, {"album", "album-000404"}}, "UnknownAlbum", 404);
  expect({{"letter", "k"}}, "NoMosaic", 409);
  step(sid, {{"letter", "c"}, {"image", image(0)}});
  expect({{"letter", "d"}, {"node", "ghost"}}, "UnknownNode", 404);
  step(sid, {{"letter", "b"}, {"image", image(0)}});
  expect({{"letter", "k"}, {"judgments", {{image(0), "sideways"}}}}, "InvalidArgument", 400);

  auto stale = albums->create({"", "gone", "", Provenance::Groups, "t", {"ghost"}});
  expect({{"letter", "j"}, {"album", stale.id}}, "AlbumFullyStale", 409);

  // A failed transition leaves the session as it was.
  auto before = get("/sessions/" + sid).body;
  step(sid, {{"letter", "a"}, {"image", "ghost"}});
  EXPECT_EQ(get("/sessions/" + sid).body, before);
}

TEST_F(ServiceTest, ViolationReportsAreStructured) {
  auto r = error_response(Error(ErrorCode::WeightOutOfRange, "bad corpus",
                                {{ErrorCode::WeightOutOfRange, "img-1", "t.x", 7, "weight 7 outside 1..4"}}));
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(r.body["error"]["detail"]["violations"][0]["weight"], 7);
  EXPECT_EQ(r.body["error"]["detail"]["violations"][0]["record"], "img-1");
}

TEST_F(ServiceTest, ConcurrentTransitionsOnOneSessionSerialize) {
  auto sid = new_session();
  step(sid, {{"letter", "a"}, {"image", image(0)}});
  json left = {{"letter", "b"}, {"image", image(5)}};
  json right = {{"letter", "c"}, {"image", image(9)}};

  auto serial = [&](const json& first, const json& second) {
    Navigator nav(th, corpus, std::make_shared<AlbumStore>(), fixed_clock());
    auto s = nav.new_session(sid);
    nav.rank_from_image(s, image(0));
    for (const auto* b : {&first, &second}) {
      Session copy = s;
      apply_transition(nav, copy, *b);
      s = copy;
    }
    return to_json(s).dump();
  };
  auto lr = serial(left, right);
  auto rl = serial(right, left);

  for (int round = 0; round < 20; ++round) {
    auto sid2 = new_session();
    step(sid2, {{"letter", "a"}, {"image", image(0)}});
    std::thread t1([&] { step(sid2, left); });
    std::thread t2([&] { step(sid2, right); });
    t1.join();
    t2.join();
    auto got = get("/sessions/" + sid2).body;
    got["id"] = sid;
    auto dumped = got.dump();
    EXPECT_TRUE(dumped == lr || dumped == rl);
  }
}

TEST_F(ServiceTest, DistinctSessionsRunInParallel) {
  std::vector<std::string> ids;
  for (int i = 0; i < 8; ++i) ids.push_back(new_session());
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    threads.emplace_back([&, i] {
      step(ids[i], {{"letter", "b"}, {"image", image(i)}});
      step(ids[i], {{"letter", "k"}});
    });
  }
  for (auto& t : threads) t.join();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto s = get("/sessions/" + ids[i]).body;
    EXPECT_EQ(s["transition_log"].size(), 2u);
    EXPECT_EQ(s["mosaic"]["round"], 2);
  }
}

TEST_F(ServiceTest, SnapshotsPersistToStateDirectory) {
  auto dir = std::filesystem::temp_directory_path() / ("refnav-state-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  Service persistent(th, corpus, albums, SessionConfig{}, fixed_clock(), dir);
  auto sid = persistent.handle({"POST", "/sessions", {}, ""}).body["id"].get<std::string>();
  persistent.handle({"POST", "/sessions/" + sid + "/transitions", {}, json{{"letter", "a"}, {"image", image(2)}}.dump()});
  std::ifstream in(dir / "sessions" / (sid + ".json"), std::ios::binary);
  auto text = detail::read_all(in);
  auto live = persistent.handle({"GET", "/sessions/" + sid, {}, ""}).body;
  EXPECT_EQ(text, live.dump(2) + "\n");
  EXPECT_EQ(serialize_session(parse_session(text)), text);
  std::filesystem::remove_all(dir);
}

TEST_F(ServiceTest, HttpAdapterServesTheSameApi) {
  httplib::Server server;
  mount(server, *service);
  int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto health = client.Get("/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_EQ(json::parse(health->body)["corpus_size"], 40);

  auto created = client.Post("/sessions", "{}", "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  auto sid = json::parse(created->body)["id"].get<std::string>();
  auto moved = client.Post("/sessions/" + sid + "/transitions", json{{"letter", "a"}, {"image", "ghost"}}.dump(),
                           "application/json");
  ASSERT_TRUE(moved);
  EXPECT_EQ(moved->status, 404);
  EXPECT_EQ(json::parse(moved->body)["error"]["code"], "UnknownImage");
  auto page = client.Get("/images?offset=1&limit=2");
  ASSERT_TRUE(page);
  EXPECT_EQ(json::parse(page->body)["images"].size(), 2u);

  server.stop();
  worker.join();
}
