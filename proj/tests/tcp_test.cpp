#include <gtest/gtest.h>

#include <thread>

#include "speared/service.hpp"
#include "speared/tcp.hpp"

namespace speared {
namespace {

using namespace std::chrono_literals;

Scene cube_scene() {
  Scene s;
  s.robot_base = {{0, 0, -250}, 0};
  s.objects.push_back({"cube", {200, 0, 12.5}, {25, 25, 25}, "yellow", false});
  return s;
}

class TcpTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ServerOptions opts;
    opts.port = 0;
    opts.tick_period = 1ms;
    server = std::make_unique<Server>(service, opts);
    server->start();
  }
  void TearDown() override { server->stop(); }

  std::unique_ptr<LineClient> client() {
    auto c = std::make_unique<LineClient>();
    c->connect("127.0.0.1", server->port());
    return c;
  }

  static Json next(LineClient& c) {
    auto f = c.recv_frame(5s);
    if (!f) throw std::runtime_error("timed out waiting for a frame");
    return Json::parse(*f);
  }

  MessageService service{Simulator(default_arm_profile(), cube_scene())};
  std::unique_ptr<Server> server;
};

TEST_F(TcpTest, CallAndReply) {
  auto c = client();
  c->send({"call", "1", "service:state.idle", Json::object()});
  const Json r = next(*c);
  EXPECT_EQ(r["kind"], "reply");
  EXPECT_EQ(r["id"], "1");
  EXPECT_EQ(r["payload"]["idle"], true);
}

TEST_F(TcpTest, MalformedFrameKeepsConnectionOpen) {
  auto c = client();
  c->send_frame("this is not json");
  const Json err = next(*c);
  EXPECT_EQ(err["kind"], "error");
  EXPECT_EQ(err["payload"]["code"], "bad_payload");
  c->send({"call", "2", "service:state.joints", Json::object()});
  EXPECT_EQ(next(*c)["kind"], "reply");
}

TEST_F(TcpTest, SecondServerOnSamePortFailsToBind) {
  MessageService other{Simulator(default_arm_profile(), Scene{})};
  ServerOptions opts;
  opts.port = server->port();
  Server second(other, opts);
  EXPECT_THROW(second.start(), BindError);
}

TEST_F(TcpTest, ExecuteStreamsEventsUntilIdle) {
  auto c = client();
  c->send({"subscribe", "s", "topic:idle", Json::object()});
  EXPECT_EQ(next(*c)["payload"]["idle"], true);
  c->send({"call", "x", "service:execute",
           {{"program", program_to_json(Program{"p", {Move{200, 0, 330}, Move{180, 50, 300}}})}}});
  std::vector<Json> frames;
  while (true) {
    frames.push_back(next(*c));
    if (frames.back()["channel"] == "topic:idle" && frames.back()["payload"]["idle"] == true) break;
  }
  ASSERT_GE(frames.size(), 3u);
  // busy notification is published before the reply that triggered it
  EXPECT_EQ(frames[0]["payload"]["idle"], false);
  EXPECT_EQ(frames[1]["kind"], "reply");
  EXPECT_LT(distance(service.simulator().tip(), {180, 50, 300}), 1e-6);
}

TEST_F(TcpTest, ConcurrentWritersSerializeThroughTheStore) {
  constexpr int kClients = 3;
  std::vector<std::thread> threads;
  std::atomic<int> conflicts{0};
  for (int k = 0; k < kClients; ++k) {
    threads.emplace_back([&, k] {
      auto c = client();
      std::uint64_t rev = 0;
      for (int attempt = 0; attempt < 50; ++attempt) {
        const Json p = program_to_json(Program{"w" + std::to_string(k), {Suction{k % 2 == 0}}});
        c->send({"call", "s", "service:code.store", {{"program", p}, {"expected_revision", rev}}});
        const Json r = next(*c);
        if (r["kind"] == "reply") return;
        ++conflicts;
        rev = r["payload"]["current_revision"].get<std::uint64_t>();
      }
    });
  }
  for (auto& t : threads) t.join();
  const auto entry = server->with_service([](MessageService& s) { return s.code_store().load(); });
  EXPECT_EQ(entry.revision, 3u);
  EXPECT_LE(conflicts.load(), 3);
}

TEST_F(TcpTest, OversizedFrameIsRejected) {
  auto c = client();
  c->send_frame(std::string(kMaxFrameBytes + 10, 'x'));
  EXPECT_EQ(next(*c)["payload"]["code"], "bad_payload");
  c->send({"call", "after", "service:state.idle", Json::object()});
  EXPECT_EQ(next(*c)["id"], "after");
}

TEST_F(TcpTest, DisconnectingClientDoesNotDisturbOthers) {
  auto a = client();
  auto b = client();
  a->send({"subscribe", "j", "topic:joint_states", Json::object()});
  next(*a);
  a->close();
  b->send({"call", "1", "service:move_to", {{"x", 200}, {"y", 0}, {"z", 330}}});
  EXPECT_EQ(next(*b)["kind"], "reply");
  b->send({"call", "2", "service:state.idle", Json::object()});
  EXPECT_EQ(next(*b)["id"], "2");
}

}  // namespace
}  // namespace speared
