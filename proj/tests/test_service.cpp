// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <thread>

#include "loom/compiler.hpp"
#include "loom/service.hpp"
#include "loom/session.hpp"

#include <httplib.h>
#include <json.hpp>

using namespace loom;
using json = nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class ServiceTest : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        svc_ = new Service();
        port_ = svc_->bind("127.0.0.1", 0);
        ASSERT_GT(port_, 0);
        thread_ = new std::thread([] { svc_->listen(); });
        svc_->wait_until_ready();
    }
    static void TearDownTestSuite() {
        svc_->stop();
        thread_->join();
        delete thread_;
        delete svc_;
    }

    static json post(const std::string& path, const json& body, int* status = nullptr) {
        httplib::Client cli("127.0.0.1", port_);
        cli.set_read_timeout(600, 0);
        auto res = cli.Post(path, body.dump(), "application/json");
        if (!res) throw std::runtime_error("no response from " + path);
        if (status) *status = res->status;
        return json::parse(res->body);
    }
    static json get(const std::string& path, int* status = nullptr) {
        httplib::Client cli("127.0.0.1", port_);
        auto res = cli.Get(path);
        if (!res) throw std::runtime_error("no response from " + path);
        if (status) *status = res->status;
        return json::parse(res->body);
    }

    static inline Service* svc_ = nullptr;
    static inline std::thread* thread_ = nullptr;
    static inline int port_ = 0;
};

const std::string& snake_source() {
    static const std::string s = slurp(std::string(LOOM_PROGRAMS_DIR) + "/snake.c");
    return s;
}

int slot_of(const json& symbols, const std::string& name) {
    for (const auto& s : symbols) {
        if (s["name"] == name) return s["slot"].get<int>();
    }
    return -1;
}

}  // namespace

TEST_F(ServiceTest, CompileReturnsProgram) {
    int status = 0;
    const json r = post("/compile", {{"source", snake_source()}, {"profile", "1024"}}, &status);
    EXPECT_EQ(status, 200);
    EXPECT_TRUE(r["ok"].get<bool>());
    EXPECT_EQ(r["profile"], "155x1024");
    EXPECT_NEAR(r["instructions"].get<int>(), 210, 210 * 0.15);
    EXPECT_GE(slot_of(r["symbols"], "key"), 0);
    EXPECT_NE(r["program"].get<std::string>().find("loom-prog v1"), std::string::npos);
}

TEST_F(ServiceTest, CompileErrorIsStructured) {
    int status = 0;
    const json r = post("/compile", {{"source", "int main() {\n  y = 2;\n}"}}, &status);
    EXPECT_EQ(status, 422);
    EXPECT_FALSE(r["ok"].get<bool>());
    ASSERT_EQ(r["diagnostics"].size(), 1u);
    const json& d = r["diagnostics"][0];
    EXPECT_EQ(d["line"], 2);
    EXPECT_EQ(d["col"], 3);
    EXPECT_EQ(d["kind"], "semantic");
    EXPECT_NE(d["text"].get<std::string>().find("input:2:3: error:"), std::string::npos);
}

TEST_F(ServiceTest, BadRequests) {
    int status = 0;
    post("/compile", {{"profile", "1024"}}, &status);
    EXPECT_EQ(status, 400);
    post("/session", {{"source", "int main() {}"}, {"engine", "abacus"}}, &status);
    EXPECT_EQ(status, 400);
    get("/session/nope/state", &status);
    EXPECT_EQ(status, 404);
    httplib::Client cli("127.0.0.1", port_);
    auto res = cli.Post("/compile", "{not json", "application/json");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 400);
}

// Three Snake ticks with key presses, checked against a local interpreter
// session fed the same inputs.
TEST_F(ServiceTest, SnakeTicksMatchInterpreter) {
    const json created = post("/session", {{"source", snake_source()}, {"profile", "1024"}, {"engine", "interp"}});
    ASSERT_TRUE(created["ok"].get<bool>()) << created.dump();
    const std::string id = created["id"];
    const int key = slot_of(created["symbols"], "key");
    ASSERT_GE(key, 0);

    const auto cfg = profile_1024();
    const CompileResult cr = compile(snake_source(), cfg);
    Session ref(cfg, cr.program, EngineKind::Interp);
    for (int k : {0, 3, 2}) {
        const json r = post("/session/" + id + "/tick", {{"patches", json::array({{{"slot", key}, {"value", k}}})}});
        const TickReport want = ref.tick({{key, k}}, 10'000);
        EXPECT_TRUE(r["halted"].get<bool>());
        EXPECT_EQ(r["steps"].get<std::uint64_t>(), want.steps);
        EXPECT_EQ(r["memory"].get<std::vector<std::int64_t>>(), ref.memory());
    }
    const json st = get("/session/" + id + "/state");
    EXPECT_EQ(st["memory"].get<std::vector<std::int64_t>>(), ref.memory());
    EXPECT_EQ(st["pc"], 0);
}

TEST_F(ServiceTest, SessionsAreIsolated) {
    const std::string src = "int k; int total; int main() { total += k; }";
    const json a = post("/session", {{"source", src}, {"profile", "512"}});
    const json b = post("/session", {{"source", src}, {"profile", "512"}});
    ASSERT_NE(a["id"], b["id"]);
    const int k = slot_of(a["symbols"], "k");
    const int total = slot_of(a["symbols"], "total");
    std::thread ta([&] {
        for (int i = 0; i < 20; ++i) post("/session/" + a["id"].get<std::string>() + "/tick", {{"patches", json::array({{{"slot", k}, {"value", 1}}})}});
    });
    std::thread tb([&] {
        for (int i = 0; i < 20; ++i) post("/session/" + b["id"].get<std::string>() + "/tick", {{"patches", json::array({{{"slot", k}, {"value", 2}}})}});
    });
    ta.join();
    tb.join();
    EXPECT_EQ(get("/session/" + a["id"].get<std::string>() + "/state")["memory"][total], 20);
    EXPECT_EQ(get("/session/" + b["id"].get<std::string>() + "/state")["memory"][total], 40);
}

TEST_F(ServiceTest, ResetAndDelete) {
    const json s = post("/session", {{"source", "int n; int main() { n++; }"}, {"profile", "512"}});
    const std::string id = s["id"];
    const int n = slot_of(s["symbols"], "n");
    post("/session/" + id + "/tick", json::object());
    post("/session/" + id + "/tick", json::object());
    EXPECT_EQ(get("/session/" + id + "/state")["memory"][n], 2);
    const json r = post("/session/" + id + "/reset", json::object());
    EXPECT_EQ(r["memory"][n], 0);
    EXPECT_EQ(r["total_steps"], 0);
    httplib::Client cli("127.0.0.1", port_);
    auto del = cli.Delete("/session/" + id);
    ASSERT_TRUE(del);
    EXPECT_EQ(del->status, 200);
    int status = 0;
    get("/session/" + id + "/state", &status);
    EXPECT_EQ(status, 404);
}

TEST_F(ServiceTest, SessionFromProgramTextOnSparse) {
    const json c = post("/compile", {{"source", "int x = 5; int main() { x++; }"}, {"profile", "512"}});
    const json s = post("/session", {{"program", c["program"]}, {"engine", "sparse"}});
    ASSERT_TRUE(s["ok"].get<bool>()) << s.dump();
    EXPECT_EQ(s["engine"], "sparse");
    const int x = slot_of(s["symbols"], "x");
    ASSERT_GE(x, 0);
    const json r = post("/session/" + s["id"].get<std::string>() + "/tick", json::object());
    EXPECT_TRUE(r["halted"].get<bool>());
    EXPECT_EQ(r["memory"][x], 6);
}

TEST_F(ServiceTest, InspectorSlice) {
    const json s = post("/session", {{"source", "int x; int main() { x++; }"}, {"profile", "512"}});
    const std::string id = s["id"];
    const auto cfg = profile_512();
    const RowLayout L(cfg);
    // Position code at column 0 and the indicator over the first s columns.
    const json pos = get("/session/" + id + "/state?rows=" + std::to_string(L.pos) + ":" + std::to_string(L.pos + cfg.ell) + "&cols=0:1");
    for (const auto& row : pos["matrix"]["values"]) EXPECT_EQ(row[0].get<double>(), 0.0);
    const json ind = get("/session/" + id + "/state?rows=" + std::to_string(L.ind) + "&cols=0:64");
    const auto& vals = ind["matrix"]["values"][0];
    ASSERT_EQ(vals.size(), 64u);
    for (int c = 0; c < 64; ++c) EXPECT_EQ(vals[static_cast<std::size_t>(c)].get<double>(), c < cfg.s ? 1.0 : 0.0) << c;
    EXPECT_FALSE(ind["matrix"]["regions"].empty());
    int status = 0;
    get("/session/" + id + "/state?rows=0:&cols=0:", &status);
    EXPECT_EQ(status, 400);  // too large
}
