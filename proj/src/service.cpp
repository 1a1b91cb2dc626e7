// SPDX-License-Identifier: Apache-2.0
#include "loom/service.hpp"

#include <atomic>
#include <map>
#include <mutex>
#include <sstream>

#include "loom/compiler.hpp"
#include "loom/session.hpp"

// After Eigen: httplib pulls in resolv.h, whose _res macro clashes with
// Eigen parameter names.
#include <httplib.h>
#include <json.hpp>

namespace loom {

using json = nlohmann::json;

namespace {

constexpr std::uint64_t kMaxTickSteps = 1'000'000;
constexpr long kMaxSliceEntries = 1 << 16;

struct SessionEntry {
    std::mutex mu;
    std::unique_ptr<Session> session;
    std::vector<SymbolInfo> symbols;
};

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& msg) {
    reply(res, status, json{{"ok", false}, {"error", msg}});
}

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    json j = json::parse(req.body);  // throws json::parse_error
    if (!j.is_object()) throw std::invalid_argument("request body must be a JSON object");
    return j;
}

json diagnostic(const CompileError& e) {
    static const char* kinds[] = {"lex", "parse", "semantic", "capacity"};
    return {{"line", e.loc().line},
            {"col", e.loc().col},
            {"kind", kinds[static_cast<int>(e.kind())]},
            {"message", e.what()},
            {"text", format_diagnostic("input", e)}};
}

json symbols_json(const std::vector<SymbolInfo>& syms) {
    json out = json::array();
    for (const auto& s : syms) out.push_back({{"name", s.name}, {"slot", s.slot}, {"size", s.size}});
    return out;
}

// "a:b" half-open, clamped to [0, limit).
std::pair<int, int> parse_range(const std::string& text, int limit) {
    int lo = 0, hi = limit;
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        lo = std::stoi(text);
        hi = lo + 1;
    } else {
        if (colon > 0) lo = std::stoi(text.substr(0, colon));
        if (colon + 1 < text.size()) hi = std::stoi(text.substr(colon + 1));
    }
    lo = std::clamp(lo, 0, limit);
    hi = std::clamp(hi, lo, limit);
    return {lo, hi};
}

}  // namespace

struct Service::Impl {
    httplib::Server srv;
    EnginePool pool;
    std::mutex mu;
    std::map<std::string, std::shared_ptr<SessionEntry>> sessions;
    std::atomic<std::uint64_t> next_id{1};

    std::shared_ptr<SessionEntry> find(const std::string& id) {
        std::lock_guard<std::mutex> g(mu);
        auto it = sessions.find(id);
        return it == sessions.end() ? nullptr : it->second;
    }

    json snapshot(const SessionEntry& e) const {
        const Session& s = *e.session;
        return {{"pc", s.pc()},
                {"halted", s.halted()},
                {"total_steps", s.total_steps()},
                {"engine", engine_kind_name(s.kind())},
                {"memory", s.memory()}};
    }

    // Interpreter sessions have no matrix of their own, so one is rebuilt
    // from the decoded memory and PC.
    json slice(const SessionEntry& e, const httplib::Request& req) const {
        const Session& s = *e.session;
        std::optional<State> rebuilt;
        const State* st = s.matrix();
        if (!st) {
            rebuilt.emplace(init_state(s.config(), s.program()));
            const auto mem = s.memory();
            for (int x = 0; x < s.config().m; ++x) write_memory(*rebuilt, x, mem[static_cast<std::size_t>(x)]);
            write_pc(*rebuilt, s.pc());
            st = &*rebuilt;
        }
        const auto [r0, r1] = parse_range(req.has_param("rows") ? req.get_param_value("rows") : "0:", st->L.d);
        const auto [c0, c1] = parse_range(req.has_param("cols") ? req.get_param_value("cols") : "0:64", s.config().n);
        if (static_cast<long>(r1 - r0) * (c1 - c0) > kMaxSliceEntries) throw std::invalid_argument("slice too large");
        json rows = json::array();
        for (int r = r0; r < r1; ++r) {
            json row = json::array();
            for (int c = c0; c < c1; ++c) row.push_back(st->X(r, c));
            rows.push_back(std::move(row));
        }
        json regions = json::array();
        for (const auto& g : st->L.regions()) regions.push_back({{"name", g.name}, {"offset", g.offset}, {"width", g.width}});
        return {{"row_offset", r0}, {"col_offset", c0}, {"values", std::move(rows)}, {"regions", std::move(regions)},
                {"d", st->L.d}, {"n", s.config().n}};
    }

    void handle_compile(const httplib::Request& req, httplib::Response& res) {
        const json body = parse_body(req);
        const MachineConfig cfg = profile_by_name(body.value("profile", std::string("1024")));
        CompileOptions opt;
        opt.use_store = body.value("store", true);
        try {
            const CompileResult r = compile(body.at("source").get<std::string>(), cfg, opt);
            std::ostringstream prog;
            write_compiled(prog, r);
            reply(res, 200,
                  {{"ok", true},
                   {"profile", cfg.name()},
                   {"program", prog.str()},
                   {"instructions", r.instruction_count()},
                   {"data", {{"variables", r.variable_slots}, {"constants", r.constant_slots}, {"temps", r.temp_slots}}},
                   {"symbols", symbols_json(r.symbols)},
                   {"warnings", r.warnings}});
        } catch (const CompileError& e) {
            reply(res, 422, {{"ok", false}, {"diagnostics", json::array({diagnostic(e)})}});
        }
    }

    void handle_create(const httplib::Request& req, httplib::Response& res) {
        const json body = parse_body(req);
        const auto kind = engine_kind_from_name(body.value("engine", std::string("interp")));
        if (!kind) return reply_error(res, 400, "engine must be interp, dense or sparse");
        auto entry = std::make_shared<SessionEntry>();
        Program program;
        MachineConfig cfg;
        if (body.contains("source")) {
            cfg = profile_by_name(body.value("profile", std::string("1024")));
            try {
                CompileResult r = compile(body.at("source").get<std::string>(), cfg);
                program = std::move(r.program);
                entry->symbols = std::move(r.symbols);
            } catch (const CompileError& e) {
                return reply(res, 422, {{"ok", false}, {"diagnostics", json::array({diagnostic(e)})}});
            }
        } else {
            const std::string text = body.at("program").get<std::string>();
            std::istringstream in(text);
            program = read_program(in);
            std::istringstream syms(text);
            entry->symbols = read_symbols(syms);
            cfg = profile_by_name(std::to_string(program.n));
        }
        entry->session = std::make_unique<Session>(cfg, std::move(program), *kind, pool.get(cfg, *kind));
        const std::string id = "s" + std::to_string(next_id++);
        {
            std::lock_guard<std::mutex> g(mu);
            sessions[id] = entry;
        }
        json out = snapshot(*entry);
        out["ok"] = true;
        out["id"] = id;
        out["profile"] = cfg.name();
        out["symbols"] = symbols_json(entry->symbols);
        reply(res, 201, out);
    }

    void handle_tick(const std::string& id, const httplib::Request& req, httplib::Response& res) {
        auto e = find(id);
        if (!e) return reply_error(res, 404, "no session " + id);
        const json body = parse_body(req);
        std::vector<Patch> patches;
        for (const auto& p : body.value("patches", json::array())) {
            patches.push_back({p.at("slot").get<int>(), p.at("value").get<std::int64_t>()});
        }
        const auto max_steps = std::min<std::uint64_t>(body.value("max_steps", std::uint64_t{10'000}), kMaxTickSteps);
        std::lock_guard<std::mutex> g(e->mu);
        const TickReport rep = e->session->tick(patches, max_steps);
        json out = snapshot(*e);
        out["ok"] = !rep.fault;
        out["steps"] = rep.steps;
        out["max_drift"] = rep.max_drift;
        if (rep.fault) out["fault"] = *rep.fault;
        reply(res, 200, out);
    }

    void handle_state(const std::string& id, const httplib::Request& req, httplib::Response& res) {
        auto e = find(id);
        if (!e) return reply_error(res, 404, "no session " + id);
        std::lock_guard<std::mutex> g(e->mu);
        json out = snapshot(*e);
        out["ok"] = true;
        out["profile"] = e->session->config().name();
        if (req.has_param("rows") || req.has_param("cols")) out["matrix"] = slice(*e, req);
        reply(res, 200, out);
    }

    void handle_reset(const std::string& id, httplib::Response& res) {
        auto e = find(id);
        if (!e) return reply_error(res, 404, "no session " + id);
        std::lock_guard<std::mutex> g(e->mu);
        e->session->reset();
        json out = snapshot(*e);
        out["ok"] = true;
        reply(res, 200, out);
    }

    void handle_delete(const std::string& id, httplib::Response& res) {
        std::lock_guard<std::mutex> g(mu);
        if (sessions.erase(id) == 0) return reply_error(res, 404, "no session " + id);
        reply(res, 200, json{{"ok", true}});
    }

    // Maps library exceptions onto 400 responses.
    template <class F>
    httplib::Server::Handler guard(F f) {
        return [f](const httplib::Request& req, httplib::Response& res) {
            try {
                f(req, res);
            } catch (const json::exception& e) {
                reply_error(res, 400, std::string("bad request: ") + e.what());
            } catch (const std::invalid_argument& e) {
                reply_error(res, 400, e.what());
            } catch (const std::out_of_range& e) {
                reply_error(res, 400, e.what());
            } catch (const Error& e) {
                reply_error(res, 400, e.what());
            }
        };
    }

    void install() {
        srv.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Origin", "*");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
            res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
        });
        srv.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
        srv.Get("/health", [](const httplib::Request&, httplib::Response& res) { reply(res, 200, json{{"ok", true}}); });
        srv.Post("/compile", guard([this](const auto& req, auto& res) { handle_compile(req, res); }));
        srv.Post("/session", guard([this](const auto& req, auto& res) { handle_create(req, res); }));
        srv.Post(R"(/session/([^/]+)/tick)",
                 guard([this](const auto& req, auto& res) { handle_tick(req.matches[1], req, res); }));
        srv.Get(R"(/session/([^/]+)/state)",
                guard([this](const auto& req, auto& res) { handle_state(req.matches[1], req, res); }));
        srv.Post(R"(/session/([^/]+)/reset)",
                 guard([this](const auto& req, auto& res) { handle_reset(req.matches[1], res); }));
        srv.Delete(R"(/session/([^/]+))",
                   guard([this](const auto& req, auto& res) { handle_delete(req.matches[1], res); }));
    }
};

Service::Service() : impl_(std::make_unique<Impl>()) { impl_->install(); }

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
    if (port == 0) return impl_->srv.bind_to_any_port(host);
    return impl_->srv.bind_to_port(host, port) ? port : -1;
}

bool Service::listen() { return impl_->srv.listen_after_bind(); }

void Service::stop() {
    if (impl_->srv.is_running()) impl_->srv.stop();
}

void Service::wait_until_ready() const { impl_->srv.wait_until_ready(); }

}  // namespace loom
