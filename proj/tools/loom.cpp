// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "loom/compiler.hpp"
#include "loom/service.hpp"
#include "loom/session.hpp"
#include "loom/sparse.hpp"
#include "loom/suite.hpp"
#include "loom/verify.hpp"

using namespace loom;
namespace fs = std::filesystem;

namespace {

constexpr int kExitError = 1;
constexpr int kExitTimeout = 2;
constexpr int kExitFault = 3;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Loaded {
    MachineConfig cfg;
    Program program;
    std::vector<SymbolInfo> symbols;
};

// C sources are compiled for the given profile; anything else is read as a
// program file and carries its own geometry.
Loaded load(const std::string& path, const std::string& profile) {
    Loaded out;
    if (fs::path(path).extension() == ".c") {
        out.cfg = profile_by_name(profile);
        try {
            CompileResult r = compile(slurp(path), out.cfg);
            out.program = std::move(r.program);
            out.symbols = std::move(r.symbols);
        } catch (const CompileError& e) {
            throw Error(format_diagnostic(path, e));
        }
        return out;
    }
    const std::string text = slurp(path);
    std::istringstream in(text);
    out.program = read_program(in);
    std::istringstream syms(text);
    out.symbols = read_symbols(syms);
    out.cfg = profile_by_name(std::to_string(out.program.n));
    return out;
}

std::unique_ptr<Engine> build_engine(const MachineConfig& cfg, EngineKind kind, const std::string& weights) {
    if (weights.empty()) return std::move(make_engine(cfg, kind)->engine);
    SparseModel sm = load_weights(weights);
    if (!(sm.cfg == cfg)) throw ConfigError("weights are for " + sm.cfg.name() + ", program needs " + cfg.name());
    if (kind == EngineKind::Dense) return std::make_unique<DenseEngine>(sm.to_model());
    return std::make_unique<SparseEngine>(sm);
}

std::map<std::uint64_t, std::vector<Patch>> load_inputs(const std::string& path) {
    if (path.empty()) return {};
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    return parse_input_script(in);
}

std::uint64_t tick_count(const std::map<std::uint64_t, std::vector<Patch>>& inputs, std::uint64_t ticks) {
    if (ticks > 0) return ticks;
    return inputs.empty() ? 1 : inputs.rbegin()->first + 1;
}

void dump_memory(const std::vector<std::int64_t>& mem, const std::vector<SymbolInfo>& symbols) {
    std::map<int, std::string> names;
    for (const auto& s : symbols) {
        if (s.size == 0) {
            names[s.slot] = s.name;
        } else {
            for (int k = 0; k < s.size; ++k) names[s.slot + k] = s.name + "[" + std::to_string(k) + "]";
        }
    }
    for (std::size_t x = 0; x < mem.size(); ++x) {
        const auto it = names.find(static_cast<int>(x));
        if (mem[x] == 0 && it == names.end()) continue;
        std::cout << "mem[" << x << "] = " << mem[x];
        if (it != names.end()) std::cout << "  " << it->second;
        std::cout << "\n";
    }
}

// ---- compile

struct CompileArgs {
    std::string source;
    std::string profile = "1024";
    bool no_store = false;
    std::string output;
};

int cmd_compile(const CompileArgs& a) {
    const MachineConfig cfg = profile_by_name(a.profile);
    CompileOptions opt;
    opt.use_store = !a.no_store;
    CompileResult r;
    try {
        r = compile(slurp(a.source), cfg, opt);
    } catch (const CompileError& e) {
        std::cerr << format_diagnostic(a.source, e) << "\n";
        return kExitError;
    }
    for (const auto& w : r.warnings) std::cerr << a.source << ": warning: " << w << "\n";
    const std::string out = a.output.empty() ? fs::path(a.source).replace_extension(".loomprog").string() : a.output;
    std::ofstream f(out);
    if (!f) throw Error("cannot write " + out);
    write_compiled(f, r);
    std::cout << "profile: " << cfg.name() << (a.no_store ? " (no STORE)" : "") << "\n"
              << "instructions: " << r.instruction_count() << " / " << cfg.instr_slots() << "\n"
              << "data: " << r.variable_slots << " variables + " << r.constant_slots << " constants + " << r.temp_slots
              << " temps = " << r.data_slots() << " / " << cfg.m << "\n"
              << "wrote " << out << "\n";
    return 0;
}

// ---- run

struct RunArgs {
    std::string program;
    std::string profile = "1024";
    std::string engine = "interp";
    std::uint64_t max_steps = 1'000'000;
    bool trace = false;
    std::string input;
    std::uint64_t ticks = 0;
    std::string weights;
};

int cmd_run(const RunArgs& a) {
    const auto kind = engine_kind_from_name(a.engine);
    if (!kind) throw Error("unknown engine '" + a.engine + "'");
    Loaded L = load(a.program, a.profile);
    const auto inputs = load_inputs(a.input);
    const std::uint64_t ticks = tick_count(inputs, a.ticks);

    std::unique_ptr<Engine> engine;
    std::optional<State> st;
    std::optional<Interpreter> interp;
    if (*kind == EngineKind::Interp) {
        interp.emplace(L.cfg, L.program);
    } else {
        engine = build_engine(L.cfg, *kind, a.weights);
        st.emplace(init_state(L.cfg, L.program));
    }
    auto memory = [&] { return interp ? interp->state().memory : read_memory(*st); };
    auto pc = [&] { return interp ? interp->state().pc : read_pc(*st); };

    std::uint64_t total = 0;
    double drift = 0.0;
    std::optional<std::string> fault;
    bool timed_out = false;
    for (std::uint64_t t = 0; t < ticks && !fault && !timed_out; ++t) {
        if (t > 0) {
            if (interp) interp->restart();
            else write_pc(*st, L.program.entry());
        }
        if (auto it = inputs.find(t); it != inputs.end()) {
            for (const auto& p : it->second) {
                if (p.slot < 0 || p.slot >= L.cfg.m) throw RangeError("input slot " + std::to_string(p.slot) + " out of range");
                if (interp) interp->state().memory[static_cast<std::size_t>(p.slot)] = cword::wrap(p.value, L.cfg.nbits);
                else write_memory(*st, p.slot, cword::wrap(p.value, L.cfg.nbits));
            }
        }
        std::uint64_t steps = 0;
        try {
            while (pc() != 0 && steps < a.max_steps) {
                if (interp) {
                    const StepRecord rec = interp->step();
                    if (a.trace) std::cout << format_trace_line(rec) << "\n";
                } else {
                    const auto before = a.trace ? memory() : std::vector<std::int64_t>{};
                    const int pc0 = read_pc(*st);
                    drift = std::max(drift, engine->step(*st).pre_correction_drift);
                    if (a.trace) {
                        std::cout << "step=" << total + steps << " pc=" << pc0 << " next=" << read_pc(*st);
                        const auto after = memory();
                        for (std::size_t x = 0; x < after.size(); ++x) {
                            if (after[x] != before[x]) std::cout << " mem[" << x << "]:" << before[x] << "->" << after[x];
                        }
                        std::cout << "\n";
                    }
                }
                ++steps;
            }
        } catch (const std::exception& e) {
            fault = "step " + std::to_string(total + steps) + ": " + e.what();
        }
        total += steps;
        if (!fault && pc() != 0) timed_out = true;
        if (ticks > 1) std::cout << "tick " << t << ": " << steps << " steps\n";
    }

    std::cout << "engine: " << engine_kind_name(*kind) << "\n"
              << "profile: " << L.cfg.name() << "\n"
              << "steps: " << total << "\n";
    if (engine) std::cout << "max drift: " << drift << "\n";
    std::cout << "status: " << (fault ? "fault" : timed_out ? "timeout" : "halted") << "\n";
    if (fault) std::cout << "fault: " << *fault << "\n";
    dump_memory(memory(), L.symbols);
    if (fault) return kExitFault;
    return timed_out ? kExitTimeout : 0;
}

// ---- verify

struct VerifyArgs {
    std::vector<std::string> programs;
    bool suite = false;
    std::string suite_dir;
    std::string profile = "512";
    std::vector<std::string> engines = {"dense", "sparse"};
    std::uint64_t steps = 0;
    std::string weights;
    std::string input;
    std::uint64_t ticks = 0;
};

struct VerifyJob {
    std::string name;
    MachineConfig cfg;
    Program program;
    std::uint64_t max_steps;
    const SuiteCase* suite_case = nullptr;
};

int cmd_verify(const VerifyArgs& a) {
    std::vector<EngineKind> kinds;
    for (const auto& e : a.engines) {
        const auto k = engine_kind_from_name(e);
        if (!k || *k == EngineKind::Interp) throw Error("verify engines are dense and sparse, not '" + e + "'");
        kinds.push_back(*k);
    }
    const auto inputs = load_inputs(a.input);
    const std::uint64_t ticks = tick_count(inputs, a.ticks);

    std::vector<SuiteCase> cases;
    std::vector<VerifyJob> jobs;
    if (a.suite) {
        const MachineConfig cfg = profile_by_name(a.profile);
        cases = standard_suite(cfg, a.suite_dir.empty() ? default_suite_dir() : a.suite_dir);
        for (const auto& c : cases) jobs.push_back({c.category + "/" + c.name, cfg, c.program, a.steps ? a.steps : c.max_steps, &c});
    }
    for (const auto& p : a.programs) {
        Loaded L = load(p, a.profile);
        jobs.push_back({p, L.cfg, std::move(L.program), a.steps ? a.steps : 100'000, nullptr});
    }
    if (jobs.empty()) throw Error("nothing to verify: give program files or --suite");

    std::map<std::pair<std::string, int>, std::unique_ptr<Engine>> engines;
    int failures = 0;
    int checks = 0;
    for (const auto& job : jobs) {
        if (job.suite_case) {
            const CaseCheck c = check_case(job.cfg, *job.suite_case);
            ++checks;
            if (!c.ok) {
                ++failures;
                std::cout << "FAIL " << job.name << " interp: " << c.detail << "\n";
            }
        }
        for (EngineKind k : kinds) {
            auto& eng = engines[{job.cfg.name(), static_cast<int>(k)}];
            if (!eng) eng = build_engine(job.cfg, k, a.weights);
            State st = init_state(job.cfg, job.program);
            Interpreter ref(job.cfg, job.program);
            LockstepReport total;
            for (std::uint64_t t = 0; t < ticks && total.ok; ++t) {
                if (t > 0) {
                    ref.restart();
                    write_pc(st, job.program.entry());
                }
                if (auto it = inputs.find(t); it != inputs.end()) {
                    for (const auto& p : it->second) {
                        write_memory(st, p.slot, cword::wrap(p.value, job.cfg.nbits));
                        ref.state().memory.at(static_cast<std::size_t>(p.slot)) = cword::wrap(p.value, job.cfg.nbits);
                    }
                }
                LockstepReport r = lockstep_continue(*eng, st, ref, job.max_steps);
                total.ok = r.ok;
                total.max_drift = std::max(total.max_drift, r.max_drift);
                total.halted = r.halted;
                total.detail = r.detail;
                if (!r.ok) total.divergence = *r.divergence + 1;  // 1-based, counted across ticks
                total.steps += r.steps;
            }
            ++checks;
            if (total.ok) {
                std::cout << "PASS " << job.name << " " << eng->name() << " steps=" << total.steps
                          << (total.halted ? "" : " (budget)") << " drift=" << total.max_drift << "\n";
            } else {
                ++failures;
                std::cout << "FAIL " << job.name << " " << eng->name() << " divergence at step " << *total.divergence
                          << ": " << total.detail << "\n";
            }
        }
    }
    std::cout << checks - failures << "/" << checks << " checks passed, " << failures << " divergences\n";
    return failures == 0 ? 0 : kExitError;
}

// ---- weights

int cmd_weights(const std::string& profile, const std::string& output) {
    const MachineConfig cfg = profile_by_name(profile);
    const Model m = build_model(cfg);
    const SparseModel sm = SparseModel::from_model(m);
    const std::string out = output.empty() ? "loom-" + cfg.name() + ".loomw" : output;
    save_weights(out, sm);
    std::cout << "profile: " << cfg.name() << "\n"
              << "nonzeros: " << sm.nonzero_count() << "\n"
              << "parameters: " << m.parameter_count() << "\n"
              << "wrote " << out << "\n";
    return 0;
}

// ---- serve

Service* g_service = nullptr;

int cmd_serve(const std::string& host, int port) {
    Service svc;
    const int bound = svc.bind(host, port);
    if (bound < 0) {
        std::cerr << "cannot bind " << host << ":" << port << "\n";
        return kExitError;
    }
    g_service = &svc;
    std::signal(SIGINT, [](int) {
        if (g_service) g_service->stop();
    });
    std::signal(SIGTERM, [](int) {
        if (g_service) g_service->stop();
    });
    std::cout << "listening on http://" << host << ":" << bound << std::endl;
    svc.listen();
    g_service = nullptr;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"loom: compile, run and verify programs on the transformer machine"};
    app.require_subcommand(1);

    CompileArgs ca;
    auto* c = app.add_subcommand("compile", "Compile a C source to a program file");
    c->add_option("source", ca.source, "C source file")->required()->check(CLI::ExistingFile);
    c->add_option("--profile", ca.profile, "512, 1024 or 2048")->capture_default_str();
    c->add_flag("--no-store", ca.no_store, "Lower variable-index writes to a dispatch chain");
    c->add_option("-o,--output", ca.output, "Output file (default: source with .loomprog)");

    RunArgs ra;
    auto* r = app.add_subcommand("run", "Run a program on one engine");
    r->add_option("program", ra.program, "Program file or C source")->required()->check(CLI::ExistingFile);
    r->add_option("--profile", ra.profile, "Profile for C sources")->capture_default_str();
    r->add_option("--engine", ra.engine, "interp, dense or sparse")->capture_default_str();
    r->add_option("--max-steps", ra.max_steps, "Step budget per tick")->capture_default_str();
    r->add_flag("--trace", ra.trace, "Print every step");
    r->add_option("--input", ra.input, "Tick input script")->check(CLI::ExistingFile);
    r->add_option("--ticks", ra.ticks, "Number of ticks (default: last scripted tick + 1)");
    r->add_option("--weights", ra.weights, "Weight file for transformer engines")->check(CLI::ExistingFile);

    VerifyArgs va;
    auto* v = app.add_subcommand("verify", "Lockstep transformer engines against the interpreter");
    v->add_option("programs", va.programs, "Program files or C sources")->check(CLI::ExistingFile);
    v->add_flag("--suite", va.suite, "Verify the standard test suite");
    v->add_option("--suite-dir", va.suite_dir, "Directory of compiled suite programs");
    v->add_option("--profile", va.profile, "Profile for the suite and C sources")->capture_default_str();
    v->add_option("--engines", va.engines, "Engines to check")->delimiter(',')->capture_default_str();
    v->add_option("--steps", va.steps, "Step budget per program (default: per case)");
    v->add_option("--weights", va.weights, "Weight file to verify instead of freshly built weights")
        ->check(CLI::ExistingFile);
    v->add_option("--input", va.input, "Tick input script")->check(CLI::ExistingFile);
    v->add_option("--ticks", va.ticks, "Number of ticks");

    std::string wprofile = "1024";
    std::string wout;
    auto* w = app.add_subcommand("weights", "Write the compiled weights of a profile");
    w->add_option("--profile", wprofile, "512, 1024 or 2048")->capture_default_str();
    w->add_option("-o,--output", wout, "Output file");

    std::string host = "127.0.0.1";
    int port = 8080;
    auto* s = app.add_subcommand("serve", "Serve the session protocol over HTTP");
    s->add_option("--host", host)->capture_default_str();
    s->add_option("--port", port)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*c) return cmd_compile(ca);
        if (*r) return cmd_run(ra);
        if (*v) return cmd_verify(va);
        if (*w) return cmd_weights(wprofile, wout);
        if (*s) return cmd_serve(host, port);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return 0;
}
