// SPDX-License-Identifier: Apache-2.0
#include "loom/session.hpp"

#include <algorithm>
#include <istream>
#include <sstream>

#include "loom/ast.hpp"
#include "loom/sparse.hpp"

namespace loom {

std::optional<EngineKind> engine_kind_from_name(const std::string& name) {
    if (name == "interp" || name == "interpreter") return EngineKind::Interp;
    if (name == "dense") return EngineKind::Dense;
    if (name == "sparse") return EngineKind::Sparse;
    return std::nullopt;
}

const char* engine_kind_name(EngineKind kind) {
    switch (kind) {
        case EngineKind::Interp: return "interp";
        case EngineKind::Dense: return "dense";
        case EngineKind::Sparse: return "sparse";
    }
    return "?";
}

std::shared_ptr<SharedEngine> make_engine(const MachineConfig& cfg, EngineKind kind) {
    auto e = std::make_shared<SharedEngine>();
    if (kind == EngineKind::Dense) e->engine = std::make_unique<DenseEngine>(build_model(cfg));
    if (kind == EngineKind::Sparse) e->engine = std::make_unique<SparseEngine>(SparseModel::from_model(build_model(cfg)));
    return e;
}

std::shared_ptr<SharedEngine> EnginePool::get(const MachineConfig& cfg, EngineKind kind) {
    if (kind == EngineKind::Interp) return {};
    std::lock_guard<std::mutex> g(mu_);
    auto& slot = cache_[{cfg.name(), static_cast<int>(kind)}];
    if (!slot) slot = make_engine(cfg, kind);
    return slot;
}

Session::Session(const MachineConfig& cfg, Program program, EngineKind kind, std::shared_ptr<SharedEngine> engine)
    : cfg_(cfg), program_(std::move(program)), kind_(kind), engine_(std::move(engine)) {
    program_.require_matches(cfg_);
    if (kind_ != EngineKind::Interp && !engine_) engine_ = make_engine(cfg_, kind_);
    if (engine_ && !(engine_->engine->config() == cfg_)) throw ConfigError("engine built for another profile");
    reset();
}

void Session::reset() {
    total_steps_ = 0;
    if (kind_ == EngineKind::Interp) {
        interp_.emplace(cfg_, program_);
    } else {
        state_.emplace(init_state(cfg_, program_));
    }
}

std::vector<std::int64_t> Session::memory() const {
    return interp_ ? interp_->state().memory : read_memory(*state_);
}

int Session::pc() const { return interp_ ? interp_->state().pc : read_pc(*state_); }

TickReport Session::tick(const std::vector<Patch>& patches, std::uint64_t max_steps) {
    for (const auto& p : patches) {
        if (p.slot < 0 || p.slot >= cfg_.m) throw RangeError("patch slot " + std::to_string(p.slot) + " out of range");
    }
    const bool restart = halted();
    TickReport rep;
    if (interp_) {
        for (const auto& p : patches) interp_->state().memory[static_cast<std::size_t>(p.slot)] = cword::wrap(p.value, cfg_.nbits);
        if (restart) interp_->restart();
        try {
            while (rep.steps < max_steps && !interp_->state().halted()) {
                interp_->step();
                ++rep.steps;
            }
        } catch (const MachineFault& f) {
            rep.fault = f.what();
        }
    } else {
        for (const auto& p : patches) write_memory(*state_, p.slot, cword::wrap(p.value, cfg_.nbits));
        if (restart) write_pc(*state_, program_.entry());
        std::lock_guard<std::mutex> g(engine_->lock);
        try {
            while (rep.steps < max_steps && read_pc(*state_) != 0) {
                const StepInfo info = engine_->engine->step(*state_);
                rep.max_drift = std::max(rep.max_drift, info.pre_correction_drift);
                ++rep.steps;
            }
        } catch (const Error& e) {
            rep.fault = e.what();
        }
    }
    total_steps_ += rep.steps;
    rep.halted = halted();
    return rep;
}

std::map<std::uint64_t, std::vector<Patch>> parse_input_script(std::istream& in) {
    std::map<std::uint64_t, std::vector<Patch>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        std::istringstream ss(line);
        std::string w0, w1, w2;
        long long k = 0, x = 0, v = 0;
        if (!(ss >> w0)) continue;
        if (w0 != "tick" || !(ss >> k >> w1 >> x >> w2 >> v) || w1 != "slot" || w2 != "value" || k < 0) {
            throw FormatError("input line " + std::to_string(lineno) + ": expected 'tick <k> slot <x> value <v>'");
        }
        std::string extra;
        if (ss >> extra) throw FormatError("input line " + std::to_string(lineno) + ": trailing text");
        out[static_cast<std::uint64_t>(k)].push_back({static_cast<int>(x), v});
    }
    return out;
}

}  // namespace loom
