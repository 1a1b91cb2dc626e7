// SPDX-License-Identifier: Apache-2.0
#include "loom/program.hpp"

#include <fstream>
#include <sstream>

#include "loom/bipolar.hpp"

namespace loom {

Program Program::empty_for(const MachineConfig& cfg) {
    Program p;
    p.n = cfg.n;
    p.s = cfg.s;
    p.m = cfg.m;
    p.nbits = cfg.nbits;
    p.memory.assign(static_cast<std::size_t>(cfg.m), 0);
    return p;
}

bool Program::matches(const MachineConfig& cfg) const {
    return n == cfg.n && s == cfg.s && m == cfg.m && nbits == cfg.nbits;
}

void Program::require_matches(const MachineConfig& cfg) const {
    if (!matches(cfg)) {
        throw ConfigError("program built for n=" + std::to_string(n) + " s=" + std::to_string(s) +
                          " m=" + std::to_string(m) + " N=" + std::to_string(nbits) +
                          " does not match machine " + cfg.name());
    }
    if (static_cast<int>(code.size()) > cfg.instr_slots()) {
        throw CapacityError("program has " + std::to_string(code.size()) + " instructions, machine holds " +
                            std::to_string(cfg.instr_slots()));
    }
}

namespace {

int parse_kv(const std::string& tok, const std::string& key, int line) {
    if (tok.rfind(key + "=", 0) != 0) {
        throw FormatError("line " + std::to_string(line) + ": expected " + key + "=<value>");
    }
    try {
        return std::stoi(tok.substr(key.size() + 1));
    } catch (const std::exception&) {
        throw FormatError("line " + std::to_string(line) + ": bad value in '" + tok + "'");
    }
}

}  // namespace

Program read_program(std::istream& in) {
    Program p;
    std::string raw;
    int line = 0;
    bool header = false;
    while (std::getline(in, raw)) {
        ++line;
        if (auto h = raw.find('#'); h != std::string::npos) raw.resize(h);
        std::istringstream ls(raw);
        std::string kw;
        if (!(ls >> kw)) continue;
        if (!header) {
            std::string ver, tn, ts, tm, tN;
            if (kw != "loom-prog" || !(ls >> ver >> tn >> ts >> tm >> tN) || ver != "v1") {
                throw FormatError("line " + std::to_string(line) + ": expected 'loom-prog v1 n= s= m= N=' header");
            }
            p.n = parse_kv(tn, "n", line);
            p.s = parse_kv(ts, "s", line);
            p.m = parse_kv(tm, "m", line);
            p.nbits = parse_kv(tN, "N", line);
            if (p.m < 1 || p.m > 1 << 16) throw FormatError("bad m in header");
            if (p.nbits < 2 || p.nbits > 16) throw FormatError("bad N in header");
            p.memory.assign(static_cast<std::size_t>(p.m), 0);
            header = true;
            continue;
        }
        std::string extra;
        if (kw == "mem") {
            long long x = 0, v = 0;
            if (!(ls >> x >> v) || (ls >> extra)) throw FormatError("line " + std::to_string(line) + ": bad mem line");
            if (x < 0 || x >= p.m) throw FormatError("line " + std::to_string(line) + ": slot out of range");
            if (v < -(1LL << (p.nbits - 1)) || v >= (1LL << p.nbits)) {
                throw FormatError("line " + std::to_string(line) + ": value out of word range");
            }
            p.memory[static_cast<std::size_t>(x)] = wrap_signed(v, p.nbits);
        } else if (kw == "ins") {
            long long k = 0;
            Instruction ins;
            if (!(ls >> k >> ins.a >> ins.b >> ins.c) || (ls >> extra)) {
                throw FormatError("line " + std::to_string(line) + ": bad ins line");
            }
            if (k < 0 || k >= p.n) throw FormatError("line " + std::to_string(line) + ": index out of range");
            if (static_cast<std::size_t>(k) >= p.code.size()) p.code.resize(static_cast<std::size_t>(k) + 1);
            p.code[static_cast<std::size_t>(k)] = ins;
        } else {
            throw FormatError("line " + std::to_string(line) + ": unknown directive '" + kw + "'");
        }
    }
    if (!header) throw FormatError("missing loom-prog header");
    return p;
}

Program load_program(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw FormatError("cannot open " + path);
    return read_program(f);
}

void write_program(std::ostream& out, const Program& p) {
    out << "loom-prog v1 n=" << p.n << " s=" << p.s << " m=" << p.m << " N=" << p.nbits << "\n";
    for (std::size_t x = 0; x < p.memory.size(); ++x) {
        if (p.memory[x] != 0) out << "mem " << x << " " << p.memory[x] << "\n";
    }
    for (std::size_t k = 0; k < p.code.size(); ++k) {
        const auto& i = p.code[k];
        out << "ins " << k << " " << i.a << " " << i.b << " " << i.c << "\n";
    }
}

void save_program(const std::string& path, const Program& p) {
    std::ofstream f(path);
    if (!f) throw FormatError("cannot write " + path);
    write_program(f, p);
}

}  // namespace loom
