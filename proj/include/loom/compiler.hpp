// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "loom/ast.hpp"
#include "loom/program.hpp"

namespace loom {

struct CompileOptions {
    // Without STORE, variable-index writes become a compare-and-branch
    // chain over every element of the array.
    bool use_store = true;
};

// Named storage. Locals are reported as "<function>.<name>".
struct SymbolInfo {
    std::string name;
    int slot = 0;  // logical memory index
    int size = 0;  // 0 for scalars
};

struct CompileResult {
    Program program;
    std::vector<SymbolInfo> symbols;
    int variable_slots = 0;
    int constant_slots = 0;
    int temp_slots = 0;
    std::vector<std::string> warnings;

    int instruction_count() const { return static_cast<int>(program.code.size()); }
    int data_slots() const { return variable_slots + constant_slots + temp_slots; }
    const SymbolInfo* symbol(const std::string& name) const;
    // Slot of a scalar or array element; throws if the name is unknown.
    int slot(const std::string& name, int index = 0) const;
};

CompileResult codegen(const Unit& unit, const MachineConfig& cfg, const CompileOptions& opt = {});
CompileResult codegen_no_store(const Unit& unit, const MachineConfig& cfg);
CompileResult compile(const std::string& source, const MachineConfig& cfg, const CompileOptions& opt = {});

// Program text followed by "# sym <name> <slot> <size>" comment lines.
void write_compiled(std::ostream& out, const CompileResult& r);
// Symbol lines of a compiled program file; other lines are skipped.
std::vector<SymbolInfo> read_symbols(std::istream& in);

}  // namespace loom
