// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "loom/config.hpp"

namespace loom {

// One attention head; keys share the query projection.
struct Head {
    Eigen::MatrixXd Q;  // r_Q x d
    Eigen::MatrixXd V;  // d x d
};

// Biases are column-constant: b1 and b2 hold one value per row and are
// broadcast over the n columns.
struct Layer {
    std::string name;
    std::vector<Head> heads;
    Eigen::MatrixXd W1;  // r x d
    Eigen::VectorXd b1;  // r
    Eigen::MatrixXd W2;  // d x r
    Eigen::VectorXd b2;  // d
    std::vector<std::string> row_group;  // r entries; "" marks padding

    int ffn_width() const { return static_cast<int>(W1.rows()); }
    // Rows tagged with each group name (padding excluded).
    std::map<std::string, int> group_rows() const;
};

struct Model {
    MachineConfig cfg;
    std::vector<Layer> layers;  // L1..L8

    // Dense shapes: per head Q, K (r_Q x d) and V (d x d); per FFN W1, W2,
    // b1 as r x n and b2 as d x n.
    std::uint64_t parameter_count() const;
    // Nonzero entries of Q, K, V, W1, W2 plus nonzero bias rows.
    std::uint64_t nonzero_count() const;
};

// Constants shared by the construction and its tests.
struct GateConstants {
    double word;  // gate weight for word-valued rows
    double addr;  // gate weight for ell-bit PC arithmetic
};
GateConstants gate_constants(const MachineConfig& cfg);

Model build_model(const MachineConfig& cfg);

// Individual layers, exposed for unit tests.
Layer build_fetch_layer(const MachineConfig& cfg);      // L1
Layer build_route_layer(const MachineConfig& cfg);      // L2
Layer build_indirect_layer(const MachineConfig& cfg);   // L3
Layer build_subtract_layer(const MachineConfig& cfg);   // L4
Layer build_write_layer(const MachineConfig& cfg);      // L5
Layer build_flag_layer(const MachineConfig& cfg);       // L6
Layer build_branch_layer(const MachineConfig& cfg);     // L7
Layer build_correct_layer(const MachineConfig& cfg);    // L8

// Fixed L2 allocation in rows.
int route_layer_budget(const MachineConfig& cfg);

}  // namespace loom
