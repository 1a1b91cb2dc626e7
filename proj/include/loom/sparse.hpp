// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "loom/engine.hpp"
#include "loom/weights.hpp"

namespace loom {

struct Triplet {
    std::uint32_t row;
    std::uint32_t col;
    double value;
    friend bool operator==(const Triplet&, const Triplet&) = default;
};

struct SparseMatrix {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::vector<Triplet> entries;  // row-major order

    static SparseMatrix from_dense(const Eigen::MatrixXd& m);
    Eigen::MatrixXd to_dense() const;
};

struct SparseHead {
    SparseMatrix Q;
    SparseMatrix V;
};

struct SparseLayer {
    std::string name;
    std::vector<SparseHead> heads;
    SparseMatrix W1, b1, W2, b2;  // biases as r x 1 and d x 1
};

struct SparseModel {
    MachineConfig cfg;
    std::vector<SparseLayer> layers;

    static SparseModel from_model(const Model& m);
    Model to_model() const;
    std::uint64_t nonzero_count() const;
};

// Binary little-endian weight file: magic, version, config, then per layer
// the head matrices and FFN matrices as (dims, count, triplets).
void write_weights(std::ostream& out, const SparseModel& m);
SparseModel read_weights(std::istream& in);
void save_weights(const std::string& path, const SparseModel& m);
SparseModel load_weights(const std::string& path);

// Attention keeps the two best-scoring key columns per query and mixes
// them with a two-way softmax; exact ties resolve to the lower index.
class SparseEngine : public Engine {
public:
    explicit SparseEngine(const SparseModel& model);
    const MachineConfig& config() const override { return cfg_; }
    StepInfo step(State& st) override;
    std::string name() const override { return "sparse"; }

    struct CompiledHead {
        std::vector<std::vector<std::pair<int, double>>> q;  // per query row
        std::vector<std::tuple<int, int, double>> v;         // (dst, src, w)
    };
    struct CompiledLayer {
        std::vector<CompiledHead> heads;
        std::vector<std::vector<std::pair<int, double>>> w1;  // per hidden row
        std::vector<double> b1;
        std::vector<std::vector<std::pair<int, double>>> w2;  // per hidden row: (dst, w)
        std::vector<double> b2;
    };

private:
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    void apply(const CompiledLayer& layer, RowMat& X);

    MachineConfig cfg_;
    std::vector<CompiledLayer> layers_;
    RowMat q_, hidden_;
    Eigen::MatrixXd scores_;
};

}  // namespace loom
