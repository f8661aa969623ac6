#pragma once

// Batched index plumbing shared by the neural decoders. The incidence
// graph is fixed per code, so a minibatch of b samples reuses one set of
// index arrays: pairs are laid out sample-major then node-major, which
// keeps per-node softmax segments contiguous for both passes.

#include <span>

#include "qdec/channel.hpp"
#include "qdec/hypergraph.hpp"
#include "qdec/tensor.hpp"

namespace qdec::nn {

struct BatchIndex {
    std::int64_t b = 0, nnz = 0, two_n = 0, m = 0;
    std::vector<std::int32_t> node_plain;    // pair -> node, into shared 2n-row tensors
    std::vector<std::int32_t> node_batched;  // pair -> s*2n + node
    std::vector<std::int32_t> edge_batched;  // pair -> s*m + edge
    std::vector<std::int64_t> seg_offsets;   // b*2n+1 offsets of per-(sample,node) segments

    static BatchIndex build(const Hypergraph& g, std::int64_t b);
};

struct BatchData {
    std::int64_t b = 0;
    Tensor sw;       // (b*m) x 2 columns [S_j, w_j]
    Tensor s_col;    // (b*m) x 1 syndrome values
    Tensor k1;       // (b*nnz) x 1: w_j / B(j)
    Tensor k2;       // (b*nnz) x 1: w_j / D_s(i)
    Tensor targets;  // (b*2n) x 1, size 0 when absent

    static BatchData build(const Hypergraph& g, std::span<const BitVector> syndromes,
                           std::span<const BitVector> errors = {});
};

}  // namespace qdec::nn
