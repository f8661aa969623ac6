#include "qdec/batch.hpp"

#include <stdexcept>

namespace qdec::nn {

BatchIndex BatchIndex::build(const Hypergraph& g, std::int64_t b) {
    BatchIndex bi;
    bi.b = b;
    bi.nnz = g.nnz();
    bi.two_n = g.num_nodes;
    bi.m = g.num_edges;
    const std::int64_t total = b * bi.nnz;
    bi.node_plain.reserve(total);
    bi.node_batched.reserve(total);
    bi.edge_batched.reserve(total);
    bi.seg_offsets.reserve(b * bi.two_n + 1);
    bi.seg_offsets.push_back(0);
    for (std::int64_t s = 0; s < b; ++s) {
        for (std::int64_t i = 0; i < g.num_nodes; ++i) {
            for (std::int64_t p = g.node_begin(i); p < g.node_end(i); ++p) {
                bi.node_plain.push_back(g.pair_node[p]);
                bi.node_batched.push_back(static_cast<std::int32_t>(s * g.num_nodes + g.pair_node[p]));
                bi.edge_batched.push_back(static_cast<std::int32_t>(s * g.num_edges + g.pair_edge[p]));
            }
            bi.seg_offsets.push_back(static_cast<std::int64_t>(bi.node_plain.size()));
        }
    }
    return bi;
}

BatchData BatchData::build(const Hypergraph& g, std::span<const BitVector> syndromes,
                           std::span<const BitVector> errors) {
    const std::int64_t b = static_cast<std::int64_t>(syndromes.size());
    if (b == 0) throw std::invalid_argument("BatchData: empty batch");
    if (!errors.empty() && errors.size() != syndromes.size())
        throw std::invalid_argument("BatchData: error/syndrome count mismatch");

    BatchData bd;
    bd.b = b;
    bd.sw = Tensor(b * g.num_edges, 2);
    bd.s_col = Tensor(b * g.num_edges, 1);
    bd.k1 = Tensor(b * g.nnz(), 1);
    bd.k2 = Tensor(b * g.nnz(), 1);
    if (!errors.empty()) bd.targets = Tensor(b * g.num_nodes, 1);

    std::vector<double> w(static_cast<std::size_t>(g.num_edges));
    std::vector<double> dinv(static_cast<std::size_t>(g.num_nodes));
    for (std::int64_t s = 0; s < b; ++s) {
        const BitVector& syn = syndromes[s];
        if (syn.size() != static_cast<std::size_t>(g.num_edges))
            throw std::invalid_argument("BatchData: syndrome length != num_edges");
        for (std::int64_t j = 0; j < g.num_edges; ++j) {
            const double sj = syn.get(static_cast<std::size_t>(j)) ? 1.0 : 0.0;
            w[j] = 1.0 + sj;
            bd.sw.at(s * g.num_edges + j, 0) = static_cast<Real>(sj);
            bd.sw.at(s * g.num_edges + j, 1) = static_cast<Real>(w[j]);
            bd.s_col.at(s * g.num_edges + j, 0) = static_cast<Real>(sj);
        }
        for (std::int64_t i = 0; i < g.num_nodes; ++i) {
            if (g.node_degree[i] == 0)
                throw std::invalid_argument("BatchData: isolated node " + std::to_string(i));
            dinv[i] = 1.0 / weighted_degree(g, w, i);
        }
        std::int64_t p_out = s * g.nnz();
        for (std::int64_t i = 0; i < g.num_nodes; ++i) {
            for (std::int64_t p = g.node_begin(i); p < g.node_end(i); ++p, ++p_out) {
                const std::int32_t j = g.pair_edge[p];
                bd.k1.v[p_out] = static_cast<Real>(w[j] / static_cast<double>(g.edge_degree[j]));
                bd.k2.v[p_out] = static_cast<Real>(w[j] * dinv[i]);
            }
        }
        if (!errors.empty()) {
            const BitVector& e = errors[s];
            if (e.size() != static_cast<std::size_t>(g.num_nodes))
                throw std::invalid_argument("BatchData: error length != num_nodes");
            for (std::int64_t i = 0; i < g.num_nodes; ++i)
                bd.targets.at(s * g.num_nodes + i, 0) =
                    e.get(static_cast<std::size_t>(i)) ? Real(1) : Real(0);
        }
    }
    return bd;
}

}  // namespace qdec::nn
