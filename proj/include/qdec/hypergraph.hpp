#pragma once

// Incidence hypergraph of a CSS code: 2n nodes (X components first, then
// Z components) and m hyperedges (rows of H_Z first, then rows of H_X,
// matching the syndrome layout in codes.hpp). Incidence pairs are stored
// once in a canonical order -- grouped by node, hyperedges ascending --
// together with a precomputed by-hyperedge view, so both message-passing
// directions run over fixed index arrays.

#include <cstdint>
#include <vector>

#include "qdec/codes.hpp"

namespace qdec {

struct Hypergraph {
    std::int64_t num_nodes = 0;  // 2n
    std::int64_t num_edges = 0;  // m

    // canonical pair arrays, grouped by node (node index ascending,
    // hyperedge index ascending within each node)
    std::vector<std::int32_t> pair_node;
    std::vector<std::int32_t> pair_edge;
    std::vector<std::int64_t> node_offsets;  // size num_nodes+1 into the pair arrays

    // by-hyperedge view: byedge_perm[p] indexes into the pair arrays,
    // grouped by hyperedge with node indices ascending
    std::vector<std::int64_t> edge_offsets;  // size num_edges+1
    std::vector<std::int64_t> byedge_perm;

    std::vector<std::int32_t> edge_degree;  // B(j) = nodes per hyperedge
    std::vector<std::int32_t> node_degree;

    std::int64_t nnz() const { return static_cast<std::int64_t>(pair_node.size()); }

    std::int64_t node_begin(std::int64_t i) const { return node_offsets[i]; }
    std::int64_t node_end(std::int64_t i) const { return node_offsets[i + 1]; }
};

Hypergraph from_css(const CssCode& code);

// Builds a hypergraph directly from a stabilizer-style incidence matrix
// (rows = hyperedges, cols = nodes). Used by tests and the Tanner GNN.
Hypergraph from_incidence(const BitMatrix& H);

// densify back to the incidence matrix (rows = hyperedges)
BitMatrix to_incidence(const Hypergraph& g);

// D(i) = sum of w_j over hyperedges incident to node i (Eq. form with
// w_j = 1 + syndrome_j this is the syndrome-weighted degree).
// Throws if node i is isolated.
double weighted_degree(const Hypergraph& g, const std::vector<double>& w, std::int64_t i);

}  // namespace qdec
