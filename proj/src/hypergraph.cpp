#include "qdec/hypergraph.hpp"

#include <numeric>
#include <stdexcept>

namespace qdec {

Hypergraph from_incidence(const BitMatrix& H) {
    Hypergraph g;
    g.num_edges = static_cast<std::int64_t>(H.rows());
    g.num_nodes = static_cast<std::int64_t>(H.cols());

    // node-major canonical order
    for (std::size_t c = 0; c < H.cols(); ++c)
        for (std::size_t r = 0; r < H.rows(); ++r)
            if (H.get(r, c)) {
                g.pair_node.push_back(static_cast<std::int32_t>(c));
                g.pair_edge.push_back(static_cast<std::int32_t>(r));
            }

    const std::int64_t nnz = g.nnz();
    g.node_offsets.assign(g.num_nodes + 1, 0);
    g.node_degree.assign(g.num_nodes, 0);
    g.edge_degree.assign(g.num_edges, 0);
    for (std::int64_t p = 0; p < nnz; ++p) {
        ++g.node_degree[g.pair_node[p]];
        ++g.edge_degree[g.pair_edge[p]];
    }
    for (std::int64_t i = 0; i < g.num_nodes; ++i)
        g.node_offsets[i + 1] = g.node_offsets[i] + g.node_degree[i];

    g.edge_offsets.assign(g.num_edges + 1, 0);
    for (std::int64_t j = 0; j < g.num_edges; ++j)
        g.edge_offsets[j + 1] = g.edge_offsets[j] + g.edge_degree[j];
    g.byedge_perm.assign(nnz, 0);
    std::vector<std::int64_t> cursor(g.edge_offsets.begin(), g.edge_offsets.end() - 1);
    // pair arrays are node-ascending, so filling edge groups in pair order
    // leaves node indices ascending within each group
    for (std::int64_t p = 0; p < nnz; ++p)
        g.byedge_perm[cursor[g.pair_edge[p]]++] = p;

    for (std::int64_t j = 0; j < g.num_edges; ++j)
        if (g.edge_degree[j] == 0)
            throw std::invalid_argument("from_incidence: empty hyperedge " + std::to_string(j));
    return g;
}

Hypergraph from_css(const CssCode& code) {
    return from_incidence(code.stabilizer_matrix());
}

BitMatrix to_incidence(const Hypergraph& g) {
    BitMatrix H(static_cast<std::size_t>(g.num_edges), static_cast<std::size_t>(g.num_nodes));
    for (std::int64_t p = 0; p < g.nnz(); ++p)
        H.set(static_cast<std::size_t>(g.pair_edge[p]),
              static_cast<std::size_t>(g.pair_node[p]), true);
    return H;
}

double weighted_degree(const Hypergraph& g, const std::vector<double>& w, std::int64_t i) {
    if (i < 0 || i >= g.num_nodes) throw std::out_of_range("weighted_degree: node index");
    if (w.size() != static_cast<std::size_t>(g.num_edges))
        throw std::invalid_argument("weighted_degree: weight vector length");
    if (g.node_degree[i] == 0)
        throw std::invalid_argument("weighted_degree: node " + std::to_string(i) +
                                    " is isolated");
    double d = 0;
    for (std::int64_t p = g.node_begin(i); p < g.node_end(i); ++p)
        d += w[g.pair_edge[p]];
    return d;
}

}  // namespace qdec
