#pragma once

// Classical parity-check codes, the hypergraph-product construction,
// CSS validation and logical-operator extraction, plus alist file I/O.
//
// Conventions used throughout the toolkit:
//   * An error on n qubits is e = (e_X || e_Z) in F_2^{2n}; e_X marks
//     bit-flip components, e_Z phase-flip components.
//   * The syndrome is s = (H_Z e_X || H_X e_Z): the checks detecting
//     bit-flips (rows of H_Z) come first, then the rows of H_X.
//     Hypergraph hyperedges (hypergraph.hpp) follow the same order.

#include <optional>
#include <string>
#include <vector>

#include "qdec/gf2.hpp"

namespace qdec {

struct ClassicalCode {
    BitMatrix H;                    // m x n parity checks
    std::string name;
    std::optional<std::size_t> distance;  // declared metadata, never computed

    ClassicalCode() = default;
    ClassicalCode(BitMatrix h, std::string nm,
                  std::optional<std::size_t> d = std::nullopt);

    std::size_t n() const { return H.cols(); }
    std::size_t m() const { return H.rows(); }
};

struct CssCode {
    BitMatrix hx;   // m_x x n
    BitMatrix hz;   // m_z x n
    std::size_t n = 0;
    std::size_t k = 0;
    BitMatrix lx;   // k x n logical X representatives
    BitMatrix lz;   // k x n logical Z representatives, L_X L_Z^T = I
    std::string name;

    std::size_t mx() const { return hx.rows(); }
    std::size_t mz() const { return hz.rows(); }
    std::size_t m() const { return mx() + mz(); }

    // block-diagonal stabilizer matrix acting on (e_X || e_Z):
    // rows [0, m_z) are H_Z on the X block, rows [m_z, m) are H_X on the Z block
    BitMatrix stabilizer_matrix() const;
};

// H_X = [H1 (x) I | I (x) H2^T], H_Z = [I (x) H2 | H1^T (x) I]
CssCode hgp_construct(const ClassicalCode& c1, const ClassicalCode& c2);

struct ValidationReport {
    bool commutation_ok = false;        // H_X H_Z^T == 0
    std::size_t n = 0, k = 0, mx = 0, mz = 0;
    std::size_t rank_hx = 0, rank_hz = 0;
    bool logicals_ok = false;           // zero syndrome, non-stabilizer, unit pairing
    std::vector<std::size_t> row_weights_hx, row_weights_hz;
    std::vector<std::size_t> col_weights_hx, col_weights_hz;
    std::size_t max_row_weight = 0, max_col_weight = 0;

    bool ok() const { return commutation_ok && logicals_ok; }
    std::string summary() const;
};

ValidationReport validate_css(const CssCode& code);

// Recomputes a paired logical basis (k rows each); throws if the CSS
// invariants do not hold up.
std::pair<BitMatrix, BitMatrix> logical_operators(const BitMatrix& hx,
                                                  const BitMatrix& hz,
                                                  std::size_t expected_k);

// alist interchange format (1-based indices, column lists then row lists)
ClassicalCode load_alist(const std::string& path);
void save_alist(const std::string& path, const ClassicalCode& code);
BitMatrix parse_alist(const std::string& text, const std::string& origin);

// CssCode directory: hx.alist, hz.alist, meta.txt
void save_css_dir(const std::string& dir, const CssCode& code);
CssCode load_css_dir(const std::string& dir);

}  // namespace qdec
