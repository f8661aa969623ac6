#pragma once

// Syndrome belief propagation (sum-product, log domain, flooding
// schedule) on the Tanner graph of one parity-check matrix, plus the CSS
// wrapper that decodes the two error blocks independently.

#include <cstdint>
#include <vector>

#include "qdec/codes.hpp"

namespace qdec {

struct TannerGraph {
    std::size_t num_vars = 0, num_checks = 0;
    // edges in check-major order
    std::vector<std::size_t> check_offsets;  // num_checks+1
    std::vector<std::uint32_t> edge_var;     // var of edge e
    // per-var view: indices into the edge arrays
    std::vector<std::size_t> var_offsets;    // num_vars+1
    std::vector<std::size_t> var_edges;

    static TannerGraph build(const BitMatrix& H);
};

enum class BpSchedule : std::uint8_t { flooding = 0, serial = 1 };

struct BpConfig {
    std::size_t max_iters = 32;
    double prior = 0.05;       // channel error probability per bit
    double damping = 0.0;      // 0 = none
    BpSchedule schedule = BpSchedule::flooding;  // serial is a config stub
};

struct BpResult {
    BitVector e_hat;
    std::vector<double> posteriors;  // P(bit = 1)
    bool converged = false;
    std::size_t iterations = 0;      // iterations actually run
};

BpResult bp_decode(const TannerGraph& tg, const BitVector& syn, const BpConfig& cfg);
BpResult bp_decode(const BitMatrix& H, const BitVector& syn, const BpConfig& cfg);

// decodes e_X from (H_Z, s[0:mz)) and e_Z from (H_X, s[mz:m)); the prior
// is the per-component marginal 2 p_f / 3 of the depolarizing channel
struct CssBpResult {
    BitVector e_hat;  // 2n
    std::vector<double> posteriors;
    bool converged = false;
};

CssBpResult css_bp_decode(const CssCode& code, const TannerGraph& tg_z,
                          const TannerGraph& tg_x, const BitVector& syn,
                          const BpConfig& cfg);

}  // namespace qdec
