#pragma once

// Ordered-statistics post-processing on BP (or channel) reliabilities.
// Columns are ranked by decreasing error probability, an information set
// is taken greedily by Gaussian elimination, and order-w additionally
// sweeps all subsets of up to w flips over the most error-prone free
// columns, keeping the syndrome-consistent candidate with the highest
// log-likelihood. The returned estimate always satisfies H e = s.

#include <cstdint>
#include <vector>

#include "qdec/codes.hpp"

namespace qdec {

struct OsdConfig {
    unsigned order = 0;        // 0 or the sweep depth w
    std::size_t pool = 10;     // free columns eligible for flipping
};

BitVector osd_postprocess(const BitMatrix& H, const BitVector& syn,
                          const std::vector<double>& posteriors, const OsdConfig& cfg);

// per-block CSS wrapper matching css_bp_decode's posterior layout
BitVector css_osd_postprocess(const CssCode& code, const BitVector& syn,
                              const std::vector<double>& posteriors,
                              const OsdConfig& cfg);

}  // namespace qdec
