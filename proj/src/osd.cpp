#include "qdec/osd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qdec {

namespace {

double log_likelihood(const BitVector& e, const std::vector<double>& post) {
    double ll = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        const double p = std::clamp(post[i], 1e-12, 1.0 - 1e-12);
        ll += e.get(i) ? std::log(p) : std::log(1.0 - p);
    }
    return ll;
}

}  // namespace

BitVector osd_postprocess(const BitMatrix& H, const BitVector& syn,
                          const std::vector<double>& posteriors, const OsdConfig& cfg) {
    const std::size_t n = H.cols(), m = H.rows();
    if (syn.size() != m) throw std::invalid_argument("osd: syndrome length != rows");
    if (posteriors.size() != n) throw std::invalid_argument("osd: posteriors length != cols");

    // rank columns most-likely-in-error first; ties by index for determinism
    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    std::stable_sort(perm.begin(), perm.end(), [&](std::uint32_t a, std::uint32_t b) {
        return posteriors[a] > posteriors[b];
    });

    // eliminate the column-permuted augmented system [H_perm | s]
    BitMatrix M(m, n);
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < n; ++c)
            if (H.get(r, perm[c])) M.set(r, c, true);
    BitVector rhs = syn;
    std::vector<std::size_t> pivot_cols;  // permuted positions
    std::size_t rr = 0;
    for (std::size_t c = 0; c < n && rr < m; ++c) {
        std::size_t piv = rr;
        while (piv < m && !M.get(piv, c)) ++piv;
        if (piv == m) continue;
        M.swap_rows(piv, rr);
        const bool tmp = rhs.get(piv);
        rhs.set(piv, rhs.get(rr));
        rhs.set(rr, tmp);
        for (std::size_t r2 = 0; r2 < m; ++r2)
            if (r2 != rr && M.get(r2, c)) {
                M.xor_row_into(rr, r2);
                if (rhs.get(rr)) rhs.flip(r2);
            }
        pivot_cols.push_back(c);
        ++rr;
    }
    for (std::size_t r2 = rr; r2 < m; ++r2)
        if (rhs.get(r2))
            throw std::invalid_argument("osd: syndrome not in the column space of H");

    const std::size_t rank = rr;
    // order-0 solution in permuted coordinates: free columns zero
    BitVector base(n);
    for (std::size_t p = 0; p < rank; ++p)
        if (rhs.get(p)) base.set(pivot_cols[p], true);

    auto unpermute = [&](const BitVector& xp) {
        BitVector x(n);
        for (std::size_t c = 0; c < n; ++c)
            if (xp.get(c)) x.set(perm[c], true);
        return x;
    };

    BitVector best = unpermute(base);
    if (cfg.order > 0) {
        std::vector<std::size_t> free_cols;
        {
            std::vector<bool> is_pivot(n, false);
            for (std::size_t c : pivot_cols) is_pivot[c] = true;
            for (std::size_t c = 0; c < n; ++c)
                if (!is_pivot[c]) free_cols.push_back(c);
        }
        // free columns are already ranked by decreasing error probability
        const std::size_t pool = std::min(cfg.pool, free_cols.size());
        double best_ll = log_likelihood(best, posteriors);

        // flipping free column f adds column f of the reduced system to the pivots
        std::vector<BitVector> patch;
        for (std::size_t i = 0; i < pool; ++i) {
            BitVector pv(n);
            pv.set(free_cols[i], true);
            for (std::size_t p = 0; p < rank; ++p)
                if (M.get(p, free_cols[i])) pv.flip(pivot_cols[p]);
            patch.push_back(std::move(pv));
        }

        std::vector<std::size_t> subset;
        auto consider = [&]() {
            BitVector cand = base;
            for (std::size_t idx : subset) cand ^= patch[idx];
            BitVector cand_un = unpermute(cand);
            const double ll = log_likelihood(cand_un, posteriors);
            if (ll > best_ll) {
                best_ll = ll;
                best = std::move(cand_un);
            }
        };
        // enumerate subsets of sizes 1..order in lexicographic order
        auto sweep = [&](auto&& self, std::size_t start, std::size_t left) -> void {
            if (left == 0) {
                consider();
                return;
            }
            for (std::size_t i = start; i + left <= pool; ++i) {
                subset.push_back(i);
                self(self, i + 1, left - 1);
                subset.pop_back();
            }
        };
        for (unsigned w = 1; w <= cfg.order && w <= pool; ++w) sweep(sweep, 0, w);
    }

    if (mul(H, best) != syn) throw std::logic_error("osd: internal consistency failure");
    return best;
}

BitVector css_osd_postprocess(const CssCode& code, const BitVector& syn,
                              const std::vector<double>& posteriors,
                              const OsdConfig& cfg) {
    if (syn.size() != code.m())
        throw std::invalid_argument("css_osd: syndrome length mismatch");
    if (posteriors.size() != 2 * code.n)
        throw std::invalid_argument("css_osd: posterior length mismatch");
    std::vector<double> px(posteriors.begin(), posteriors.begin() + static_cast<std::ptrdiff_t>(code.n));
    std::vector<double> pz(posteriors.begin() + static_cast<std::ptrdiff_t>(code.n), posteriors.end());
    BitVector ex = osd_postprocess(code.hz, syn.slice(0, code.mz()), px, cfg);
    BitVector ez = osd_postprocess(code.hx, syn.slice(code.mz(), code.mx()), pz, cfg);
    BitVector e(2 * code.n);
    e.assign_slice(0, ex);
    e.assign_slice(code.n, ez);
    return e;
}

}  // namespace qdec
