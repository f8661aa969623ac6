#include "qdec/bp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qdec {

TannerGraph TannerGraph::build(const BitMatrix& H) {
    TannerGraph tg;
    tg.num_checks = H.rows();
    tg.num_vars = H.cols();
    tg.check_offsets.assign(tg.num_checks + 1, 0);
    for (std::size_t r = 0; r < H.rows(); ++r) {
        for (std::size_t c = 0; c < H.cols(); ++c)
            if (H.get(r, c)) tg.edge_var.push_back(static_cast<std::uint32_t>(c));
        tg.check_offsets[r + 1] = tg.edge_var.size();
    }
    tg.var_offsets.assign(tg.num_vars + 1, 0);
    std::vector<std::size_t> deg(tg.num_vars, 0);
    for (std::uint32_t v : tg.edge_var) ++deg[v];
    for (std::size_t v = 0; v < tg.num_vars; ++v)
        tg.var_offsets[v + 1] = tg.var_offsets[v] + deg[v];
    tg.var_edges.assign(tg.edge_var.size(), 0);
    std::vector<std::size_t> cursor(tg.var_offsets.begin(), tg.var_offsets.end() - 1);
    for (std::size_t e = 0; e < tg.edge_var.size(); ++e)
        tg.var_edges[cursor[tg.edge_var[e]]++] = e;
    return tg;
}

BpResult bp_decode(const TannerGraph& tg, const BitVector& syn, const BpConfig& cfg) {
    if (syn.size() != tg.num_checks)
        throw std::invalid_argument("bp_decode: syndrome length != checks");
    if (!(cfg.prior > 0.0 && cfg.prior < 1.0))
        throw std::invalid_argument("bp_decode: prior must be in (0,1)");
    if (cfg.schedule != BpSchedule::flooding)
        throw std::invalid_argument("bp_decode: only the flooding schedule is implemented");

    const std::size_t E = tg.edge_var.size();
    const double llr0 = std::log((1.0 - cfg.prior) / cfg.prior);  // log P(0)/P(1)
    std::vector<double> v2c(E, llr0), c2v(E, 0.0), total(tg.num_vars, llr0);

    BpResult res;
    res.e_hat = BitVector(tg.num_vars);
    res.posteriors.assign(tg.num_vars, 1.0 / (1.0 + std::exp(llr0)));

    auto syndrome_ok = [&]() {
        for (std::size_t c = 0; c < tg.num_checks; ++c) {
            bool parity = false;
            for (std::size_t e = tg.check_offsets[c]; e < tg.check_offsets[c + 1]; ++e)
                parity ^= res.e_hat.get(tg.edge_var[e]);
            if (parity != syn.get(c)) return false;
        }
        return true;
    };

    if (syndrome_ok()) {  // priors alone already explain the syndrome
        res.converged = true;
        return res;
    }

    constexpr double kTanhClip = 1.0 - 1e-12;
    std::vector<double> fwd;  // prefix products within a check row
    for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
        // check -> variable, exclude-self via prefix/suffix products
        for (std::size_t c = 0; c < tg.num_checks; ++c) {
            const std::size_t lo = tg.check_offsets[c], hi = tg.check_offsets[c + 1];
            const std::size_t deg = hi - lo;
            fwd.assign(deg + 1, 1.0);
            for (std::size_t k = 0; k < deg; ++k)
                fwd[k + 1] = fwd[k] * std::tanh(0.5 * v2c[lo + k]);
            double suffix = 1.0;
            const double sign = syn.get(c) ? -1.0 : 1.0;
            for (std::size_t k = deg; k-- > 0;) {
                double prod = std::clamp(fwd[k] * suffix, -kTanhClip, kTanhClip);
                double msg = sign * 2.0 * std::atanh(prod);
                c2v[lo + k] = cfg.damping > 0.0
                                  ? cfg.damping * c2v[lo + k] + (1.0 - cfg.damping) * msg
                                  : msg;
                suffix *= std::tanh(0.5 * v2c[lo + k]);
            }
        }
        // variable -> check and hard decision
        for (std::size_t v = 0; v < tg.num_vars; ++v) {
            double sum = llr0;
            for (std::size_t k = tg.var_offsets[v]; k < tg.var_offsets[v + 1]; ++k)
                sum += c2v[tg.var_edges[k]];
            total[v] = sum;
            for (std::size_t k = tg.var_offsets[v]; k < tg.var_offsets[v + 1]; ++k) {
                const std::size_t e = tg.var_edges[k];
                v2c[e] = sum - c2v[e];
            }
            res.e_hat.set(v, sum < 0.0);
        }
        res.iterations = it;
        if (syndrome_ok()) {
            res.converged = true;
            break;
        }
    }
    for (std::size_t v = 0; v < tg.num_vars; ++v)
        res.posteriors[v] = 1.0 / (1.0 + std::exp(total[v]));
    return res;
}

BpResult bp_decode(const BitMatrix& H, const BitVector& syn, const BpConfig& cfg) {
    return bp_decode(TannerGraph::build(H), syn, cfg);
}

CssBpResult css_bp_decode(const CssCode& code, const TannerGraph& tg_z,
                          const TannerGraph& tg_x, const BitVector& syn,
                          const BpConfig& cfg) {
    if (syn.size() != code.m())
        throw std::invalid_argument("css_bp_decode: syndrome length mismatch");
    BpResult rx = bp_decode(tg_z, syn.slice(0, code.mz()), cfg);
    BpResult rz = bp_decode(tg_x, syn.slice(code.mz(), code.mx()), cfg);
    CssBpResult res;
    res.e_hat = BitVector(2 * code.n);
    res.e_hat.assign_slice(0, rx.e_hat);
    res.e_hat.assign_slice(code.n, rz.e_hat);
    res.posteriors = rx.posteriors;
    res.posteriors.insert(res.posteriors.end(), rz.posteriors.begin(), rz.posteriors.end());
    res.converged = rx.converged && rz.converged;
    return res;
}

}  // namespace qdec
