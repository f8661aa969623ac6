#include "qdec/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

namespace qdec {

LogicalErrorChecker::LogicalErrorChecker(const CssCode& code)
    : code_(&code), rr_hx_(row_reduce(code.hx)), rr_hz_(row_reduce(code.hz)) {}

bool LogicalErrorChecker::is_logical_error(const BitVector& e,
                                           const BitVector& e_hat) const {
    if (e.size() != 2 * code_->n || e_hat.size() != 2 * code_->n)
        throw std::invalid_argument("is_logical_error: length mismatch");
    BitVector r = e;
    r ^= e_hat;
    BitVector rx = r.slice(0, code_->n);
    BitVector rz = r.slice(code_->n, code_->n);
    if (!mul(code_->hz, rx).is_zero()) return true;
    if (!mul(code_->hx, rz).is_zero()) return true;
    return !(in_rowspace(rr_hx_, rx) && in_rowspace(rr_hz_, rz));
}

WilsonInterval wilson_interval(std::uint64_t failures, std::uint64_t trials, double z) {
    WilsonInterval w;
    if (trials == 0) return w;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(failures) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    w.low = std::max(0.0, center - half);
    w.high = std::min(1.0, center + half);
    return w;
}

LerPoint measure_ler(const CssCode& code, const LogicalErrorChecker& checker,
                     const DecoderFactory& factory, double p_f, const LerOptions& opt) {
    if (opt.trials == 0) throw std::invalid_argument("measure_ler: trials must be >= 1");

    const std::uint64_t num_chunks = (opt.trials + opt.chunk - 1) / opt.chunk;
    std::vector<std::uint64_t> chunk_failures(num_chunks, 0);
    std::atomic<std::uint64_t> next_chunk{0};

    // per-qubit mode counts failed logical coordinates, normalized by k
    const std::size_t k = code.k;

    auto worker_fn = [&]() {
        auto decoder = factory();
        std::vector<Sample> batch;
        std::vector<BitVector> decoded;
        while (true) {
            const std::uint64_t c = next_chunk.fetch_add(1);
            if (c >= num_chunks) break;
            const std::uint64_t lo = c * opt.chunk;
            const std::uint64_t hi = std::min<std::uint64_t>(lo + opt.chunk, opt.trials);
            ChannelConfig ch;
            ch.p_f = p_f;
            ch.model = opt.model;
            Rng rng(derive_seed(opt.seed, kDomainEval, c));
            batch.clear();
            for (std::uint64_t i = lo; i < hi; ++i)
                batch.push_back(sample_iid(code, ch, rng));
            decoder->decode_batch(batch, decoded);
            std::uint64_t fails = 0;
            for (std::size_t i = 0; i < batch.size(); ++i) {
                if (!opt.per_qubit) {
                    fails += checker.is_logical_error(batch[i].e, decoded[i]) ? 1 : 0;
                } else {
                    // class coordinates of the residual against the paired basis
                    BitVector r = batch[i].e;
                    r ^= decoded[i];
                    BitVector rx = r.slice(0, code.n);
                    BitVector rz = r.slice(code.n, code.n);
                    if (!mul(code.hz, rx).is_zero() || !mul(code.hx, rz).is_zero()) {
                        fails += k;  // unresolved syndrome counts as all-failed
                    } else {
                        for (std::size_t q = 0; q < k; ++q) {
                            bool ax = false, az = false;
                            for (std::size_t c2 = 0; c2 < code.n; ++c2) {
                                if (rx.get(c2) && code.lz.get(q, c2)) ax = !ax;
                                if (rz.get(c2) && code.lx.get(q, c2)) az = !az;
                            }
                            if (ax || az) ++fails;
                        }
                    }
                }
            }
            chunk_failures[c] = fails;
        }
    };

    const unsigned workers = std::max(1u, opt.workers);
    if (workers == 1) {
        worker_fn();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker_fn);
        for (auto& t : pool) t.join();
    }

    LerPoint pt;
    pt.p_f = p_f;
    pt.trials = opt.trials * (opt.per_qubit ? std::max<std::size_t>(k, 1) : 1);
    for (std::uint64_t f : chunk_failures) pt.failures += f;
    pt.ler = static_cast<double>(pt.failures) / static_cast<double>(pt.trials);
    WilsonInterval ci = wilson_interval(pt.failures, pt.trials);
    pt.ci_low = ci.low;
    pt.ci_high = ci.high;
    return pt;
}

PseudoThreshold find_pseudo_threshold(const std::vector<LerPoint>& points) {
    PseudoThreshold out;
    std::vector<LerPoint> pts = points;
    std::sort(pts.begin(), pts.end(),
              [](const LerPoint& a, const LerPoint& b) { return a.p_f < b.p_f; });
    if (pts.size() < 2) {
        out.note = "need at least two sweep points";
        return out;
    }

    auto margin = [](const LerPoint& p) { return p.ler - p.p_f; };  // >0: above identity

    auto interpolate = [](const LerPoint& a, const LerPoint& b) -> double {
        // log-log interpolation, falling back to linear when a LER is zero
        if (a.ler > 0 && b.ler > 0) {
            const double x1 = std::log(a.p_f), y1 = std::log(a.ler);
            const double x2 = std::log(b.p_f), y2 = std::log(b.ler);
            const double denom = (y2 - y1) - (x2 - x1);
            if (std::abs(denom) < 1e-300) return std::sqrt(a.p_f * b.p_f);
            const double x = x1 + (x1 - y1) * (x2 - x1) / denom;
            return std::exp(x);
        }
        const double d1 = a.ler - a.p_f, d2 = b.ler - b.p_f;
        if (std::abs(d1 - d2) < 1e-300) return a.p_f;
        const double t = d1 / (d1 - d2);
        return a.p_f + t * (b.p_f - a.p_f);
    };

    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double m1 = margin(pts[i]), m2 = margin(pts[i + 1]);
        if ((m1 <= 0 && m2 > 0) || (m1 >= 0 && m2 < 0) || m1 == 0) {
            out.value = m1 == 0 ? pts[i].p_f : interpolate(pts[i], pts[i + 1]);
            out.note = "interpolated crossing";
            return out;
        }
    }

    const bool all_above = std::all_of(pts.begin(), pts.end(),
                                       [&](const LerPoint& p) { return margin(p) > 0; });
    if (all_above) {
        out.note = "LER above the identity line across the sweep (detection regime)";
        return out;
    }
    // entirely below: extrapolate from the last two usable points
    const LerPoint& a = pts[pts.size() - 2];
    const LerPoint& b = pts.back();
    if (a.ler > 0 && b.ler > 0) {
        out.value = interpolate(a, b);
        out.extrapolated = true;
        out.note = "below the identity line across the sweep; crossing extrapolated";
    } else {
        out.note = "below the identity line across the sweep; zero-failure points "
                   "prevent extrapolation";
    }
    return out;
}

namespace {

void write_rows(std::ofstream& f, const std::vector<SweepReport>& reports, char sep) {
    for (const SweepReport& rep : reports)
        for (const LerPoint& p : rep.points)
            f << rep.decoder_id << sep << p.p_f << sep << p.trials << sep << p.failures
              << sep << p.ler << sep << p.ci_low << sep << p.ci_high << "\n";
}

}  // namespace

void write_sweep_csv(const std::string& path, const std::vector<SweepReport>& reports) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write sweep csv: " + path);
    f << "decoder,p_f,trials,failures,ler,ci_low,ci_high\n";
    f.precision(12);
    write_rows(f, reports, ',');
}

void write_sweep_gnuplot(const std::string& path, const std::vector<SweepReport>& reports) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write sweep data: " + path);
    f << "# decoder p_f trials failures ler ci_low ci_high\n";
    f.precision(12);
    write_rows(f, reports, ' ');
}

}  // namespace qdec
