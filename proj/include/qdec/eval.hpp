#pragma once

// Monte Carlo logical-error-rate measurement: the logical-failure
// classifier, a seeded multi-worker trial loop whose counts are
// independent of the worker count, Wilson intervals, pseudo-threshold
// detection and CSV/gnuplot report output.

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "qdec/channel.hpp"

namespace qdec {

// Precomputed reductions for the residual-class test.
class LogicalErrorChecker {
public:
    explicit LogicalErrorChecker(const CssCode& code);

    // true iff e xor e_hat acts nontrivially: nonzero syndrome, or a
    // zero-syndrome residual outside the stabilizer group
    bool is_logical_error(const BitVector& e, const BitVector& e_hat) const;

    const CssCode& code() const { return *code_; }

private:
    const CssCode* code_;
    RowReduceResult rr_hx_, rr_hz_;
};

// decoder wrapper used by the Monte Carlo loop; real decoders must only
// look at smp.s (the oracle reference decoder reads smp.e)
struct SampleDecoder {
    virtual ~SampleDecoder() = default;
    virtual BitVector decode(const Sample& smp) = 0;
    virtual void decode_batch(std::span<const Sample> smps, std::vector<BitVector>& out) {
        out.clear();
        for (const Sample& s : smps) out.push_back(decode(s));
    }
};

using DecoderFactory = std::function<std::unique_ptr<SampleDecoder>()>;

struct WilsonInterval {
    double low = 0, high = 0;
};
WilsonInterval wilson_interval(std::uint64_t failures, std::uint64_t trials,
                               double z = 1.959963984540054);

struct LerPoint {
    double p_f = 0;
    std::uint64_t trials = 0;
    std::uint64_t failures = 0;
    double ler = 0;
    double ci_low = 0, ci_high = 0;
};

struct LerOptions {
    std::uint64_t trials = 100000;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    ChannelModel model = ChannelModel::depolarizing;
    std::size_t chunk = 1024;   // substream granularity; fixed so results
                                // do not depend on the worker count
    bool per_qubit = false;     // count failed logical qubits instead of blocks
};

LerPoint measure_ler(const CssCode& code, const LogicalErrorChecker& checker,
                     const DecoderFactory& factory, double p_f, const LerOptions& opt);

struct SweepReport {
    std::string decoder_id;
    std::vector<LerPoint> points;
    std::optional<double> pseudo_threshold;
    bool threshold_extrapolated = false;
    std::string threshold_note;
};

// crossing of LER(p) with the identity line, log-log interpolated between
// straddling sweep points; extrapolates past the top of an all-below
// sweep and reports none for curves entirely above the line
struct PseudoThreshold {
    std::optional<double> value;
    bool extrapolated = false;
    std::string note;
};
PseudoThreshold find_pseudo_threshold(const std::vector<LerPoint>& points);

void write_sweep_csv(const std::string& path, const std::vector<SweepReport>& reports);
void write_sweep_gnuplot(const std::string& path, const std::vector<SweepReport>& reports);

}  // namespace qdec
