#pragma once

// SampleDecoder adapters for the classical decoders plus the trivial
// reference decoders used by tests and calibration runs.

#include "qdec/bp.hpp"
#include "qdec/eval.hpp"
#include "qdec/osd.hpp"

namespace qdec {

// returns the true error; LER of this decoder is exactly zero
struct OracleSampleDecoder final : SampleDecoder {
    BitVector decode(const Sample& smp) override { return smp.e; }
};

// returns the zero correction
struct IdentitySampleDecoder final : SampleDecoder {
    explicit IdentitySampleDecoder(std::size_t two_n) : two_n_(two_n) {}
    BitVector decode(const Sample& smp) override {
        (void)smp;
        return BitVector(two_n_);
    }
    std::size_t two_n_;
};

class BpSampleDecoder final : public SampleDecoder {
public:
    BpSampleDecoder(const CssCode& code, BpConfig cfg)
        : code_(&code), cfg_(cfg),
          tg_z_(TannerGraph::build(code.hz)), tg_x_(TannerGraph::build(code.hx)) {}

    BitVector decode(const Sample& smp) override {
        return css_bp_decode(*code_, tg_z_, tg_x_, smp.s, cfg_).e_hat;
    }

private:
    const CssCode* code_;
    BpConfig cfg_;
    TannerGraph tg_z_, tg_x_;
};

class BpOsdSampleDecoder final : public SampleDecoder {
public:
    BpOsdSampleDecoder(const CssCode& code, BpConfig bp, OsdConfig osd)
        : code_(&code), bp_(bp), osd_(osd),
          tg_z_(TannerGraph::build(code.hz)), tg_x_(TannerGraph::build(code.hx)) {}

    BitVector decode(const Sample& smp) override {
        CssBpResult r = css_bp_decode(*code_, tg_z_, tg_x_, smp.s, bp_);
        if (r.converged) return r.e_hat;
        return css_osd_postprocess(*code_, smp.s, r.posteriors, osd_);
    }

private:
    const CssCode* code_;
    BpConfig bp_;
    OsdConfig osd_;
    TannerGraph tg_z_, tg_x_;
};

}  // namespace qdec
