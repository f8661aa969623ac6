#pragma once

// SampleDecoder adapters for the neural decoders.

#include "qdec/eval.hpp"
#include "qdec/gnn.hpp"
#include "qdec/hypernq.hpp"

namespace qdec::nn {

class HypernqSampleDecoder final : public SampleDecoder {
public:
    HypernqSampleDecoder(const HyperNQModel& model, const Hypergraph& g, double p_f)
        : dec_(model, g, p_f) {}

    BitVector decode(const Sample& smp) override { return dec_.decode(smp.s).e_hat; }

    void decode_batch(std::span<const Sample> smps, std::vector<BitVector>& out) override {
        syns_.clear();
        for (const Sample& s : smps) syns_.push_back(s.s);
        auto results = dec_.decode_batch(syns_);
        out.clear();
        for (auto& r : results) out.push_back(std::move(r.e_hat));
    }

private:
    HypernqDecoder dec_;
    std::vector<BitVector> syns_;
};

class GnnSampleDecoder final : public SampleDecoder {
public:
    GnnSampleDecoder(const TannerGnnModel& model, const Hypergraph& g, double p_f)
        : dec_(model, g, p_f) {}

    BitVector decode(const Sample& smp) override { return dec_.decode(smp.s).e_hat; }

    void decode_batch(std::span<const Sample> smps, std::vector<BitVector>& out) override {
        syns_.clear();
        for (const Sample& s : smps) syns_.push_back(s.s);
        auto results = dec_.decode_batch(syns_);
        out.clear();
        for (auto& r : results) out.push_back(std::move(r.e_hat));
    }

private:
    GnnDecoder dec_;
    std::vector<BitVector> syns_;
};

}  // namespace qdec::nn
