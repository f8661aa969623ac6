#pragma once

// Tanner-graph GNN baseline: six rounds of variable<->check message
// passing with mean aggregation and affine+ReLU updates, sharing the
// tensor engine, feature encoding, readout, loss and optimizer with the
// hypergraph decoder. A stand-in for published Tanner GNN decoders whose
// exact internals are not public.

#include "qdec/batch.hpp"
#include "qdec/hypernq.hpp"
#include "qdec/trainer.hpp"

namespace qdec::nn {

struct GnnConfig {
    std::int64_t hidden = 128;
    std::int64_t layers = 6;
    bool use_llr = false;
};

struct GnnLayer {
    Param w_check, b_check;  // 2d x d, 1 x d   check update on [C || mean V]
    Param w_var, b_var;      // 2d x d, 1 x d   variable update on [V || mean C]
};

struct TannerGnnModel {
    GnnConfig cfg;
    FeatureEncoder enc;
    std::int64_t two_n = 0, m = 0;
    std::uint64_t init_seed = 0;

    Param w_enc_v, b_enc_v;  // c1 x d, 1 x d   variable embedding
    Param w_enc_c, b_enc_c;  // 1 x d, 1 x d    check embedding from the syndrome bit
    std::vector<GnnLayer> layers;
    Param w_out, b_out;      // d x 1, 1 x 1

    std::vector<Param*> params();
    std::vector<const Param*> params() const;

    static TannerGnnModel init(const Hypergraph& g, const GnnConfig& cfg,
                               std::uint64_t seed);
    void save(const std::string& path) const;
    static TannerGnnModel load(const std::string& path);
};

struct GnnForwardVars {
    Var probs;
    Var loss;  // valid only with targets
};

GnnForwardVars gnn_forward(Tape& tape, TannerGnnModel& model, const BatchIndex& bi,
                           const BatchData& bd, double p_f);

class GnnDecoder {
public:
    GnnDecoder(TannerGnnModel model, const Hypergraph& g, double p_f);

    DecodeResult decode(const BitVector& syn);
    std::vector<DecodeResult> decode_batch(std::span<const BitVector> syns);

private:
    TannerGnnModel model_;
    const Hypergraph* g_;
    double p_f_;
    BatchIndex bi1_;
};

TrainResult train_gnn(TannerGnnModel& model, const Hypergraph& g, const Dataset& dataset,
                      const TrainOptions& opt, double p_f_feature = 1e-3);

}  // namespace qdec::nn
