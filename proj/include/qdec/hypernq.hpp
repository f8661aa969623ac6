#pragma once

// HyperNQ: hypergraph neural decoder with one two-stage message-passing
// layer. Stage 1 aggregates attention-weighted, syndrome-weighted,
// degree-normalized node messages into each hyperedge; stage 2 propagates
// the updated hyperedge features back to the nodes; a sigmoid readout
// yields per-node flip probabilities.
//
// Design notes:
//  * score(f, S_j) = leaky_relu(a^T [f || S_j * s_embed]); the scoring
//    vector a is split into its two halves a_f, a_s so the syndrome part
//    collapses to a per-hyperedge scalar.
//  * Both attention softmaxes normalize over the hyperedges incident to
//    a node (the denominators run over j' with (i,j') in E).
//  * U_e / U_v are single affine maps on [state || message] followed by
//    ReLU; the node state entering U_v is the stage-1 transform M_v(X_i).

#include <memory>

#include "qdec/batch.hpp"
#include "qdec/trainer.hpp"

namespace qdec::nn {

struct FeatureEncoder {
    std::int64_t two_n = 0;
    std::int64_t index_bits = 0;
    bool use_llr = false;
    std::int64_t c1 = 0;  // index_bits + 1 (+1 with llr)

    static FeatureEncoder make(std::int64_t two_n, bool use_llr);

    // row i = [binary(i), bit_value = 0 (, llr)]
    Tensor node_features(double p_f) const;
};

struct HyperNqConfig {
    std::int64_t hidden = 128;  // C2
    bool use_llr = false;
    Real leaky_slope = Real(0.2);
};

struct HyperNQModel {
    HyperNqConfig cfg;
    FeatureEncoder enc;
    std::int64_t two_n = 0, m = 0;
    std::uint64_t init_seed = 0;

    Param w_v;                  // c1 x c2 node transform M_v
    Param w_y0, b_y0;           // 2 x c2, 1 x c2 hyperedge init from (S, w)
    Param s_embed;              // 1 x c2 syndrome embedding inside scores
    Param a_n2e_f, a_n2e_s;     // c2 x 1 halves of the stage-1 scoring vector
    Param a_e2n_f, a_e2n_s;     // c2 x 1 halves of the stage-2 scoring vector
    Param w_ue, b_ue;           // 2c2 x c2, 1 x c2 hyperedge update U_e
    Param w_me;                 // c2 x c2 hyperedge transform M_e
    Param w_uv, b_uv;           // 2c2 x c2, 1 x c2 node update U_v
    Param w_out, b_out;         // c2 x 1, 1 x 1 readout

    std::vector<Param*> params();
    std::vector<const Param*> params() const;

    static HyperNQModel init(const Hypergraph& g, const HyperNqConfig& cfg,
                             std::uint64_t seed);
    void save(const std::string& path) const;
    static HyperNQModel load(const std::string& path);
};

// per-sample feature encoding, exposed for tests and the CLI
struct EncodedFeatures {
    Tensor x;                // 2n x c1
    Tensor y0;               // m x c2 (learned embedding of (S, w))
    std::vector<double> w;   // m, w_j = 1 + s_j
    std::vector<double> s;   // m
};
EncodedFeatures encode_features(const HyperNQModel& model, const Hypergraph& g,
                                const BitVector& syn, double p_f);

// tape vars of one batched forward pass (internals exposed for oracles)
struct ForwardVars {
    Var x, vf, alpha, beta, yprime, xprime, probs;
    Var loss;  // valid only when targets were provided
};

ForwardVars hypernq_forward(Tape& tape, HyperNQModel& model, const BatchIndex& bi,
                            const BatchData& bd, double p_f);

struct DecodeResult {
    BitVector e_hat;             // 2n, probs > 0.5 (ties decode to 0)
    std::vector<double> probs;   // 2n
    bool syndrome_matched = false;
};

// Owns a copy of the model; decode is a pure function of the syndrome, so
// one decoder per worker thread is the sharing model.
class HypernqDecoder {
public:
    HypernqDecoder(HyperNQModel model, const Hypergraph& g, double p_f);

    DecodeResult decode(const BitVector& syn);
    std::vector<DecodeResult> decode_batch(std::span<const BitVector> syns);

    const HyperNQModel& model() const { return model_; }

private:
    HyperNQModel model_;
    const Hypergraph* g_;
    double p_f_;
    BatchIndex bi1_;
};

TrainResult train_hypernq(HyperNQModel& model, const Hypergraph& g,
                          const Dataset& dataset, const TrainOptions& opt,
                          double p_f_feature = 1e-3);

}  // namespace qdec::nn
