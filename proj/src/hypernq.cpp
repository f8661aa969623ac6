#include "qdec/hypernq.hpp"

#include <cmath>
#include <stdexcept>

namespace qdec::nn {

FeatureEncoder FeatureEncoder::make(std::int64_t two_n, bool use_llr) {
    if (two_n < 2) throw std::invalid_argument("FeatureEncoder: need at least one qubit");
    FeatureEncoder enc;
    enc.two_n = two_n;
    enc.use_llr = use_llr;
    enc.index_bits = 1;
    while ((std::int64_t(1) << enc.index_bits) < two_n) ++enc.index_bits;
    enc.c1 = enc.index_bits + 1 + (use_llr ? 1 : 0);
    return enc;
}

Tensor FeatureEncoder::node_features(double p_f) const {
    Tensor x(two_n, c1);
    const double llr = use_llr ? std::log((1.0 - p_f) / p_f) : 0.0;
    for (std::int64_t i = 0; i < two_n; ++i) {
        for (std::int64_t b = 0; b < index_bits; ++b)
            x.at(i, b) = static_cast<Real>((i >> b) & 1);
        x.at(i, index_bits) = Real(0);  // bit_value: error unknown at decode time
        if (use_llr) x.at(i, index_bits + 1) = static_cast<Real>(llr);
    }
    return x;
}

std::vector<Param*> HyperNQModel::params() {
    return {&w_v,    &w_y0, &b_y0, &s_embed, &a_n2e_f, &a_n2e_s, &a_e2n_f, &a_e2n_s,
            &w_ue,   &b_ue, &w_me, &w_uv,    &b_uv,    &w_out,   &b_out};
}

std::vector<const Param*> HyperNQModel::params() const {
    auto mut = const_cast<HyperNQModel*>(this)->params();
    return {mut.begin(), mut.end()};
}

HyperNQModel HyperNQModel::init(const Hypergraph& g, const HyperNqConfig& cfg,
                                std::uint64_t seed) {
    HyperNQModel mdl;
    mdl.cfg = cfg;
    mdl.enc = FeatureEncoder::make(g.num_nodes, cfg.use_llr);
    mdl.two_n = g.num_nodes;
    mdl.m = g.num_edges;
    mdl.init_seed = seed;
    const std::int64_t c1 = mdl.enc.c1, c2 = cfg.hidden;

    mdl.w_v = Param("w_v", Tensor(c1, c2));
    mdl.w_y0 = Param("w_y0", Tensor(2, c2));
    mdl.b_y0 = Param("b_y0", Tensor(1, c2));
    mdl.s_embed = Param("s_embed", Tensor(1, c2));
    mdl.a_n2e_f = Param("a_n2e_f", Tensor(c2, 1));
    mdl.a_n2e_s = Param("a_n2e_s", Tensor(c2, 1));
    mdl.a_e2n_f = Param("a_e2n_f", Tensor(c2, 1));
    mdl.a_e2n_s = Param("a_e2n_s", Tensor(c2, 1));
    mdl.w_ue = Param("w_ue", Tensor(2 * c2, c2));
    mdl.b_ue = Param("b_ue", Tensor(1, c2));
    mdl.w_me = Param("w_me", Tensor(c2, c2));
    mdl.w_uv = Param("w_uv", Tensor(2 * c2, c2));
    mdl.b_uv = Param("b_uv", Tensor(1, c2));
    mdl.w_out = Param("w_out", Tensor(c2, 1));
    mdl.b_out = Param("b_out", Tensor(1, 1));

    Rng rng(derive_seed(seed, kDomainWeights));
    // biases stay zero; everything else Glorot in declaration order
    for (Param* p : mdl.params())
        if (p->name[0] != 'b') glorot_init(p->value, rng);
    return mdl;
}

ForwardVars hypernq_forward(Tape& tape, HyperNQModel& model, const BatchIndex& bi,
                            const BatchData& bd, double p_f) {
    if (bi.two_n != model.two_n || bi.m != model.m)
        throw std::invalid_argument("hypernq_forward: graph does not match model dims");
    const Real slope = model.cfg.leaky_slope;

    ForwardVars fv;
    fv.x = tape.input(model.enc.node_features(p_f));
    Var w_v = tape.param(model.w_v);
    fv.vf = tape.matmul(fv.x, w_v);  // 2n x c2, shared across the batch

    // stage 1: node -> hyperedge
    Var u_node = tape.matmul(fv.vf, tape.param(model.a_n2e_f));            // 2n x 1
    Var v_syn1 = tape.matmul(tape.param(model.s_embed), tape.param(model.a_n2e_s));
    Var s_col = tape.input(bd.s_col);
    Var vs1 = tape.scale_by_scalar(s_col, v_syn1);                         // b*m x 1
    Var sc1 = tape.leaky_relu(
        tape.add(tape.gather_rows(u_node, bi.node_plain),
                 tape.gather_rows(vs1, bi.edge_batched)),
        slope);
    fv.alpha = tape.segment_softmax(sc1, bi.seg_offsets);
    Var coeff1 = tape.mul(fv.alpha, tape.input(bd.k1));
    Var msum = tape.pair_aggregate(fv.vf, coeff1, bi.node_plain, bi.edge_batched,
                                   bi.b * bi.m);
    Var y0 = tape.add_rowvec(tape.matmul(tape.input(bd.sw), tape.param(model.w_y0)),
                             tape.param(model.b_y0));
    fv.yprime = tape.relu(tape.add_rowvec(
        tape.matmul(tape.concat_cols(y0, msum), tape.param(model.w_ue)),
        tape.param(model.b_ue)));

    // stage 2: hyperedge -> node
    Var ge = tape.matmul(fv.yprime, tape.param(model.w_me));               // b*m x c2
    Var u_edge = tape.matmul(ge, tape.param(model.a_e2n_f));               // b*m x 1
    Var v_syn2 = tape.matmul(tape.param(model.s_embed), tape.param(model.a_e2n_s));
    Var vs2 = tape.scale_by_scalar(s_col, v_syn2);
    Var sc2 = tape.leaky_relu(
        tape.gather_rows(tape.add(u_edge, vs2), bi.edge_batched), slope);
    fv.beta = tape.segment_softmax(sc2, bi.seg_offsets);
    Var coeff2 = tape.mul(fv.beta, tape.input(bd.k2));
    Var magg = tape.pair_aggregate(ge, coeff2, bi.edge_batched, bi.node_batched,
                                   bi.b * bi.two_n);
    Var fstack = bi.b == 1 ? fv.vf : tape.tile_rows(fv.vf, bi.b);
    fv.xprime = tape.relu(tape.add_rowvec(
        tape.matmul(tape.concat_cols(fstack, magg), tape.param(model.w_uv)),
        tape.param(model.b_uv)));

    Var logits = tape.add_rowvec(tape.matmul(fv.xprime, tape.param(model.w_out)),
                                 tape.param(model.b_out));
    fv.probs = tape.sigmoid(logits);
    if (bd.targets.size() > 0) fv.loss = tape.bce_loss(fv.probs, bd.targets);
    return fv;
}

EncodedFeatures encode_features(const HyperNQModel& model, const Hypergraph& g,
                                const BitVector& syn, double p_f) {
    if (syn.size() != static_cast<std::size_t>(g.num_edges))
        throw std::invalid_argument("encode_features: syndrome length mismatch");
    EncodedFeatures ef;
    ef.x = model.enc.node_features(p_f);
    ef.w.resize(g.num_edges);
    ef.s.resize(g.num_edges);
    for (std::int64_t j = 0; j < g.num_edges; ++j) {
        ef.s[j] = syn.get(static_cast<std::size_t>(j)) ? 1.0 : 0.0;
        ef.w[j] = 1.0 + ef.s[j];
    }
    ef.y0 = Tensor(g.num_edges, model.cfg.hidden);
    for (std::int64_t j = 0; j < g.num_edges; ++j)
        for (std::int64_t c = 0; c < model.cfg.hidden; ++c)
            ef.y0.at(j, c) = static_cast<Real>(ef.s[j]) * model.w_y0.value.at(0, c) +
                             static_cast<Real>(ef.w[j]) * model.w_y0.value.at(1, c) +
                             model.b_y0.value.at(0, c);
    return ef;
}

HypernqDecoder::HypernqDecoder(HyperNQModel model, const Hypergraph& g, double p_f)
    : model_(std::move(model)), g_(&g), p_f_(p_f) {
    if (model_.two_n != g.num_nodes || model_.m != g.num_edges)
        throw std::invalid_argument("HypernqDecoder: model/code dimension mismatch");
    bi1_ = BatchIndex::build(g, 1);
}

std::vector<DecodeResult> HypernqDecoder::decode_batch(std::span<const BitVector> syns) {
    BatchIndex bi = syns.size() == 1 ? bi1_ : BatchIndex::build(*g_, static_cast<std::int64_t>(syns.size()));
    BatchData bd = BatchData::build(*g_, syns);
    Tape tape;
    ForwardVars fv = hypernq_forward(tape, model_, bi, bd, p_f_);
    const Tensor& probs = tape.val(fv.probs);

    std::vector<DecodeResult> out(syns.size());
    for (std::size_t s = 0; s < syns.size(); ++s) {
        DecodeResult& r = out[s];
        r.e_hat = BitVector(static_cast<std::size_t>(g_->num_nodes));
        r.probs.resize(g_->num_nodes);
        for (std::int64_t i = 0; i < g_->num_nodes; ++i) {
            const double p = static_cast<double>(
                probs.at(static_cast<std::int64_t>(s) * g_->num_nodes + i, 0));
            r.probs[i] = p;
            if (p > 0.5) r.e_hat.set(static_cast<std::size_t>(i), true);
        }
        // recompute the syndrome of the estimate through the incidence lists
        bool matched = true;
        for (std::int64_t j = 0; j < g_->num_edges && matched; ++j) {
            bool parity = false;
            for (std::int64_t q = g_->edge_offsets[j]; q < g_->edge_offsets[j + 1]; ++q)
                parity ^= r.e_hat.get(
                    static_cast<std::size_t>(g_->pair_node[g_->byedge_perm[q]]));
            if (parity != syns[s].get(static_cast<std::size_t>(j))) matched = false;
        }
        r.syndrome_matched = matched;
    }
    return out;
}

DecodeResult HypernqDecoder::decode(const BitVector& syn) {
    return decode_batch(std::span<const BitVector>(&syn, 1)).front();
}

TrainResult train_hypernq(HyperNQModel& model, const Hypergraph& g,
                          const Dataset& dataset, const TrainOptions& opt,
                          double p_f_feature) {
    auto loss_fn = [&model, p_f_feature](Tape& tape, const BatchIndex& bi,
                                         const BatchData& bd) {
        ForwardVars fv = hypernq_forward(tape, model, bi, bd, p_f_feature);
        return fv.loss;
    };
    auto save = [&model](const std::string& path) { model.save(path); };
    return run_training(model.params(), loss_fn, g, dataset, opt, save);
}

void HyperNQModel::save(const std::string& path) const {
    CheckpointMeta meta;
    meta.arch = "hypernq-v1";
    meta.seed = init_seed;
    meta.ints["two_n"] = two_n;
    meta.ints["m"] = m;
    meta.ints["hidden"] = cfg.hidden;
    meta.ints["index_bits"] = enc.index_bits;
    meta.ints["use_llr"] = cfg.use_llr ? 1 : 0;
    save_checkpoint(path, meta, params());
}

HyperNQModel HyperNQModel::load(const std::string& path) {
    Checkpoint ck = load_checkpoint(path);
    if (ck.meta.arch != "hypernq-v1")
        throw std::runtime_error(path + ": checkpoint arch is '" + ck.meta.arch +
                                 "', expected hypernq-v1");
    HyperNQModel mdl;
    mdl.cfg.hidden = ck.meta.ints.at("hidden");
    mdl.cfg.use_llr = ck.meta.ints.at("use_llr") != 0;
    mdl.two_n = ck.meta.ints.at("two_n");
    mdl.m = ck.meta.ints.at("m");
    mdl.init_seed = ck.meta.seed;
    mdl.enc = FeatureEncoder::make(mdl.two_n, mdl.cfg.use_llr);
    if (mdl.enc.index_bits != ck.meta.ints.at("index_bits"))
        throw std::runtime_error(path + ": index_bits mismatch");

    // instantiate with the right shapes, then overwrite values
    const std::int64_t c2 = mdl.cfg.hidden;
    auto mk = [&](Param& p, const char* name, std::int64_t r, std::int64_t c) {
        p = Param(name, Tensor(r, c));
        auto it = ck.tensors.find(name);
        if (it == ck.tensors.end())
            throw std::runtime_error(path + ": missing tensor " + name);
        if (it->second.rows != r || it->second.cols != c)
            throw std::runtime_error(path + ": tensor " + name + " has wrong shape");
        p.value = it->second;
    };
    mk(mdl.w_v, "w_v", mdl.enc.c1, c2);
    mk(mdl.w_y0, "w_y0", 2, c2);
    mk(mdl.b_y0, "b_y0", 1, c2);
    mk(mdl.s_embed, "s_embed", 1, c2);
    mk(mdl.a_n2e_f, "a_n2e_f", c2, 1);
    mk(mdl.a_n2e_s, "a_n2e_s", c2, 1);
    mk(mdl.a_e2n_f, "a_e2n_f", c2, 1);
    mk(mdl.a_e2n_s, "a_e2n_s", c2, 1);
    mk(mdl.w_ue, "w_ue", 2 * c2, c2);
    mk(mdl.b_ue, "b_ue", 1, c2);
    mk(mdl.w_me, "w_me", c2, c2);
    mk(mdl.w_uv, "w_uv", 2 * c2, c2);
    mk(mdl.b_uv, "b_uv", 1, c2);
    mk(mdl.w_out, "w_out", c2, 1);
    mk(mdl.b_out, "b_out", 1, 1);
    return mdl;
}

}  // namespace qdec::nn
