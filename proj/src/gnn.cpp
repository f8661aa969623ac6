#include "qdec/gnn.hpp"

#include <stdexcept>

namespace qdec::nn {

std::vector<Param*> TannerGnnModel::params() {
    std::vector<Param*> ps = {&w_enc_v, &b_enc_v, &w_enc_c, &b_enc_c};
    for (GnnLayer& l : layers) {
        ps.push_back(&l.w_check);
        ps.push_back(&l.b_check);
        ps.push_back(&l.w_var);
        ps.push_back(&l.b_var);
    }
    ps.push_back(&w_out);
    ps.push_back(&b_out);
    return ps;
}

std::vector<const Param*> TannerGnnModel::params() const {
    auto mut = const_cast<TannerGnnModel*>(this)->params();
    return {mut.begin(), mut.end()};
}

TannerGnnModel TannerGnnModel::init(const Hypergraph& g, const GnnConfig& cfg,
                                    std::uint64_t seed) {
    TannerGnnModel mdl;
    mdl.cfg = cfg;
    mdl.enc = FeatureEncoder::make(g.num_nodes, cfg.use_llr);
    mdl.two_n = g.num_nodes;
    mdl.m = g.num_edges;
    mdl.init_seed = seed;
    const std::int64_t d = cfg.hidden;

    mdl.w_enc_v = Param("w_enc_v", Tensor(mdl.enc.c1, d));
    mdl.b_enc_v = Param("b_enc_v", Tensor(1, d));
    mdl.w_enc_c = Param("w_enc_c", Tensor(1, d));
    mdl.b_enc_c = Param("b_enc_c", Tensor(1, d));
    for (std::int64_t l = 0; l < cfg.layers; ++l) {
        GnnLayer layer;
        const std::string tag = std::to_string(l);
        layer.w_check = Param("w_check" + tag, Tensor(2 * d, d));
        layer.b_check = Param("b_check" + tag, Tensor(1, d));
        layer.w_var = Param("w_var" + tag, Tensor(2 * d, d));
        layer.b_var = Param("b_var" + tag, Tensor(1, d));
        mdl.layers.push_back(std::move(layer));
    }
    mdl.w_out = Param("w_out", Tensor(d, 1));
    mdl.b_out = Param("b_out", Tensor(1, 1));

    Rng rng(derive_seed(seed, kDomainWeights));
    for (Param* p : mdl.params())
        if (p->name[0] != 'b') glorot_init(p->value, rng);
    return mdl;
}

GnnForwardVars gnn_forward(Tape& tape, TannerGnnModel& model, const BatchIndex& bi,
                           const BatchData& bd, double p_f) {
    if (bi.two_n != model.two_n || bi.m != model.m)
        throw std::invalid_argument("gnn_forward: graph does not match model dims");

    // mean-aggregation coefficients: per pair 1/deg(dst)
    Tensor to_check(bi.b * bi.nnz, 1), to_var(bi.b * bi.nnz, 1);
    {
        std::vector<std::int32_t> edge_deg(static_cast<std::size_t>(bi.m), 0);
        std::vector<std::int32_t> node_deg(static_cast<std::size_t>(bi.two_n), 0);
        for (std::int64_t p = 0; p < bi.nnz; ++p) {
            ++edge_deg[bi.edge_batched[p] % bi.m];
            ++node_deg[bi.node_plain[p]];
        }
        for (std::int64_t p = 0; p < bi.b * bi.nnz; ++p) {
            to_check.v[p] = Real(1) / static_cast<Real>(edge_deg[bi.edge_batched[p] % bi.m]);
            to_var.v[p] = Real(1) / static_cast<Real>(node_deg[bi.node_plain[p]]);
        }
    }
    Var coeff_vc = tape.input(std::move(to_check));
    Var coeff_cv = tape.input(std::move(to_var));

    Var x = tape.input(model.enc.node_features(p_f));
    Var v_feat = tape.add_rowvec(tape.matmul(x, tape.param(model.w_enc_v)),
                                 tape.param(model.b_enc_v));
    Var v_state = bi.b == 1 ? v_feat : tape.tile_rows(v_feat, bi.b);  // b*2n x d
    Var c_state = tape.add_rowvec(tape.matmul(tape.input(bd.s_col), tape.param(model.w_enc_c)),
                                  tape.param(model.b_enc_c));         // b*m x d

    for (GnnLayer& layer : model.layers) {
        Var agg_c = tape.pair_aggregate(v_state, coeff_vc, bi.node_batched,
                                        bi.edge_batched, bi.b * bi.m);
        c_state = tape.relu(tape.add_rowvec(
            tape.matmul(tape.concat_cols(c_state, agg_c), tape.param(layer.w_check)),
            tape.param(layer.b_check)));
        Var agg_v = tape.pair_aggregate(c_state, coeff_cv, bi.edge_batched,
                                        bi.node_batched, bi.b * bi.two_n);
        v_state = tape.relu(tape.add_rowvec(
            tape.matmul(tape.concat_cols(v_state, agg_v), tape.param(layer.w_var)),
            tape.param(layer.b_var)));
    }

    GnnForwardVars fv;
    Var logits = tape.add_rowvec(tape.matmul(v_state, tape.param(model.w_out)),
                                 tape.param(model.b_out));
    fv.probs = tape.sigmoid(logits);
    if (bd.targets.size() > 0) fv.loss = tape.bce_loss(fv.probs, bd.targets);
    return fv;
}

GnnDecoder::GnnDecoder(TannerGnnModel model, const Hypergraph& g, double p_f)
    : model_(std::move(model)), g_(&g), p_f_(p_f) {
    if (model_.two_n != g.num_nodes || model_.m != g.num_edges)
        throw std::invalid_argument("GnnDecoder: model/code dimension mismatch");
    bi1_ = BatchIndex::build(g, 1);
}

std::vector<DecodeResult> GnnDecoder::decode_batch(std::span<const BitVector> syns) {
    BatchIndex bi = syns.size() == 1
                        ? bi1_
                        : BatchIndex::build(*g_, static_cast<std::int64_t>(syns.size()));
    BatchData bd = BatchData::build(*g_, syns);
    Tape tape;
    GnnForwardVars fv = gnn_forward(tape, model_, bi, bd, p_f_);
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

DecodeResult GnnDecoder::decode(const BitVector& syn) {
    return decode_batch(std::span<const BitVector>(&syn, 1)).front();
}

TrainResult train_gnn(TannerGnnModel& model, const Hypergraph& g, const Dataset& dataset,
                      const TrainOptions& opt, double p_f_feature) {
    auto loss_fn = [&model, p_f_feature](Tape& tape, const BatchIndex& bi,
                                         const BatchData& bd) {
        GnnForwardVars fv = gnn_forward(tape, model, bi, bd, p_f_feature);
        return fv.loss;
    };
    auto save = [&model](const std::string& path) { model.save(path); };
    return run_training(model.params(), loss_fn, g, dataset, opt, save);
}

void TannerGnnModel::save(const std::string& path) const {
    CheckpointMeta meta;
    meta.arch = "tanner-gnn-v1";
    meta.seed = init_seed;
    meta.ints["two_n"] = two_n;
    meta.ints["m"] = m;
    meta.ints["hidden"] = cfg.hidden;
    meta.ints["layers"] = cfg.layers;
    meta.ints["index_bits"] = enc.index_bits;
    meta.ints["use_llr"] = cfg.use_llr ? 1 : 0;
    save_checkpoint(path, meta, params());
}

TannerGnnModel TannerGnnModel::load(const std::string& path) {
    Checkpoint ck = load_checkpoint(path);
    if (ck.meta.arch != "tanner-gnn-v1")
        throw std::runtime_error(path + ": checkpoint arch is '" + ck.meta.arch +
                                 "', expected tanner-gnn-v1");
    TannerGnnModel mdl;
    mdl.cfg.hidden = ck.meta.ints.at("hidden");
    mdl.cfg.layers = ck.meta.ints.at("layers");
    mdl.cfg.use_llr = ck.meta.ints.at("use_llr") != 0;
    mdl.two_n = ck.meta.ints.at("two_n");
    mdl.m = ck.meta.ints.at("m");
    mdl.init_seed = ck.meta.seed;
    mdl.enc = FeatureEncoder::make(mdl.two_n, mdl.cfg.use_llr);
    if (mdl.enc.index_bits != ck.meta.ints.at("index_bits"))
        throw std::runtime_error(path + ": index_bits mismatch");

    const std::int64_t d = mdl.cfg.hidden;
    auto mk = [&](Param& p, const std::string& name, std::int64_t r, std::int64_t c) {
        p = Param(name, Tensor(r, c));
        auto it = ck.tensors.find(name);
        if (it == ck.tensors.end())
            throw std::runtime_error(path + ": missing tensor " + name);
        if (it->second.rows != r || it->second.cols != c)
            throw std::runtime_error(path + ": tensor " + name + " has wrong shape");
        p.value = it->second;
    };
    mk(mdl.w_enc_v, "w_enc_v", mdl.enc.c1, d);
    mk(mdl.b_enc_v, "b_enc_v", 1, d);
    mk(mdl.w_enc_c, "w_enc_c", 1, d);
    mk(mdl.b_enc_c, "b_enc_c", 1, d);
    for (std::int64_t l = 0; l < mdl.cfg.layers; ++l) {
        GnnLayer layer;
        const std::string tag = std::to_string(l);
        mk(layer.w_check, "w_check" + tag, 2 * d, d);
        mk(layer.b_check, "b_check" + tag, 1, d);
        mk(layer.w_var, "w_var" + tag, 2 * d, d);
        mk(layer.b_var, "b_var" + tag, 1, d);
        mdl.layers.push_back(std::move(layer));
    }
    mk(mdl.w_out, "w_out", d, 1);
    mk(mdl.b_out, "b_out", 1, 1);
    return mdl;
}

}  // namespace qdec::nn
