#include "qdec/trainer.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>

namespace qdec::nn {

namespace {

double batch_loss(Tape& tape, const LossBuilder& loss_fn, const BatchIndex& bi,
                  const BatchData& bd) {
    Var loss = loss_fn(tape, bi, bd);
    return static_cast<double>(tape.val(loss).v[0]);
}

}  // namespace

TrainResult run_training(const std::vector<Param*>& params, const LossBuilder& loss_fn,
                         const Hypergraph& g, const Dataset& dataset,
                         const TrainOptions& opt,
                         const std::function<void(const std::string&)>& save_ckpt) {
    if (dataset.samples.empty()) throw std::invalid_argument("train: empty dataset");
    if (dataset.two_n != static_cast<std::uint32_t>(g.num_nodes) ||
        dataset.m != static_cast<std::uint32_t>(g.num_edges))
        throw std::invalid_argument("train: dataset dimensions do not match code");
    if (opt.batch < 1) throw std::invalid_argument("train: batch must be >= 1");

    // deterministic split: shuffle indices once, tail becomes validation
    const std::size_t total = dataset.samples.size();
    std::vector<std::uint32_t> order(total);
    for (std::size_t i = 0; i < total; ++i) order[i] = static_cast<std::uint32_t>(i);
    Rng split_rng(derive_seed(opt.seed, kDomainShuffle, 0));
    split_rng.shuffle(order);
    std::size_t val_count = static_cast<std::size_t>(static_cast<double>(total) * opt.val_frac);
    if (val_count >= total) val_count = total - 1;
    std::vector<std::uint32_t> train_idx(order.begin(), order.end() - static_cast<std::ptrdiff_t>(val_count));
    std::vector<std::uint32_t> val_idx(order.end() - static_cast<std::ptrdiff_t>(val_count), order.end());

    AdamConfig adam;
    adam.lr = opt.lr;
    adam.weight_decay = opt.weight_decay;

    std::map<std::int64_t, BatchIndex> index_cache;
    auto batch_index = [&](std::int64_t b) -> const BatchIndex& {
        auto it = index_cache.find(b);
        if (it == index_cache.end())
            it = index_cache.emplace(b, BatchIndex::build(g, b)).first;
        return it->second;
    };

    auto gather_batch = [&](const std::vector<std::uint32_t>& idx, std::size_t lo,
                            std::size_t hi) {
        std::vector<BitVector> syn, err;
        syn.reserve(hi - lo);
        err.reserve(hi - lo);
        for (std::size_t i = lo; i < hi; ++i) {
            syn.push_back(dataset.samples[idx[i]].s);
            err.push_back(dataset.samples[idx[i]].e);
        }
        return BatchData::build(g, syn, err);
    };

    auto eval_split = [&](const std::vector<std::uint32_t>& idx) -> double {
        if (idx.empty()) return 0.0;
        double acc = 0;
        std::size_t done = 0;
        Tape tape;
        while (done < idx.size()) {
            std::size_t hi = std::min(done + static_cast<std::size_t>(opt.batch), idx.size());
            BatchData bd = gather_batch(idx, done, hi);
            tape.clear();
            acc += batch_loss(tape, loss_fn, batch_index(static_cast<std::int64_t>(hi - done)), bd) *
                   static_cast<double>(hi - done);
            done = hi;
        }
        return acc / static_cast<double>(idx.size());
    };

    std::ofstream log;
    if (!opt.log_path.empty()) {
        log.open(opt.log_path, std::ios::binary);
        if (!log) throw std::runtime_error("cannot write training log: " + opt.log_path);
        log << "epoch,train_loss,val_loss,wall_time_s\n";
    }

    TrainResult res;
    res.best_val = std::numeric_limits<double>::infinity();
    std::vector<Tensor> best_values;
    for (Param* p : params) best_values.push_back(p->value);

    const auto t0 = std::chrono::steady_clock::now();
    Rng shuffle_rng(derive_seed(opt.seed, kDomainShuffle, 1));
    Tape tape;
    std::int64_t stale = 0;
    for (std::int64_t epoch = 0; epoch < opt.epochs; ++epoch) {
        shuffle_rng.shuffle(train_idx);
        double epoch_loss = 0;
        std::size_t done = 0;
        while (done < train_idx.size()) {
            std::size_t hi = std::min(done + static_cast<std::size_t>(opt.batch), train_idx.size());
            BatchData bd = gather_batch(train_idx, done, hi);
            tape.clear();
            Var loss = loss_fn(tape, batch_index(static_cast<std::int64_t>(hi - done)), bd);
            epoch_loss += static_cast<double>(tape.val(loss).v[0]) * static_cast<double>(hi - done);
            zero_grads(params);
            tape.backward(loss);
            adam_step(params, adam);
            done = hi;
        }
        epoch_loss /= static_cast<double>(train_idx.size());
        const double vloss = eval_split(val_idx);
        res.train_loss.push_back(epoch_loss);
        res.val_loss.push_back(vloss);
        res.epochs_run = epoch + 1;

        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (log)
            log << epoch + 1 << "," << epoch_loss << "," << vloss << "," << wall << "\n" << std::flush;
        if (opt.verbose)
            std::cout << "epoch " << epoch + 1 << "  train " << epoch_loss << "  val " << vloss
                      << "  (" << wall << " s)" << std::endl;

        const double monitored = val_idx.empty() ? epoch_loss : vloss;
        if (monitored < res.best_val) {
            res.best_val = monitored;
            res.best_epoch = epoch + 1;
            for (std::size_t i = 0; i < params.size(); ++i) best_values[i] = params[i]->value;
            stale = 0;
        } else {
            ++stale;
        }
        if (!opt.ckpt_path.empty() && save_ckpt) save_ckpt(opt.ckpt_path);
        if (opt.patience > 0 && stale >= opt.patience) break;
    }

    // restore and persist the best weights
    for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = best_values[i];
    if (!opt.ckpt_path.empty() && save_ckpt) save_ckpt(opt.ckpt_path);
    return res;
}

}  // namespace qdec::nn
