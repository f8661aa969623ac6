#pragma once

// Shared minibatch training loop: seeded shuffling, AdamW updates,
// held-out validation split, early stopping, per-epoch checkpointing and
// a CSV loss log. Fully deterministic given (dataset, options.seed).

#include <functional>
#include <string>

#include "qdec/batch.hpp"

namespace qdec::nn {

struct TrainOptions {
    std::int64_t epochs = 300;
    std::int64_t batch = 64;
    double lr = 5e-5;
    double weight_decay = 5e-4;
    std::uint64_t seed = 0;
    double val_frac = 0.1;
    std::int64_t patience = 30;    // epochs without val improvement; <= 0 disables
    std::string ckpt_path;         // written every epoch; best weights restored at end
    std::string log_path;          // csv: epoch,train_loss,val_loss,wall_time_s
    bool verbose = false;
};

struct TrainResult {
    std::vector<double> train_loss;
    std::vector<double> val_loss;
    std::int64_t best_epoch = -1;
    double best_val = 0;
    std::int64_t epochs_run = 0;
};

// builds the scalar loss var for one batch; the trainer owns everything else
using LossBuilder =
    std::function<Var(Tape&, const BatchIndex&, const BatchData&)>;

TrainResult run_training(const std::vector<Param*>& params, const LossBuilder& loss_fn,
                         const Hypergraph& g, const Dataset& dataset,
                         const TrainOptions& opt,
                         const std::function<void(const std::string&)>& save_ckpt);

}  // namespace qdec::nn
