#pragma once

// Error sampling, syndrome computation and dataset generation. Training
// sets follow the deterministic-coverage-plus-decaying-random recipe;
// evaluation streams are i.i.d. Pauli noise. Training and evaluation
// randomness live in disjoint seed domains (rng.hpp), never deduplicated.

#include <cstdint>
#include <string>
#include <vector>

#include "qdec/codes.hpp"
#include "qdec/rng.hpp"

namespace qdec {

struct Sample {
    BitVector e;  // length 2n, (e_X || e_Z)
    BitVector s;  // length m, (H_Z e_X || H_X e_Z)
};

enum class ChannelModel : std::uint8_t {
    depolarizing = 0,    // X, Z, Y each with p_f/3
    independent_xz = 1,  // X and Z flips independently with p_f each
};

struct ChannelConfig {
    double p_f = 1e-3;
    ChannelModel model = ChannelModel::depolarizing;
    std::uint64_t seed = 0;
};

struct TrainDistConfig {
    std::size_t num_random = 0;
    double lambda = 1.0;            // weight t drawn with P(t) ~ exp(-lambda t)
    bool include_singletons = true;
    bool include_zero = true;
    std::uint64_t seed = 0;
};

BitVector syndrome(const CssCode& code, const BitVector& e);

// i.i.d. Pauli error on every qubit plus its syndrome
Sample sample_iid(const CssCode& code, const ChannelConfig& cfg, Rng& rng);

struct Dataset {
    std::uint32_t two_n = 0, m = 0;
    std::uint64_t seed = 0;
    std::uint8_t model_tag = 0;  // 0/1 channel models, 2 = training distribution
    std::vector<Sample> samples;
};

// {zero} + {all 2n single-component flips} + random decaying-weight errors
Dataset gen_training_set(const CssCode& code, const TrainDistConfig& cfg,
                         std::size_t size = 25000);

// lazy i.i.d. sample stream, seed-domain separated from training
class EvalStream {
public:
    EvalStream(const CssCode& code, const ChannelConfig& cfg)
        : code_(&code), cfg_(cfg), rng_(derive_seed(cfg.seed, kDomainEval)) {}

    Sample next() { return sample_iid(*code_, cfg_, rng_); }

private:
    const CssCode* code_;
    ChannelConfig cfg_;
    Rng rng_;
};

Dataset gen_eval_set(const CssCode& code, const ChannelConfig& cfg, std::size_t count);

// binary dataset file ("QSYN"), little endian, bit-packed samples
void save_dataset(const std::string& path, const Dataset& ds);
Dataset load_dataset(const std::string& path);
void export_dataset_csv(const std::string& path, const Dataset& ds);

}  // namespace qdec
