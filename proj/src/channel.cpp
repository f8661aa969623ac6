#include "qdec/channel.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace qdec {

BitVector syndrome(const CssCode& code, const BitVector& e) {
    if (e.size() != 2 * code.n)
        throw std::invalid_argument("syndrome: error vector length != 2n");
    BitVector ex = e.slice(0, code.n);
    BitVector ez = e.slice(code.n, code.n);
    BitVector s(code.m());
    s.assign_slice(0, mul(code.hz, ex));
    s.assign_slice(code.mz(), mul(code.hx, ez));
    return s;
}

Sample sample_iid(const CssCode& code, const ChannelConfig& cfg, Rng& rng) {
    if (!(cfg.p_f > 0.0 && cfg.p_f < 1.0))
        throw std::invalid_argument("sample_iid: p_f must be in (0,1)");
    Sample smp;
    smp.e = BitVector(2 * code.n);
    if (cfg.model == ChannelModel::depolarizing) {
        for (std::size_t q = 0; q < code.n; ++q) {
            double u = rng.next_real();
            if (u < cfg.p_f / 3.0) {
                smp.e.set(q, true);                       // X
            } else if (u < 2.0 * cfg.p_f / 3.0) {
                smp.e.set(code.n + q, true);              // Z
            } else if (u < cfg.p_f) {
                smp.e.set(q, true);                       // Y = X and Z
                smp.e.set(code.n + q, true);
            }
        }
    } else {
        for (std::size_t q = 0; q < code.n; ++q) {
            if (rng.bernoulli(cfg.p_f)) smp.e.set(q, true);
            if (rng.bernoulli(cfg.p_f)) smp.e.set(code.n + q, true);
        }
    }
    smp.s = syndrome(code, smp.e);
    return smp;
}

Dataset gen_training_set(const CssCode& code, const TrainDistConfig& cfg,
                         std::size_t size) {
    const std::size_t two_n = 2 * code.n;
    std::size_t deterministic = (cfg.include_zero ? 1 : 0) +
                                (cfg.include_singletons ? two_n : 0);
    if (size < deterministic + 1)
        throw std::invalid_argument("gen_training_set: size too small for coverage block");
    std::size_t num_random = cfg.num_random ? cfg.num_random : size - deterministic;
    if (deterministic + num_random != size)
        throw std::invalid_argument("gen_training_set: counts do not add up to size");

    Dataset ds;
    ds.two_n = static_cast<std::uint32_t>(two_n);
    ds.m = static_cast<std::uint32_t>(code.m());
    ds.seed = cfg.seed;
    ds.model_tag = 2;
    ds.samples.reserve(size);

    auto push = [&](BitVector e) {
        Sample smp;
        smp.s = syndrome(code, e);
        smp.e = std::move(e);
        ds.samples.push_back(std::move(smp));
    };

    if (cfg.include_zero) push(BitVector(two_n));
    if (cfg.include_singletons)
        for (std::size_t i = 0; i < two_n; ++i) {
            BitVector e(two_n);
            e.set(i, true);
            push(std::move(e));
        }

    // truncated exponential weight distribution, P(t) ~ exp(-lambda t), t >= 1
    std::vector<double> cdf(two_n);
    double acc = 0;
    for (std::size_t t = 1; t <= two_n; ++t) {
        acc += std::exp(-cfg.lambda * static_cast<double>(t));
        cdf[t - 1] = acc;
    }
    for (auto& c : cdf) c /= acc;

    Rng rng(derive_seed(cfg.seed, kDomainTrain));
    for (std::size_t i = 0; i < num_random; ++i) {
        double u = rng.next_real();
        std::size_t t = 1;
        while (t < two_n && u > cdf[t - 1]) ++t;
        BitVector e(two_n);
        for (std::uint32_t pos : rng.sample_without_replacement(
                 static_cast<std::uint32_t>(two_n), static_cast<std::uint32_t>(t)))
            e.set(pos, true);
        push(std::move(e));
    }
    return ds;
}

Dataset gen_eval_set(const CssCode& code, const ChannelConfig& cfg, std::size_t count) {
    if (count == 0) throw std::invalid_argument("gen_eval_set: count must be >= 1");
    Dataset ds;
    ds.two_n = static_cast<std::uint32_t>(2 * code.n);
    ds.m = static_cast<std::uint32_t>(code.m());
    ds.seed = cfg.seed;
    ds.model_tag = static_cast<std::uint8_t>(cfg.model);
    ds.samples.reserve(count);
    EvalStream stream(code, cfg);
    for (std::size_t i = 0; i < count; ++i) ds.samples.push_back(stream.next());
    return ds;
}

// ---------------------------------------------------------------------------
// file format

namespace {

constexpr char kMagic[4] = {'Q', 'S', 'Y', 'N'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& f, T v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T take(std::ifstream& f) {
    T v{};
    f.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

void put_bits(std::ofstream& f, const BitVector& v) {
    std::size_t nbytes = (v.size() + 7) / 8;
    std::vector<unsigned char> buf(nbytes, 0);
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v.get(i)) buf[i / 8] |= static_cast<unsigned char>(1u << (i % 8));
    f.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(nbytes));
}

BitVector take_bits(std::ifstream& f, std::size_t len) {
    std::size_t nbytes = (len + 7) / 8;
    std::vector<unsigned char> buf(nbytes);
    f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(nbytes));
    BitVector v(len);
    for (std::size_t i = 0; i < len; ++i)
        if ((buf[i / 8] >> (i % 8)) & 1u) v.set(i, true);
    return v;
}

}  // namespace

void save_dataset(const std::string& path, const Dataset& ds) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write dataset: " + path);
    f.write(kMagic, 4);
    put<std::uint32_t>(f, kVersion);
    put<std::uint32_t>(f, ds.two_n);
    put<std::uint32_t>(f, ds.m);
    put<std::uint64_t>(f, ds.samples.size());
    put<std::uint64_t>(f, ds.seed);
    put<std::uint8_t>(f, ds.model_tag);
    for (const Sample& smp : ds.samples) {
        put_bits(f, smp.e);
        put_bits(f, smp.s);
    }
    if (!f) throw std::runtime_error("dataset write failed: " + path);
}

Dataset load_dataset(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open dataset: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error(path + ": not a QSYN dataset");
    if (take<std::uint32_t>(f) != kVersion)
        throw std::runtime_error(path + ": unsupported dataset version");
    Dataset ds;
    ds.two_n = take<std::uint32_t>(f);
    ds.m = take<std::uint32_t>(f);
    std::uint64_t count = take<std::uint64_t>(f);
    ds.seed = take<std::uint64_t>(f);
    ds.model_tag = take<std::uint8_t>(f);
    ds.samples.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        Sample smp;
        smp.e = take_bits(f, ds.two_n);
        smp.s = take_bits(f, ds.m);
        ds.samples.push_back(std::move(smp));
    }
    if (!f) throw std::runtime_error(path + ": truncated dataset");
    return ds;
}

void export_dataset_csv(const std::string& path, const Dataset& ds) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write csv: " + path);
    f << "index,error,syndrome\n";
    for (std::size_t i = 0; i < ds.samples.size(); ++i)
        f << i << "," << ds.samples[i].e.to_string() << ","
          << ds.samples[i].s.to_string() << "\n";
}

}  // namespace qdec
