#pragma once

// Minimal dense tensor engine with a reverse-mode tape, sized for the
// fixed decoder architectures in this project: matmul, gather/scatter,
// segment softmax, elementwise maps, BCE loss and AdamW. The op set is
// closed on purpose; each op carries its own backward rule.
//
// Precision: `Real` is float by default; compiling with QDEC_REAL_DOUBLE
// gives the 64-bit build used for gradient checking and oracle tests.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qdec/rng.hpp"

namespace qdec::nn {

#ifdef QDEC_REAL_DOUBLE
using Real = double;
#else
using Real = float;
#endif

struct Tensor {
    std::int64_t rows = 0, cols = 0;
    std::vector<Real> v;

    Tensor() = default;
    Tensor(std::int64_t r, std::int64_t c) : rows(r), cols(c), v(static_cast<std::size_t>(r * c), Real(0)) {}

    static Tensor zeros(std::int64_t r, std::int64_t c) { return Tensor(r, c); }
    static Tensor full(std::int64_t r, std::int64_t c, Real x) {
        Tensor t(r, c);
        std::fill(t.v.begin(), t.v.end(), x);
        return t;
    }
    static Tensor row(const std::vector<Real>& vals) {
        Tensor t(1, static_cast<std::int64_t>(vals.size()));
        t.v = vals;
        return t;
    }

    Real& at(std::int64_t r, std::int64_t c) { return v[static_cast<std::size_t>(r * cols + c)]; }
    Real at(std::int64_t r, std::int64_t c) const { return v[static_cast<std::size_t>(r * cols + c)]; }
    Real* data() { return v.data(); }
    const Real* data() const { return v.data(); }
    std::int64_t size() const { return rows * cols; }
    bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
};

// when enabled, every op output is scanned for NaN/Inf and a violation
// throws std::runtime_error naming the op
void set_checked_mode(bool on);
bool checked_mode();

// raw kernels (also used by inference paths that bypass the tape)
void gemm_nn(const Tensor& a, const Tensor& b, Tensor& c, bool accumulate);  // c (+)= a b
void gemm_nt(const Tensor& a, const Tensor& b, Tensor& c, bool accumulate);  // c (+)= a b^T
void gemm_tn(const Tensor& a, const Tensor& b, Tensor& c, bool accumulate);  // c (+)= a^T b

struct Param {
    std::string name;
    Tensor value;
    Tensor grad;
    Tensor adam_m, adam_v;
    std::int64_t step = 0;

    Param() = default;
    Param(std::string nm, Tensor val)
        : name(std::move(nm)), value(std::move(val)) {
        grad = Tensor::zeros(value.rows, value.cols);
        adam_m = Tensor::zeros(value.rows, value.cols);
        adam_v = Tensor::zeros(value.rows, value.cols);
    }
};

struct AdamConfig {
    double lr = 5e-5;
    double weight_decay = 5e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// decoupled weight decay; grads are left untouched (call zero_grads)
void adam_step(const std::vector<Param*>& params, const AdamConfig& cfg);
void zero_grads(const std::vector<Param*>& params);

// U(-a, a) with a = sqrt(6 / (fan_in + fan_out)), fan_in = rows
void glorot_init(Tensor& t, Rng& rng);

struct Var {
    std::int32_t id = -1;
    bool valid() const { return id >= 0; }
};

class Tape {
public:
    Var input(Tensor t);               // constant leaf
    Var param(Param& p);               // leaf; backward accumulates into p.grad

    Var matmul(Var a, Var b);
    Var add(Var a, Var b);                     // same shape
    Var add_rowvec(Var a, Var bias);           // bias is 1 x c
    Var mul(Var a, Var b);                     // elementwise, same shape
    Var rowscale(Var a, Var s);                // s is n x 1; row i scaled by s[i]
    Var scale_by_scalar(Var a, Var s);         // s is 1 x 1
    Var scale_const(Var a, Real c);
    Var relu(Var a);
    Var leaky_relu(Var a, Real slope);
    Var sigmoid(Var a);
    Var concat_cols(Var a, Var b);
    Var concat_rows(Var a, Var b);
    Var tile_rows(Var a, std::int64_t times);
    Var gather_rows(Var src, const std::vector<std::int32_t>& idx);
    Var scatter_add_rows(Var src, const std::vector<std::int32_t>& idx, std::int64_t out_rows);
    // softmax within [offsets[k], offsets[k+1]) groups of a column vector
    Var segment_softmax(Var scores, const std::vector<std::int64_t>& offsets);
    // out[dst[p], :] += coeff[p] * src[srcidx[p], :]
    Var pair_aggregate(Var src, Var coeff, const std::vector<std::int32_t>& srcidx,
                       const std::vector<std::int32_t>& dstidx, std::int64_t out_rows);
    // mean over elements of -(t log p + (1-t) log(1-p)), p clamped to
    // [eps, 1-eps] with eps = 1e-7; returns a 1x1 var
    Var bce_loss(Var pred, const Tensor& targets);

    const Tensor& val(Var v) const { return nodes_[v.id].value; }
    const Tensor& grad(Var v) const { return nodes_[v.id].grad; }

    void backward(Var loss);
    void clear();
    std::size_t num_nodes() const { return nodes_.size(); }

private:
    using BackFn = std::function<void(Tape&, std::int32_t)>;

    struct Node {
        const char* op;
        Tensor value;
        Tensor grad;
        bool needs_grad = false;
        BackFn back;  // empty for leaves
    };

    Var push(const char* op, Tensor value, bool needs_grad, BackFn back);
    Tensor& grad_buf(std::int32_t id);
    bool needs(Var v) const { return nodes_[v.id].needs_grad; }
    void check_finite(const Node& n) const;

    std::vector<Node> nodes_;
    std::vector<std::pair<std::int32_t, Param*>> bindings_;
};

// ---------------------------------------------------------------------------
// checkpoint files ("QNET"): header + named parameter blocks, bit-exact
// round trip within one precision

struct CheckpointMeta {
    std::string arch;                          // e.g. "hypernq-v1"
    std::uint64_t seed = 0;
    std::map<std::string, std::int64_t> ints;  // dims, encoder config, ...
};

void save_checkpoint(const std::string& path, const CheckpointMeta& meta,
                     const std::vector<const Param*>& params);

struct Checkpoint {
    CheckpointMeta meta;
    std::uint8_t precision = 0;  // bytes per value in the file (4 or 8)
    std::map<std::string, Tensor> tensors;
};

Checkpoint load_checkpoint(const std::string& path);

}  // namespace qdec::nn
