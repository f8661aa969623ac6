#include "qdec/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace qdec::nn {

namespace {
std::atomic<bool> g_checked{false};

[[noreturn]] void shape_error(const char* op) {
    throw std::invalid_argument(std::string("tensor op ") + op + ": shape mismatch");
}
}  // namespace

void set_checked_mode(bool on) { g_checked.store(on, std::memory_order_relaxed); }
bool checked_mode() { return g_checked.load(std::memory_order_relaxed); }

// ---------------------------------------------------------------------------
// kernels

void gemm_nn(const Tensor& a, const Tensor& b, Tensor& c, bool accumulate) {
    if (a.cols != b.rows || c.rows != a.rows || c.cols != b.cols) shape_error("gemm_nn");
    if (!accumulate) std::fill(c.v.begin(), c.v.end(), Real(0));
    const std::int64_t M = a.rows, K = a.cols, N = b.cols;
    for (std::int64_t i = 0; i < M; ++i) {
        const Real* __restrict__ ai = a.data() + i * K;
        Real* __restrict__ ci = c.data() + i * N;
        for (std::int64_t k = 0; k < K; ++k) {
            const Real aik = ai[k];
            if (aik == Real(0)) continue;
            const Real* __restrict__ bk = b.data() + k * N;
            for (std::int64_t j = 0; j < N; ++j) ci[j] += aik * bk[j];
        }
    }
}

void gemm_nt(const Tensor& a, const Tensor& b, Tensor& c, bool accumulate) {
    if (a.cols != b.cols || c.rows != a.rows || c.cols != b.rows) shape_error("gemm_nt");
    if (!accumulate) std::fill(c.v.begin(), c.v.end(), Real(0));
    const std::int64_t M = a.rows, K = a.cols, N = b.rows;
    for (std::int64_t i = 0; i < M; ++i) {
        const Real* __restrict__ ai = a.data() + i * K;
        Real* __restrict__ ci = c.data() + i * N;
        for (std::int64_t j = 0; j < N; ++j) {
            const Real* __restrict__ bj = b.data() + j * K;
            Real acc = 0;
            for (std::int64_t k = 0; k < K; ++k) acc += ai[k] * bj[k];
            ci[j] += acc;
        }
    }
}

void gemm_tn(const Tensor& a, const Tensor& b, Tensor& c, bool accumulate) {
    if (a.rows != b.rows || c.rows != a.cols || c.cols != b.cols) shape_error("gemm_tn");
    if (!accumulate) std::fill(c.v.begin(), c.v.end(), Real(0));
    const std::int64_t M = a.rows, K = a.cols, N = b.cols;
    for (std::int64_t i = 0; i < M; ++i) {
        const Real* __restrict__ ai = a.data() + i * K;
        const Real* __restrict__ bi = b.data() + i * N;
        for (std::int64_t k = 0; k < K; ++k) {
            const Real aik = ai[k];
            if (aik == Real(0)) continue;
            Real* __restrict__ ck = c.data() + k * N;
            for (std::int64_t j = 0; j < N; ++j) ck[j] += aik * bi[j];
        }
    }
}

// ---------------------------------------------------------------------------
// optimizer

void adam_step(const std::vector<Param*>& params, const AdamConfig& cfg) {
    for (Param* p : params) {
        p->step += 1;
        const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(p->step));
        const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(p->step));
        for (std::size_t i = 0; i < p->value.v.size(); ++i) {
            const double g = static_cast<double>(p->grad.v[i]);
            const double m = cfg.beta1 * static_cast<double>(p->adam_m.v[i]) + (1.0 - cfg.beta1) * g;
            const double v = cfg.beta2 * static_cast<double>(p->adam_v.v[i]) + (1.0 - cfg.beta2) * g * g;
            p->adam_m.v[i] = static_cast<Real>(m);
            p->adam_v.v[i] = static_cast<Real>(v);
            double w = static_cast<double>(p->value.v[i]);
            w -= cfg.lr * cfg.weight_decay * w;
            w -= cfg.lr * (m / bc1) / (std::sqrt(v / bc2) + cfg.eps);
            p->value.v[i] = static_cast<Real>(w);
        }
    }
}

void zero_grads(const std::vector<Param*>& params) {
    for (Param* p : params)
        std::fill(p->grad.v.begin(), p->grad.v.end(), Real(0));
}

void glorot_init(Tensor& t, Rng& rng) {
    const double a = std::sqrt(6.0 / static_cast<double>(t.rows + t.cols));
    for (auto& x : t.v)
        x = static_cast<Real>((2.0 * rng.next_real() - 1.0) * a);
}

// ---------------------------------------------------------------------------
// tape

Var Tape::push(const char* op, Tensor value, bool needs_grad, BackFn back) {
    Node n;
    n.op = op;
    n.value = std::move(value);
    n.needs_grad = needs_grad;
    n.back = std::move(back);
    if (checked_mode()) check_finite(n);
    nodes_.push_back(std::move(n));
    return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
}

void Tape::check_finite(const Node& n) const {
    for (Real x : n.value.v)
        if (!std::isfinite(static_cast<double>(x)))
            throw std::runtime_error(std::string("non-finite value after op ") + n.op);
}

Tensor& Tape::grad_buf(std::int32_t id) {
    Node& n = nodes_[id];
    if (n.grad.size() == 0) n.grad = Tensor::zeros(n.value.rows, n.value.cols);
    return n.grad;
}

Var Tape::input(Tensor t) { return push("input", std::move(t), false, {}); }

Var Tape::param(Param& p) {
    Var v = push("param", p.value, true, {});
    bindings_.emplace_back(v.id, &p);
    return v;
}

Var Tape::matmul(Var a, Var b) {
    const Tensor& ta = val(a);
    const Tensor& tb = val(b);
    if (ta.cols != tb.rows) shape_error("matmul");
    Tensor out(ta.rows, tb.cols);
    gemm_nn(ta, tb, out, false);
    return push("matmul", std::move(out), needs(a) || needs(b),
                [a, b](Tape& t, std::int32_t out_id) {
                    const Tensor& go = t.nodes_[out_id].grad;
                    if (t.needs(a)) gemm_nt(go, t.val(b), t.grad_buf(a.id), true);
                    if (t.needs(b)) gemm_tn(t.val(a), go, t.grad_buf(b.id), true);
                });
}

Var Tape::add(Var a, Var b) {
    const Tensor& ta = val(a);
    const Tensor& tb = val(b);
    if (!ta.same_shape(tb)) shape_error("add");
    Tensor out = ta;
    for (std::int64_t i = 0; i < out.size(); ++i) out.v[i] += tb.v[i];
    return push("add", std::move(out), needs(a) || needs(b),
                [a, b](Tape& t, std::int32_t out_id) {
                    const Tensor& go = t.nodes_[out_id].grad;
                    if (t.needs(a)) {
                        Tensor& ga = t.grad_buf(a.id);
                        for (std::int64_t i = 0; i < go.size(); ++i) ga.v[i] += go.v[i];
                    }
                    if (t.needs(b)) {
                        Tensor& gb = t.grad_buf(b.id);
                        for (std::int64_t i = 0; i < go.size(); ++i) gb.v[i] += go.v[i];
                    }
                });
}

Var Tape::add_rowvec(Var a, Var bias) {
    const Tensor& ta = val(a);
    const Tensor& tb = val(bias);
    if (tb.rows != 1 || tb.cols != ta.cols) shape_error("add_rowvec");
    Tensor out = ta;
    for (std::int64_t i = 0; i < ta.rows; ++i)
        for (std::int64_t j = 0; j < ta.cols; ++j) out.at(i, j) += tb.v[j];
    return push("add_rowvec", std::move(out), needs(a) || needs(bias),
                [a, bias](Tape& t, std::int32_t out_id) {
                    const Tensor& go = t.nodes_[out_id].grad;
                    if (t.needs(a)) {
                        Tensor& ga = t.grad_buf(a.id);
                        for (std::int64_t i = 0; i < go.size(); ++i) ga.v[i] += go.v[i];
                    }
                    if (t.needs(bias)) {
                        Tensor& gb = t.grad_buf(bias.id);
                        for (std::int64_t i = 0; i < go.rows; ++i)
                            for (std::int64_t j = 0; j < go.cols; ++j)
                                gb.v[j] += go.at(i, j);
                    }
                });
}

Var Tape::mul(Var a, Var b) {
    const Tensor& ta = val(a);
    const Tensor& tb = val(b);
    if (!ta.same_shape(tb)) shape_error("mul");
    Tensor out = ta;
    for (std::int64_t i = 0; i < out.size(); ++i) out.v[i] *= tb.v[i];
    return push("mul", std::move(out), needs(a) || needs(b),
                [a, b](Tape& t, std::int32_t out_id) {
                    const Tensor& go = t.nodes_[out_id].grad;
                    if (t.needs(a)) {
                        Tensor& ga = t.grad_buf(a.id);
                        const Tensor& tb2 = t.val(b);
                        for (std::int64_t i = 0; i < go.size(); ++i)
                            ga.v[i] += go.v[i] * tb2.v[i];
                    }
                    if (t.needs(b)) {
                        Tensor& gb = t.grad_buf(b.id);
                        const Tensor& ta2 = t.val(a);
                        for (std::int64_t i = 0; i < go.size(); ++i)
                            gb.v[i] += go.v[i] * ta2.v[i];
                    }
                });
}

Var Tape::rowscale(Var a, Var s) {
    const Tensor& ta = val(a);
    const Tensor& ts = val(s);
    if (ts.rows != ta.rows || ts.cols != 1) shape_error("rowscale");
    Tensor out = ta;
    for (std::int64_t i = 0; i < ta.rows; ++i)
        for (std::int64_t j = 0; j < ta.cols; ++j) out.at(i, j) *= ts.v[i];
    return push("rowscale", std::move(out), needs(a) || needs(s),
                [a, s](Tape& t, std::int32_t out_id) {
                    const Tensor& go = t.nodes_[out_id].grad;
                    const Tensor& ta2 = t.val(a);
                    const Tensor& ts2 = t.val(s);
                    if (t.needs(a)) {
                        Tensor& ga = t.grad_buf(a.id);
                        for (std::int64_t i = 0; i < go.rows; ++i)
                            for (std::int64_t j = 0; j < go.cols; ++j)
                                ga.at(i, j) += go.at(i, j) * ts2.v[i];
                    }
                    if (t.needs(s)) {
                        Tensor& gs = t.grad_buf(s.id);
                        for (std::int64_t i = 0; i < go.rows; ++i) {
                            Real acc = 0;
                            for (std::int64_t j = 0; j < go.cols; ++j)
                                acc += go.at(i, j) * ta2.at(i, j);
                            gs.v[i] += acc;
                        }
                    }
                });
}

Var Tape::scale_by_scalar(Var a, Var s) {
    const Tensor& ta = val(a);
    const Tensor& ts = val(s);
    if (ts.rows != 1 || ts.cols != 1) shape_error("scale_by_scalar");
    Tensor out = ta;
    const Real c = ts.v[0];
    for (auto& x : out.v) x *= c;
    return push("scale_by_scalar", std::move(out), needs(a) || needs(s),
                [a, s](Tape& t, std::int32_t out_id) {
                    const Tensor& go = t.nodes_[out_id].grad;
                    if (t.needs(a)) {
                        Tensor& ga = t.grad_buf(a.id);
                        const Real c2 = t.val(s).v[0];
                        for (std::int64_t i = 0; i < go.size(); ++i) ga.v[i] += go.v[i] * c2;
                    }
                    if (t.needs(s)) {
                        const Tensor& ta2 = t.val(a);
                        Real acc = 0;
                        for (std::int64_t i = 0; i < go.size(); ++i) acc += go.v[i] * ta2.v[i];
                        t.grad_buf(s.id).v[0] += acc;
                    }
                });
}

Var Tape::scale_const(Var a, Real c) {
    Tensor out = val(a);
    for (auto& x : out.v) x *= c;
    return push("scale_const", std::move(out), needs(a),
                [a, c](Tape& t, std::int32_t out_id) {
                    const Tensor& go = t.nodes_[out_id].grad;
                    Tensor& ga = t.grad_buf(a.id);
                    for (std::int64_t i = 0; i < go.size(); ++i) ga.v[i] += go.v[i] * c;
                });
}

Var Tape::relu(Var a) {
    Tensor out = val(a);
    for (auto& x : out.v) x = x > Real(0) ? x : Real(0);
    return push("relu", std::move(out), needs(a),
                [a](Tape& t, std::int32_t out_id) {
                    const Tensor& go = t.nodes_[out_id].grad;
                    const Tensor& o = t.nodes_[out_id].value;
                    Tensor& ga = t.grad_buf(a.id);
                    for (std::int64_t i = 0; i < go.size(); ++i)
                        if (o.v[i] > Real(0)) ga.v[i] += go.v[i];
                });
}

Var Tape::leaky_relu(Var a, Real slope) {
    Tensor out = val(a);
    for (auto& x : out.v) x = x > Real(0) ? x : slope * x;
    return push("leaky_relu", std::move(out), needs(a),
                [a, slope](Tape& t, std::int32_t out_id) {
                    const Tensor& go = t.nodes_[out_id].grad;
                    const Tensor& in = t.val(a);
                    Tensor& ga = t.grad_buf(a.id);
                    for (std::int64_t i = 0; i < go.size(); ++i)
                        ga.v[i] += go.v[i] * (in.v[i] > Real(0) ? Real(1) : slope);
                });
}

Var Tape::sigmoid(Var a) {
    Tensor out = val(a);
    for (auto& x : out.v) {
        const double xd = static_cast<double>(x);
        x = static_cast<Real>(xd >= 0 ? 1.0 / (1.0 + std::exp(-xd))
                                      : std::exp(xd) / (1.0 + std::exp(xd)));
    }
    return push("sigmoid", std::move(out), needs(a),
                [a](Tape& t, std::int32_t out_id) {
                    const Tensor& go = t.nodes_[out_id].grad;
                    const Tensor& o = t.nodes_[out_id].value;
                    Tensor& ga = t.grad_buf(a.id);
                    for (std::int64_t i = 0; i < go.size(); ++i)
                        ga.v[i] += go.v[i] * o.v[i] * (Real(1) - o.v[i]);
                });
}

Var Tape::concat_cols(Var a, Var b) {
    const Tensor& ta = val(a);
    const Tensor& tb = val(b);
    if (ta.rows != tb.rows) shape_error("concat_cols");
    Tensor out(ta.rows, ta.cols + tb.cols);
    for (std::int64_t i = 0; i < ta.rows; ++i) {
        std::memcpy(out.data() + i * out.cols, ta.data() + i * ta.cols,
                    sizeof(Real) * static_cast<std::size_t>(ta.cols));
        std::memcpy(out.data() + i * out.cols + ta.cols, tb.data() + i * tb.cols,
                    sizeof(Real) * static_cast<std::size_t>(tb.cols));
    }
    const std::int64_t ca = ta.cols;
    return push("concat_cols", std::move(out), needs(a) || needs(b),
                [a, b, ca](Tape& t, std::int32_t out_id) {
                    const Tensor& go = t.nodes_[out_id].grad;
                    if (t.needs(a)) {
                        Tensor& ga = t.grad_buf(a.id);
                        for (std::int64_t i = 0; i < ga.rows; ++i)
                            for (std::int64_t j = 0; j < ga.cols; ++j)
                                ga.at(i, j) += go.at(i, j);
                    }
                    if (t.needs(b)) {
                        Tensor& gb = t.grad_buf(b.id);
                        for (std::int64_t i = 0; i < gb.rows; ++i)
                            for (std::int64_t j = 0; j < gb.cols; ++j)
                                gb.at(i, j) += go.at(i, ca + j);
                    }
                });
}

Var Tape::concat_rows(Var a, Var b) {
    const Tensor& ta = val(a);
    const Tensor& tb = val(b);
    if (ta.cols != tb.cols) shape_error("concat_rows");
    Tensor out(ta.rows + tb.rows, ta.cols);
    std::memcpy(out.data(), ta.data(), sizeof(Real) * ta.v.size());
    std::memcpy(out.data() + ta.size(), tb.data(), sizeof(Real) * tb.v.size());
    const std::int64_t ra = ta.rows;
    return push("concat_rows", std::move(out), needs(a) || needs(b),
                [a, b, ra](Tape& t, std::int32_t out_id) {
                    const Tensor& go = t.nodes_[out_id].grad;
                    if (t.needs(a)) {
                        Tensor& ga = t.grad_buf(a.id);
                        for (std::int64_t i = 0; i < ga.size(); ++i) ga.v[i] += go.v[i];
                    }
                    if (t.needs(b)) {
                        Tensor& gb = t.grad_buf(b.id);
                        const Real* src = go.data() + ra * go.cols;
                        for (std::int64_t i = 0; i < gb.size(); ++i) gb.v[i] += src[i];
                    }
                });
}

Var Tape::tile_rows(Var a, std::int64_t times) {
    const Tensor& ta = val(a);
    Tensor out(ta.rows * times, ta.cols);
    for (std::int64_t r = 0; r < times; ++r)
        std::memcpy(out.data() + r * ta.size(), ta.data(), sizeof(Real) * ta.v.size());
    return push("tile_rows", std::move(out), needs(a),
                [a, times](Tape& t, std::int32_t out_id) {
                    const Tensor& go = t.nodes_[out_id].grad;
                    Tensor& ga = t.grad_buf(a.id);
                    const std::int64_t block = ga.size();
                    for (std::int64_t r = 0; r < times; ++r) {
                        const Real* src = go.data() + r * block;
                        for (std::int64_t i = 0; i < block; ++i) ga.v[i] += src[i];
                    }
                });
}

Var Tape::gather_rows(Var src, const std::vector<std::int32_t>& idx) {
    const Tensor& ts = val(src);
    for (std::int32_t i : idx)
        if (i < 0 || i >= ts.rows) throw std::out_of_range("gather_rows: index out of range");
    Tensor out(static_cast<std::int64_t>(idx.size()), ts.cols);
    for (std::size_t i = 0; i < idx.size(); ++i)
        std::memcpy(out.data() + static_cast<std::int64_t>(i) * ts.cols,
                    ts.data() + idx[i] * ts.cols,
                    sizeof(Real) * static_cast<std::size_t>(ts.cols));
    return push("gather_rows", std::move(out), needs(src),
                [src, idx](Tape& t, std::int32_t out_id) {
                    const Tensor& go = t.nodes_[out_id].grad;
                    Tensor& gs = t.grad_buf(src.id);
                    for (std::size_t i = 0; i < idx.size(); ++i) {
                        const Real* g = go.data() + static_cast<std::int64_t>(i) * go.cols;
                        Real* d = gs.data() + idx[i] * gs.cols;
                        for (std::int64_t j = 0; j < go.cols; ++j) d[j] += g[j];
                    }
                });
}

Var Tape::scatter_add_rows(Var src, const std::vector<std::int32_t>& idx,
                           std::int64_t out_rows) {
    const Tensor& ts = val(src);
    if (static_cast<std::int64_t>(idx.size()) != ts.rows)
        shape_error("scatter_add_rows");
    for (std::int32_t i : idx)
        if (i < 0 || i >= out_rows) throw std::out_of_range("scatter_add_rows: index out of range");
    Tensor out(out_rows, ts.cols);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const Real* s = ts.data() + static_cast<std::int64_t>(i) * ts.cols;
        Real* d = out.data() + idx[i] * ts.cols;
        for (std::int64_t j = 0; j < ts.cols; ++j) d[j] += s[j];
    }
    return push("scatter_add_rows", std::move(out), needs(src),
                [src, idx](Tape& t, std::int32_t out_id) {
                    const Tensor& go = t.nodes_[out_id].grad;
                    Tensor& gs = t.grad_buf(src.id);
                    for (std::size_t i = 0; i < idx.size(); ++i) {
                        const Real* g = go.data() + idx[i] * go.cols;
                        Real* d = gs.data() + static_cast<std::int64_t>(i) * gs.cols;
                        for (std::int64_t j = 0; j < go.cols; ++j) d[j] += g[j];
                    }
                });
}

Var Tape::segment_softmax(Var scores, const std::vector<std::int64_t>& offsets) {
    const Tensor& ts = val(scores);
    if (ts.cols != 1) shape_error("segment_softmax");
    if (offsets.empty() || offsets.front() != 0 || offsets.back() != ts.rows)
        throw std::invalid_argument("segment_softmax: bad offsets");
    Tensor out(ts.rows, 1);
    for (std::size_t k = 0; k + 1 < offsets.size(); ++k) {
        const std::int64_t lo = offsets[k], hi = offsets[k + 1];
        if (hi <= lo) throw std::invalid_argument("segment_softmax: empty segment");
        Real mx = ts.v[lo];
        for (std::int64_t i = lo + 1; i < hi; ++i) mx = std::max(mx, ts.v[i]);
        double z = 0;
        for (std::int64_t i = lo; i < hi; ++i) {
            const double e = std::exp(static_cast<double>(ts.v[i] - mx));
            out.v[i] = static_cast<Real>(e);
            z += e;
        }
        for (std::int64_t i = lo; i < hi; ++i)
            out.v[i] = static_cast<Real>(static_cast<double>(out.v[i]) / z);
    }
    return push("segment_softmax", std::move(out), needs(scores),
                [scores, offsets](Tape& t, std::int32_t out_id) {
                    const Tensor& go = t.nodes_[out_id].grad;
                    const Tensor& y = t.nodes_[out_id].value;
                    Tensor& gs = t.grad_buf(scores.id);
                    for (std::size_t k = 0; k + 1 < offsets.size(); ++k) {
                        const std::int64_t lo = offsets[k], hi = offsets[k + 1];
                        double dot = 0;
                        for (std::int64_t i = lo; i < hi; ++i)
                            dot += static_cast<double>(y.v[i]) * static_cast<double>(go.v[i]);
                        for (std::int64_t i = lo; i < hi; ++i)
                            gs.v[i] += y.v[i] * (go.v[i] - static_cast<Real>(dot));
                    }
                });
}

Var Tape::pair_aggregate(Var src, Var coeff, const std::vector<std::int32_t>& srcidx,
                         const std::vector<std::int32_t>& dstidx, std::int64_t out_rows) {
    const Tensor& ts = val(src);
    const Tensor& tc = val(coeff);
    if (tc.cols != 1 || tc.rows != static_cast<std::int64_t>(srcidx.size()) ||
        srcidx.size() != dstidx.size())
        shape_error("pair_aggregate");
    for (std::size_t p = 0; p < srcidx.size(); ++p) {
        if (srcidx[p] < 0 || srcidx[p] >= ts.rows)
            throw std::out_of_range("pair_aggregate: src index out of range");
        if (dstidx[p] < 0 || dstidx[p] >= out_rows)
            throw std::out_of_range("pair_aggregate: dst index out of range");
    }
    const std::int64_t C = ts.cols;
    Tensor out(out_rows, C);
    for (std::size_t p = 0; p < srcidx.size(); ++p) {
        const Real c = tc.v[p];
        const Real* s = ts.data() + srcidx[p] * C;
        Real* d = out.data() + dstidx[p] * C;
        for (std::int64_t j = 0; j < C; ++j) d[j] += c * s[j];
    }
    return push("pair_aggregate", std::move(out), needs(src) || needs(coeff),
                [src, coeff, srcidx, dstidx](Tape& t, std::int32_t out_id) {
                    const Tensor& go = t.nodes_[out_id].grad;
                    const Tensor& ts2 = t.val(src);
                    const Tensor& tc2 = t.val(coeff);
                    const std::int64_t C = ts2.cols;
                    if (t.needs(src)) {
                        Tensor& gs = t.grad_buf(src.id);
                        for (std::size_t p = 0; p < srcidx.size(); ++p) {
                            const Real c = tc2.v[p];
                            const Real* g = go.data() + dstidx[p] * C;
                            Real* d = gs.data() + srcidx[p] * C;
                            for (std::int64_t j = 0; j < C; ++j) d[j] += c * g[j];
                        }
                    }
                    if (t.needs(coeff)) {
                        Tensor& gc = t.grad_buf(coeff.id);
                        for (std::size_t p = 0; p < srcidx.size(); ++p) {
                            const Real* s = ts2.data() + srcidx[p] * C;
                            const Real* g = go.data() + dstidx[p] * C;
                            Real acc = 0;
                            for (std::int64_t j = 0; j < C; ++j) acc += s[j] * g[j];
                            gc.v[p] += acc;
                        }
                    }
                });
}

Var Tape::bce_loss(Var pred, const Tensor& targets) {
    const Tensor& tp = val(pred);
    if (!tp.same_shape(targets)) shape_error("bce_loss");
    constexpr double eps = 1e-7;
    double loss = 0;
    for (std::int64_t i = 0; i < tp.size(); ++i) {
        const double p = std::clamp(static_cast<double>(tp.v[i]), eps, 1.0 - eps);
        const double t = static_cast<double>(targets.v[i]);
        loss -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
    }
    loss /= static_cast<double>(tp.size());
    Tensor out(1, 1);
    out.v[0] = static_cast<Real>(loss);
    Tensor tcopy = targets;
    return push("bce_loss", std::move(out), needs(pred),
                [pred, tcopy](Tape& t, std::int32_t out_id) {
                    const Real g0 = t.nodes_[out_id].grad.v[0];
                    const Tensor& tp2 = t.val(pred);
                    Tensor& gp = t.grad_buf(pred.id);
                    const double n = static_cast<double>(tp2.size());
                    for (std::int64_t i = 0; i < tp2.size(); ++i) {
                        const double p = std::clamp(static_cast<double>(tp2.v[i]), 1e-7, 1.0 - 1e-7);
                        const double tt = static_cast<double>(tcopy.v[i]);
                        gp.v[i] += g0 * static_cast<Real>((p - tt) / (p * (1.0 - p) * n));
                    }
                });
}

void Tape::backward(Var loss) {
    if (!loss.valid() || nodes_[loss.id].value.size() != 1)
        throw std::invalid_argument("backward: loss must be a scalar var");
    grad_buf(loss.id).v[0] = Real(1);
    for (std::int32_t id = static_cast<std::int32_t>(nodes_.size()) - 1; id >= 0; --id) {
        Node& n = nodes_[id];
        if (!n.needs_grad || !n.back || n.grad.size() == 0) continue;
        n.back(*this, id);
    }
    for (auto& [id, p] : bindings_) {
        const Tensor& g = nodes_[id].grad;
        if (g.size() == 0) continue;
        for (std::size_t i = 0; i < g.v.size(); ++i) p->grad.v[i] += g.v[i];
    }
}

void Tape::clear() {
    nodes_.clear();
    bindings_.clear();
}

// ---------------------------------------------------------------------------
// checkpoints

namespace {
constexpr char kMagic[4] = {'Q', 'N', 'E', 'T'};
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
void put_str(std::ofstream& f, const std::string& s) {
    put<std::uint32_t>(f, static_cast<std::uint32_t>(s.size()));
    f.write(s.data(), static_cast<std::streamsize>(s.size()));
}
std::string take_str(std::ifstream& f) {
    std::uint32_t len = take<std::uint32_t>(f);
    if (len > (1u << 20)) throw std::runtime_error("checkpoint: oversized string");
    std::string s(len, '\0');
    f.read(s.data(), len);
    return s;
}
}  // namespace

void save_checkpoint(const std::string& path, const CheckpointMeta& meta,
                     const std::vector<const Param*>& params) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write checkpoint: " + path);
    f.write(kMagic, 4);
    put<std::uint32_t>(f, kVersion);
    put<std::uint8_t>(f, static_cast<std::uint8_t>(sizeof(Real)));
    put<std::uint64_t>(f, meta.seed);
    put_str(f, meta.arch);
    put<std::uint32_t>(f, static_cast<std::uint32_t>(meta.ints.size()));
    for (const auto& [k, v] : meta.ints) {
        put_str(f, k);
        put<std::int64_t>(f, v);
    }
    put<std::uint32_t>(f, static_cast<std::uint32_t>(params.size()));
    for (const Param* p : params) {
        put_str(f, p->name);
        put<std::int64_t>(f, p->value.rows);
        put<std::int64_t>(f, p->value.cols);
        f.write(reinterpret_cast<const char*>(p->value.data()),
                static_cast<std::streamsize>(sizeof(Real) * p->value.v.size()));
    }
    if (!f) throw std::runtime_error("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error(path + ": not a QNET checkpoint");
    if (take<std::uint32_t>(f) != kVersion)
        throw std::runtime_error(path + ": unsupported checkpoint version");
    Checkpoint ck;
    ck.precision = take<std::uint8_t>(f);
    if (ck.precision != 4 && ck.precision != 8)
        throw std::runtime_error(path + ": bad precision tag");
    ck.meta.seed = take<std::uint64_t>(f);
    ck.meta.arch = take_str(f);
    const std::uint32_t nints = take<std::uint32_t>(f);
    for (std::uint32_t i = 0; i < nints; ++i) {
        std::string k = take_str(f);
        ck.meta.ints[k] = take<std::int64_t>(f);
    }
    const std::uint32_t nparams = take<std::uint32_t>(f);
    for (std::uint32_t i = 0; i < nparams; ++i) {
        std::string name = take_str(f);
        const std::int64_t rows = take<std::int64_t>(f);
        const std::int64_t cols = take<std::int64_t>(f);
        if (rows < 0 || cols < 0 || rows * cols > (1ll << 32))
            throw std::runtime_error(path + ": bad tensor shape");
        Tensor t(rows, cols);
        if (ck.precision == sizeof(Real)) {
            f.read(reinterpret_cast<char*>(t.data()),
                   static_cast<std::streamsize>(sizeof(Real) * t.v.size()));
        } else if (ck.precision == 4) {
            std::vector<float> buf(t.v.size());
            f.read(reinterpret_cast<char*>(buf.data()),
                   static_cast<std::streamsize>(4 * buf.size()));
            for (std::size_t j = 0; j < buf.size(); ++j) t.v[j] = static_cast<Real>(buf[j]);
        } else {
            std::vector<double> buf(t.v.size());
            f.read(reinterpret_cast<char*>(buf.data()),
                   static_cast<std::streamsize>(8 * buf.size()));
            for (std::size_t j = 0; j < buf.size(); ++j) t.v[j] = static_cast<Real>(buf[j]);
        }
        ck.tensors[name] = std::move(t);
    }
    if (!f) throw std::runtime_error(path + ": truncated checkpoint");
    return ck;
}

}  // namespace qdec::nn
