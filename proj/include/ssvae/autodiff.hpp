#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ssvae/errors.hpp"
#include "ssvae/kernels.hpp"
#include "ssvae/tensor.hpp"

// Reverse-mode autodiff over a linear tape. Ops append nodes in execution
// order; backward walks the tape in reverse (reverse topological order by
// construction) and accumulates adjoints additively across fan-out.
namespace ssvae {

enum class Op : std::uint8_t {
    leaf,
    matmul,
    add,
    sub,
    mul,
    relu,
    sigmoid,
    exp_op,
    log_op,
    softplus,
    clamp,
    affine,       // a*x + b elementwise with scalar a, b
    softmax,      // row-wise over rank-2
    sum_all,
    mean_all,
    sum_axis0,
    sum_axis1,
    mean_axis0,
    mean_axis1,
    add_rowvec,   // matrix + row vector broadcast
    concat_cols,
    slice_cols,
    bernoulli_nll,       // mean over rows of pixel-summed BCE; second input is the target leaf
    class_nll,           // -(alpha/#labeled) * sum of log pi[true]; 0 if unlabeled batch
    replace_labeled_rows // labeled rows swapped for one-hot targets (teacher forcing)
};

template <typename T>
class Tape;

template <typename T>
struct Var {
    Tape<T>* tape = nullptr;
    std::int32_t id = -1;
    bool valid() const { return tape != nullptr && id >= 0; }
};

template <typename T>
class Tape {
public:
    Var<T> leaf(Tensor<T> value, bool requires_grad = false) {
        return push(Op::leaf, std::move(value), -1, -1, requires_grad);
    }

    const Tensor<T>& value(Var<T> v) const { return values_[check(v)]; }

    // Zero tensor when no gradient flowed to the node.
    const Tensor<T>& grad(Var<T> v) {
        const auto i = check(v);
        if (!requires_[i])
            throw ArgumentError("grad requested for a variable that does not require it");
        ensure_grad(i);
        return grads_[i];
    }

    void backward(Var<T> loss) {
        const auto root = check(loss);
        if (values_[root].numel() != 1)
            throw ArgumentError("backward requires a scalar loss, got shape " +
                                values_[root].shape_str());
        grads_.assign(values_.size(), Tensor<T>());
        has_grad_.assign(values_.size(), 0);
        ensure_grad(root);
        grads_[root].data[0] = T(1);
        for (std::int32_t i = root; i >= 0; --i) {
            if (!has_grad_[i] || !requires_[i] || nodes_[i].op == Op::leaf) continue;
            backward_node(i);
        }
    }

    std::size_t size() const { return nodes_.size(); }

    // ---- op builders (free functions below delegate here) ----

    Var<T> matmul_op(Var<T> a, Var<T> b) {
        const auto& av = value(a);
        const auto& bv = value(b);
        if (av.rank() != 2 || bv.rank() != 2 || av.cols() != bv.rows())
            throw DimensionError("matmul shape mismatch: " + av.shape_str() + " x " +
                                 bv.shape_str());
        Tensor<T> out({av.rows(), bv.cols()});
        kernels::gemm_nn(av.rows(), av.cols(), bv.cols(), av.data.data(),
                         bv.data.data(), out.data.data(), false);
        return push(Op::matmul, std::move(out), a.id, b.id);
    }

    Var<T> binary_op(Op op, Var<T> a, Var<T> b) {
        const auto& av = value(a);
        const auto& bv = value(b);
        if (!av.same_shape(bv))
            throw DimensionError("elementwise shape mismatch: " + av.shape_str() +
                                 " vs " + bv.shape_str());
        Tensor<T> out(av.shape);
        const std::size_t n = av.numel();
        switch (op) {
            case Op::add: kernels::add(n, av.data.data(), bv.data.data(), out.data.data()); break;
            case Op::sub: kernels::sub(n, av.data.data(), bv.data.data(), out.data.data()); break;
            case Op::mul: kernels::mul(n, av.data.data(), bv.data.data(), out.data.data()); break;
            default: throw ArgumentError("not a binary op");
        }
        return push(op, std::move(out), a.id, b.id);
    }

    Var<T> unary_op(Op op, Var<T> x) {
        const auto& xv = value(x);
        if (op == Op::log_op)
            for (const T v : xv.data)
                if (!(v > T(0)))
                    throw DomainError("log of non-positive value " + std::to_string(v));
        Tensor<T> out(xv.shape);
        const std::size_t n = xv.numel();
        switch (op) {
            case Op::relu: kernels::relu(n, xv.data.data(), out.data.data()); break;
            case Op::sigmoid: kernels::sigmoid(n, xv.data.data(), out.data.data()); break;
            case Op::exp_op: kernels::exp(n, xv.data.data(), out.data.data()); break;
            case Op::log_op: kernels::log(n, xv.data.data(), out.data.data()); break;
            case Op::softplus: kernels::softplus(n, xv.data.data(), out.data.data()); break;
            default: throw ArgumentError("not a unary op");
        }
        return push(op, std::move(out), x.id, -1);
    }

    Var<T> clamp_op(Var<T> x, double lo, double hi) {
        const auto& xv = value(x);
        Tensor<T> out(xv.shape);
        kernels::clamp(xv.numel(), xv.data.data(), T(lo), T(hi), out.data.data());
        return push(Op::clamp, std::move(out), x.id, -1, false, lo, hi);
    }

    Var<T> affine_op(Var<T> x, double a, double b) {
        const auto& xv = value(x);
        Tensor<T> out(xv.shape);
        kernels::scale(xv.numel(), T(a), xv.data.data(), out.data.data());
        if (b != 0.0)
            for (auto& v : out.data) v += T(b);
        return push(Op::affine, std::move(out), x.id, -1, false, a, b);
    }

    Var<T> softmax_op(Var<T> x) {
        const auto& xv = value(x);
        if (xv.rank() != 2 || xv.cols() < 1)
            throw DimensionError("softmax expects a rank-2 tensor, got " + xv.shape_str());
        Tensor<T> out(xv.shape);
        kernels::softmax_rows(xv.rows(), xv.cols(), xv.data.data(), out.data.data());
        return push(Op::softmax, std::move(out), x.id, -1);
    }

    Var<T> reduce_all_op(Var<T> x, bool take_mean) {
        const auto& xv = value(x);
        const double s = kernels::sum(xv.numel(), xv.data.data());
        const double v = take_mean ? s / static_cast<double>(xv.numel()) : s;
        return push(take_mean ? Op::mean_all : Op::sum_all, Tensor<T>::scalar(T(v)),
                    x.id, -1);
    }

    Var<T> reduce_axis_op(Var<T> x, std::size_t axis, bool take_mean) {
        const auto& xv = value(x);
        if (axis >= xv.rank())
            throw DimensionError("reduce axis " + std::to_string(axis) +
                                 " out of range for " + xv.shape_str());
        if (xv.rank() != 2)
            throw DimensionError("axis reduce expects a rank-2 tensor, got " +
                                 xv.shape_str());
        const std::size_t m = xv.rows(), n = xv.cols();
        Tensor<T> out;
        Op op;
        if (axis == 0) {
            out = Tensor<T>({n});
            kernels::col_sum(m, n, xv.data.data(), out.data.data(), false);
            if (take_mean)
                kernels::scale(n, T(1) / T(m), out.data.data(), out.data.data());
            op = take_mean ? Op::mean_axis0 : Op::sum_axis0;
        } else {
            out = Tensor<T>({m});
            for (std::size_t i = 0; i < m; ++i)
                out.data[i] = T(kernels::sum(n, xv.data.data() + i * n));
            if (take_mean)
                kernels::scale(m, T(1) / T(n), out.data.data(), out.data.data());
            op = take_mean ? Op::mean_axis1 : Op::sum_axis1;
        }
        return push(op, std::move(out), x.id, -1);
    }

    Var<T> add_rowvec_op(Var<T> m, Var<T> v) {
        const auto& mv = value(m);
        const auto& vv = value(v);
        if (mv.rank() != 2 || vv.numel() != mv.cols())
            throw DimensionError("row-vector broadcast mismatch: " + mv.shape_str() +
                                 " + " + vv.shape_str());
        Tensor<T> out(mv.shape);
        kernels::add_rowvec(mv.rows(), mv.cols(), mv.data.data(), vv.data.data(),
                            out.data.data());
        return push(Op::add_rowvec, std::move(out), m.id, v.id);
    }

    Var<T> concat_cols_op(Var<T> a, Var<T> b) {
        const auto& av = value(a);
        const auto& bv = value(b);
        if (av.rank() != 2 || bv.rank() != 2 || av.rows() != bv.rows())
            throw DimensionError("concat_cols mismatch: " + av.shape_str() + " | " +
                                 bv.shape_str());
        const std::size_t m = av.rows(), p = av.cols(), q = bv.cols();
        Tensor<T> out({m, p + q});
        for (std::size_t i = 0; i < m; ++i) {
            std::copy(av.data.begin() + i * p, av.data.begin() + (i + 1) * p,
                      out.data.begin() + i * (p + q));
            std::copy(bv.data.begin() + i * q, bv.data.begin() + (i + 1) * q,
                      out.data.begin() + i * (p + q) + p);
        }
        return push(Op::concat_cols, std::move(out), a.id, b.id);
    }

    Var<T> slice_cols_op(Var<T> x, std::size_t lo, std::size_t hi) {
        const auto& xv = value(x);
        if (xv.rank() != 2 || lo >= hi || hi > xv.cols())
            throw DimensionError("slice_cols [" + std::to_string(lo) + "," +
                                 std::to_string(hi) + ") out of range for " +
                                 xv.shape_str());
        const std::size_t m = xv.rows(), n = xv.cols(), w = hi - lo;
        Tensor<T> out({m, w});
        for (std::size_t i = 0; i < m; ++i)
            std::copy(xv.data.begin() + i * n + lo, xv.data.begin() + i * n + hi,
                      out.data.begin() + i * w);
        auto v = push(Op::slice_cols, std::move(out), x.id, -1);
        nodes_[v.id].i0 = static_cast<std::int32_t>(lo);
        nodes_[v.id].i1 = static_cast<std::int32_t>(hi);
        return v;
    }

    Var<T> bernoulli_nll_op(const Tensor<T>& target, Var<T> recon, double eps) {
        const auto& rv = value(recon);
        if (!(target.shape == rv.shape))
            throw DimensionError("bernoulli_nll shape mismatch: target " +
                                 const_cast<Tensor<T>&>(target).shape_str() +
                                 " vs recon " + rv.shape_str());
        const std::size_t m = rv.rank() == 2 ? rv.rows() : 1;
        const double total = kernels::bce_sum(rv.numel(), target.data.data(),
                                              rv.data.data(), T(eps));
        auto tgt = leaf(target, false);
        return push(Op::bernoulli_nll,
                    Tensor<T>::scalar(T(total / static_cast<double>(m))), recon.id,
                    tgt.id, false, eps);
    }

    Var<T> class_nll_op(Var<T> pi, std::vector<std::int32_t> labels, double alpha,
                        double floor) {
        const auto& pv = value(pi);
        if (pv.rank() != 2 || labels.size() != pv.rows())
            throw DimensionError("class_nll: pi " + pv.shape_str() + " vs " +
                                 std::to_string(labels.size()) + " labels");
        std::size_t labeled = 0;
        double total = 0.0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            const auto y = labels[i];
            if (y < 0) continue;
            if (static_cast<std::size_t>(y) >= pv.cols())
                throw DataError("label " + std::to_string(y) + " out of range for " +
                                std::to_string(pv.cols()) + " classes");
            ++labeled;
            total -= std::log(std::max(static_cast<double>(pv.at(i, y)), floor));
        }
        const double loss = labeled ? alpha * total / static_cast<double>(labeled) : 0.0;
        auto v = push(Op::class_nll, Tensor<T>::scalar(T(loss)), pi.id, -1, false,
                      alpha, floor);
        nodes_[v.id].aux = static_cast<std::int32_t>(labels_.size());
        labels_.push_back(std::move(labels));
        return v;
    }

    Var<T> replace_labeled_rows_op(Var<T> pi, std::vector<std::int32_t> labels) {
        const auto& pv = value(pi);
        if (pv.rank() != 2 || labels.size() != pv.rows())
            throw DimensionError("replace_labeled_rows: pi " + pv.shape_str() + " vs " +
                                 std::to_string(labels.size()) + " labels");
        Tensor<T> out = pv;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            const auto y = labels[i];
            if (y < 0) continue;
            if (static_cast<std::size_t>(y) >= pv.cols())
                throw DataError("label " + std::to_string(y) + " out of range for " +
                                std::to_string(pv.cols()) + " classes");
            std::fill(out.data.begin() + i * pv.cols(),
                      out.data.begin() + (i + 1) * pv.cols(), T(0));
            out.at(i, y) = T(1);
        }
        auto v = push(Op::replace_labeled_rows, std::move(out), pi.id, -1);
        nodes_[v.id].aux = static_cast<std::int32_t>(labels_.size());
        labels_.push_back(std::move(labels));
        return v;
    }

private:
    struct Node {
        Op op = Op::leaf;
        std::int32_t a = -1, b = -1;
        std::int32_t i0 = 0, i1 = 0;
        double p0 = 0.0, p1 = 0.0;
        std::int32_t aux = -1;
    };

    std::vector<Node> nodes_;
    std::vector<Tensor<T>> values_;
    std::vector<Tensor<T>> grads_;
    std::vector<std::uint8_t> has_grad_;
    std::vector<std::uint8_t> requires_;
    std::vector<std::vector<std::int32_t>> labels_;

    std::int32_t check(Var<T> v) const {
        if (!v.valid() || v.tape != this ||
            static_cast<std::size_t>(v.id) >= nodes_.size())
            throw ArgumentError("variable does not belong to this tape");
        return v.id;
    }

    Var<T> push(Op op, Tensor<T> value, std::int32_t a, std::int32_t b,
                bool leaf_requires = false, double p0 = 0.0, double p1 = 0.0) {
        Node n;
        n.op = op;
        n.a = a;
        n.b = b;
        n.p0 = p0;
        n.p1 = p1;
        bool req = leaf_requires;
        if (op != Op::leaf)
            req = (a >= 0 && requires_[a]) || (b >= 0 && requires_[b]);
        nodes_.push_back(n);
        values_.push_back(std::move(value));
        requires_.push_back(req ? 1 : 0);
        return Var<T>{this, static_cast<std::int32_t>(nodes_.size() - 1)};
    }

    void ensure_grad(std::int32_t i) {
        if (!has_grad_[i]) {
            grads_[i] = Tensor<T>(values_[i].shape);
            has_grad_[i] = 1;
        }
    }

    T* grad_into(std::int32_t i) {
        ensure_grad(i);
        return grads_[i].data.data();
    }

    void backward_node(std::int32_t i) {
        const Node& nd = nodes_[i];
        const Tensor<T>& y = values_[i];
        const Tensor<T>& gy = grads_[i];
        const T* dy = gy.data.data();
        const std::size_t n = y.numel();
        const bool need_a = nd.a >= 0 && requires_[nd.a];
        const bool need_b = nd.b >= 0 && requires_[nd.b];

        switch (nd.op) {
            case Op::matmul: {
                const auto& av = values_[nd.a];
                const auto& bv = values_[nd.b];
                if (need_a)
                    kernels::gemm_nt(av.rows(), bv.cols(), av.cols(), dy,
                                     bv.data.data(), grad_into(nd.a), true);
                if (need_b)
                    kernels::gemm_tn(av.rows(), av.cols(), bv.cols(), av.data.data(),
                                     dy, grad_into(nd.b), true);
                break;
            }
            case Op::add:
                if (need_a) kernels::axpy(n, T(1), dy, grad_into(nd.a));
                if (need_b) kernels::axpy(n, T(1), dy, grad_into(nd.b));
                break;
            case Op::sub:
                if (need_a) kernels::axpy(n, T(1), dy, grad_into(nd.a));
                if (need_b) kernels::axpy(n, T(-1), dy, grad_into(nd.b));
                break;
            case Op::mul:
                if (need_a)
                    kernels::fma_acc(n, dy, values_[nd.b].data.data(), grad_into(nd.a));
                if (need_b)
                    kernels::fma_acc(n, dy, values_[nd.a].data.data(), grad_into(nd.b));
                break;
            case Op::relu:
                if (need_a)
                    kernels::relu_grad(n, values_[nd.a].data.data(), dy, grad_into(nd.a));
                break;
            case Op::sigmoid:
                if (need_a) kernels::sigmoid_grad(n, y.data.data(), dy, grad_into(nd.a));
                break;
            case Op::exp_op:
                if (need_a) kernels::fma_acc(n, dy, y.data.data(), grad_into(nd.a));
                break;
            case Op::log_op:
                if (need_a)
                    kernels::log_grad(n, values_[nd.a].data.data(), dy, grad_into(nd.a));
                break;
            case Op::softplus:
                if (need_a)
                    kernels::softplus_grad(n, values_[nd.a].data.data(), dy,
                                           grad_into(nd.a));
                break;
            case Op::clamp:
                if (need_a)
                    kernels::clamp_grad(n, values_[nd.a].data.data(), T(nd.p0), T(nd.p1),
                                        dy, grad_into(nd.a));
                break;
            case Op::affine:
                if (need_a) kernels::axpy(n, T(nd.p0), dy, grad_into(nd.a));
                break;
            case Op::softmax:
                if (need_a)
                    kernels::softmax_grad(y.rows(), y.cols(), y.data.data(), dy,
                                          grad_into(nd.a));
                break;
            case Op::sum_all:
            case Op::mean_all: {
                if (!need_a) break;
                const auto& av = values_[nd.a];
                const T g = nd.op == Op::mean_all ? dy[0] / T(av.numel()) : dy[0];
                T* dx = grad_into(nd.a);
                for (std::size_t j = 0; j < av.numel(); ++j) dx[j] += g;
                break;
            }
            case Op::sum_axis0:
            case Op::mean_axis0: {
                if (!need_a) break;
                const auto& av = values_[nd.a];
                const std::size_t m = av.rows(), c = av.cols();
                const T s = nd.op == Op::mean_axis0 ? T(1) / T(m) : T(1);
                T* dx = grad_into(nd.a);
                for (std::size_t r = 0; r < m; ++r) kernels::axpy(c, s, dy, dx + r * c);
                break;
            }
            case Op::sum_axis1:
            case Op::mean_axis1: {
                if (!need_a) break;
                const auto& av = values_[nd.a];
                const std::size_t m = av.rows(), c = av.cols();
                const T s = nd.op == Op::mean_axis1 ? T(1) / T(c) : T(1);
                T* dx = grad_into(nd.a);
                for (std::size_t r = 0; r < m; ++r) {
                    const T g = s * dy[r];
                    for (std::size_t j = 0; j < c; ++j) dx[r * c + j] += g;
                }
                break;
            }
            case Op::add_rowvec: {
                if (need_a) kernels::axpy(n, T(1), dy, grad_into(nd.a));
                if (need_b)
                    kernels::col_sum(y.rows(), y.cols(), dy, grad_into(nd.b), true);
                break;
            }
            case Op::concat_cols: {
                const auto& av = values_[nd.a];
                const auto& bv = values_[nd.b];
                const std::size_t m = av.rows(), p = av.cols(), q = bv.cols();
                if (need_a) {
                    T* dx = grad_into(nd.a);
                    for (std::size_t r = 0; r < m; ++r)
                        kernels::axpy(p, T(1), dy + r * (p + q), dx + r * p);
                }
                if (need_b) {
                    T* dx = grad_into(nd.b);
                    for (std::size_t r = 0; r < m; ++r)
                        kernels::axpy(q, T(1), dy + r * (p + q) + p, dx + r * q);
                }
                break;
            }
            case Op::slice_cols: {
                if (!need_a) break;
                const auto& av = values_[nd.a];
                const std::size_t m = av.rows(), c = av.cols();
                const std::size_t lo = static_cast<std::size_t>(nd.i0);
                const std::size_t w = static_cast<std::size_t>(nd.i1) - lo;
                T* dx = grad_into(nd.a);
                for (std::size_t r = 0; r < m; ++r)
                    kernels::axpy(w, T(1), dy + r * w, dx + r * c + lo);
                break;
            }
            case Op::bernoulli_nll: {
                if (!need_a) break;
                const auto& rv = values_[nd.a];
                const auto& tv = values_[nd.b];
                const std::size_t m = rv.rank() == 2 ? rv.rows() : 1;
                kernels::bce_grad(rv.numel(), tv.data.data(), rv.data.data(), T(nd.p0),
                                  dy[0] / T(m), grad_into(nd.a));
                break;
            }
            case Op::class_nll: {
                if (!need_a) break;
                const auto& pv = values_[nd.a];
                const auto& labels = labels_[nd.aux];
                std::size_t labeled = 0;
                for (const auto yl : labels)
                    if (yl >= 0) ++labeled;
                if (labeled == 0) break;
                const T s = dy[0] * T(nd.p0) / T(labeled);
                T* dx = grad_into(nd.a);
                for (std::size_t r = 0; r < labels.size(); ++r) {
                    const auto yl = labels[r];
                    if (yl < 0) continue;
                    const T p = pv.at(r, yl);
                    if (p > T(nd.p1)) dx[r * pv.cols() + yl] -= s / p;
                }
                break;
            }
            case Op::replace_labeled_rows: {
                if (!need_a) break;
                const auto& labels = labels_[nd.aux];
                const std::size_t c = y.cols();
                T* dx = grad_into(nd.a);
                for (std::size_t r = 0; r < labels.size(); ++r) {
                    if (labels[r] >= 0) continue;
                    kernels::axpy(c, T(1), dy + r * c, dx + r * c);
                }
                break;
            }
            case Op::leaf:
                break;
        }
    }
};

// ---- free-function op surface ----

template <typename T> Var<T> matmul(Var<T> a, Var<T> b) { return a.tape->matmul_op(a, b); }
template <typename T> Var<T> add(Var<T> a, Var<T> b) { return a.tape->binary_op(Op::add, a, b); }
template <typename T> Var<T> sub(Var<T> a, Var<T> b) { return a.tape->binary_op(Op::sub, a, b); }
template <typename T> Var<T> mul(Var<T> a, Var<T> b) { return a.tape->binary_op(Op::mul, a, b); }
template <typename T> Var<T> relu(Var<T> x) { return x.tape->unary_op(Op::relu, x); }
template <typename T> Var<T> sigmoid(Var<T> x) { return x.tape->unary_op(Op::sigmoid, x); }
template <typename T> Var<T> vexp(Var<T> x) { return x.tape->unary_op(Op::exp_op, x); }
template <typename T> Var<T> vlog(Var<T> x) { return x.tape->unary_op(Op::log_op, x); }
template <typename T> Var<T> softplus(Var<T> x) { return x.tape->unary_op(Op::softplus, x); }
template <typename T> Var<T> clamp(Var<T> x, double lo, double hi) { return x.tape->clamp_op(x, lo, hi); }
template <typename T> Var<T> affine(Var<T> x, double a, double b) { return x.tape->affine_op(x, a, b); }
template <typename T> Var<T> softmax(Var<T> x) { return x.tape->softmax_op(x); }
template <typename T> Var<T> sum(Var<T> x) { return x.tape->reduce_all_op(x, false); }
template <typename T> Var<T> mean(Var<T> x) { return x.tape->reduce_all_op(x, true); }
template <typename T> Var<T> sum(Var<T> x, std::size_t axis) { return x.tape->reduce_axis_op(x, axis, false); }
template <typename T> Var<T> mean(Var<T> x, std::size_t axis) { return x.tape->reduce_axis_op(x, axis, true); }
template <typename T> Var<T> add_rowvec(Var<T> m, Var<T> v) { return m.tape->add_rowvec_op(m, v); }
template <typename T> Var<T> concat_cols(Var<T> a, Var<T> b) { return a.tape->concat_cols_op(a, b); }
template <typename T> Var<T> slice_cols(Var<T> x, std::size_t lo, std::size_t hi) { return x.tape->slice_cols_op(x, lo, hi); }
template <typename T> Var<T> bernoulli_nll(const Tensor<T>& target, Var<T> recon, double eps = 1e-7) { return recon.tape->bernoulli_nll_op(target, recon, eps); }
template <typename T> Var<T> class_nll(Var<T> pi, std::vector<std::int32_t> labels, double alpha, double floor = 1e-7) { return pi.tape->class_nll_op(pi, std::move(labels), alpha, floor); }
template <typename T> Var<T> replace_labeled_rows(Var<T> pi, std::vector<std::int32_t> labels) { return pi.tape->replace_labeled_rows_op(pi, std::move(labels)); }

}  // namespace ssvae
