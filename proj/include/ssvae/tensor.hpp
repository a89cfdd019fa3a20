#pragma once

#include <cstddef>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "ssvae/errors.hpp"

namespace ssvae {

template <typename T>
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<T> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> s)
        : shape(std::move(s)), data(count(shape), T(0)) {}
    Tensor(std::vector<std::size_t> s, std::vector<T> d)
        : shape(std::move(s)), data(std::move(d)) {
        if (count(shape) != data.size())
            throw DimensionError("tensor data length " + std::to_string(data.size()) +
                                 " does not match shape " + shape_str());
    }

    static std::size_t count(const std::vector<std::size_t>& s) {
        return std::accumulate(s.begin(), s.end(), std::size_t{1},
                               std::multiplies<>());
    }

    static Tensor full(std::vector<std::size_t> s, T value) {
        Tensor t(std::move(s));
        std::fill(t.data.begin(), t.data.end(), value);
        return t;
    }

    static Tensor scalar(T value) { return Tensor({1}, {value}); }

    std::size_t numel() const { return data.size(); }
    std::size_t rank() const { return shape.size(); }

    std::size_t rows() const {
        require_rank2();
        return shape[0];
    }
    std::size_t cols() const {
        require_rank2();
        return shape[1];
    }

    T& at(std::size_t i, std::size_t j) { return data[i * cols() + j]; }
    T at(std::size_t i, std::size_t j) const { return data[i * cols() + j]; }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }

    std::string shape_str() const {
        std::ostringstream os;
        os << '[';
        for (std::size_t i = 0; i < shape.size(); ++i)
            os << (i ? "x" : "") << shape[i];
        os << ']';
        return os.str();
    }

    template <typename U>
    Tensor<U> cast() const {
        Tensor<U> out;
        out.shape = shape;
        out.data.assign(data.begin(), data.end());
        return out;
    }

private:
    void require_rank2() const {
        if (shape.size() != 2)
            throw DimensionError("expected a rank-2 tensor, got " + shape_str());
    }
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

}  // namespace ssvae
