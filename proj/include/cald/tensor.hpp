#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cald/common.hpp"

namespace cald {

using Shape = std::vector<int64_t>;

std::string shape_str(const Shape& s);
int64_t shape_numel(const Shape& s);

class Tensor;
class GradMap;

namespace detail {

struct TensorImpl;

// One recorded operation. Owned by the impl it produced; holds its inputs
// alive so the tape survives as long as the loss tensor does.
struct Node {
    const char* name;
    std::vector<Tensor> inputs;
    // Accumulates input gradients given the output gradient.
    std::function<void(const std::vector<float>& grad_out, GradMap& grads)> backprop;
};

struct TensorImpl {
    Shape shape;
    std::vector<float> value;
    bool requires_grad = false;
    std::unique_ptr<Node> producer;
};

}  // namespace detail

// Dense f32 tensor, NCHW for activations. Value-semantic handle over shared
// immutable storage; parameters are the one exception (see overwrite()).
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(Shape s);
    static Tensor full(Shape s, float v);
    static Tensor from(Shape s, std::vector<float> data);
    static Tensor scalar(float v) { return from({1}, {v}); }

    bool defined() const { return impl_ != nullptr; }
    const Shape& shape() const { return impl_->shape; }
    int64_t numel() const { return static_cast<int64_t>(impl_->value.size()); }
    int64_t dim(int i) const { return impl_->shape.at(static_cast<size_t>(i)); }
    int ndim() const { return static_cast<int>(impl_->shape.size()); }

    const float* data() const { return impl_->value.data(); }
    std::span<const float> values() const { return impl_->value; }
    float item() const {
        CALD_REQUIRE(numel() == 1, "item() requires a scalar tensor");
        return impl_->value[0];
    }

    bool requires_grad() const { return impl_ && impl_->requires_grad; }
    void set_requires_grad(bool v) { impl_->requires_grad = v; }
    bool has_producer() const { return impl_ && impl_->producer != nullptr; }

    // Same storage, detached from the tape.
    Tensor detach() const;

    // In-place update for optimizer steps and leaf mutation only.
    void overwrite(std::span<const float> v);

    detail::TensorImpl* impl() const { return impl_.get(); }

    friend Tensor make_op_output(const char* name, Shape shape, std::vector<float> value,
                                 std::vector<Tensor> inputs,
                                 std::function<void(const std::vector<float>&, GradMap&)> backprop);

private:
    std::shared_ptr<detail::TensorImpl> impl_;
};

// Result of backward(): gradients keyed by tensor identity. Tensors never
// reached by the sweep report a zero gradient.
class GradMap {
public:
    // Zero-filled slot, created on first touch.
    std::vector<float>& slot(const Tensor& t);
    // Gradient of t; zeros if t was not reached.
    std::vector<float> get(const Tensor& t) const;
    const std::vector<float>* find(const Tensor& t) const;
    const std::vector<float>* find_impl(const detail::TensorImpl* impl) const;

private:
    std::unordered_map<const detail::TensorImpl*, std::vector<float>> grads_;
};

// Reverse-mode sweep from a scalar loss. Visits each recorded node exactly
// once in reverse topological order (deterministic for a fixed graph).
GradMap backward(const Tensor& loss);

// Tape recording is on by default; inference paths disable it via RAII.
bool grad_enabled();
struct NoGradGuard {
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool prev_;
};

// f64-accumulated sum of all elements; shared by reductions and test oracles.
double sum_f64(const Tensor& t);

}  // namespace cald
