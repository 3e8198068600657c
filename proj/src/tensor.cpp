#include "cald/tensor.hpp"

#include <sstream>
#include <unordered_set>

namespace cald {

std::string shape_str(const Shape& s) {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << "]";
    return os.str();
}

int64_t shape_numel(const Shape& s) {
    int64_t n = 1;
    for (int64_t d : s) {
        CALD_REQUIRE(d > 0, "tensor extents must be positive, got " + shape_str(s));
        n *= d;
    }
    return n;
}

Tensor Tensor::zeros(Shape s) {
    int64_t n = shape_numel(s);
    Tensor t;
    t.impl_ = std::make_shared<detail::TensorImpl>();
    t.impl_->shape = std::move(s);
    t.impl_->value.assign(static_cast<size_t>(n), 0.0f);
    return t;
}

Tensor Tensor::full(Shape s, float v) {
    Tensor t = zeros(std::move(s));
    std::fill(t.impl_->value.begin(), t.impl_->value.end(), v);
    return t;
}

Tensor Tensor::from(Shape s, std::vector<float> data) {
    int64_t n = shape_numel(s);
    CALD_REQUIRE(n == static_cast<int64_t>(data.size()),
                 "data length " + std::to_string(data.size()) + " does not match shape " + shape_str(s));
    Tensor t;
    t.impl_ = std::make_shared<detail::TensorImpl>();
    t.impl_->shape = std::move(s);
    t.impl_->value = std::move(data);
    return t;
}

Tensor Tensor::detach() const {
    Tensor t;
    t.impl_ = std::make_shared<detail::TensorImpl>();
    t.impl_->shape = impl_->shape;
    t.impl_->value = impl_->value;
    return t;
}

void Tensor::overwrite(std::span<const float> v) {
    CALD_REQUIRE(impl_ != nullptr, "overwrite on undefined tensor");
    CALD_ASSERT(impl_->producer == nullptr, "overwrite is restricted to leaf tensors");
    CALD_REQUIRE(v.size() == impl_->value.size(), "overwrite size mismatch");
    std::copy(v.begin(), v.end(), impl_->value.begin());
}

namespace {
thread_local bool g_grad_enabled = true;
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : prev_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = prev_; }

Tensor make_op_output(const char* name, Shape shape, std::vector<float> value,
                      std::vector<Tensor> inputs,
                      std::function<void(const std::vector<float>&, GradMap&)> backprop) {
    Tensor out = Tensor::from(std::move(shape), std::move(value));
    bool track = false;
    if (g_grad_enabled) {
        for (const Tensor& in : inputs)
            if (in.requires_grad() || in.has_producer()) track = true;
    }
    if (track) {
        auto node = std::make_unique<detail::Node>();
        node->name = name;
        node->inputs = std::move(inputs);
        node->backprop = std::move(backprop);
        out.impl_->producer = std::move(node);
    }
    return out;
}

std::vector<float>& GradMap::slot(const Tensor& t) {
    auto it = grads_.find(t.impl());
    if (it == grads_.end())
        it = grads_.emplace(t.impl(), std::vector<float>(static_cast<size_t>(t.numel()), 0.0f)).first;
    return it->second;
}

const std::vector<float>* GradMap::find(const Tensor& t) const {
    return find_impl(t.impl());
}

const std::vector<float>* GradMap::find_impl(const detail::TensorImpl* impl) const {
    auto it = grads_.find(impl);
    return it == grads_.end() ? nullptr : &it->second;
}

std::vector<float> GradMap::get(const Tensor& t) const {
    if (const auto* g = find(t)) return *g;
    return std::vector<float>(static_cast<size_t>(t.numel()), 0.0f);
}

GradMap backward(const Tensor& loss) {
    CALD_REQUIRE(loss.defined() && loss.numel() == 1, "backward expects a scalar loss");
    GradMap grads;
    grads.slot(loss)[0] = 1.0f;
    if (!loss.has_producer()) return grads;

    // Iterative post-order DFS; inputs visited in recorded order.
    std::vector<const detail::TensorImpl*> order;
    std::unordered_set<const detail::TensorImpl*> visited;
    struct Frame {
        const detail::TensorImpl* impl;
        size_t next_input;
    };
    std::vector<Frame> stack;
    stack.push_back({loss.impl(), 0});
    visited.insert(loss.impl());
    while (!stack.empty()) {
        Frame& f = stack.back();
        const auto& node = *f.impl->producer;
        if (f.next_input < node.inputs.size()) {
            const Tensor& in = node.inputs[f.next_input++];
            if (in.has_producer() && !visited.count(in.impl())) {
                visited.insert(in.impl());
                stack.push_back({in.impl(), 0});
            }
        } else {
            order.push_back(f.impl);
            stack.pop_back();
        }
    }

    // Post-order is a topological order ending at the loss; run it backwards.
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const detail::TensorImpl* impl = *it;
        const std::vector<float>* g = grads.find_impl(impl);
        if (g == nullptr) continue;  // no gradient reached this node
        impl->producer->backprop(*g, grads);
    }
    return grads;
}

double sum_f64(const Tensor& t) {
    double acc = 0.0;
    for (float v : t.values()) acc += static_cast<double>(v);
    return acc;
}

}  // namespace cald
