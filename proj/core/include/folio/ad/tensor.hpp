#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace folio::ad {

struct Node;
using NodePtr = std::shared_ptr<Node>;

/// One value on the tape. Shapes are two-dimensional {rows, cols}; vectors are
/// 1 x n and scalars 1 x 1.
struct Node {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> value;
  std::vector<double> grad;
  bool requires_grad = false;
  std::vector<NodePtr> parents;
  /// Reads this node's grad and accumulates into parents' grads.
  std::function<void(Node&)> backward;
  const char* op = "leaf";

  void ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
  }
};

/// Handle to a tape node. Copies share the node.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(NodePtr node) : node_(std::move(node)) {}

  static Tensor constant(std::size_t rows, std::size_t cols, std::vector<double> values);
  static Tensor zeros(std::size_t rows, std::size_t cols);
  static Tensor scalar(double v);
  /// Leaf that accumulates gradients across backward passes.
  static Tensor parameter(std::size_t rows, std::size_t cols, std::vector<double> values);

  bool defined() const { return node_ != nullptr; }
  std::size_t rows() const { return node_->rows; }
  std::size_t cols() const { return node_->cols; }
  std::size_t size() const { return node_->value.size(); }
  std::vector<std::size_t> shape() const { return {node_->rows, node_->cols}; }
  bool requires_grad() const { return node_->requires_grad; }

  std::span<const double> data() const { return node_->value; }
  std::span<double> mutable_data() { return node_->value; }
  double at(std::size_t r, std::size_t c) const { return node_->value[r * node_->cols + c]; }
  double item() const;

  /// Empty until a backward pass reaches this tensor.
  std::span<const double> grad() const { return node_->grad; }
  std::span<double> mutable_grad() {
    node_->ensure_grad();
    return node_->grad;
  }
  void zero_grad();

  const NodePtr& node() const { return node_; }

 private:
  NodePtr node_;
};

/// Reverse-mode sweep from a 1 x 1 loss. Gradients accumulate additively into
/// every reachable tensor that requires them.
void backward(const Tensor& loss);

/// While alive, new ops record no backward closures (inference only).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

/// Builds an op node; `backward` is attached only if some parent needs grads.
Tensor make_op(const char* op, std::size_t rows, std::size_t cols, std::vector<double> value,
               std::vector<NodePtr> parents, std::function<void(Node&)> backward);

}  // namespace folio::ad
