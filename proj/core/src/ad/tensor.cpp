#include "folio/ad/tensor.hpp"

#include <unordered_set>

#include "folio/error.hpp"

namespace folio::ad {
namespace {

thread_local bool g_grad_enabled = true;

}  // namespace

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }
bool grad_enabled() { return g_grad_enabled; }

Tensor Tensor::constant(std::size_t rows, std::size_t cols, std::vector<double> values) {
  require(values.size() == rows * cols, ErrorKind::kShape,
          "constant: " + std::to_string(values.size()) + " values for a " + std::to_string(rows) +
              "x" + std::to_string(cols) + " tensor");
  auto node = std::make_shared<Node>();
  node->rows = rows;
  node->cols = cols;
  node->value = std::move(values);
  return Tensor(std::move(node));
}

Tensor Tensor::zeros(std::size_t rows, std::size_t cols) {
  return constant(rows, cols, std::vector<double>(rows * cols, 0.0));
}

Tensor Tensor::scalar(double v) { return constant(1, 1, {v}); }

Tensor Tensor::parameter(std::size_t rows, std::size_t cols, std::vector<double> values) {
  Tensor t = constant(rows, cols, std::move(values));
  t.node_->requires_grad = true;
  t.node_->ensure_grad();
  return t;
}

double Tensor::item() const {
  require(size() == 1, ErrorKind::kShape, "item() on a tensor with " + std::to_string(size()) +
                                              " elements");
  return node_->value[0];
}

void Tensor::zero_grad() {
  if (node_->requires_grad) node_->grad.assign(node_->value.size(), 0.0);
}

Tensor make_op(const char* op, std::size_t rows, std::size_t cols, std::vector<double> value,
               std::vector<NodePtr> parents, std::function<void(Node&)> backward) {
  auto node = std::make_shared<Node>();
  node->rows = rows;
  node->cols = cols;
  node->value = std::move(value);
  node->op = op;
  bool needs = false;
  if (!g_grad_enabled) parents.clear();
  for (const auto& p : parents) needs = needs || p->requires_grad;
  if (needs) {
    node->requires_grad = true;
    node->parents = std::move(parents);
    node->backward = std::move(backward);
  }
  return Tensor(std::move(node));
}

void backward(const Tensor& loss) {
  require(loss.defined() && loss.size() == 1, ErrorKind::kContract,
          "backward() needs a scalar loss");
  Node* root = loss.node().get();
  if (!root->requires_grad) return;

  // Iterative post-order DFS for a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack{{root, 0}};
  visited.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* parent = node->parents[next++].get();
      if (parent->requires_grad && visited.insert(parent).second) stack.emplace_back(parent, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (Node* n : order) {
    if (n->backward) n->grad.assign(n->value.size(), 0.0);
  }
  root->ensure_grad();
  root->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (!n->backward) continue;
    for (const auto& p : n->parents) {
      if (p->requires_grad) p->ensure_grad();
    }
    n->backward(*n);
  }
}

}  // namespace folio::ad
