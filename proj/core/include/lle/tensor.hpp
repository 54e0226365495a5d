#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lle::ag {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_to_string(const Shape& shape);

class Tensor;

namespace detail {

/// Storage plus graph bookkeeping for one tensor. Interior nodes hold strong
/// references to their inputs, so the graph is a DAG rooted at the loss.
struct Node {
  Shape shape;
  std::vector<float> data;
  std::vector<float> grad;
  bool requires_grad = false;
  bool consumed = false;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward_fn;

  bool is_leaf() const { return !backward_fn; }
  void ensure_grad();
};

}  // namespace detail

/// N-dimensional float array with optional reverse-mode gradient tracking.
/// Copies are shallow: two Tensor handles may refer to one node.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, float value, bool requires_grad = false);
  static Tensor from_data(Shape shape, std::vector<float> data, bool requires_grad = false);
  static Tensor scalar(float value);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const;

  std::span<const float> data() const;
  /// Direct write access. Only meaningful on leaves; writing into an interior
  /// node does not invalidate the gradients of its consumers.
  std::span<float> mutable_data();
  /// Empty span until a backward pass reaches this tensor.
  std::span<const float> grad() const;
  std::span<float> mutable_grad();
  bool has_grad() const;
  float item() const;

  bool requires_grad() const;
  void set_requires_grad(bool flag);
  void zero_grad();

  /// Fresh leaf holding a copy of the values, cut off from the graph.
  Tensor detach() const;

  /// Populates dLoss/dx on every reachable tensor that requires grad.
  /// The tensor must hold exactly one element. Gradients are reset first
  /// unless `accumulate` is set. Interior nodes are released afterwards, so a
  /// second call on the same graph throws GraphError.
  void backward(bool accumulate = false) const;

  detail::Node* node() const { return node_.get(); }
  const std::shared_ptr<detail::Node>& node_ptr() const { return node_; }

  /// Builds an interior node. Used by the op implementations.
  static Tensor make_result(Shape shape, std::vector<float> data,
                            std::vector<Tensor> inputs,
                            std::function<void(detail::Node&)> backward_fn);

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::Node> node_;
};

}  // namespace lle::ag
