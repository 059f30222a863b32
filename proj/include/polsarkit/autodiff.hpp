#pragma once

#include <functional>
#include <string>
#include <vector>

namespace polsar::ad {

// Dense row-major 2D real matrix; scalars are 1x1.
struct Matrix {
  int rows = 0, cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0);

  std::size_t size() const { return data.size(); }
  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
  double scalar() const;  // requires 1x1
};

struct Value {
  int id = -1;
};

// Eager reverse-mode tape. Nodes are recorded in forward order and the
// sweep replays them strictly in reverse. Single-threaded per tape.
class Tape {
 public:
  Value leaf(Matrix m);

  Value add(Value a, Value b);
  Value sub(Value a, Value b);
  Value scale(Value a, double c);
  Value mul(Value a, Value b);  // elementwise
  Value matmul(Value a, Value b);
  Value transpose(Value a);
  Value softmax_rows(Value a);  // max-subtracted, rows sum to 1
  Value sigmoid(Value a);
  Value softplus(Value a);
  Value tanh(Value a);
  Value mean(Value a);  // 1x1
  // Adds a constant (non-differentiated) matrix, e.g. an attention mask.
  Value masked_add(Value a, const Matrix& mask);
  // Mean binary cross-entropy of sigmoid(logits) against constant targets
  // with probabilities clamped to [1e-7, 1-1e-7]. Fused so the backward
  // pass matches the clamped forward exactly.
  Value bce_with_logits_mean(Value logits, const Matrix& targets);

  const Matrix& value(Value v) const;
  const Matrix& grad(Value v) const;

  // Seeds d(loss)/d(loss) = 1 and accumulates into every node's grad.
  // Calling again without clear_grads() is an error.
  void backward(Value loss);
  void clear_grads();

  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  enum class Op {
    Leaf,
    Add,
    Sub,
    Scale,
    Mul,
    Matmul,
    Transpose,
    SoftmaxRows,
    Sigmoid,
    Softplus,
    Tanh,
    Mean,
    MaskedAdd,
    BceWithLogitsMean,
  };
  struct Node {
    Op op = Op::Leaf;
    int a = -1, b = -1;
    double c = 0.0;
    Matrix val;
    Matrix grad;
    Matrix aux;  // saved targets/mask for fused ops
  };

  Value push(Node n);
  const Node& node(Value v) const;

  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

inline constexpr double kGradCheckStep = 1e-5;

// Builds f on a fresh tape per evaluation; compares backward() gradients
// of every leaf entry against central differences. Returns the worst
// relative error |a - b| / max(1, |a|, |b|).
double grad_check(const std::function<Value(Tape&, const std::vector<Value>&)>& f,
                  const std::vector<Matrix>& leaves, double h = kGradCheckStep);

}  // namespace polsar::ad
