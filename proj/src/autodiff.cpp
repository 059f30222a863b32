#include "polsarkit/autodiff.hpp"

#include <cmath>
#include <stdexcept>

namespace polsar::ad {

namespace {

constexpr double kBceLo = 1e-7;
constexpr double kBceHi = 1.0 - 1e-7;

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double stable_softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

void check_finite(const Matrix& m, const char* op) {
  for (double v : m.data) {
    if (!std::isfinite(v)) {
      throw std::runtime_error(std::string("non-finite value out of op ") + op);
    }
  }
}

}  // namespace

Matrix::Matrix(int r, int c, double fill)
    : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {
  if (r < 1 || c < 1) throw std::invalid_argument("matrix dims must be >= 1");
}

double Matrix::scalar() const {
  if (rows != 1 || cols != 1) throw std::logic_error("matrix is not 1x1");
  return data[0];
}

Value Tape::push(Node n) {
  n.grad = Matrix(n.val.rows, n.val.cols, 0.0);
  nodes_.push_back(std::move(n));
  return Value{static_cast<int>(nodes_.size()) - 1};
}

const Tape::Node& Tape::node(Value v) const {
  if (v.id < 0 || v.id >= static_cast<int>(nodes_.size())) {
    throw std::logic_error("value does not belong to this tape");
  }
  return nodes_[static_cast<std::size_t>(v.id)];
}

const Matrix& Tape::value(Value v) const { return node(v).val; }
const Matrix& Tape::grad(Value v) const { return node(v).grad; }

Value Tape::leaf(Matrix m) {
  check_finite(m, "leaf");
  Node n;
  n.op = Op::Leaf;
  n.val = std::move(m);
  return push(std::move(n));
}

Value Tape::add(Value a, Value b) {
  const Matrix& ma = value(a);
  const Matrix& mb = value(b);
  if (!ma.same_shape(mb)) throw std::invalid_argument("add: shape mismatch");
  Node n;
  n.op = Op::Add;
  n.a = a.id;
  n.b = b.id;
  n.val = ma;
  for (std::size_t i = 0; i < n.val.size(); ++i) n.val.data[i] += mb.data[i];
  check_finite(n.val, "add");
  return push(std::move(n));
}

Value Tape::sub(Value a, Value b) {
  const Matrix& ma = value(a);
  const Matrix& mb = value(b);
  if (!ma.same_shape(mb)) throw std::invalid_argument("sub: shape mismatch");
  Node n;
  n.op = Op::Sub;
  n.a = a.id;
  n.b = b.id;
  n.val = ma;
  for (std::size_t i = 0; i < n.val.size(); ++i) n.val.data[i] -= mb.data[i];
  check_finite(n.val, "sub");
  return push(std::move(n));
}

Value Tape::scale(Value a, double c) {
  Node n;
  n.op = Op::Scale;
  n.a = a.id;
  n.c = c;
  n.val = value(a);
  for (double& v : n.val.data) v *= c;
  check_finite(n.val, "scale");
  return push(std::move(n));
}

Value Tape::mul(Value a, Value b) {
  const Matrix& ma = value(a);
  const Matrix& mb = value(b);
  if (!ma.same_shape(mb)) throw std::invalid_argument("mul: shape mismatch");
  Node n;
  n.op = Op::Mul;
  n.a = a.id;
  n.b = b.id;
  n.val = ma;
  for (std::size_t i = 0; i < n.val.size(); ++i) n.val.data[i] *= mb.data[i];
  check_finite(n.val, "mul");
  return push(std::move(n));
}

Value Tape::matmul(Value a, Value b) {
  const Matrix& ma = value(a);
  const Matrix& mb = value(b);
  if (ma.cols != mb.rows) throw std::invalid_argument("matmul: inner dims differ");
  Node n;
  n.op = Op::Matmul;
  n.a = a.id;
  n.b = b.id;
  n.val = Matrix(ma.rows, mb.cols, 0.0);
  for (int i = 0; i < ma.rows; ++i) {
    for (int k = 0; k < ma.cols; ++k) {
      const double aik = ma.at(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < mb.cols; ++j) n.val.at(i, j) += aik * mb.at(k, j);
    }
  }
  check_finite(n.val, "matmul");
  return push(std::move(n));
}

Value Tape::transpose(Value a) {
  const Matrix& ma = value(a);
  Node n;
  n.op = Op::Transpose;
  n.a = a.id;
  n.val = Matrix(ma.cols, ma.rows, 0.0);
  for (int i = 0; i < ma.rows; ++i) {
    for (int j = 0; j < ma.cols; ++j) n.val.at(j, i) = ma.at(i, j);
  }
  return push(std::move(n));
}

Value Tape::softmax_rows(Value a) {
  const Matrix& ma = value(a);
  Node n;
  n.op = Op::SoftmaxRows;
  n.a = a.id;
  n.val = Matrix(ma.rows, ma.cols, 0.0);
  for (int i = 0; i < ma.rows; ++i) {
    double mx = ma.at(i, 0);
    for (int j = 1; j < ma.cols; ++j) mx = std::max(mx, ma.at(i, j));
    double denom = 0.0;
    for (int j = 0; j < ma.cols; ++j) {
      const double e = std::exp(ma.at(i, j) - mx);
      n.val.at(i, j) = e;
      denom += e;
    }
    const double inv = 1.0 / denom;
    for (int j = 0; j < ma.cols; ++j) n.val.at(i, j) *= inv;
  }
  check_finite(n.val, "softmax_rows");
  return push(std::move(n));
}

Value Tape::sigmoid(Value a) {
  Node n;
  n.op = Op::Sigmoid;
  n.a = a.id;
  n.val = value(a);
  for (double& v : n.val.data) v = stable_sigmoid(v);
  check_finite(n.val, "sigmoid");
  return push(std::move(n));
}

Value Tape::softplus(Value a) {
  Node n;
  n.op = Op::Softplus;
  n.a = a.id;
  n.val = value(a);
  for (double& v : n.val.data) v = stable_softplus(v);
  check_finite(n.val, "softplus");
  return push(std::move(n));
}

Value Tape::tanh(Value a) {
  Node n;
  n.op = Op::Tanh;
  n.a = a.id;
  n.val = value(a);
  for (double& v : n.val.data) v = std::tanh(v);
  check_finite(n.val, "tanh");
  return push(std::move(n));
}

Value Tape::mean(Value a) {
  const Matrix& ma = value(a);
  Node n;
  n.op = Op::Mean;
  n.a = a.id;
  n.val = Matrix(1, 1, 0.0);
  double acc = 0.0;
  for (double v : ma.data) acc += v;
  n.val.data[0] = acc / static_cast<double>(ma.size());
  check_finite(n.val, "mean");
  return push(std::move(n));
}

Value Tape::masked_add(Value a, const Matrix& mask) {
  const Matrix& ma = value(a);
  if (!ma.same_shape(mask)) throw std::invalid_argument("masked_add: shape mismatch");
  Node n;
  n.op = Op::MaskedAdd;
  n.a = a.id;
  n.val = ma;
  for (std::size_t i = 0; i < n.val.size(); ++i) n.val.data[i] += mask.data[i];
  check_finite(n.val, "masked_add");
  return push(std::move(n));
}

Value Tape::bce_with_logits_mean(Value logits, const Matrix& targets) {
  const Matrix& ml = value(logits);
  if (!ml.same_shape(targets)) {
    throw std::invalid_argument("bce_with_logits_mean: shape mismatch");
  }
  Node n;
  n.op = Op::BceWithLogitsMean;
  n.a = logits.id;
  n.aux = targets;
  n.val = Matrix(1, 1, 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < ml.size(); ++i) {
    double p = stable_sigmoid(ml.data[i]);
    p = std::min(kBceHi, std::max(kBceLo, p));
    const double y = targets.data[i];
    acc += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
  }
  n.val.data[0] = acc / static_cast<double>(ml.size());
  check_finite(n.val, "bce_with_logits_mean");
  return push(std::move(n));
}

void Tape::backward(Value loss) {
  if (backward_done_) {
    throw std::logic_error("backward called twice without clear_grads");
  }
  const Node& top = node(loss);
  if (top.val.rows != 1 || top.val.cols != 1) {
    throw std::invalid_argument("backward target must be scalar");
  }
  backward_done_ = true;
  nodes_[static_cast<std::size_t>(loss.id)].grad.data[0] = 1.0;

  for (int id = loss.id; id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    const Matrix& g = n.grad;
    switch (n.op) {
      case Op::Leaf:
        break;
      case Op::Add: {
        Matrix& ga = nodes_[static_cast<std::size_t>(n.a)].grad;
        Matrix& gb = nodes_[static_cast<std::size_t>(n.b)].grad;
        for (std::size_t i = 0; i < g.size(); ++i) {
          ga.data[i] += g.data[i];
          gb.data[i] += g.data[i];
        }
        break;
      }
      case Op::Sub: {
        Matrix& ga = nodes_[static_cast<std::size_t>(n.a)].grad;
        Matrix& gb = nodes_[static_cast<std::size_t>(n.b)].grad;
        for (std::size_t i = 0; i < g.size(); ++i) {
          ga.data[i] += g.data[i];
          gb.data[i] -= g.data[i];
        }
        break;
      }
      case Op::Scale: {
        Matrix& ga = nodes_[static_cast<std::size_t>(n.a)].grad;
        for (std::size_t i = 0; i < g.size(); ++i) ga.data[i] += n.c * g.data[i];
        break;
      }
      case Op::Mul: {
        Node& na = nodes_[static_cast<std::size_t>(n.a)];
        Node& nb = nodes_[static_cast<std::size_t>(n.b)];
        for (std::size_t i = 0; i < g.size(); ++i) {
          na.grad.data[i] += g.data[i] * nb.val.data[i];
          nb.grad.data[i] += g.data[i] * na.val.data[i];
        }
        break;
      }
      case Op::Matmul: {
        Node& na = nodes_[static_cast<std::size_t>(n.a)];
        Node& nb = nodes_[static_cast<std::size_t>(n.b)];
        // dA += G * B^T
        for (int i = 0; i < na.val.rows; ++i) {
          for (int k = 0; k < na.val.cols; ++k) {
            double acc = 0.0;
            for (int j = 0; j < nb.val.cols; ++j) acc += g.at(i, j) * nb.val.at(k, j);
            na.grad.at(i, k) += acc;
          }
        }
        // dB += A^T * G
        for (int k = 0; k < nb.val.rows; ++k) {
          for (int j = 0; j < nb.val.cols; ++j) {
            double acc = 0.0;
            for (int i = 0; i < na.val.rows; ++i) acc += na.val.at(i, k) * g.at(i, j);
            nb.grad.at(k, j) += acc;
          }
        }
        break;
      }
      case Op::Transpose: {
        Matrix& ga = nodes_[static_cast<std::size_t>(n.a)].grad;
        for (int i = 0; i < n.val.rows; ++i) {
          for (int j = 0; j < n.val.cols; ++j) ga.at(j, i) += g.at(i, j);
        }
        break;
      }
      case Op::SoftmaxRows: {
        Matrix& ga = nodes_[static_cast<std::size_t>(n.a)].grad;
        for (int i = 0; i < n.val.rows; ++i) {
          double dot = 0.0;
          for (int j = 0; j < n.val.cols; ++j) dot += g.at(i, j) * n.val.at(i, j);
          for (int j = 0; j < n.val.cols; ++j) {
            ga.at(i, j) += n.val.at(i, j) * (g.at(i, j) - dot);
          }
        }
        break;
      }
      case Op::Sigmoid: {
        Matrix& ga = nodes_[static_cast<std::size_t>(n.a)].grad;
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double s = n.val.data[i];
          ga.data[i] += g.data[i] * s * (1.0 - s);
        }
        break;
      }
      case Op::Softplus: {
        Node& na = nodes_[static_cast<std::size_t>(n.a)];
        for (std::size_t i = 0; i < g.size(); ++i) {
          na.grad.data[i] += g.data[i] * stable_sigmoid(na.val.data[i]);
        }
        break;
      }
      case Op::Tanh: {
        Matrix& ga = nodes_[static_cast<std::size_t>(n.a)].grad;
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double t = n.val.data[i];
          ga.data[i] += g.data[i] * (1.0 - t * t);
        }
        break;
      }
      case Op::Mean: {
        Node& na = nodes_[static_cast<std::size_t>(n.a)];
        const double gs = g.data[0] / static_cast<double>(na.val.size());
        for (double& v : na.grad.data) v += gs;
        break;
      }
      case Op::MaskedAdd: {
        Matrix& ga = nodes_[static_cast<std::size_t>(n.a)].grad;
        for (std::size_t i = 0; i < g.size(); ++i) ga.data[i] += g.data[i];
        break;
      }
      case Op::BceWithLogitsMean: {
        Node& na = nodes_[static_cast<std::size_t>(n.a)];
        const double gs = g.data[0] / static_cast<double>(na.val.size());
        for (std::size_t i = 0; i < na.val.size(); ++i) {
          const double p = stable_sigmoid(na.val.data[i]);
          // clamped probabilities contribute no gradient
          if (p <= kBceLo || p >= kBceHi) continue;
          na.grad.data[i] += gs * (p - n.aux.data[i]);
        }
        break;
      }
    }
  }
}

void Tape::clear_grads() {
  for (Node& n : nodes_) {
    for (double& v : n.grad.data) v = 0.0;
  }
  backward_done_ = false;
}

double grad_check(const std::function<Value(Tape&, const std::vector<Value>&)>& f,
                  const std::vector<Matrix>& leaves, double h) {
  auto eval = [&](const std::vector<Matrix>& pts, std::vector<Matrix>* grads) {
    Tape tape;
    std::vector<Value> vals;
    vals.reserve(pts.size());
    for (const Matrix& m : pts) vals.push_back(tape.leaf(m));
    const Value loss = f(tape, vals);
    const double out = tape.value(loss).scalar();
    if (grads) {
      tape.backward(loss);
      grads->clear();
      for (const Value v : vals) grads->push_back(tape.grad(v));
    }
    return out;
  };

  std::vector<Matrix> analytic;
  eval(leaves, &analytic);

  double worst = 0.0;
  std::vector<Matrix> probe = leaves;
  for (std::size_t li = 0; li < leaves.size(); ++li) {
    for (std::size_t i = 0; i < leaves[li].size(); ++i) {
      const double x0 = leaves[li].data[i];
      probe[li].data[i] = x0 + h;
      const double lp = eval(probe, nullptr);
      probe[li].data[i] = x0 - h;
      const double lm = eval(probe, nullptr);
      probe[li].data[i] = x0;
      const double fd = (lp - lm) / (2.0 * h);
      const double an = analytic[li].data[i];
      const double rel =
          std::abs(an - fd) / std::max({1.0, std::abs(an), std::abs(fd)});
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

}  // namespace polsar::ad
