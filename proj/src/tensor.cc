// Copyright 2026 The g2t Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "g2t/tensor.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace g2t::ad {
namespace {

thread_local bool grad_enabled = true;

// Branch decisions (relu signs, max-pool winners) are hashed while a gradient
// check runs, so that perturbations crossing a kink can be detected.
thread_local bool track_branches = false;
thread_local uint64_t branch_hash = 0;

void MixBranch(uint64_t v) {
  branch_hash ^= v + 0x9e3779b97f4a7c15ULL + (branch_hash << 6) + (branch_hash >> 2);
}

std::string ShapeStr(const Matrix& m) {
  return "[" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + "]";
}

[[noreturn]] void ShapeError(std::string_view op, std::initializer_list<const Matrix*> ms,
                             std::string_view detail = "") {
  std::ostringstream os;
  os << op << ": incompatible shapes";
  for (const auto* m : ms) os << " " << ShapeStr(*m);
  if (!detail.empty()) os << " (" << detail << ")";
  throw std::invalid_argument(os.str());
}

void Accumulate(Node& n, const Matrix& g) {
  if (!n.requires_grad) return;
  if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

// Records a node when grad mode is on and some parent needs a gradient.
Tensor Record(std::string_view op, Matrix value, std::vector<Tensor> parents,
              std::function<void(Node&)> backward) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->op = op;
  bool any = false;
  for (const auto& p : parents) any = any || p.requires_grad();
  if (grad_enabled && any) {
    node->requires_grad = true;
    node->parents.reserve(parents.size());
    for (auto& p : parents) node->parents.push_back(p.shared());
    node->backward = std::move(backward);
  }
  return Tensor(std::move(node));
}

Node& P(Node& n, size_t i) { return *n.parents[i]; }

}  // namespace

Tensor Tensor::Constant(Matrix value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  return Tensor(std::move(node));
}

Tensor Tensor::Parameter(Matrix value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->requires_grad = true;
  return Tensor(std::move(node));
}

Matrix Tensor::grad() const {
  if (node_->grad.size() == 0) return Matrix::Zero(rows(), cols());
  return node_->grad;
}

double Tensor::item() const {
  if (rows() != 1 || cols() != 1) {
    throw std::invalid_argument("item: tensor is " + ShapeStr(value()));
  }
  return value()(0, 0);
}

NoGradGuard::NoGradGuard() : previous_(grad_enabled) { grad_enabled = false; }
NoGradGuard::~NoGradGuard() { grad_enabled = previous_; }
bool GradEnabled() { return grad_enabled; }

Tensor MatMul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) ShapeError("matmul", {&a.value(), &b.value()});
  return Record("matmul", a.value() * b.value(), {a, b}, [](Node& n) {
    Node& x = P(n, 0);
    Node& y = P(n, 1);
    if (x.requires_grad) Accumulate(x, n.grad * y.value.transpose());
    if (y.requires_grad) Accumulate(y, x.value.transpose() * n.grad);
  });
}

Tensor Add(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    ShapeError("add", {&a.value(), &b.value()});
  }
  return Record("add", a.value() + b.value(), {a, b}, [](Node& n) {
    Accumulate(P(n, 0), n.grad);
    Accumulate(P(n, 1), n.grad);
  });
}

Tensor Sub(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    ShapeError("sub", {&a.value(), &b.value()});
  }
  return Record("sub", a.value() - b.value(), {a, b}, [](Node& n) {
    Accumulate(P(n, 0), n.grad);
    if (P(n, 1).requires_grad) Accumulate(P(n, 1), -n.grad);
  });
}

Tensor Mul(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    ShapeError("mul_elementwise", {&a.value(), &b.value()});
  }
  return Record("mul_elementwise", a.value().cwiseProduct(b.value()), {a, b}, [](Node& n) {
    Node& x = P(n, 0);
    Node& y = P(n, 1);
    if (x.requires_grad) Accumulate(x, n.grad.cwiseProduct(y.value));
    if (y.requires_grad) Accumulate(y, n.grad.cwiseProduct(x.value));
  });
}

Tensor ScalarMul(const Tensor& x, double c) {
  return Record("scalar_mul", x.value() * c, {x},
                [c](Node& n) { Accumulate(P(n, 0), n.grad * c); });
}

Tensor Concat(std::span<const Tensor> parts, int axis) {
  if (parts.empty()) throw std::invalid_argument("concat: no inputs");
  if (axis != 0 && axis != 1) throw std::invalid_argument("concat: axis must be 0 or 1");
  Eigen::Index rows = 0, cols = 0;
  for (const auto& p : parts) {
    if (axis == 0) {
      if (p.cols() != parts[0].cols()) ShapeError("concat", {&parts[0].value(), &p.value()}, "axis 0");
      rows += p.rows();
    } else {
      if (p.rows() != parts[0].rows()) ShapeError("concat", {&parts[0].value(), &p.value()}, "axis 1");
      cols += p.cols();
    }
  }
  if (axis == 0) cols = parts[0].cols();
  else rows = parts[0].rows();

  Matrix out(rows, cols);
  Eigen::Index offset = 0;
  for (const auto& p : parts) {
    if (axis == 0) {
      out.middleRows(offset, p.rows()) = p.value();
      offset += p.rows();
    } else {
      out.middleCols(offset, p.cols()) = p.value();
      offset += p.cols();
    }
  }
  std::vector<Tensor> parents(parts.begin(), parts.end());
  return Record("concat", std::move(out), std::move(parents), [axis](Node& n) {
    Eigen::Index off = 0;
    for (auto& parent : n.parents) {
      auto len = axis == 0 ? parent->value.rows() : parent->value.cols();
      if (parent->requires_grad) {
        if (axis == 0) Accumulate(*parent, n.grad.middleRows(off, len));
        else Accumulate(*parent, n.grad.middleCols(off, len));
      }
      off += len;
    }
  });
}

Tensor Concat(std::initializer_list<Tensor> parts, int axis) {
  return Concat(std::span<const Tensor>(parts.begin(), parts.size()), axis);
}

Tensor Tanh(const Tensor& x) {
  Matrix y = x.value().array().tanh().matrix();
  return Record("tanh", y, {x}, [](Node& n) {
    Accumulate(P(n, 0), n.grad.cwiseProduct((1.0 - n.value.array().square()).matrix()));
  });
}

Tensor Sigmoid(const Tensor& x) {
  Matrix y = (1.0 / (1.0 + (-x.value().array()).exp())).matrix();
  return Record("sigmoid", y, {x}, [](Node& n) {
    Accumulate(P(n, 0),
               n.grad.cwiseProduct((n.value.array() * (1.0 - n.value.array())).matrix()));
  });
}

Tensor Relu(const Tensor& x) {
  if (track_branches) {
    const Matrix& v = x.value();
    for (Eigen::Index i = 0; i < v.size(); ++i) MixBranch(v.data()[i] > 0.0 ? 2 * i + 1 : 2 * i);
  }
  return Record("relu", x.value().cwiseMax(0.0), {x}, [](Node& n) {
    Accumulate(P(n, 0), (P(n, 0).value.array() > 0.0).select(n.grad, 0.0));
  });
}

Tensor Softmax(const Tensor& x, int axis) {
  if (axis != 0 && axis != 1) throw std::invalid_argument("softmax: axis must be 0 or 1");
  if (x.value().size() == 0) ShapeError("softmax", {&x.value()}, "empty");
  Matrix y;
  if (axis == 1) {
    Matrix shifted = x.value().colwise() - x.value().rowwise().maxCoeff();
    Matrix e = shifted.array().exp().matrix();
    y = e.array().colwise() / e.rowwise().sum().array();
  } else {
    Matrix shifted = x.value().rowwise() - x.value().colwise().maxCoeff();
    Matrix e = shifted.array().exp().matrix();
    y = e.array().rowwise() / e.colwise().sum().array();
  }
  return Record("softmax", std::move(y), {x}, [axis](Node& n) {
    Matrix gy = n.grad.cwiseProduct(n.value);
    Matrix dx;
    if (axis == 1) {
      dx = gy - (n.value.array().colwise() * gy.rowwise().sum().array()).matrix();
    } else {
      dx = gy - (n.value.array().rowwise() * gy.colwise().sum().array()).matrix();
    }
    Accumulate(P(n, 0), dx);
  });
}

Tensor Log(const Tensor& x) {
  return Record("log", x.value().array().log().matrix(), {x}, [](Node& n) {
    Accumulate(P(n, 0), n.grad.cwiseQuotient(P(n, 0).value));
  });
}

Tensor RowMaxPool(const Tensor& x) {
  if (x.rows() == 0) ShapeError("row_maxpool", {&x.value()}, "no rows");
  const Matrix& v = x.value();
  RowVector out(v.cols());
  std::vector<Eigen::Index> argmax(v.cols());
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    Eigen::Index r;
    out(c) = v.col(c).maxCoeff(&r);  // first maximal row on ties
    argmax[c] = r;
    if (track_branches) MixBranch(static_cast<uint64_t>(c * v.rows() + r));
  }
  return Record("row_maxpool", out, {x}, [argmax = std::move(argmax)](Node& n) {
    Node& in = P(n, 0);
    Matrix g = Matrix::Zero(in.value.rows(), in.value.cols());
    for (size_t c = 0; c < argmax.size(); ++c) g(argmax[c], c) = n.grad(0, c);
    Accumulate(in, g);
  });
}

Tensor EmbeddingLookup(const Tensor& table, std::span<const int> ids) {
  Matrix out(static_cast<Eigen::Index>(ids.size()), table.cols());
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= table.rows()) {
      throw std::invalid_argument("embedding_lookup: index " + std::to_string(ids[i]) +
                                  " outside table " + ShapeStr(table.value()));
    }
    out.row(i) = table.value().row(ids[i]);
  }
  std::vector<int> idx(ids.begin(), ids.end());
  return Record("embedding_lookup", std::move(out), {table}, [idx = std::move(idx)](Node& n) {
    Node& t = P(n, 0);
    if (t.grad.size() == 0) t.grad = Matrix::Zero(t.value.rows(), t.value.cols());
    for (size_t i = 0; i < idx.size(); ++i) t.grad.row(idx[i]) += n.grad.row(i);
  });
}

Tensor Slice(const Tensor& x, int axis, Eigen::Index begin, Eigen::Index length) {
  if (axis != 0 && axis != 1) throw std::invalid_argument("slice: axis must be 0 or 1");
  Eigen::Index extent = axis == 0 ? x.rows() : x.cols();
  if (begin < 0 || length < 0 || begin + length > extent) {
    ShapeError("slice", {&x.value()},
               "begin " + std::to_string(begin) + " length " + std::to_string(length));
  }
  Matrix out = axis == 0 ? Matrix(x.value().middleRows(begin, length))
                         : Matrix(x.value().middleCols(begin, length));
  return Record("slice", std::move(out), {x}, [axis, begin, length](Node& n) {
    Node& in = P(n, 0);
    Matrix g = Matrix::Zero(in.value.rows(), in.value.cols());
    if (axis == 0) g.middleRows(begin, length) = n.grad;
    else g.middleCols(begin, length) = n.grad;
    Accumulate(in, g);
  });
}

Tensor Sum(const Tensor& x) {
  return Record("sum", Matrix::Constant(1, 1, x.value().sum()), {x}, [](Node& n) {
    Node& in = P(n, 0);
    Accumulate(in, Matrix::Constant(in.value.rows(), in.value.cols(), n.grad(0, 0)));
  });
}

Tensor Mean(const Tensor& x) {
  if (x.value().size() == 0) ShapeError("mean", {&x.value()}, "empty");
  double count = static_cast<double>(x.value().size());
  return Record("mean", Matrix::Constant(1, 1, x.value().mean()), {x}, [count](Node& n) {
    Node& in = P(n, 0);
    Accumulate(in, Matrix::Constant(in.value.rows(), in.value.cols(), n.grad(0, 0) / count));
  });
}

Tensor Transpose(const Tensor& x) {
  return Record("transpose", x.value().transpose(), {x},
                [](Node& n) { Accumulate(P(n, 0), n.grad.transpose()); });
}

const std::vector<std::string>& PrimitiveNames() {
  static const std::vector<std::string> names = {
      "matmul", "add",     "sub",  "mul_elementwise", "concat",           "tanh",
      "sigmoid", "relu",   "softmax", "log",          "row_maxpool",      "embedding_lookup",
      "slice",  "sum",     "mean", "scalar_mul",      "transpose"};
  return names;
}

Tensor ApplyPrimitive(std::string_view op, std::span<const Tensor> inputs,
                      const PrimitiveAttrs& attrs) {
  auto need = [&](size_t n) {
    if (inputs.size() != n) {
      throw std::invalid_argument(std::string(op) + ": expected " + std::to_string(n) +
                                  " inputs, got " + std::to_string(inputs.size()));
    }
  };
  if (op == "matmul") { need(2); return MatMul(inputs[0], inputs[1]); }
  if (op == "add") { need(2); return Add(inputs[0], inputs[1]); }
  if (op == "sub") { need(2); return Sub(inputs[0], inputs[1]); }
  if (op == "mul_elementwise") { need(2); return Mul(inputs[0], inputs[1]); }
  if (op == "concat") return Concat(inputs, attrs.axis);
  if (op == "tanh") { need(1); return Tanh(inputs[0]); }
  if (op == "sigmoid") { need(1); return Sigmoid(inputs[0]); }
  if (op == "relu") { need(1); return Relu(inputs[0]); }
  if (op == "softmax") { need(1); return Softmax(inputs[0], attrs.axis); }
  if (op == "log") { need(1); return Log(inputs[0]); }
  if (op == "row_maxpool") { need(1); return RowMaxPool(inputs[0]); }
  if (op == "embedding_lookup") { need(1); return EmbeddingLookup(inputs[0], attrs.indices); }
  if (op == "slice") { need(1); return Slice(inputs[0], attrs.axis, attrs.begin, attrs.length); }
  if (op == "sum") { need(1); return Sum(inputs[0]); }
  if (op == "mean") { need(1); return Mean(inputs[0]); }
  if (op == "scalar_mul") { need(1); return ScalarMul(inputs[0], attrs.scalar); }
  if (op == "transpose") { need(1); return Transpose(inputs[0]); }
  throw std::invalid_argument("unknown primitive: " + std::string(op));
}

std::vector<Tensor> Backward(const Tensor& loss) {
  if (loss.rows() != 1 || loss.cols() != 1) {
    throw std::invalid_argument("backward: loss must be 1x1, got " + ShapeStr(loss.value()));
  }
  std::vector<Tensor> leaves;
  if (!loss.requires_grad()) return leaves;

  // Iterative post-order DFS; reversed, it is a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, size_t>> stack{{loss.node(), 0}};
  visited.insert(loss.node());
  if (!loss.node()->backward) leaves.push_back(loss);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      const auto& p = node->parents[next++];
      if (p->requires_grad && visited.insert(p.get()).second) {
        if (!p->backward) leaves.emplace_back(p);
        stack.emplace_back(p.get(), 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  // Interior gradients are scratch; leaves keep accumulating.
  for (Node* n : order) {
    if (n->backward) n->grad.resize(0, 0);
  }
  Accumulate(*loss.node(), Matrix::Ones(1, 1));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward) {
      if (n->grad.size() != 0) n->backward(*n);
      n->grad.resize(0, 0);
    }
  }
  return leaves;
}

double GradCheck(const std::function<Tensor()>& f, std::span<Tensor> params, double eps) {
  constexpr int kMaxRetries = 4;
  for (auto& p : params) p.ZeroGrad();
  Backward(f());
  std::vector<Matrix> analytic;
  for (auto& p : params) analytic.push_back(p.grad());

  NoGradGuard no_grad;
  struct Tracking {
    Tracking() { track_branches = true; }
    ~Tracking() { track_branches = false; }
  } tracking;
  branch_hash = 0;
  f();
  const uint64_t base = branch_hash;

  double worst = 0.0;
  for (size_t k = 0; k < params.size(); ++k) {
    Matrix& v = params[k].mutable_value();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double saved = v.data()[i];
      bool kink = false;
      auto at = [&](double d) {
        v.data()[i] = saved + d;
        branch_hash = 0;
        double y = f().item();
        kink |= branch_hash != base;
        return y;
      };
      double numeric = 0.0;
      double h = eps;
      for (int retry = 0; retry <= kMaxRetries; ++retry, h *= 0.1) {
        kink = false;
        numeric = (at(-2 * h) - 8 * at(-h) + 8 * at(h) - at(2 * h)) / (12 * h);
        if (!kink) break;
      }
      v.data()[i] = saved;
      double a = analytic[k].data()[i];
      double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
  }
  return worst;
}

double GradCheck(const std::function<Tensor(const Tensor&)>& f, Tensor x, double eps) {
  std::vector<Tensor> params{x};
  return GradCheck([&] { return f(x); }, params, eps);
}

}  // namespace g2t::ad
