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

// Reverse-mode differentiation over dense double matrices.
//
// A Tensor is a handle to a node in a differentiation graph. Every value is a
// rank-2 Eigen matrix; vectors are 1 x n rows. Leaves created with
// Tensor::Parameter accumulate gradients across Backward calls until
// ZeroGrad. A graph is confined to the thread that built it.

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace g2t::ad {

using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

struct Node {
  Matrix value;
  Matrix grad;  // empty until a gradient arrives
  bool requires_grad = false;
  std::string_view op = "leaf";
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;  // pushes grad into parents
};

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  static Tensor Constant(Matrix value);
  static Tensor Parameter(Matrix value);
  static Tensor Scalar(double value) { return Constant(Matrix::Constant(1, 1, value)); }

  bool defined() const { return node_ != nullptr; }
  const Matrix& value() const { return node_->value; }
  Matrix& mutable_value() { return node_->value; }
  // Zero-filled when no gradient has been accumulated.
  Matrix grad() const;
  bool has_grad() const { return node_->grad.size() != 0; }
  bool requires_grad() const { return node_->requires_grad; }
  std::string_view op() const { return node_->op; }

  Eigen::Index rows() const { return node_->value.rows(); }
  Eigen::Index cols() const { return node_->value.cols(); }
  std::vector<Eigen::Index> shape() const { return {rows(), cols()}; }
  double item() const;

  void ZeroGrad() { node_->grad.resize(0, 0); }

  Node* node() const { return node_.get(); }
  const std::shared_ptr<Node>& shared() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

// Disables graph recording on this thread for the guard's lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};
bool GradEnabled();

// Primitives. Shape mismatches throw std::invalid_argument naming the op.
Tensor MatMul(const Tensor& a, const Tensor& b);
Tensor Add(const Tensor& a, const Tensor& b);
Tensor Sub(const Tensor& a, const Tensor& b);
Tensor Mul(const Tensor& a, const Tensor& b);
Tensor ScalarMul(const Tensor& x, double c);
Tensor Concat(std::span<const Tensor> parts, int axis);
Tensor Concat(std::initializer_list<Tensor> parts, int axis);
Tensor Tanh(const Tensor& x);
Tensor Sigmoid(const Tensor& x);
Tensor Relu(const Tensor& x);
Tensor Softmax(const Tensor& x, int axis);
Tensor Log(const Tensor& x);
// Column-wise maximum over rows: (n x d) -> (1 x d).
Tensor RowMaxPool(const Tensor& x);
// Rows of `table` selected by `ids`: (|ids| x d).
Tensor EmbeddingLookup(const Tensor& table, std::span<const int> ids);
Tensor Slice(const Tensor& x, int axis, Eigen::Index begin, Eigen::Index length);
Tensor Sum(const Tensor& x);
Tensor Mean(const Tensor& x);
Tensor Transpose(const Tensor& x);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return Add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return Sub(a, b); }

// Attributes for the by-name entry point.
struct PrimitiveAttrs {
  int axis = 0;
  Eigen::Index begin = 0;
  Eigen::Index length = 0;
  double scalar = 1.0;
  std::vector<int> indices;
};

Tensor ApplyPrimitive(std::string_view op, std::span<const Tensor> inputs,
                      const PrimitiveAttrs& attrs = {});
const std::vector<std::string>& PrimitiveNames();

// Back-propagates from a 1 x 1 loss. Returns the requires-grad leaves reached,
// whose gradients now include this loss's contribution.
std::vector<Tensor> Backward(const Tensor& loss);

// Max over all components of |analytic - numeric| / max(|analytic|,
// |numeric|, 1e-8). The numeric derivative is the fourth-order central
// difference with step eps; when a perturbation flips a relu sign or a
// max-pool winner, the step shrinks tenfold (up to four times).
// `f` must rebuild its graph on every call.
inline constexpr double kGradCheckStep = 5e-3;
double GradCheck(const std::function<Tensor()>& f, std::span<Tensor> params,
                 double eps = kGradCheckStep);
double GradCheck(const std::function<Tensor(const Tensor&)>& f, Tensor x,
                 double eps = kGradCheckStep);

}  // namespace g2t::ad
