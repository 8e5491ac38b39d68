#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace parkcast {

namespace detail {
struct TensorNode;
}

/// Dense row-major tensor of doubles participating in a dynamically built
/// reverse-mode graph. A Tensor is a cheap handle; copies share storage.
/// Graphs are freed when the last handle to a node goes away.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::vector<std::int64_t> shape, bool requires_grad = false);
  static Tensor constant(std::vector<std::int64_t> shape, double value,
                         bool requires_grad = false);
  static Tensor from_values(std::vector<std::int64_t> shape,
                            std::vector<double> values,
                            bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const std::vector<std::int64_t>& shape() const;
  std::int64_t size() const;
  std::int64_t rows() const;  // 2-d convenience
  std::int64_t cols() const;

  std::vector<double>& values();
  const std::vector<double>& values() const;

  /// Gradient of the same shape; zeros until backward() reaches this node.
  const std::vector<double>& grad() const;
  std::vector<double>& grad();
  bool requires_grad() const;

  double item() const;  // single-element tensors

  void zero_grad();

  /// Reverse-mode accumulation from this scalar through the recorded graph.
  void backward() const;

 private:
  explicit Tensor(std::shared_ptr<detail::TensorNode> n) : node_(std::move(n)) {}
  std::shared_ptr<detail::TensorNode> node_;

  friend struct TensorOps;
};

/// While a guard is alive, newly built ops record no backward functions.
/// Used for inference and finite-difference probes.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// Graph-recording operations.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);  // elementwise
Tensor scale(const Tensor& a, double s);
Tensor add_row_bias(const Tensor& a, const Tensor& bias);  // [n,m] + [m]
Tensor relu(const Tensor& a);
Tensor softmax_rows(const Tensor& a);  // max-subtracted, numerically stable
Tensor layer_norm_rows(const Tensor& x, const Tensor& gain, const Tensor& shift,
                       double epsilon = 1e-5);
Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor mean_rows(const Tensor& a);  // [n,m] -> [1,m]
Tensor dropout(const Tensor& a, double p, std::uint64_t mask_seed);
Tensor sum(const Tensor& a);                     // scalar
Tensor mse_loss(const Tensor& pred, const Tensor& target);  // scalar

/// Multiply-accumulate instrumentation. Counts n*m*k per matmul while
/// enabled; single-threaded use only.
void set_mac_counting(bool enabled);
void reset_mac_count();
std::uint64_t mac_count();

}  // namespace parkcast
