#include "parkcast/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_set>

#include <Eigen/Core>

#include "parkcast/errors.hpp"
#include "parkcast/rng.hpp"

namespace parkcast {

namespace detail {

struct TensorNode {
  std::vector<std::int64_t> shape;
  std::vector<double> values;
  std::vector<double> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<TensorNode>> parents;
  std::function<void(TensorNode&)> backward_fn;  // accumulates into parents

  std::int64_t size() const {
    std::int64_t n = 1;
    for (auto d : shape) n *= d;
    return n;
  }
  void ensure_grad() {
    if (grad.empty()) grad.assign(values.size(), 0.0);
  }
};

namespace {

bool g_grad_enabled = true;
bool g_count_macs = false;
std::uint64_t g_mac_count = 0;

using EigenRowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<EigenRowMat>;
using ConstMatMap = Eigen::Map<const EigenRowMat>;

}  // namespace
}  // namespace detail

using detail::TensorNode;

namespace {

std::shared_ptr<TensorNode> make_node(std::vector<std::int64_t> shape,
                                      bool requires_grad) {
  auto n = std::make_shared<TensorNode>();
  n->shape = std::move(shape);
  n->requires_grad = requires_grad;
  return n;
}

void check_2d(const Tensor& t, const char* what) {
  if (t.shape().size() != 2)
    throw ConfigError(std::string(what) + ": expected a 2-d tensor");
}

}  // namespace

struct TensorOps {
  static std::shared_ptr<TensorNode>& node(Tensor& t) { return t.node_; }
  static const std::shared_ptr<TensorNode>& node(const Tensor& t) {
    if (!t.node_) throw ConfigError("use of an undefined tensor");
    return t.node_;
  }
  static Tensor wrap(std::shared_ptr<TensorNode> n) { return Tensor(std::move(n)); }

  // Builds a result node; record=false (or grad disabled) drops the tape.
  static Tensor result(std::vector<std::int64_t> shape,
                       std::vector<std::shared_ptr<TensorNode>> parents,
                       std::function<void(TensorNode&)> backward_fn) {
    bool needs_grad = false;
    for (const auto& p : parents) needs_grad = needs_grad || p->requires_grad;
    auto n = make_node(std::move(shape), needs_grad);
    if (needs_grad && detail::g_grad_enabled) {
      n->parents = std::move(parents);
      n->backward_fn = std::move(backward_fn);
    } else {
      n->requires_grad = false;
    }
    return wrap(std::move(n));
  }
};

Tensor Tensor::zeros(std::vector<std::int64_t> shape, bool requires_grad) {
  auto n = make_node(std::move(shape), requires_grad);
  n->values.assign(n->size(), 0.0);
  return Tensor(std::move(n));
}

Tensor Tensor::constant(std::vector<std::int64_t> shape, double value,
                        bool requires_grad) {
  auto n = make_node(std::move(shape), requires_grad);
  n->values.assign(n->size(), value);
  return Tensor(std::move(n));
}

Tensor Tensor::from_values(std::vector<std::int64_t> shape,
                           std::vector<double> values, bool requires_grad) {
  auto n = make_node(std::move(shape), requires_grad);
  if (static_cast<std::int64_t>(values.size()) != n->size())
    throw ConfigError("from_values: data length does not match shape");
  n->values = std::move(values);
  return Tensor(std::move(n));
}

const std::vector<std::int64_t>& Tensor::shape() const {
  return TensorOps::node(*this)->shape;
}
std::int64_t Tensor::size() const { return TensorOps::node(*this)->size(); }
std::int64_t Tensor::rows() const { return shape().at(0); }
std::int64_t Tensor::cols() const { return shape().at(1); }

std::vector<double>& Tensor::values() { return TensorOps::node(*this)->values; }
const std::vector<double>& Tensor::values() const {
  return TensorOps::node(*this)->values;
}

const std::vector<double>& Tensor::grad() const {
  auto& n = TensorOps::node(*this);
  const_cast<TensorNode*>(n.get())->ensure_grad();
  return n->grad;
}
std::vector<double>& Tensor::grad() {
  auto& n = TensorOps::node(*this);
  n->ensure_grad();
  return n->grad;
}

bool Tensor::requires_grad() const { return TensorOps::node(*this)->requires_grad; }

double Tensor::item() const {
  if (size() != 1) throw ConfigError("item(): tensor is not a scalar");
  return values()[0];
}

void Tensor::zero_grad() {
  auto& n = TensorOps::node(*this);
  std::fill(n->grad.begin(), n->grad.end(), 0.0);
}

void Tensor::backward() const {
  const auto& root = TensorOps::node(*this);
  if (root->size() != 1)
    throw ConfigError("backward() must start from a scalar");
  if (!root->requires_grad)
    throw ConfigError("backward() without a recorded graph");

  // Iterative post-order DFS for a topological order.
  std::vector<TensorNode*> order;
  std::unordered_set<TensorNode*> visited;
  std::vector<std::pair<TensorNode*, std::size_t>> stack;
  stack.push_back({root.get(), 0});
  visited.insert(root.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      TensorNode* parent = node->parents[next].get();
      ++next;
      if (parent->requires_grad && !visited.count(parent)) {
        visited.insert(parent);
        stack.push_back({parent, 0});
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (TensorNode* n : order) n->ensure_grad();
  root->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backward_fn) (*it)->backward_fn(**it);
  }
}

NoGradGuard::NoGradGuard() : previous_(detail::g_grad_enabled) {
  detail::g_grad_enabled = false;
}
NoGradGuard::~NoGradGuard() { detail::g_grad_enabled = previous_; }

void set_mac_counting(bool enabled) { detail::g_count_macs = enabled; }
void reset_mac_count() { detail::g_mac_count = 0; }
std::uint64_t mac_count() { return detail::g_mac_count; }

Tensor matmul(const Tensor& a, const Tensor& b) {
  check_2d(a, "matmul");
  check_2d(b, "matmul");
  const std::int64_t n = a.rows(), k = a.cols(), m = b.cols();
  if (b.rows() != k)
    throw ConfigError("matmul: inner dimensions disagree (" + std::to_string(k) +
                      " vs " + std::to_string(b.rows()) + ")");
  auto an = TensorOps::node(a);
  auto bn = TensorOps::node(b);
  Tensor out = TensorOps::result(
      {n, m}, {an, bn}, [an, bn, n, k, m](TensorNode& self) {
        detail::ConstMatMap dy(self.grad.data(), n, m);
        if (an->requires_grad) {
          an->ensure_grad();
          detail::MatMap da(an->grad.data(), n, k);
          detail::ConstMatMap bv(bn->values.data(), k, m);
          da.noalias() += dy * bv.transpose();
        }
        if (bn->requires_grad) {
          bn->ensure_grad();
          detail::MatMap db(bn->grad.data(), k, m);
          detail::ConstMatMap av(an->values.data(), n, k);
          db.noalias() += av.transpose() * dy;
        }
      });
  out.values().resize(n * m);
  detail::ConstMatMap av(an->values.data(), n, k);
  detail::ConstMatMap bv(bn->values.data(), k, m);
  detail::MatMap ov(out.values().data(), n, m);
  ov.noalias() = av * bv;
  if (detail::g_count_macs)
    detail::g_mac_count += static_cast<std::uint64_t>(n) * k * m;
  return out;
}

Tensor transpose(const Tensor& a) {
  check_2d(a, "transpose");
  const std::int64_t n = a.rows(), m = a.cols();
  auto an = TensorOps::node(a);
  Tensor out = TensorOps::result({m, n}, {an}, [an, n, m](TensorNode& self) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = 0; j < m; ++j)
        an->grad[i * m + j] += self.grad[j * n + i];
  });
  out.values().resize(n * m);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < m; ++j)
      out.values()[j * n + i] = an->values[i * m + j];
  return out;
}

namespace {

Tensor elementwise_binary(const Tensor& a, const Tensor& b, const char* what,
                          double (*fwd)(double, double),
                          void (*bwd)(double, double, double, double&, double&)) {
  if (a.shape() != b.shape())
    throw ConfigError(std::string(what) + ": shape mismatch");
  auto an = TensorOps::node(a);
  auto bn = TensorOps::node(b);
  Tensor out = TensorOps::result(
      a.shape(), {an, bn}, [an, bn, bwd](TensorNode& self) {
        const bool ga = an->requires_grad, gb = bn->requires_grad;
        if (ga) an->ensure_grad();
        if (gb) bn->ensure_grad();
        double dummy = 0.0;
        for (std::size_t i = 0; i < self.values.size(); ++i) {
          double& da = ga ? an->grad[i] : dummy;
          double& db = gb ? bn->grad[i] : dummy;
          bwd(an->values[i], bn->values[i], self.grad[i], da, db);
        }
      });
  auto& ov = out.values();
  ov.resize(a.size());
  for (std::size_t i = 0; i < ov.size(); ++i)
    ov[i] = fwd(an->values[i], bn->values[i]);
  return out;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return elementwise_binary(
      a, b, "add", [](double x, double y) { return x + y; },
      [](double, double, double g, double& da, double& db) {
        da += g;
        db += g;
      });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return elementwise_binary(
      a, b, "sub", [](double x, double y) { return x - y; },
      [](double, double, double g, double& da, double& db) {
        da += g;
        db -= g;
      });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return elementwise_binary(
      a, b, "mul", [](double x, double y) { return x * y; },
      [](double x, double y, double g, double& da, double& db) {
        da += g * y;
        db += g * x;
      });
}

Tensor scale(const Tensor& a, double s) {
  auto an = TensorOps::node(a);
  Tensor out = TensorOps::result(a.shape(), {an}, [an, s](TensorNode& self) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i)
      an->grad[i] += s * self.grad[i];
  });
  auto& ov = out.values();
  ov.resize(a.size());
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = s * an->values[i];
  return out;
}

Tensor add_row_bias(const Tensor& a, const Tensor& bias) {
  check_2d(a, "add_row_bias");
  if (bias.shape().size() != 1 || bias.shape()[0] != a.cols())
    throw ConfigError("add_row_bias: bias must be 1-d of length cols");
  const std::int64_t n = a.rows(), m = a.cols();
  auto an = TensorOps::node(a);
  auto bn = TensorOps::node(bias);
  Tensor out = TensorOps::result({n, m}, {an, bn}, [an, bn, n, m](TensorNode& self) {
    if (an->requires_grad) {
      an->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i)
        an->grad[i] += self.grad[i];
    }
    if (bn->requires_grad) {
      bn->ensure_grad();
      for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < m; ++j)
          bn->grad[j] += self.grad[i * m + j];
    }
  });
  auto& ov = out.values();
  ov.resize(n * m);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < m; ++j)
      ov[i * m + j] = an->values[i * m + j] + bn->values[j];
  return out;
}

Tensor relu(const Tensor& a) {
  auto an = TensorOps::node(a);
  Tensor out = TensorOps::result(a.shape(), {an}, [an](TensorNode& self) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i)
      if (an->values[i] > 0.0) an->grad[i] += self.grad[i];
  });
  auto& ov = out.values();
  ov.resize(a.size());
  for (std::size_t i = 0; i < ov.size(); ++i)
    ov[i] = an->values[i] > 0.0 ? an->values[i] : 0.0;
  return out;
}

Tensor softmax_rows(const Tensor& a) {
  check_2d(a, "softmax_rows");
  const std::int64_t n = a.rows(), m = a.cols();
  auto an = TensorOps::node(a);
  Tensor out = TensorOps::result({n, m}, {an}, [an, n, m](TensorNode& self) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    // dx = y * (dy - sum(dy * y)) per row.
    for (std::int64_t i = 0; i < n; ++i) {
      const double* y = self.values.data() + i * m;
      const double* dy = self.grad.data() + i * m;
      double dot = 0.0;
      for (std::int64_t j = 0; j < m; ++j) dot += dy[j] * y[j];
      double* dx = an->grad.data() + i * m;
      for (std::int64_t j = 0; j < m; ++j) dx[j] += y[j] * (dy[j] - dot);
    }
  });
  auto& ov = out.values();
  ov.resize(n * m);
  for (std::int64_t i = 0; i < n; ++i) {
    const double* x = an->values.data() + i * m;
    double* y = ov.data() + i * m;
    double mx = x[0];
    for (std::int64_t j = 1; j < m; ++j) mx = std::max(mx, x[j]);
    double total = 0.0;
    for (std::int64_t j = 0; j < m; ++j) {
      y[j] = std::exp(x[j] - mx);
      total += y[j];
    }
    for (std::int64_t j = 0; j < m; ++j) y[j] /= total;
  }
  return out;
}

Tensor layer_norm_rows(const Tensor& x, const Tensor& gain, const Tensor& shift,
                       double epsilon) {
  check_2d(x, "layer_norm_rows");
  if (epsilon <= 0.0) throw ConfigError("layer_norm_rows: epsilon must be > 0");
  const std::int64_t n = x.rows(), m = x.cols();
  if (gain.shape() != std::vector<std::int64_t>{m} ||
      shift.shape() != std::vector<std::int64_t>{m})
    throw ConfigError("layer_norm_rows: gain/shift must be 1-d of length cols");
  auto xn = TensorOps::node(x);
  auto gn = TensorOps::node(gain);
  auto sn = TensorOps::node(shift);

  // Cache normalized rows and 1/std for backward.
  auto xhat = std::make_shared<std::vector<double>>(n * m);
  auto inv_std = std::make_shared<std::vector<double>>(n);

  Tensor out = TensorOps::result(
      {n, m}, {xn, gn, sn}, [xn, gn, sn, xhat, inv_std, n, m](TensorNode& self) {
        const double md = static_cast<double>(m);
        for (std::int64_t i = 0; i < n; ++i) {
          const double* dy = self.grad.data() + i * m;
          const double* xh = xhat->data() + i * m;
          const double istd = (*inv_std)[i];
          if (gn->requires_grad) {
            gn->ensure_grad();
            for (std::int64_t j = 0; j < m; ++j)
              gn->grad[j] += dy[j] * xh[j];
          }
          if (sn->requires_grad) {
            sn->ensure_grad();
            for (std::int64_t j = 0; j < m; ++j) sn->grad[j] += dy[j];
          }
          if (xn->requires_grad) {
            xn->ensure_grad();
            // dxhat = dy * gain; dx = (dxhat - mean(dxhat) - xhat*mean(dxhat*xhat)) * istd
            double mean_dxhat = 0.0, mean_dxhat_xhat = 0.0;
            for (std::int64_t j = 0; j < m; ++j) {
              const double dxh = dy[j] * gn->values[j];
              mean_dxhat += dxh;
              mean_dxhat_xhat += dxh * xh[j];
            }
            mean_dxhat /= md;
            mean_dxhat_xhat /= md;
            double* dx = xn->grad.data() + i * m;
            for (std::int64_t j = 0; j < m; ++j) {
              const double dxh = dy[j] * gn->values[j];
              dx[j] += (dxh - mean_dxhat - xh[j] * mean_dxhat_xhat) * istd;
            }
          }
        }
      });

  auto& ov = out.values();
  ov.resize(n * m);
  for (std::int64_t i = 0; i < n; ++i) {
    const double* xv = xn->values.data() + i * m;
    double mean = 0.0;
    for (std::int64_t j = 0; j < m; ++j) mean += xv[j];
    mean /= static_cast<double>(m);
    double var = 0.0;
    for (std::int64_t j = 0; j < m; ++j) {
      const double d = xv[j] - mean;
      var += d * d;
    }
    var /= static_cast<double>(m);
    const double istd = 1.0 / std::sqrt(var + epsilon);
    (*inv_std)[i] = istd;
    for (std::int64_t j = 0; j < m; ++j) {
      const double xh = (xv[j] - mean) * istd;
      (*xhat)[i * m + j] = xh;
      ov[i * m + j] = xh * gn->values[j] + sn->values[j];
    }
  }
  return out;
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ConfigError("concat_cols: nothing to concatenate");
  const std::int64_t n = parts.front().rows();
  std::int64_t total = 0;
  std::vector<std::shared_ptr<TensorNode>> nodes;
  std::vector<std::int64_t> widths;
  for (const auto& p : parts) {
    check_2d(p, "concat_cols");
    if (p.rows() != n) throw ConfigError("concat_cols: row counts differ");
    nodes.push_back(TensorOps::node(p));
    widths.push_back(p.cols());
    total += p.cols();
  }
  Tensor out = TensorOps::result(
      {n, total}, nodes, [nodes, widths, n, total](TensorNode& self) {
        std::int64_t offset = 0;
        for (std::size_t k = 0; k < nodes.size(); ++k) {
          auto& p = nodes[k];
          if (p->requires_grad) {
            p->ensure_grad();
            for (std::int64_t i = 0; i < n; ++i)
              for (std::int64_t j = 0; j < widths[k]; ++j)
                p->grad[i * widths[k] + j] += self.grad[i * total + offset + j];
          }
          offset += widths[k];
        }
      });
  auto& ov = out.values();
  ov.resize(n * total);
  std::int64_t offset = 0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = 0; j < widths[k]; ++j)
        ov[i * total + offset + j] = nodes[k]->values[i * widths[k] + j];
    offset += widths[k];
  }
  return out;
}

Tensor mean_rows(const Tensor& a) {
  check_2d(a, "mean_rows");
  const std::int64_t n = a.rows(), m = a.cols();
  auto an = TensorOps::node(a);
  Tensor out = TensorOps::result({1, m}, {an}, [an, n, m](TensorNode& self) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    const double inv = 1.0 / static_cast<double>(n);
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = 0; j < m; ++j)
        an->grad[i * m + j] += self.grad[j] * inv;
  });
  auto& ov = out.values();
  ov.assign(m, 0.0);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < m; ++j) ov[j] += an->values[i * m + j];
  for (auto& v : ov) v /= static_cast<double>(n);
  return out;
}

Tensor dropout(const Tensor& a, double p, std::uint64_t mask_seed) {
  if (p <= 0.0) return a;
  if (p >= 1.0) throw ConfigError("dropout: rate must be below 1");
  auto an = TensorOps::node(a);
  auto mask = std::make_shared<std::vector<double>>(a.size());
  Rng rng(mask_seed);
  const double keep = 1.0 - p;
  for (auto& m : *mask) m = rng.uniform() < p ? 0.0 : 1.0 / keep;
  Tensor out = TensorOps::result(a.shape(), {an}, [an, mask](TensorNode& self) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i)
      an->grad[i] += self.grad[i] * (*mask)[i];
  });
  auto& ov = out.values();
  ov.resize(a.size());
  for (std::size_t i = 0; i < ov.size(); ++i)
    ov[i] = an->values[i] * (*mask)[i];
  return out;
}

Tensor sum(const Tensor& a) {
  auto an = TensorOps::node(a);
  Tensor out = TensorOps::result({1}, {an}, [an](TensorNode& self) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (auto& g : an->grad) g += self.grad[0];
  });
  double total = 0.0;
  for (double v : an->values) total += v;
  out.values().assign(1, total);
  return out;
}

Tensor mse_loss(const Tensor& pred, const Tensor& target) {
  if (pred.shape() != target.shape())
    throw ConfigError("mse_loss: shape mismatch");
  auto pn = TensorOps::node(pred);
  auto tn = TensorOps::node(target);
  const double inv_n = 1.0 / static_cast<double>(pred.size());
  Tensor out = TensorOps::result({1}, {pn, tn}, [pn, tn, inv_n](TensorNode& self) {
    const double g = self.grad[0];
    if (pn->requires_grad) {
      pn->ensure_grad();
      for (std::size_t i = 0; i < pn->values.size(); ++i)
        pn->grad[i] += g * 2.0 * inv_n * (pn->values[i] - tn->values[i]);
    }
    if (tn->requires_grad) {
      tn->ensure_grad();
      for (std::size_t i = 0; i < tn->values.size(); ++i)
        tn->grad[i] -= g * 2.0 * inv_n * (pn->values[i] - tn->values[i]);
    }
  });
  double total = 0.0;
  for (std::size_t i = 0; i < pn->values.size(); ++i) {
    const double d = pn->values[i] - tn->values[i];
    total += d * d;
  }
  out.values().assign(1, total * inv_n);
  return out;
}

}  // namespace parkcast
