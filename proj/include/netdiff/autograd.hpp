#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace netdiff::ad {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

// Reverse-mode tape over dense matrices. Nodes are created in topological
// order, so the backward sweep is a single reverse pass. Instantiated with
// float for the model and double for finite-difference oracles.
template <typename S>
class Tape {
 public:
  using Id = int;

  Id constant(Mat<S> value) { return push(std::move(value), false); }

  Id leaf(Mat<S> value) { return push(std::move(value), true); }

  const Mat<S>& value(Id id) const { return nodes_[id].value; }

  const Mat<S>& grad(Id id) const { return nodes_[id].grad; }

  // Value-only mode: backward closures are not recorded. Used for sampling.
  void set_grad_enabled(bool enabled) { grad_enabled_ = enabled; }

  size_t size() const { return nodes_.size(); }

  void backward(Id root) {
    if (!grad_enabled_) throw std::logic_error("Tape: backward called with grads disabled");
    if (value(root).size() != 1) throw std::logic_error("Tape: backward root must be scalar");
    grad_ref(root).setOnes();
    for (Id id = static_cast<Id>(nodes_.size()) - 1; id >= 0; --id) {
      if (nodes_[id].backward && nodes_[id].grad.size() > 0) nodes_[id].backward(*this);
    }
  }

  // ---- arithmetic ----

  Id add(Id a, Id b) {
    check_same_shape(a, b, "add");
    Id out = push(value(a) + value(b), needs(a) || needs(b));
    record(out, [a, b, out](Tape& t) {
      if (t.needs(a)) t.grad_ref(a) += t.grad(out);
      if (t.needs(b)) t.grad_ref(b) += t.grad(out);
    });
    return out;
  }

  Id sub(Id a, Id b) {
    check_same_shape(a, b, "sub");
    Id out = push(value(a) - value(b), needs(a) || needs(b));
    record(out, [a, b, out](Tape& t) {
      if (t.needs(a)) t.grad_ref(a) += t.grad(out);
      if (t.needs(b)) t.grad_ref(b) -= t.grad(out);
    });
    return out;
  }

  Id mul(Id a, Id b) {
    check_same_shape(a, b, "mul");
    Id out = push(value(a).cwiseProduct(value(b)), needs(a) || needs(b));
    record(out, [a, b, out](Tape& t) {
      if (t.needs(a)) t.grad_ref(a) += t.grad(out).cwiseProduct(t.value(b));
      if (t.needs(b)) t.grad_ref(b) += t.grad(out).cwiseProduct(t.value(a));
    });
    return out;
  }

  Id matmul(Id a, Id b) {
    if (value(a).cols() != value(b).rows()) throw std::logic_error("matmul: shape mismatch");
    Id out = push(value(a) * value(b), needs(a) || needs(b));
    record(out, [a, b, out](Tape& t) {
      if (t.needs(a)) t.grad_ref(a) += t.grad(out) * t.value(b).transpose();
      if (t.needs(b)) t.grad_ref(b) += t.value(a).transpose() * t.grad(out);
    });
    return out;
  }

  Id transpose(Id a) {
    Id out = push(value(a).transpose(), needs(a));
    record(out, [a, out](Tape& t) { t.grad_ref(a) += t.grad(out).transpose(); });
    return out;
  }

  Id scale(Id a, S factor) {
    Id out = push(value(a) * factor, needs(a));
    record(out, [a, out, factor](Tape& t) { t.grad_ref(a) += t.grad(out) * factor; });
    return out;
  }

  Id add_scalar(Id a, S shift) {
    Id out = push((value(a).array() + shift).matrix(), needs(a));
    record(out, [a, out](Tape& t) { t.grad_ref(a) += t.grad(out); });
    return out;
  }

  // ---- shape ----

  Id hstack(const std::vector<Id>& parts) {
    if (parts.empty()) throw std::logic_error("hstack: empty");
    const Eigen::Index rows = value(parts[0]).rows();
    Eigen::Index cols = 0;
    bool any_needs = false;
    for (Id p : parts) {
      if (value(p).rows() != rows) throw std::logic_error("hstack: row mismatch");
      cols += value(p).cols();
      any_needs = any_needs || needs(p);
    }
    Mat<S> stacked(rows, cols);
    Eigen::Index offset = 0;
    for (Id p : parts) {
      stacked.middleCols(offset, value(p).cols()) = value(p);
      offset += value(p).cols();
    }
    Id out = push(std::move(stacked), any_needs);
    record(out, [parts, out](Tape& t) {
      Eigen::Index off = 0;
      for (Id p : parts) {
        const Eigen::Index w = t.value(p).cols();
        if (t.needs(p)) t.grad_ref(p) += t.grad(out).middleCols(off, w);
        off += w;
      }
    });
    return out;
  }

  Id cols(Id a, Eigen::Index first, Eigen::Index width) {
    Id out = push(value(a).middleCols(first, width), needs(a));
    record(out, [a, out, first, width](Tape& t) {
      t.grad_ref(a).middleCols(first, width) += t.grad(out);
    });
    return out;
  }

  // n^2-vector (pair index p = i*n + j) to n x n matrix.
  Id vec_to_square(Id a, int n) {
    if (value(a).rows() != Eigen::Index(n) * n || value(a).cols() != 1) {
      throw std::logic_error("vec_to_square: expected n^2 x 1 input");
    }
    Mat<S> square(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) square(i, j) = value(a)(static_cast<Eigen::Index>(i) * n + j, 0);
    Id out = push(std::move(square), needs(a));
    record(out, [a, out, n](Tape& t) {
      auto& ga = t.grad_ref(a);
      const auto& go = t.grad(out);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ga(static_cast<Eigen::Index>(i) * n + j, 0) += go(i, j);
    });
    return out;
  }

  Id square_to_vec(Id a) {
    const int n = static_cast<int>(value(a).rows());
    if (value(a).cols() != n) throw std::logic_error("square_to_vec: expected square input");
    Mat<S> flat(static_cast<Eigen::Index>(n) * n, 1);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) flat(static_cast<Eigen::Index>(i) * n + j, 0) = value(a)(i, j);
    Id out = push(std::move(flat), needs(a));
    record(out, [a, out, n](Tape& t) {
      auto& ga = t.grad_ref(a);
      const auto& go = t.grad(out);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ga(i, j) += go(static_cast<Eigen::Index>(i) * n + j, 0);
    });
    return out;
  }

  Id gather_rows(Id a, std::vector<int> rows) {
    Mat<S> picked(static_cast<Eigen::Index>(rows.size()), value(a).cols());
    for (size_t r = 0; r < rows.size(); ++r) picked.row(r) = value(a).row(rows[r]);
    Id out = push(std::move(picked), needs(a));
    record(out, [a, out, rows = std::move(rows)](Tape& t) {
      auto& ga = t.grad_ref(a);
      const auto& go = t.grad(out);
      for (size_t r = 0; r < rows.size(); ++r) ga.row(rows[r]) += go.row(r);
    });
    return out;
  }

  // m x 1 vector of upper-triangle pair values to a symmetric n x n matrix
  // with zero diagonal.
  Id scatter_pairs(Id u, int n, std::vector<std::pair<int, int>> pairs) {
    if (value(u).rows() != static_cast<Eigen::Index>(pairs.size()) || value(u).cols() != 1) {
      throw std::logic_error("scatter_pairs: expected one value per pair");
    }
    Mat<S> out_mat = Mat<S>::Zero(n, n);
    for (size_t p = 0; p < pairs.size(); ++p) {
      out_mat(pairs[p].first, pairs[p].second) = value(u)(p, 0);
      out_mat(pairs[p].second, pairs[p].first) = value(u)(p, 0);
    }
    Id out = push(std::move(out_mat), needs(u));
    record(out, [u, out, pairs = std::move(pairs)](Tape& t) {
      auto& gu = t.grad_ref(u);
      const auto& go = t.grad(out);
      for (size_t p = 0; p < pairs.size(); ++p) {
        gu(p, 0) += go(pairs[p].first, pairs[p].second) + go(pairs[p].second, pairs[p].first);
      }
    });
    return out;
  }

  Id gather_elems(Id a, std::vector<std::pair<int, int>> coords) {
    Mat<S> picked(static_cast<Eigen::Index>(coords.size()), 1);
    for (size_t p = 0; p < coords.size(); ++p) {
      picked(p, 0) = value(a)(coords[p].first, coords[p].second);
    }
    Id out = push(std::move(picked), needs(a));
    record(out, [a, out, coords = std::move(coords)](Tape& t) {
      auto& ga = t.grad_ref(a);
      const auto& go = t.grad(out);
      for (size_t p = 0; p < coords.size(); ++p) ga(coords[p].first, coords[p].second) += go(p, 0);
    });
    return out;
  }

  // ---- nonlinearities ----

  Id sigmoid(Id a) {
    Mat<S> y = value(a).unaryExpr([](S x) { return S(1) / (S(1) + std::exp(-x)); });
    Id out = push(std::move(y), needs(a));
    record(out, [a, out](Tape& t) {
      const auto& y_out = t.value(out);
      t.grad_ref(a) +=
          t.grad(out).cwiseProduct(y_out.cwiseProduct((S(1) - y_out.array()).matrix()));
    });
    return out;
  }

  Id relu(Id a) {
    Id out = push(value(a).cwiseMax(S(0)), needs(a));
    record(out, [a, out](Tape& t) {
      Mat<S> mask = (t.value(a).array() > S(0)).template cast<S>();
      t.grad_ref(a) += t.grad(out).cwiseProduct(mask);
    });
    return out;
  }

  Id gelu(Id a) {
    const S inv_sqrt2 = S(0.7071067811865475244);
    Mat<S> y = value(a).unaryExpr(
        [inv_sqrt2](S x) { return S(0.5) * x * (S(1) + std::erf(x * inv_sqrt2)); });
    Id out = push(std::move(y), needs(a));
    record(out, [a, out, inv_sqrt2](Tape& t) {
      Mat<S> d = t.value(a).unaryExpr([inv_sqrt2](S x) {
        const S cdf = S(0.5) * (S(1) + std::erf(x * inv_sqrt2));
        const S pdf = S(0.3989422804014326779) * std::exp(S(-0.5) * x * x);
        return cdf + x * pdf;
      });
      t.grad_ref(a) += t.grad(out).cwiseProduct(d);
    });
    return out;
  }

  Id abs(Id a) {
    Id out = push(value(a).cwiseAbs(), needs(a));
    record(out, [a, out](Tape& t) {
      Mat<S> sign = t.value(a).unaryExpr([](S x) { return x >= S(0) ? S(1) : S(-1); });
      t.grad_ref(a) += t.grad(out).cwiseProduct(sign);
    });
    return out;
  }

  Id log(Id a) {
    Id out = push(value(a).array().log().matrix(), needs(a));
    record(out, [a, out](Tape& t) {
      t.grad_ref(a) += t.grad(out).cwiseQuotient(t.value(a));
    });
    return out;
  }

  Id reciprocal(Id a) {
    Id out = push(value(a).cwiseInverse(), needs(a));
    record(out, [a, out](Tape& t) {
      const auto& y = t.value(out);
      t.grad_ref(a) -= t.grad(out).cwiseProduct(y.cwiseProduct(y));
    });
    return out;
  }

  // Clamp with zero gradient outside the open interval.
  Id clamp(Id a, S lo, S hi) {
    Id out = push(value(a).cwiseMax(lo).cwiseMin(hi), needs(a));
    record(out, [a, out, lo, hi](Tape& t) {
      Mat<S> mask = t.value(a).unaryExpr([lo, hi](S x) { return (x > lo && x < hi) ? S(1) : S(0); });
      t.grad_ref(a) += t.grad(out).cwiseProduct(mask);
    });
    return out;
  }

  // ---- row-wise ----

  Id softmax_rows(Id a) {
    Mat<S> y = value(a);
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
      auto row = y.row(r);
      row = (row.array() - row.maxCoeff()).exp();
      row /= row.sum();
    }
    Id out = push(std::move(y), needs(a));
    record(out, [a, out](Tape& t) {
      const auto& p = t.value(out);
      const auto& go = t.grad(out);
      Mat<S> gp = go.cwiseProduct(p);
      Eigen::Matrix<S, Eigen::Dynamic, 1> row_dot = gp.rowwise().sum();
      t.grad_ref(a) += gp - p.cwiseProduct(row_dot.replicate(1, p.cols()));
    });
    return out;
  }

  // Plain per-row layer normalization (affine handled by callers).
  Id layernorm_rows(Id a, S eps = S(1e-5)) {
    const auto& x = value(a);
    const Eigen::Index d = x.cols();
    Mat<S> y(x.rows(), d);
    Mat<S> inv_std(x.rows(), 1);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      const S mean = x.row(r).mean();
      const S var = (x.row(r).array() - mean).square().sum() / S(d);
      const S istd = S(1) / std::sqrt(var + eps);
      inv_std(r, 0) = istd;
      y.row(r) = ((x.row(r).array() - mean) * istd).matrix();
    }
    Id out = push(std::move(y), needs(a));
    Id istd_const = push(std::move(inv_std), false);
    record(out, [a, out, istd_const, d](Tape& t) {
      const auto& y_out = t.value(out);
      const auto& go = t.grad(out);
      const auto& istd = t.value(istd_const);
      auto& ga = t.grad_ref(a);
      for (Eigen::Index r = 0; r < y_out.rows(); ++r) {
        const S gmean = go.row(r).mean();
        const S gydot = go.row(r).cwiseProduct(y_out.row(r)).sum() / S(d);
        ga.row(r) +=
            ((go.row(r).array() - gmean - y_out.row(r).array() * gydot) * istd(r, 0)).matrix();
      }
    });
    return out;
  }

  // Broadcast a 1 x d row vector across the rows of A.
  Id row_broadcast_mul(Id a, Id r) {
    check_rowvec(a, r, "row_broadcast_mul");
    Id out = push((value(a).array().rowwise() * value(r).row(0).array()).matrix(),
                  needs(a) || needs(r));
    record(out, [a, r, out](Tape& t) {
      if (t.needs(a)) {
        t.grad_ref(a) +=
            (t.grad(out).array().rowwise() * t.value(r).row(0).array()).matrix();
      }
      if (t.needs(r)) {
        t.grad_ref(r).row(0) += t.grad(out).cwiseProduct(t.value(a)).colwise().sum();
      }
    });
    return out;
  }

  Id row_broadcast_add(Id a, Id r) {
    check_rowvec(a, r, "row_broadcast_add");
    Id out = push((value(a).array().rowwise() + value(r).row(0).array()).matrix(),
                  needs(a) || needs(r));
    record(out, [a, r, out](Tape& t) {
      if (t.needs(a)) t.grad_ref(a) += t.grad(out);
      if (t.needs(r)) t.grad_ref(r).row(0) += t.grad(out).colwise().sum();
    });
    return out;
  }

  // ---- reductions ----

  Id sum(Id a) {
    Mat<S> total(1, 1);
    total(0, 0) = value(a).sum();
    Id out = push(std::move(total), needs(a));
    record(out, [a, out](Tape& t) {
      t.grad_ref(a).array() += t.grad(out)(0, 0);
    });
    return out;
  }

  Id mean_all(Id a) { return scale(sum(a), S(1) / S(value(a).size())); }

  Id row_sums(Id a) {
    Id out = push(value(a).rowwise().sum(), needs(a));
    record(out, [a, out](Tape& t) {
      t.grad_ref(a) += t.grad(out).col(0).replicate(1, t.value(a).cols());
    });
    return out;
  }

  Id sym_avg(Id a) {
    if (value(a).rows() != value(a).cols()) throw std::logic_error("sym_avg: square input only");
    Id out = push(((value(a) + value(a).transpose()) * S(0.5)).eval(), needs(a));
    record(out, [a, out](Tape& t) {
      t.grad_ref(a) += (t.grad(out) + t.grad(out).transpose()) * S(0.5);
    });
    return out;
  }

  bool needs(Id id) const { return nodes_[id].needs_grad; }

  Mat<S>& grad_ref(Id id) {
    auto& node = nodes_[id];
    if (node.grad.size() == 0) node.grad = Mat<S>::Zero(node.value.rows(), node.value.cols());
    return node.grad;
  }

 private:
  struct Node {
    Mat<S> value;
    Mat<S> grad;
    std::function<void(Tape&)> backward;
    bool needs_grad = false;
  };

  Id push(Mat<S> value, bool needs_grad) {
    nodes_.push_back(Node{std::move(value), {}, nullptr, needs_grad});
    return static_cast<Id>(nodes_.size()) - 1;
  }

  template <typename F>
  void record(Id out, F&& fn) {
    if (grad_enabled_ && nodes_[out].needs_grad) {
      nodes_[out].backward = std::forward<F>(fn);
      // Gradient storage for every node that participates in backprop.
      grad_ref(out);
    }
  }

  void check_same_shape(Id a, Id b, const char* op) const {
    if (value(a).rows() != value(b).rows() || value(a).cols() != value(b).cols()) {
      throw std::logic_error(std::string(op) + ": shape mismatch");
    }
  }

  void check_rowvec(Id a, Id r, const char* op) const {
    if (value(r).rows() != 1 || value(r).cols() != value(a).cols()) {
      throw std::logic_error(std::string(op) + ": expected 1 x cols(A) row vector");
    }
  }

  std::vector<Node> nodes_;
  bool grad_enabled_ = true;
};

}  // namespace netdiff::ad
