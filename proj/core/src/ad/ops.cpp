#include "folio/ad/ops.hpp"

#include <algorithm>
#include <cmath>

#include "folio/error.hpp"

namespace folio::ad {
namespace {

enum class Broadcast { kSame, kRow, kScalar };

Broadcast broadcast_kind(const char* op, const Tensor& a, const Tensor& b) {
  if (a.rows() == b.rows() && a.cols() == b.cols()) return Broadcast::kSame;
  if (b.rows() == 1 && b.cols() == a.cols()) return Broadcast::kRow;
  if (b.size() == 1) return Broadcast::kScalar;
  fail(ErrorKind::kShape, std::string(op) + ": cannot combine " + std::to_string(a.rows()) + "x" +
                              std::to_string(a.cols()) + " with " + std::to_string(b.rows()) +
                              "x" + std::to_string(b.cols()));
}

inline std::size_t b_index(Broadcast kind, std::size_t k, std::size_t cols) {
  switch (kind) {
    case Broadcast::kSame: return k;
    case Broadcast::kRow: return k % cols;
    case Broadcast::kScalar: return 0;
  }
  return k;
}

template <typename Fwd, typename DA, typename DB>
Tensor binary(const char* op, const Tensor& a, const Tensor& b, Fwd fwd, DA da, DB db) {
  const Broadcast kind = broadcast_kind(op, a, b);
  const std::size_t n = a.size();
  const std::size_t cols = a.cols();
  std::vector<double> out(n);
  const auto av = a.data();
  const auto bv = b.data();
  for (std::size_t k = 0; k < n; ++k) out[k] = fwd(av[k], bv[b_index(kind, k, cols)]);
  return make_op(op, a.rows(), a.cols(), std::move(out), {a.node(), b.node()},
                 [kind, n, cols, da, db](Node& self) {
                   Node& pa = *self.parents[0];
                   Node& pb = *self.parents[1];
                   for (std::size_t k = 0; k < n; ++k) {
                     const std::size_t j = b_index(kind, k, cols);
                     const double g = self.grad[k];
                     if (pa.requires_grad) pa.grad[k] += g * da(pa.value[k], pb.value[j], self.value[k]);
                     if (pb.requires_grad) pb.grad[j] += g * db(pa.value[k], pb.value[j], self.value[k]);
                   }
                 });
}

template <typename Fwd, typename Deriv>
Tensor unary(const char* op, const Tensor& a, Fwd fwd, Deriv deriv) {
  const std::size_t n = a.size();
  std::vector<double> out(n);
  const auto av = a.data();
  for (std::size_t k = 0; k < n; ++k) out[k] = fwd(av[k]);
  return make_op(op, a.rows(), a.cols(), std::move(out), {a.node()}, [n, deriv](Node& self) {
    Node& pa = *self.parents[0];
    for (std::size_t k = 0; k < n; ++k) pa.grad[k] += self.grad[k] * deriv(pa.value[k], self.value[k]);
  });
}

// out (m x n) += a (m x k) * b (k x n), all row-major.
void gemm_nn(const double* a, const double* b, double* out, std::size_t m, std::size_t k,
             std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* row = out + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double s = a[i * k + p];
      if (s == 0.0) continue;
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += s * brow[j];
    }
  }
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return binary(
      "add", a, b, [](double x, double y) { return x + y; },
      [](double, double, double) { return 1.0; }, [](double, double, double) { return 1.0; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary(
      "sub", a, b, [](double x, double y) { return x - y; },
      [](double, double, double) { return 1.0; }, [](double, double, double) { return -1.0; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary(
      "mul", a, b, [](double x, double y) { return x * y; },
      [](double, double y, double) { return y; }, [](double x, double, double) { return x; });
}

Tensor minimum(const Tensor& a, const Tensor& b) {
  // Ties route the gradient to a.
  return binary(
      "minimum", a, b, [](double x, double y) { return x <= y ? x : y; },
      [](double x, double y, double) { return x <= y ? 1.0 : 0.0; },
      [](double x, double y, double) { return x <= y ? 0.0 : 1.0; });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require(a.cols() == b.rows(), ErrorKind::kShape,
          "matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " times " +
              std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  std::vector<double> out(m * n, 0.0);
  gemm_nn(a.data().data(), b.data().data(), out.data(), m, k, n);
  return make_op("matmul", m, n, std::move(out), {a.node(), b.node()}, [m, k, n](Node& self) {
    Node& pa = *self.parents[0];
    Node& pb = *self.parents[1];
    const double* g = self.grad.data();
    if (pa.requires_grad) {
      // dA = G * B^T
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          double acc = 0.0;
          const double* brow = pb.value.data() + p * n;
          const double* grow = g + i * n;
          for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
          pa.grad[i * k + p] += acc;
        }
      }
    }
    if (pb.requires_grad) {
      // dB = A^T * G
      for (std::size_t i = 0; i < m; ++i) {
        const double* grow = g + i * n;
        for (std::size_t p = 0; p < k; ++p) {
          const double s = pa.value[i * k + p];
          if (s == 0.0) continue;
          double* brow = pb.grad.data() + p * n;
          for (std::size_t j = 0; j < n; ++j) brow[j] += s * grow[j];
        }
      }
    }
  });
}

Tensor transpose(const Tensor& a) {
  const std::size_t r = a.rows(), c = a.cols();
  std::vector<double> out(r * c);
  const auto av = a.data();
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = av[i * c + j];
  }
  return make_op("transpose", c, r, std::move(out), {a.node()}, [r, c](Node& self) {
    Node& pa = *self.parents[0];
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < c; ++j) pa.grad[i * c + j] += self.grad[j * r + i];
    }
  });
}

Tensor scale(const Tensor& a, double s) {
  return unary(
      "scale", a, [s](double x) { return s * x; }, [s](double, double) { return s; });
}

Tensor add_scalar(const Tensor& a, double s) {
  return unary(
      "add_scalar", a, [s](double x) { return x + s; }, [](double, double) { return 1.0; });
}

Tensor neg(const Tensor& a) { return scale(a, -1.0); }

Tensor exp(const Tensor& a) {
  return unary(
      "exp", a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& a) {
  return unary(
      "log", a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor tanh(const Tensor& a) {
  return unary(
      "tanh", a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor sigmoid(const Tensor& a) {
  return unary(
      "sigmoid", a,
      [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor softplus(const Tensor& a) {
  return unary(
      "softplus", a, [](double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); },
      [](double x, double) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      });
}

Tensor square(const Tensor& a) {
  return unary(
      "square", a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Tensor clamp(const Tensor& a, double lo, double hi) {
  return unary(
      "clamp", a, [lo, hi](double x) { return std::clamp(x, lo, hi); },
      [lo, hi](double x, double) { return (x < lo || x > hi) ? 0.0 : 1.0; });
}

Tensor softmax_rows(const Tensor& a) {
  const std::size_t r = a.rows(), c = a.cols();
  std::vector<double> out(r * c);
  const auto av = a.data();
  for (std::size_t i = 0; i < r; ++i) {
    const double* x = av.data() + i * c;
    double top = x[0];
    for (std::size_t j = 1; j < c; ++j) top = std::max(top, x[j]);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      out[i * c + j] = std::exp(x[j] - top);
      z += out[i * c + j];
    }
    for (std::size_t j = 0; j < c; ++j) out[i * c + j] /= z;
  }
  return make_op("softmax_rows", r, c, std::move(out), {a.node()}, [r, c](Node& self) {
    Node& pa = *self.parents[0];
    for (std::size_t i = 0; i < r; ++i) {
      const double* y = self.value.data() + i * c;
      const double* g = self.grad.data() + i * c;
      double dot = 0.0;
      for (std::size_t j = 0; j < c; ++j) dot += g[j] * y[j];
      for (std::size_t j = 0; j < c; ++j) pa.grad[i * c + j] += y[j] * (g[j] - dot);
    }
  });
}

Tensor layer_norm_rows(const Tensor& a, double eps) {
  const std::size_t r = a.rows(), c = a.cols();
  std::vector<double> out(r * c);
  std::vector<double> inv_std(r);
  const auto av = a.data();
  for (std::size_t i = 0; i < r; ++i) {
    const double* x = av.data() + i * c;
    double mu = 0.0;
    for (std::size_t j = 0; j < c; ++j) mu += x[j];
    mu /= static_cast<double>(c);
    double var = 0.0;
    for (std::size_t j = 0; j < c; ++j) var += (x[j] - mu) * (x[j] - mu);
    var /= static_cast<double>(c);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < c; ++j) out[i * c + j] = (x[j] - mu) * inv_std[i];
  }
  return make_op("layer_norm_rows", r, c, std::move(out), {a.node()},
                 [r, c, inv_std = std::move(inv_std)](Node& self) {
                   Node& pa = *self.parents[0];
                   const double inv_c = 1.0 / static_cast<double>(c);
                   for (std::size_t i = 0; i < r; ++i) {
                     const double* y = self.value.data() + i * c;
                     const double* g = self.grad.data() + i * c;
                     double g_mean = 0.0, gy_mean = 0.0;
                     for (std::size_t j = 0; j < c; ++j) {
                       g_mean += g[j];
                       gy_mean += g[j] * y[j];
                     }
                     g_mean *= inv_c;
                     gy_mean *= inv_c;
                     for (std::size_t j = 0; j < c; ++j) {
                       pa.grad[i * c + j] += inv_std[i] * (g[j] - g_mean - y[j] * gy_mean);
                     }
                   }
                 });
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  require(!parts.empty(), ErrorKind::kShape, "concat_cols: no inputs");
  const std::size_t r = parts.front().rows();
  std::size_t c = 0;
  std::vector<NodePtr> parents;
  std::vector<std::size_t> widths;
  for (const auto& p : parts) {
    require(p.rows() == r, ErrorKind::kShape, "concat_cols: row counts differ");
    c += p.cols();
    widths.push_back(p.cols());
    parents.push_back(p.node());
  }
  std::vector<double> out(r * c);
  std::size_t offset = 0;
  for (const auto& p : parts) {
    const auto pv = p.data();
    for (std::size_t i = 0; i < r; ++i) {
      std::copy_n(pv.data() + i * p.cols(), p.cols(), out.data() + i * c + offset);
    }
    offset += p.cols();
  }
  return make_op("concat_cols", r, c, std::move(out), std::move(parents),
                 [r, c, widths = std::move(widths)](Node& self) {
                   std::size_t off = 0;
                   for (std::size_t k = 0; k < widths.size(); ++k) {
                     Node& p = *self.parents[k];
                     if (p.requires_grad) {
                       for (std::size_t i = 0; i < r; ++i) {
                         for (std::size_t j = 0; j < widths[k]; ++j) {
                           p.grad[i * widths[k] + j] += self.grad[i * c + off + j];
                         }
                       }
                     }
                     off += widths[k];
                   }
                 });
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
  require(!parts.empty(), ErrorKind::kShape, "concat_rows: no inputs");
  const std::size_t c = parts.front().cols();
  std::size_t r = 0;
  std::vector<NodePtr> parents;
  std::vector<std::size_t> sizes;
  std::vector<double> out;
  for (const auto& p : parts) {
    require(p.cols() == c, ErrorKind::kShape, "concat_rows: column counts differ");
    r += p.rows();
    sizes.push_back(p.size());
    parents.push_back(p.node());
    out.insert(out.end(), p.data().begin(), p.data().end());
  }
  return make_op("concat_rows", r, c, std::move(out), std::move(parents),
                 [sizes = std::move(sizes)](Node& self) {
                   std::size_t off = 0;
                   for (std::size_t k = 0; k < sizes.size(); ++k) {
                     Node& p = *self.parents[k];
                     if (p.requires_grad) {
                       for (std::size_t j = 0; j < sizes[k]; ++j) p.grad[j] += self.grad[off + j];
                     }
                     off += sizes[k];
                   }
                 });
}

Tensor slice_cols(const Tensor& a, std::size_t begin, std::size_t count) {
  require(begin + count <= a.cols(), ErrorKind::kShape, "slice_cols: range exceeds columns");
  const std::size_t r = a.rows(), c = a.cols();
  std::vector<double> out(r * count);
  const auto av = a.data();
  for (std::size_t i = 0; i < r; ++i) {
    std::copy_n(av.data() + i * c + begin, count, out.data() + i * count);
  }
  return make_op("slice_cols", r, count, std::move(out), {a.node()}, [r, c, begin, count](Node& self) {
    Node& pa = *self.parents[0];
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < count; ++j) pa.grad[i * c + begin + j] += self.grad[i * count + j];
    }
  });
}

Tensor slice_rows(const Tensor& a, std::size_t begin, std::size_t count) {
  require(begin + count <= a.rows(), ErrorKind::kShape, "slice_rows: range exceeds rows");
  const std::size_t c = a.cols();
  const auto av = a.data();
  std::vector<double> out(av.begin() + static_cast<std::ptrdiff_t>(begin * c),
                          av.begin() + static_cast<std::ptrdiff_t>((begin + count) * c));
  return make_op("slice_rows", count, c, std::move(out), {a.node()}, [c, begin](Node& self) {
    Node& pa = *self.parents[0];
    for (std::size_t k = 0; k < self.grad.size(); ++k) pa.grad[begin * c + k] += self.grad[k];
  });
}

Tensor sum(const Tensor& a) {
  double s = 0.0;
  for (double v : a.data()) s += v;
  return make_op("sum", 1, 1, {s}, {a.node()}, [](Node& self) {
    Node& pa = *self.parents[0];
    for (double& g : pa.grad) g += self.grad[0];
  });
}

Tensor mean(const Tensor& a) { return scale(sum(a), 1.0 / static_cast<double>(a.size())); }

Tensor mean_rows(const Tensor& a) {
  const std::size_t r = a.rows(), c = a.cols();
  std::vector<double> out(c, 0.0);
  const auto av = a.data();
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) out[j] += av[i * c + j];
  }
  for (double& v : out) v /= static_cast<double>(r);
  return make_op("mean_rows", 1, c, std::move(out), {a.node()}, [r, c](Node& self) {
    Node& pa = *self.parents[0];
    const double inv = 1.0 / static_cast<double>(r);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < c; ++j) pa.grad[i * c + j] += self.grad[j] * inv;
    }
  });
}

}  // namespace folio::ad
