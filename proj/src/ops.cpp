// SPDX-License-Identifier: Apache-2.0

#include "graphfuse/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "graphfuse/errors.hpp"

namespace graphfuse {
namespace {

using detail::Node;

// Gradient buffer of parent i, or nullptr if it does not take gradients.
double* parent_grad(Node& self, std::size_t i) {
  Node& p = *self.parents[i];
  if (!p.requires_grad) return nullptr;
  return p.ensure_grad().data();
}

// Four independent accumulators let the compiler keep several FMAs in flight.
double dot_product(const double* x, const double* y, std::size_t n) {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    a0 += x[j] * y[j];
    a1 += x[j + 1] * y[j + 1];
    a2 += x[j + 2] * y[j + 2];
    a3 += x[j + 3] * y[j + 3];
  }
  for (; j < n; ++j) a0 += x[j] * y[j];
  return (a0 + a1) + (a2 + a3);
}

// Maps an output flat index to an input flat index under broadcasting.
class IndexMap {
 public:
  IndexMap(const Shape& out, const Shape& in) {
    const std::size_t n_in = numel(in);
    const std::size_t n_out = numel(out);
    if (in == out) {
      mode_ = Mode::kSame;
    } else if (n_in == 1) {
      mode_ = Mode::kScalar;
    } else if (in.size() <= out.size() &&
               std::equal(in.begin(), in.end(), out.end() - static_cast<long>(in.size()))) {
      mode_ = Mode::kModulo;
      modulo_ = n_in;
    } else {
      mode_ = Mode::kTable;
      const std::size_t r = out.size();
      const std::size_t offset = r - in.size();
      std::vector<std::size_t> stride(r, 0);
      std::size_t s = 1;
      for (std::size_t k = in.size(); k-- > 0;) {
        stride[k + offset] = in[k] == 1 ? 0 : s;
        s *= in[k];
      }
      table_.resize(n_out);
      std::vector<std::size_t> counter(r, 0);
      std::size_t pos = 0;
      for (std::size_t i = 0; i < n_out; ++i) {
        table_[i] = pos;
        for (std::size_t k = r; k-- > 0;) {
          ++counter[k];
          pos += stride[k];
          if (counter[k] < out[k]) break;
          pos -= stride[k] * counter[k];
          counter[k] = 0;
        }
      }
    }
  }

  std::size_t operator()(std::size_t i) const {
    switch (mode_) {
      case Mode::kSame: return i;
      case Mode::kScalar: return 0;
      case Mode::kModulo: return i % modulo_;
      case Mode::kTable: return table_[i];
    }
    return 0;
  }

 private:
  enum class Mode { kSame, kScalar, kModulo, kTable };
  Mode mode_ = Mode::kSame;
  std::size_t modulo_ = 1;
  std::vector<std::size_t> table_;
};

template <class Fwd, class GradA, class GradB>
Tensor binary(const Tensor& a, const Tensor& b, Fwd fwd, GradA grad_a, GradB grad_b) {
  Shape out_shape = broadcast_shape(a.shape(), b.shape());
  const std::size_t n = numel(out_shape);
  auto ia = std::make_shared<IndexMap>(out_shape, a.shape());
  auto ib = std::make_shared<IndexMap>(out_shape, b.shape());
  std::vector<double> out(n);
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t i = 0; i < n; ++i) out[i] = fwd(da[(*ia)(i)], db[(*ib)(i)]);
  return Tensor::make_result(
      std::move(out_shape), std::move(out), {a, b},
      [ia, ib, n, grad_a, grad_b](Node& self) {
        const auto& xa = self.parents[0]->data;
        const auto& xb = self.parents[1]->data;
        const auto& g = self.grad;
        if (double* ga = parent_grad(self, 0)) {
          for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = (*ia)(i);
            ga[j] += g[i] * grad_a(xa[j], xb[(*ib)(i)]);
          }
        }
        if (double* gb = parent_grad(self, 1)) {
          for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = (*ib)(i);
            gb[j] += g[i] * grad_b(xa[(*ia)(i)], xb[j]);
          }
        }
      });
}

// Elementwise unary op; dfdx receives (x, y).
template <class F, class DF>
Tensor unary(const Tensor& x, F f, DF dfdx) {
  const auto dx = x.data();
  std::vector<double> out(dx.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(dx[i]);
  return Tensor::make_result(x.shape(), std::move(out), {x}, [dfdx](Node& self) {
    double* gx = parent_grad(self, 0);
    if (!gx) return;
    const auto& xin = self.parents[0]->data;
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      gx[i] += self.grad[i] * dfdx(xin[i], self.data[i]);
    }
  });
}

// Splits a shape around `axis` into (outer, length, inner) extents.
struct AxisSplit {
  std::size_t outer = 1, length = 1, inner = 1;
};

AxisSplit split_axis(const Shape& shape, std::size_t axis) {
  if (axis >= shape.size()) {
    throw DimensionError("axis " + std::to_string(axis) + " out of range for shape " +
                         shape_str(shape));
  }
  AxisSplit s;
  for (std::size_t k = 0; k < axis; ++k) s.outer *= shape[k];
  s.length = shape[axis];
  for (std::size_t k = axis + 1; k < shape.size(); ++k) s.inner *= shape[k];
  return s;
}

// Copies `src` (shape `in`) with axes a0/a1 swapped.
std::vector<double> swap_axes(std::span<const double> src, const Shape& in, std::size_t a0,
                              std::size_t a1) {
  const std::size_t r = in.size();
  Shape out = in;
  std::swap(out[a0], out[a1]);
  std::vector<std::size_t> in_stride(r, 1);
  for (std::size_t k = r - 1; k-- > 0;) in_stride[k] = in_stride[k + 1] * in[k + 1];
  std::vector<std::size_t> stride = in_stride;  // input stride per output axis
  std::swap(stride[a0], stride[a1]);

  std::vector<double> dst(src.size());
  std::vector<std::size_t> counter(r, 0);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = src[pos];
    for (std::size_t k = r; k-- > 0;) {
      ++counter[k];
      pos += stride[k];
      if (counter[k] < out[k]) break;
      pos -= stride[k] * counter[k];
      counter[k] = 0;
    }
  }
  return dst;
}

void check_index(std::span<const std::size_t> index, std::size_t rows, const char* op) {
  for (std::size_t i : index) {
    if (i >= rows) {
      throw ContractError(std::string(op) + ": index " + std::to_string(i) +
                          " out of range for " + std::to_string(rows) + " rows");
    }
  }
}

}  // namespace

Shape broadcast_shape(const Shape& a, const Shape& b) {
  const std::size_t r = std::max(a.size(), b.size());
  Shape out(r);
  for (std::size_t k = 0; k < r; ++k) {
    const std::size_t da = k < r - a.size() ? 1 : a[k - (r - a.size())];
    const std::size_t db = k < r - b.size() ? 1 : b[k - (r - b.size())];
    if (da != db && da != 1 && db != 1) {
      throw DimensionError("cannot broadcast shapes " + shape_str(a) + " and " + shape_str(b));
    }
    out[k] = da == 1 ? db : da;
  }
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  return binary(
      a, b, [](double x, double y) { return x + y; }, [](double, double) { return 1.0; },
      [](double, double) { return 1.0; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary(
      a, b, [](double x, double y) { return x - y; }, [](double, double) { return 1.0; },
      [](double, double) { return -1.0; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary(
      a, b, [](double x, double y) { return x * y; }, [](double, double y) { return y; },
      [](double x, double) { return x; });
}

Tensor div(const Tensor& a, const Tensor& b) {
  return binary(
      a, b, [](double x, double y) { return x / y; },
      [](double, double y) { return 1.0 / y; },
      [](double x, double y) { return -x / (y * y); });
}

Tensor scale(const Tensor& x, double factor) {
  return unary(
      x, [factor](double v) { return v * factor; },
      [factor](double, double) { return factor; });
}

Tensor add_scalar(const Tensor& x, double value) {
  return unary(
      x, [value](double v) { return v + value; }, [](double, double) { return 1.0; });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  auto mismatch = [&] {
    return DimensionError("matmul shape mismatch: " + shape_str(sa) + " x " + shape_str(sb));
  };
  if (sa.size() < 2 || sb.size() < 2) throw mismatch();
  const std::size_t m = sa[sa.size() - 2];
  const std::size_t k = sa[sa.size() - 1];
  const std::size_t n = sb[sb.size() - 1];
  if (sb[sb.size() - 2] != k) throw mismatch();
  const bool shared_b = sb.size() == 2;
  if (!shared_b && (sa.size() != sb.size() || !std::equal(sa.begin(), sa.end() - 2, sb.begin()))) {
    throw mismatch();
  }
  const std::size_t batch = numel(sa) / (m * k);

  Shape out_shape(sa.begin(), sa.end() - 2);
  out_shape.push_back(m);
  out_shape.push_back(n);
  std::vector<double> out(batch * m * n, 0.0);
  const auto A = a.data();
  const auto B = b.data();
  for (std::size_t t = 0; t < batch; ++t) {
    const double* Ab = A.data() + t * m * k;
    const double* Bb = B.data() + (shared_b ? 0 : t * k * n);
    double* Cb = out.data() + t * m * n;
    for (std::size_t i = 0; i < m; ++i) {
      double* crow = Cb + i * n;
      for (std::size_t p = 0; p < k; ++p) {
        const double aip = Ab[i * k + p];
        const double* brow = Bb + p * n;
        for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
      }
    }
  }
  return Tensor::make_result(
      std::move(out_shape), std::move(out), {a, b},
      [batch, m, k, n, shared_b](Node& self) {
        const auto& A = self.parents[0]->data;
        const auto& B = self.parents[1]->data;
        const auto& G = self.grad;
        double* gA = parent_grad(self, 0);
        double* gB = parent_grad(self, 1);
        for (std::size_t t = 0; t < batch; ++t) {
          const double* Ab = A.data() + t * m * k;
          const double* Bb = B.data() + (shared_b ? 0 : t * k * n);
          const double* Gb = G.data() + t * m * n;
          if (gA) {
            double* gAb = gA + t * m * k;
            for (std::size_t i = 0; i < m; ++i) {
              const double* grow = Gb + i * n;
              for (std::size_t p = 0; p < k; ++p) {
                const double* brow = Bb + p * n;
                gAb[i * k + p] += dot_product(grow, brow, n);
              }
            }
          }
          if (gB) {
            double* gBb = gB + (shared_b ? 0 : t * k * n);
            for (std::size_t i = 0; i < m; ++i) {
              const double* grow = Gb + i * n;
              for (std::size_t p = 0; p < k; ++p) {
                const double aip = Ab[i * k + p];
                double* gbrow = gBb + p * n;
                for (std::size_t j = 0; j < n; ++j) gbrow[j] += aip * grow[j];
              }
            }
          }
        }
      });
}

Tensor transpose(const Tensor& x, std::size_t axis0, std::size_t axis1) {
  const Shape& in = x.shape();
  if (axis0 >= in.size() || axis1 >= in.size()) {
    throw DimensionError("transpose axes out of range for shape " + shape_str(in));
  }
  if (axis0 == axis1) return x;
  Shape out_shape = in;
  std::swap(out_shape[axis0], out_shape[axis1]);
  std::vector<double> out = swap_axes(x.data(), in, axis0, axis1);
  return Tensor::make_result(out_shape, std::move(out), {x},
                             [out_shape, axis0, axis1](Node& self) {
                               double* gx = parent_grad(self, 0);
                               if (!gx) return;
                               auto back = swap_axes(self.grad, out_shape, axis0, axis1);
                               for (std::size_t i = 0; i < back.size(); ++i) gx[i] += back[i];
                             });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (numel(shape) != x.numel()) {
    throw DimensionError("cannot reshape " + shape_str(x.shape()) + " to " + shape_str(shape));
  }
  std::vector<double> out(x.data().begin(), x.data().end());
  return Tensor::make_result(std::move(shape), std::move(out), {x}, [](Node& self) {
    double* gx = parent_grad(self, 0);
    if (!gx) return;
    for (std::size_t i = 0; i < self.grad.size(); ++i) gx[i] += self.grad[i];
  });
}

Tensor sum(const Tensor& x) {
  const auto d = x.data();
  const double total = std::accumulate(d.begin(), d.end(), 0.0);
  return Tensor::make_result(Shape{}, {total}, {x}, [](Node& self) {
    double* gx = parent_grad(self, 0);
    if (!gx) return;
    const double g = self.grad[0];
    for (std::size_t i = 0; i < self.parents[0]->data.size(); ++i) gx[i] += g;
  });
}

Tensor mean(const Tensor& x) {
  return scale(sum(x), 1.0 / static_cast<double>(x.numel()));
}

Tensor sum_axis(const Tensor& x, std::size_t axis, bool keepdim) {
  const AxisSplit s = split_axis(x.shape(), axis);
  Shape out_shape = x.shape();
  if (keepdim) {
    out_shape[axis] = 1;
  } else {
    out_shape.erase(out_shape.begin() + static_cast<long>(axis));
  }
  const auto d = x.data();
  std::vector<double> out(s.outer * s.inner, 0.0);
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t l = 0; l < s.length; ++l)
      for (std::size_t i = 0; i < s.inner; ++i)
        out[o * s.inner + i] += d[(o * s.length + l) * s.inner + i];
  return Tensor::make_result(std::move(out_shape), std::move(out), {x}, [s](Node& self) {
    double* gx = parent_grad(self, 0);
    if (!gx) return;
    for (std::size_t o = 0; o < s.outer; ++o)
      for (std::size_t l = 0; l < s.length; ++l)
        for (std::size_t i = 0; i < s.inner; ++i)
          gx[(o * s.length + l) * s.inner + i] += self.grad[o * s.inner + i];
  });
}

Tensor exp(const Tensor& x) {
  return unary(
      x, [](double v) { return std::exp(v); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& x) {
  return unary(
      x, [](double v) { return std::log(v); }, [](double v, double) { return 1.0 / v; });
}

Tensor square(const Tensor& x) {
  return unary(
      x, [](double v) { return v * v; }, [](double v, double) { return 2.0 * v; });
}

Tensor relu(const Tensor& x) {
  return unary(
      x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor elu(const Tensor& x, double alpha) {
  return unary(
      x, [alpha](double v) { return v > 0.0 ? v : alpha * std::expm1(v); },
      [alpha](double v, double y) { return v > 0.0 ? 1.0 : y + alpha; });
}

Tensor leaky_relu(const Tensor& x, double negative_slope) {
  if (!(negative_slope > 0.0 && negative_slope < 1.0)) {
    throw ConfigError("leaky_relu slope must lie in (0, 1), got " +
                      std::to_string(negative_slope));
  }
  return unary(
      x, [negative_slope](double v) { return v >= 0.0 ? v : negative_slope * v; },
      [negative_slope](double v, double) { return v >= 0.0 ? 1.0 : negative_slope; });
}

Tensor softmax(const Tensor& x, std::size_t axis) {
  const AxisSplit s = split_axis(x.shape(), axis);
  const auto d = x.data();
  std::vector<double> out(d.size());
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t i = 0; i < s.inner; ++i) {
      const std::size_t base = o * s.length * s.inner + i;
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t l = 0; l < s.length; ++l) mx = std::max(mx, d[base + l * s.inner]);
      double total = 0.0;
      for (std::size_t l = 0; l < s.length; ++l) {
        const double e = std::exp(d[base + l * s.inner] - mx);
        out[base + l * s.inner] = e;
        total += e;
      }
      for (std::size_t l = 0; l < s.length; ++l) out[base + l * s.inner] /= total;
    }
  }
  return Tensor::make_result(x.shape(), std::move(out), {x}, [s](Node& self) {
    double* gx = parent_grad(self, 0);
    if (!gx) return;
    const auto& y = self.data;
    const auto& g = self.grad;
    for (std::size_t o = 0; o < s.outer; ++o) {
      for (std::size_t i = 0; i < s.inner; ++i) {
        const std::size_t base = o * s.length * s.inner + i;
        double dot = 0.0;
        for (std::size_t l = 0; l < s.length; ++l) {
          dot += g[base + l * s.inner] * y[base + l * s.inner];
        }
        for (std::size_t l = 0; l < s.length; ++l) {
          const std::size_t j = base + l * s.inner;
          gx[j] += y[j] * (g[j] - dot);
        }
      }
    }
  });
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
  if (x.rank() == 0) throw DimensionError("layer_norm on a scalar");
  const std::size_t width = x.shape().back();
  if (gain.shape() != Shape{width} || bias.shape() != Shape{width}) {
    throw DimensionError("layer_norm gain/bias " + shape_str(gain.shape()) + "/" +
                         shape_str(bias.shape()) + " do not match input " +
                         shape_str(x.shape()));
  }
  if (!(eps > 0.0)) throw ConfigError("layer_norm eps must be positive");
  const std::size_t rows = x.numel() / width;
  const auto d = x.data();
  const auto gm = gain.data();
  const auto bt = bias.data();
  auto x_hat = std::make_shared<std::vector<double>>(d.size());
  auto rstd = std::make_shared<std::vector<double>>(rows);
  std::vector<double> out(d.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = d.data() + r * width;
    double mu = 0.0;
    for (std::size_t c = 0; c < width; ++c) mu += row[c];
    mu /= static_cast<double>(width);
    double var = 0.0;
    for (std::size_t c = 0; c < width; ++c) var += (row[c] - mu) * (row[c] - mu);
    var /= static_cast<double>(width);
    const double inv = 1.0 / std::sqrt(var + eps);
    (*rstd)[r] = inv;
    for (std::size_t c = 0; c < width; ++c) {
      const double xh = (row[c] - mu) * inv;
      (*x_hat)[r * width + c] = xh;
      out[r * width + c] = xh * gm[c] + bt[c];
    }
  }
  return Tensor::make_result(
      x.shape(), std::move(out), {x, gain, bias}, [x_hat, rstd, rows, width](Node& self) {
        const auto& g = self.grad;
        const auto& gm = self.parents[1]->data;
        double* gx = parent_grad(self, 0);
        double* ggain = parent_grad(self, 1);
        double* gbias = parent_grad(self, 2);
        const double w = static_cast<double>(width);
        for (std::size_t r = 0; r < rows; ++r) {
          const double* grow = g.data() + r * width;
          const double* xh = x_hat->data() + r * width;
          if (ggain || gbias) {
            for (std::size_t c = 0; c < width; ++c) {
              if (ggain) ggain[c] += grow[c] * xh[c];
              if (gbias) gbias[c] += grow[c];
            }
          }
          if (gx) {
            double sum_dxh = 0.0, sum_dxh_xh = 0.0;
            for (std::size_t c = 0; c < width; ++c) {
              const double dxh = grow[c] * gm[c];
              sum_dxh += dxh;
              sum_dxh_xh += dxh * xh[c];
            }
            const double inv = (*rstd)[r];
            for (std::size_t c = 0; c < width; ++c) {
              const double dxh = grow[c] * gm[c];
              gx[r * width + c] += inv / w * (w * dxh - sum_dxh - xh[c] * sum_dxh_xh);
            }
          }
        }
      });
}

Tensor gather_rows(const Tensor& x, std::span<const std::size_t> index) {
  if (x.rank() == 0) throw DimensionError("gather_rows on a scalar");
  const std::size_t rows = x.dim(0);
  check_index(index, rows, "gather_rows");
  const std::size_t width = rows == 0 ? 0 : x.numel() / rows;
  Shape out_shape = x.shape();
  out_shape[0] = index.size();
  const auto d = x.data();
  std::vector<double> out(index.size() * width);
  for (std::size_t e = 0; e < index.size(); ++e) {
    std::copy_n(d.data() + index[e] * width, width, out.data() + e * width);
  }
  auto idx = std::make_shared<std::vector<std::size_t>>(index.begin(), index.end());
  return Tensor::make_result(std::move(out_shape), std::move(out), {x}, [idx, width](Node& self) {
    double* gx = parent_grad(self, 0);
    if (!gx) return;
    for (std::size_t e = 0; e < idx->size(); ++e) {
      double* dst = gx + (*idx)[e] * width;
      const double* src = self.grad.data() + e * width;
      for (std::size_t c = 0; c < width; ++c) dst[c] += src[c];
    }
  });
}

Tensor scatter_add_rows(const Tensor& values, std::span<const std::size_t> index,
                        std::size_t rows) {
  if (values.rank() == 0 || values.dim(0) != index.size()) {
    throw DimensionError("scatter_add_rows: values " + shape_str(values.shape()) + " vs " +
                         std::to_string(index.size()) + " indices");
  }
  check_index(index, rows, "scatter_add_rows");
  const std::size_t width = index.empty() ? 0 : values.numel() / index.size();
  Shape out_shape = values.shape();
  out_shape[0] = rows;
  std::vector<double> out(numel(out_shape), 0.0);
  const auto d = values.data();
  for (std::size_t e = 0; e < index.size(); ++e) {
    double* dst = out.data() + index[e] * width;
    const double* src = d.data() + e * width;
    for (std::size_t c = 0; c < width; ++c) dst[c] += src[c];
  }
  auto idx = std::make_shared<std::vector<std::size_t>>(index.begin(), index.end());
  return Tensor::make_result(std::move(out_shape), std::move(out), {values},
                             [idx, width](Node& self) {
                               double* gv = parent_grad(self, 0);
                               if (!gv) return;
                               for (std::size_t e = 0; e < idx->size(); ++e) {
                                 const double* src = self.grad.data() + (*idx)[e] * width;
                                 double* dst = gv + e * width;
                                 for (std::size_t c = 0; c < width; ++c) dst[c] += src[c];
                               }
                             });
}

Tensor segment_softmax(const Tensor& logits, std::span<const std::size_t> segment,
                       std::size_t num_segments) {
  if (logits.rank() == 0 || logits.dim(0) != segment.size()) {
    throw DimensionError("segment_softmax: logits " + shape_str(logits.shape()) + " vs " +
                         std::to_string(segment.size()) + " segment ids");
  }
  check_index(segment, num_segments, "segment_softmax");
  const std::size_t E = segment.size();
  const std::size_t cols = E == 0 ? 0 : logits.numel() / E;
  const auto d = logits.data();
  std::vector<double> mx(num_segments * cols, -std::numeric_limits<double>::infinity());
  for (std::size_t e = 0; e < E; ++e)
    for (std::size_t c = 0; c < cols; ++c) {
      double& m = mx[segment[e] * cols + c];
      m = std::max(m, d[e * cols + c]);
    }
  std::vector<double> total(num_segments * cols, 0.0);
  std::vector<double> out(E * cols);
  for (std::size_t e = 0; e < E; ++e)
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t s = segment[e] * cols + c;
      out[e * cols + c] = std::exp(d[e * cols + c] - mx[s]);
      total[s] += out[e * cols + c];
    }
  for (std::size_t e = 0; e < E; ++e)
    for (std::size_t c = 0; c < cols; ++c) out[e * cols + c] /= total[segment[e] * cols + c];

  auto seg = std::make_shared<std::vector<std::size_t>>(segment.begin(), segment.end());
  return Tensor::make_result(
      logits.shape(), std::move(out), {logits}, [seg, cols, num_segments](Node& self) {
        double* gx = parent_grad(self, 0);
        if (!gx) return;
        const auto& y = self.data;
        const auto& g = self.grad;
        std::vector<double> dot(num_segments * cols, 0.0);
        for (std::size_t e = 0; e < seg->size(); ++e)
          for (std::size_t c = 0; c < cols; ++c)
            dot[(*seg)[e] * cols + c] += g[e * cols + c] * y[e * cols + c];
        for (std::size_t e = 0; e < seg->size(); ++e)
          for (std::size_t c = 0; c < cols; ++c) {
            const std::size_t j = e * cols + c;
            gx[j] += y[j] * (g[j] - dot[(*seg)[e] * cols + c]);
          }
      });
}

Tensor edge_aggregate(const Tensor& weights, const Tensor& values,
                      std::span<const std::size_t> sources, std::span<const std::size_t> targets,
                      std::size_t rows) {
  if (weights.rank() != 2 || values.rank() != 3 || weights.dim(0) != sources.size() ||
      sources.size() != targets.size() || weights.dim(1) != values.dim(1)) {
    throw DimensionError("edge_aggregate: weights " + shape_str(weights.shape()) + ", values " +
                         shape_str(values.shape()) + ", " + std::to_string(sources.size()) +
                         " sources, " + std::to_string(targets.size()) + " targets");
  }
  check_index(sources, values.dim(0), "edge_aggregate");
  check_index(targets, rows, "edge_aggregate");
  const std::size_t H = values.dim(1);
  const std::size_t D = values.dim(2);
  std::vector<double> out(rows * H * D, 0.0);
  const auto w = weights.data();
  const auto v = values.data();
  for (std::size_t e = 0; e < sources.size(); ++e)
    for (std::size_t h = 0; h < H; ++h) {
      const double a = w[e * H + h];
      const double* src = v.data() + (sources[e] * H + h) * D;
      double* dst = out.data() + (targets[e] * H + h) * D;
      for (std::size_t c = 0; c < D; ++c) dst[c] += a * src[c];
    }
  auto src_idx = std::make_shared<std::vector<std::size_t>>(sources.begin(), sources.end());
  auto dst_idx = std::make_shared<std::vector<std::size_t>>(targets.begin(), targets.end());
  return Tensor::make_result(
      {rows, H, D}, std::move(out), {weights, values}, [src_idx, dst_idx, H, D](Node& self) {
        const auto& w = self.parents[0]->data;
        const auto& v = self.parents[1]->data;
        const auto& g = self.grad;
        double* gw = parent_grad(self, 0);
        double* gv = parent_grad(self, 1);
        for (std::size_t e = 0; e < src_idx->size(); ++e)
          for (std::size_t h = 0; h < H; ++h) {
            const double* grow = g.data() + ((*dst_idx)[e] * H + h) * D;
            const std::size_t vo = ((*src_idx)[e] * H + h) * D;
            if (gw) {
              double acc = 0.0;
              for (std::size_t c = 0; c < D; ++c) acc += grow[c] * v[vo + c];
              gw[e * H + h] += acc;
            }
            if (gv) {
              const double a = w[e * H + h];
              for (std::size_t c = 0; c < D; ++c) gv[vo + c] += a * grow[c];
            }
          }
      });
}

Tensor dropout_mask(const Shape& shape, double p, Rng& rng, bool training) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw ConfigError("dropout probability must lie in [0, 1), got " + std::to_string(p));
  }
  Tensor mask = Tensor::full(shape, 1.0);
  if (!training || p == 0.0) return mask;
  const double keep = 1.0 - p;
  const double kept = 1.0 / keep;
  for (double& v : mask.mutable_data()) v = rng.uniform() < keep ? kept : 0.0;
  return mask;
}

Tensor dropout(const Tensor& x, double p, Rng& rng, bool training) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw ConfigError("dropout probability must lie in [0, 1), got " + std::to_string(p));
  }
  if (!training || p == 0.0) return x;
  return mul(x, dropout_mask(x.shape(), p, rng, training));
}

}  // namespace graphfuse
