#include "cascadefuse/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cascadefuse/error.hpp"

namespace cascadefuse::nn {
namespace {

[[noreturn]] void shape_error(const std::string& what) { throw Error(ErrorCode::ShapeMismatch, what); }

void require_vector(const Tensor& v, const char* op) {
  if (v.rank() != 1) shape_error(std::string(op) + " expects a vector");
}

void require_matrix(const Tensor& m, const char* op) {
  if (m.rank() != 2) shape_error(std::string(op) + " expects a matrix");
}

void require_same(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) shape_error(std::string(op) + ": operand shapes differ");
}

// Elementwise op whose derivative is a function of (input, output).
template <class Forward, class Derivative>
Var elementwise(Tape& t, Var a, Forward f, Derivative d) {
  Tensor out = t.value(a);
  for (double& v : out.data()) v = f(v);
  return t.push(std::move(out), t.requires_grad(a), [a, d](Tape& tp, Var y) {
    const Tensor& gy = tp.grad(y);
    const Tensor& xv = tp.value(a);
    const Tensor& yv = tp.value(y);
    Tensor& ga = tp.grad(a);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += gy[i] * d(xv[i], yv[i]);
  });
}

}  // namespace

Var linear(Tape& t, Var x, Var m) {
  const Tensor& xv = t.value(x);
  const Tensor& mv = t.value(m);
  require_vector(xv, "linear");
  require_matrix(mv, "linear");
  const std::size_t in = mv.shape()[0], out = mv.shape()[1];
  if (xv.size() != in)
    shape_error("linear: input length " + std::to_string(xv.size()) + " vs " + std::to_string(in));
  Tensor y({out});
  for (std::size_t i = 0; i < in; ++i) {
    const double xi = xv[i];
    if (xi == 0) continue;
    const auto row = mv.row(i);
    for (std::size_t j = 0; j < out; ++j) y[j] += xi * row[j];
  }
  return t.push(std::move(y), t.requires_grad(x) || t.requires_grad(m), [x, m, in, out](Tape& tp, Var yv) {
    const Tensor& gy = tp.grad(yv);
    if (tp.requires_grad(x)) {
      const Tensor& mv = tp.value(m);
      Tensor& gx = tp.grad(x);
      for (std::size_t i = 0; i < in; ++i) {
        const auto row = mv.row(i);
        double s = 0;
        for (std::size_t j = 0; j < out; ++j) s += row[j] * gy[j];
        gx[i] += s;
      }
    }
    if (tp.requires_grad(m)) {
      const Tensor& xv = tp.value(x);
      Tensor& gm = tp.grad(m);
      for (std::size_t i = 0; i < in; ++i) {
        const double xi = xv[i];
        if (xi == 0) continue;
        auto row = gm.row(i);
        for (std::size_t j = 0; j < out; ++j) row[j] += xi * gy[j];
      }
    }
  });
}

Var sparse_linear(Tape& t, const SparseVector& x, Var m) {
  const Tensor& mv = t.value(m);
  require_matrix(mv, "sparse_linear");
  if (x.dim != mv.shape()[0])
    shape_error("sparse_linear: vector dim " + std::to_string(x.dim) + " vs " + std::to_string(mv.shape()[0]));
  const std::size_t out = mv.shape()[1];
  Tensor y({out});
  for (std::size_t k = 0; k < x.nnz(); ++k) {
    const auto row = mv.row(x.index[k]);
    for (std::size_t j = 0; j < out; ++j) y[j] += x.value[k] * row[j];
  }
  return t.push(std::move(y), t.requires_grad(m), [x, m, out](Tape& tp, Var yv) {
    const Tensor& gy = tp.grad(yv);
    Tensor& gm = tp.grad(m);
    for (std::size_t k = 0; k < x.nnz(); ++k) {
      auto row = gm.row(x.index[k]);
      for (std::size_t j = 0; j < out; ++j) row[j] += x.value[k] * gy[j];
    }
  });
}

Var add(Tape& t, Var a, Var b) {
  require_same(t.value(a), t.value(b), "add");
  Tensor out = t.value(a);
  const Tensor& bv = t.value(b);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  return t.push(std::move(out), t.requires_grad(a) || t.requires_grad(b), [a, b](Tape& tp, Var y) {
    const Tensor& gy = tp.grad(y);
    for (Var in : {a, b}) {
      if (!tp.requires_grad(in)) continue;
      Tensor& g = tp.grad(in);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += gy[i];
    }
  });
}

Var sub(Tape& t, Var a, Var b) {
  require_same(t.value(a), t.value(b), "sub");
  Tensor out = t.value(a);
  const Tensor& bv = t.value(b);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  return t.push(std::move(out), t.requires_grad(a) || t.requires_grad(b), [a, b](Tape& tp, Var y) {
    const Tensor& gy = tp.grad(y);
    if (tp.requires_grad(a)) {
      Tensor& g = tp.grad(a);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += gy[i];
    }
    if (tp.requires_grad(b)) {
      Tensor& g = tp.grad(b);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= gy[i];
    }
  });
}

Var mul(Tape& t, Var a, Var b) {
  require_same(t.value(a), t.value(b), "mul");
  Tensor out = t.value(a);
  const Tensor& bv = t.value(b);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  return t.push(std::move(out), t.requires_grad(a) || t.requires_grad(b), [a, b](Tape& tp, Var y) {
    const Tensor& gy = tp.grad(y);
    if (tp.requires_grad(a)) {
      const Tensor& bv = tp.value(b);
      Tensor& g = tp.grad(a);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += gy[i] * bv[i];
    }
    if (tp.requires_grad(b)) {
      const Tensor& av = tp.value(a);
      Tensor& g = tp.grad(b);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += gy[i] * av[i];
    }
  });
}

Var one_minus(Tape& t, Var a) {
  return elementwise(t, a, [](double x) { return 1.0 - x; }, [](double, double) { return -1.0; });
}

Var sigmoid(Tape& t, Var a) {
  return elementwise(
      t, a,
      [](double x) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var tanh(Tape& t, Var a) {
  return elementwise(t, a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Var relu(Tape& t, Var a) {
  return elementwise(t, a, [](double x) { return x > 0 ? x : 0.0; },
                     [](double x, double) { return x > 0 ? 1.0 : 0.0; });
}

Var softmax(Tape& t, Var a) {
  const Tensor& av = t.value(a);
  require_vector(av, "softmax");
  Tensor out = av;
  const double mx = *std::max_element(out.data().begin(), out.data().end());
  double total = 0;
  for (double& v : out.data()) total += (v = std::exp(v - mx));
  for (double& v : out.data()) v /= total;
  return t.push(std::move(out), t.requires_grad(a), [a](Tape& tp, Var y) {
    const Tensor& gy = tp.grad(y);
    const Tensor& yv = tp.value(y);
    double dot = 0;
    for (std::size_t i = 0; i < yv.size(); ++i) dot += gy[i] * yv[i];
    Tensor& ga = tp.grad(a);
    for (std::size_t i = 0; i < yv.size(); ++i) ga[i] += yv[i] * (gy[i] - dot);
  });
}

Var cross_entropy(Tape& t, Var probs, std::size_t label) {
  const Tensor& z = t.value(probs);
  require_vector(z, "cross_entropy");
  if (label >= z.size())
    throw Error(ErrorCode::InvalidClass, "class index " + std::to_string(label) + " outside " + std::to_string(z.size()) + " classes");
  constexpr double kFloor = 1e-12;
  const double p = z[label];
  const bool clamped = !(p > kFloor);
  Tensor out = Tensor::scalar(-std::log(clamped ? kFloor : p));
  return t.push(std::move(out), t.requires_grad(probs), [probs, label, clamped](Tape& tp, Var y) {
    if (clamped) return;
    tp.grad(probs)[label] += -tp.grad(y)[0] / tp.value(probs)[label];
  });
}

Var dropout(Tape& t, Var a, double rate, bool training, std::mt19937_64& rng) {
  if (!training || rate <= 0) return a;
  if (rate >= 1) throw Error(ErrorCode::ConfigMismatch, "dropout rate must be < 1");
  const Tensor& av = t.value(a);
  Tensor mask(av.shape());
  const double keep_scale = 1.0 / (1.0 - rate);
  for (double& m : mask.data()) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    m = u >= rate ? keep_scale : 0.0;
  }
  Tensor out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  return t.push(std::move(out), t.requires_grad(a), [a, mask = std::move(mask)](Tape& tp, Var y) {
    const Tensor& gy = tp.grad(y);
    Tensor& ga = tp.grad(a);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += gy[i] * mask[i];
  });
}

Var stack_rows(Tape& t, std::span<const Var> rows) {
  if (rows.empty()) shape_error("stack_rows: no rows");
  const std::size_t width = t.value(rows[0]).size();
  Tensor out({rows.size(), width});
  bool rg = false;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Tensor& v = t.value(rows[r]);
    require_vector(v, "stack_rows");
    if (v.size() != width) shape_error("stack_rows: ragged rows");
    std::copy(v.data().begin(), v.data().end(), out.row(r).begin());
    rg = rg || t.requires_grad(rows[r]);
  }
  std::vector<Var> ids(rows.begin(), rows.end());
  return t.push(std::move(out), rg, [ids = std::move(ids), width](Tape& tp, Var y) {
    const Tensor& gy = tp.grad(y);
    for (std::size_t r = 0; r < ids.size(); ++r) {
      if (!tp.requires_grad(ids[r])) continue;
      Tensor& g = tp.grad(ids[r]);
      const auto src = gy.row(r);
      for (std::size_t j = 0; j < width; ++j) g[j] += src[j];
    }
  });
}

Var concat(Tape& t, std::span<const Var> parts) {
  std::vector<double> values;
  std::vector<Var> ids(parts.begin(), parts.end());
  std::vector<std::size_t> offsets;
  bool rg = false;
  for (Var p : parts) {
    const Tensor& v = t.value(p);
    require_vector(v, "concat");
    offsets.push_back(values.size());
    values.insert(values.end(), v.data().begin(), v.data().end());
    rg = rg || t.requires_grad(p);
  }
  return t.push(Tensor::vector(std::move(values)), rg,
                [ids = std::move(ids), offsets = std::move(offsets)](Tape& tp, Var y) {
                  const Tensor& gy = tp.grad(y);
                  for (std::size_t k = 0; k < ids.size(); ++k) {
                    if (!tp.requires_grad(ids[k])) continue;
                    Tensor& g = tp.grad(ids[k]);
                    for (std::size_t i = 0; i < g.size(); ++i) g[i] += gy[offsets[k] + i];
                  }
                });
}

Var concat_cols(Tape& t, Var a, Var b) {
  const Tensor& av = t.value(a);
  const Tensor& bv = t.value(b);
  require_matrix(av, "concat_cols");
  require_matrix(bv, "concat_cols");
  if (av.rows() != bv.rows()) shape_error("concat_cols: row counts differ");
  const std::size_t rows = av.rows(), ca = av.cols(), cb = bv.cols();
  Tensor out({rows, ca + cb});
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy(av.row(r).begin(), av.row(r).end(), out.row(r).begin());
    std::copy(bv.row(r).begin(), bv.row(r).end(), out.row(r).begin() + static_cast<std::ptrdiff_t>(ca));
  }
  return t.push(std::move(out), t.requires_grad(a) || t.requires_grad(b), [a, b, rows, ca, cb](Tape& tp, Var y) {
    const Tensor& gy = tp.grad(y);
    if (tp.requires_grad(a)) {
      Tensor& g = tp.grad(a);
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t j = 0; j < ca; ++j) g(r, j) += gy(r, j);
    }
    if (tp.requires_grad(b)) {
      Tensor& g = tp.grad(b);
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t j = 0; j < cb; ++j) g(r, j) += gy(r, ca + j);
    }
  });
}

Var matmul_nt(Tape& t, Var a, Var b) {
  const Tensor& av = t.value(a);
  const Tensor& bv = t.value(b);
  require_matrix(av, "matmul_nt");
  require_matrix(bv, "matmul_nt");
  if (av.cols() != bv.cols()) shape_error("matmul_nt: inner dimensions differ");
  const std::size_t n = av.rows(), m = bv.rows(), k = av.cols();
  Tensor out({n, m});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0;
      for (std::size_t q = 0; q < k; ++q) s += av(i, q) * bv(j, q);
      out(i, j) = s;
    }
  return t.push(std::move(out), t.requires_grad(a) || t.requires_grad(b), [a, b, n, m, k](Tape& tp, Var y) {
    const Tensor& gy = tp.grad(y);
    const Tensor& av = tp.value(a);
    const Tensor& bv = tp.value(b);
    if (tp.requires_grad(a)) {
      Tensor& ga = tp.grad(a);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
          for (std::size_t q = 0; q < k; ++q) ga(i, q) += gy(i, j) * bv(j, q);
    }
    if (tp.requires_grad(b)) {
      Tensor& gb = tp.grad(b);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
          for (std::size_t q = 0; q < k; ++q) gb(j, q) += gy(i, j) * av(i, q);
    }
  });
}

Var matmul(Tape& t, Var a, Var b) {
  const Tensor& av = t.value(a);
  const Tensor& bv = t.value(b);
  require_matrix(av, "matmul");
  require_matrix(bv, "matmul");
  if (av.cols() != bv.rows()) shape_error("matmul: inner dimensions differ");
  const std::size_t n = av.rows(), k = av.cols(), m = bv.cols();
  Tensor out({n, m});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t q = 0; q < k; ++q) {
      const double aiq = av(i, q);
      if (aiq == 0) continue;
      for (std::size_t j = 0; j < m; ++j) out(i, j) += aiq * bv(q, j);
    }
  return t.push(std::move(out), t.requires_grad(a) || t.requires_grad(b), [a, b, n, m, k](Tape& tp, Var y) {
    const Tensor& gy = tp.grad(y);
    const Tensor& av = tp.value(a);
    const Tensor& bv = tp.value(b);
    if (tp.requires_grad(a)) {
      Tensor& ga = tp.grad(a);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t q = 0; q < k; ++q) {
          double s = 0;
          for (std::size_t j = 0; j < m; ++j) s += gy(i, j) * bv(q, j);
          ga(i, q) += s;
        }
    }
    if (tp.requires_grad(b)) {
      Tensor& gb = tp.grad(b);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t q = 0; q < k; ++q) {
          const double aiq = av(i, q);
          for (std::size_t j = 0; j < m; ++j) gb(q, j) += aiq * gy(i, j);
        }
    }
  });
}

Var masked_softmax_rows(Tape& t, Var m, std::span<const std::uint8_t> col_mask) {
  const Tensor& mv = t.value(m);
  require_matrix(mv, "masked_softmax_rows");
  const std::size_t rows = mv.rows(), cols = mv.cols();
  if (col_mask.size() != cols) shape_error("masked_softmax_rows: mask length differs from column count");
  if (std::none_of(col_mask.begin(), col_mask.end(), [](std::uint8_t v) { return v != 0; }))
    throw Error(ErrorCode::AllMasked, "softmax over an all-masked row");
  Tensor out({rows, cols});
  for (std::size_t r = 0; r < rows; ++r) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < cols; ++c)
      if (col_mask[c]) mx = std::max(mx, mv(r, c));
    double total = 0;
    for (std::size_t c = 0; c < cols; ++c)
      if (col_mask[c]) total += (out(r, c) = std::exp(mv(r, c) - mx));
    for (std::size_t c = 0; c < cols; ++c) out(r, c) /= total;
  }
  return t.push(std::move(out), t.requires_grad(m), [m, rows, cols](Tape& tp, Var y) {
    const Tensor& gy = tp.grad(y);
    const Tensor& yv = tp.value(y);
    Tensor& gm = tp.grad(m);
    for (std::size_t r = 0; r < rows; ++r) {
      double dot = 0;
      for (std::size_t c = 0; c < cols; ++c) dot += gy(r, c) * yv(r, c);
      for (std::size_t c = 0; c < cols; ++c) gm(r, c) += yv(r, c) * (gy(r, c) - dot);
    }
  });
}

Var maxpool_rows(Tape& t, Var h, std::span<const std::uint8_t> row_mask) {
  const Tensor& hv = t.value(h);
  require_matrix(hv, "maxpool_rows");
  const std::size_t rows = hv.rows(), cols = hv.cols();
  if (row_mask.size() != rows) shape_error("maxpool_rows: mask length differs from row count");
  std::vector<std::size_t> argmax(cols, rows);
  Tensor out({cols});
  for (std::size_t r = 0; r < rows; ++r) {
    if (!row_mask[r]) continue;
    for (std::size_t c = 0; c < cols; ++c)
      if (argmax[c] == rows || hv(r, c) > out[c]) {
        argmax[c] = r;
        out[c] = hv(r, c);
      }
  }
  if (cols > 0 && argmax[0] == rows) throw Error(ErrorCode::AllMasked, "max-pooling over an empty mask");
  return t.push(std::move(out), t.requires_grad(h), [h, argmax = std::move(argmax)](Tape& tp, Var y) {
    const Tensor& gy = tp.grad(y);
    Tensor& gh = tp.grad(h);
    for (std::size_t c = 0; c < argmax.size(); ++c) gh(argmax[c], c) += gy[c];
  });
}

Var weighted_sum(Tape& t, Var a, const Tensor& weights) {
  const Tensor& av = t.value(a);
  if (av.size() != weights.size()) shape_error("weighted_sum: weight count differs");
  double s = 0;
  for (std::size_t i = 0; i < av.size(); ++i) s += av[i] * weights[i];
  return t.push(Tensor::scalar(s), t.requires_grad(a), [a, weights](Tape& tp, Var y) {
    const double gy = tp.grad(y)[0];
    Tensor& ga = tp.grad(a);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += gy * weights[i];
  });
}

}  // namespace cascadefuse::nn
