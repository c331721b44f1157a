// Copyright 2026 The mplexnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mplex/grad/ops.hpp"

#include <cmath>
#include <string>

namespace mplex::grad {

double softplus(double v) {
  return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
}

double sigmoid(double v) {
  if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

double softplus_inverse(double w) {
  if (!(w > 0.0)) throw Error("softplus_inverse: argument must be positive");
  return w > 20.0 ? w + std::log1p(-std::exp(-w)) : std::log(std::expm1(w));
}

namespace {

Tape* same_tape(const Var& a, const Var& b) {
  if (!a.valid() || !b.valid()) throw Error("use of an unbound Var");
  if (a.tape() != b.tape()) throw Error("operands live on different tapes");
  return a.tape();
}

std::string shape_str(const Tensor& t) {
  return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
}

bool is_scalar(const Tensor& t) { return t.rows() == 1 && t.cols() == 1; }

// Result shape of an elementwise op with scalar broadcasting.
std::pair<Eigen::Index, Eigen::Index> broadcast(const Tensor& a, const Tensor& b,
                                                const char* op) {
  if (a.rows() == b.rows() && a.cols() == b.cols()) return {a.rows(), a.cols()};
  if (is_scalar(a)) return {b.rows(), b.cols()};
  if (is_scalar(b)) return {a.rows(), a.cols()};
  throw ShapeError(std::string(op) + ": " + shape_str(a) + " vs " + shape_str(b));
}

Tensor expand(const Tensor& t, Eigen::Index rows, Eigen::Index cols) {
  if (t.rows() == rows && t.cols() == cols) return t;
  return Tensor::Constant(rows, cols, t(0, 0));
}

// Sums a broadcast gradient back to the operand's shape.
Tensor reduce_to(const Tensor& g, const Tensor& like) {
  if (g.rows() == like.rows() && g.cols() == like.cols()) return g;
  return Tensor::Constant(1, 1, g.sum());
}

template <typename Fwd, typename Deriv>
Var unary(const Var& a, Fwd fwd, Deriv deriv) {
  Tape* t = a.tape();
  if (!t) throw Error("use of an unbound Var");
  Tensor y = a.value().unaryExpr(fwd);
  const std::size_t ia = a.id();
  const std::size_t iy = t->size();
  return t->record(std::move(y), [t, ia, iy, deriv](const Tensor& up, std::vector<Tensor>& g) {
    const Tensor& x = t->value(ia);
    const Tensor& y = t->value(iy);
    Tensor local = x.binaryExpr(y, deriv);
    accumulate(g, ia, (up.array() * local.array()).matrix());
  });
}

}  // namespace

Var add(const Var& a, const Var& b) {
  Tape* t = same_tape(a, b);
  auto [r, c] = broadcast(a.value(), b.value(), "add");
  Tensor y = expand(a.value(), r, c) + expand(b.value(), r, c);
  const std::size_t ia = a.id(), ib = b.id();
  return t->record(std::move(y), [t, ia, ib](const Tensor& up, std::vector<Tensor>& g) {
    accumulate(g, ia, reduce_to(up, t->value(ia)));
    accumulate(g, ib, reduce_to(up, t->value(ib)));
  });
}

Var sub(const Var& a, const Var& b) {
  Tape* t = same_tape(a, b);
  auto [r, c] = broadcast(a.value(), b.value(), "sub");
  Tensor y = expand(a.value(), r, c) - expand(b.value(), r, c);
  const std::size_t ia = a.id(), ib = b.id();
  return t->record(std::move(y), [t, ia, ib](const Tensor& up, std::vector<Tensor>& g) {
    accumulate(g, ia, reduce_to(up, t->value(ia)));
    accumulate(g, ib, reduce_to(-up, t->value(ib)));
  });
}

Var mul(const Var& a, const Var& b) {
  Tape* t = same_tape(a, b);
  auto [r, c] = broadcast(a.value(), b.value(), "mul");
  Tensor y = (expand(a.value(), r, c).array() * expand(b.value(), r, c).array()).matrix();
  const std::size_t ia = a.id(), ib = b.id();
  return t->record(std::move(y), [t, ia, ib, r, c](const Tensor& up, std::vector<Tensor>& g) {
    const Tensor av = expand(t->value(ia), r, c);
    const Tensor bv = expand(t->value(ib), r, c);
    accumulate(g, ia, reduce_to((up.array() * bv.array()).matrix(), t->value(ia)));
    accumulate(g, ib, reduce_to((up.array() * av.array()).matrix(), t->value(ib)));
  });
}

Var div(const Var& a, const Var& b) {
  Tape* t = same_tape(a, b);
  auto [r, c] = broadcast(a.value(), b.value(), "div");
  Tensor y = (expand(a.value(), r, c).array() / expand(b.value(), r, c).array()).matrix();
  const std::size_t ia = a.id(), ib = b.id();
  return t->record(std::move(y), [t, ia, ib, r, c](const Tensor& up, std::vector<Tensor>& g) {
    const Tensor av = expand(t->value(ia), r, c);
    const Tensor bv = expand(t->value(ib), r, c);
    accumulate(g, ia, reduce_to((up.array() / bv.array()).matrix(), t->value(ia)));
    accumulate(g, ib,
               reduce_to((-up.array() * av.array() / bv.array().square()).matrix(),
                         t->value(ib)));
  });
}

Var neg(const Var& a) {
  return unary(a, [](double x) { return -x; }, [](double, double) { return -1.0; });
}

Var exp(const Var& a) {
  return unary(a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Var log(const Var& a) {
  return unary(a, [](double x) { return std::log(x); },
               [](double x, double) { return 1.0 / x; });
}

Var sqrt(const Var& a) {
  return unary(a, [](double x) { return std::sqrt(x); },
               [](double, double y) { return 0.5 / y; });
}

Var square(const Var& a) {
  return unary(a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Var tanh(const Var& a) {
  return unary(a, [](double x) { return std::tanh(x); },
               [](double, double y) { return 1.0 - y * y; });
}

Var sigmoid(const Var& a) {
  return unary(a, [](double x) { return sigmoid(x); },
               [](double, double y) { return y * (1.0 - y); });
}

Var softplus(const Var& a) {
  return unary(a, [](double x) { return softplus(x); },
               [](double x, double) { return sigmoid(x); });
}

Var softplus_inverse(const Var& w) {
  if ((w.value().array() <= 0.0).any()) {
    throw Error("softplus_inverse: argument must be positive");
  }
  return unary(w, [](double x) { return softplus_inverse(x); },
               [](double x, double) { return 1.0 / -std::expm1(-x); });
}

namespace {

template <bool kMax>
Var extremum(const Var& a, const Var& b) {
  Tape* t = same_tape(a, b);
  auto [r, c] = broadcast(a.value(), b.value(), kMax ? "maximum" : "minimum");
  const Tensor av = expand(a.value(), r, c);
  const Tensor bv = expand(b.value(), r, c);
  // Mask is 1 where the first argument is selected (ties included).
  Tensor mask = kMax ? (av.array() >= bv.array()).cast<double>().matrix()
                     : (av.array() <= bv.array()).cast<double>().matrix();
  Tensor y = (mask.array() * av.array() + (1.0 - mask.array()) * bv.array()).matrix();
  const std::size_t ia = a.id(), ib = b.id();
  return t->record(std::move(y),
                   [t, ia, ib, mask = std::move(mask)](const Tensor& up, std::vector<Tensor>& g) {
                     accumulate(g, ia,
                                reduce_to((up.array() * mask.array()).matrix(), t->value(ia)));
                     accumulate(g, ib,
                                reduce_to((up.array() * (1.0 - mask.array())).matrix(),
                                          t->value(ib)));
                   });
}

}  // namespace

Var maximum(const Var& a, const Var& b) { return extremum<true>(a, b); }
Var minimum(const Var& a, const Var& b) { return extremum<false>(a, b); }

Var scale(const Var& a, double c) {
  return unary(a, [c](double x) { return c * x; }, [c](double, double) { return c; });
}

Var shift(const Var& a, double c) {
  return unary(a, [c](double x) { return x + c; }, [](double, double) { return 1.0; });
}

Var sum(const Var& a) {
  Tape* t = a.tape();
  Tensor y = Tensor::Constant(1, 1, a.value().sum());
  const std::size_t ia = a.id();
  const auto r = a.rows(), c = a.cols();
  return t->record(std::move(y), [ia, r, c](const Tensor& up, std::vector<Tensor>& g) {
    accumulate(g, ia, Tensor::Constant(r, c, up(0, 0)));
  });
}

Var mean(const Var& a) {
  if (a.value().size() == 0) throw ShapeError("mean of an empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(a.value().size()));
}

Var sum_rows(const Var& a) {
  Tape* t = a.tape();
  Tensor y = a.value().rowwise().sum();
  const std::size_t ia = a.id();
  const auto c = a.cols();
  return t->record(std::move(y), [ia, c](const Tensor& up, std::vector<Tensor>& g) {
    accumulate(g, ia, up.replicate(1, c));
  });
}

Var logsumexp(const Var& a) {
  if (a.value().size() == 0) throw ShapeError("logsumexp of an empty tensor");
  Tape* t = a.tape();
  const double m = a.value().maxCoeff();
  const double lse = m + std::log((a.value().array() - m).exp().sum());
  const std::size_t ia = a.id();
  return t->record(Tensor::Constant(1, 1, lse),
                   [t, ia, m](const Tensor& up, std::vector<Tensor>& g) {
                     Tensor soft = (t->value(ia).array() - m).exp().matrix();
                     soft /= soft.sum();
                     accumulate(g, ia, soft * up(0, 0));
                   });
}

Var logsumexp_rows(const Var& a) {
  if (a.cols() == 0) throw ShapeError("logsumexp_rows over zero columns");
  Tape* t = a.tape();
  const Tensor& x = a.value();
  Tensor m = x.rowwise().maxCoeff();
  Tensor y = m + ((x.colwise() - m.col(0)).array().exp().rowwise().sum().log()).matrix();
  const std::size_t ia = a.id();
  return t->record(std::move(y), [t, ia, m](const Tensor& up, std::vector<Tensor>& g) {
    Tensor soft = (t->value(ia).colwise() - m.col(0)).array().exp().matrix();
    const Eigen::VectorXd total = soft.rowwise().sum();
    soft.array().colwise() *= up.col(0).array() / total.array();
    accumulate(g, ia, soft);
  });
}

Var log_softmax_rows(const Var& a) {
  Tape* t = a.tape();
  const Tensor& x = a.value();
  if (x.cols() == 0) throw ShapeError("log_softmax over zero columns");
  Tensor m = x.rowwise().maxCoeff();
  Tensor lse = m + ((x.colwise() - m.col(0)).array().exp().rowwise().sum().log()).matrix();
  Tensor y = x.colwise() - lse.col(0);
  const std::size_t ia = a.id();
  const std::size_t iy = t->size();
  return t->record(std::move(y), [t, ia, iy](const Tensor& up, std::vector<Tensor>& g) {
    const Tensor& yv = t->value(iy);
    Tensor soft = yv.array().exp().matrix();
    Tensor row_sum = up.rowwise().sum();
    Tensor delta = up - (soft.array().colwise() * row_sum.col(0).array()).matrix();
    accumulate(g, ia, delta);
  });
}

Var matmul(const Var& a, const Var& b) {
  Tape* t = same_tape(a, b);
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + shape_str(a.value()) + " * " + shape_str(b.value()));
  }
  Tensor y = a.value() * b.value();
  const std::size_t ia = a.id(), ib = b.id();
  return t->record(std::move(y), [t, ia, ib](const Tensor& up, std::vector<Tensor>& g) {
    accumulate(g, ia, up * t->value(ib).transpose());
    accumulate(g, ib, t->value(ia).transpose() * up);
  });
}

Var matvec(const Var& w, const Var& x) {
  if (x.cols() != 1) throw ShapeError("matvec: x must be a column vector");
  return matmul(w, x);
}

Var affine(const Var& w, const Var& b, const Var& x) {
  Tape* t = same_tape(w, x);
  same_tape(w, b);
  if (x.cols() != w.cols() || b.rows() != 1 || b.cols() != w.rows()) {
    throw ShapeError("affine: x " + shape_str(x.value()) + ", W " + shape_str(w.value()) +
                     ", b " + shape_str(b.value()));
  }
  Tensor y = x.value() * w.value().transpose();
  y.rowwise() += b.value().row(0);
  const std::size_t iw = w.id(), ib = b.id(), ix = x.id();
  return t->record(std::move(y), [t, iw, ib, ix](const Tensor& up, std::vector<Tensor>& g) {
    accumulate(g, iw, up.transpose() * t->value(ix));
    accumulate(g, ib, up.colwise().sum());
    accumulate(g, ix, up * t->value(iw));
  });
}

Var columns(const Var& a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.cols()) {
    throw ShapeError("columns: range out of bounds for " + shape_str(a.value()));
  }
  Tape* t = a.tape();
  Tensor y = a.value().middleCols(start, count);
  const std::size_t ia = a.id();
  const auto r = a.rows(), c = a.cols();
  return t->record(std::move(y), [ia, r, c, start, count](const Tensor& up,
                                                          std::vector<Tensor>& g) {
    Tensor full = Tensor::Zero(r, c);
    full.middleCols(start, count) = up;
    accumulate(g, ia, full);
  });
}

Var hstack(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("hstack of nothing");
  Tape* t = parts.front().tape();
  const auto r = parts.front().rows();
  Eigen::Index total = 0;
  for (const auto& p : parts) {
    same_tape(parts.front(), p);
    if (p.rows() != r) throw ShapeError("hstack: row count mismatch");
    total += p.cols();
  }
  Tensor y(r, total);
  std::vector<std::size_t> ids;
  std::vector<Eigen::Index> widths;
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    y.middleCols(at, p.cols()) = p.value();
    at += p.cols();
    ids.push_back(p.id());
    widths.push_back(p.cols());
  }
  return t->record(std::move(y), [ids, widths](const Tensor& up, std::vector<Tensor>& g) {
    Eigen::Index off = 0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      accumulate(g, ids[k], up.middleCols(off, widths[k]));
      off += widths[k];
    }
  });
}

Var vstack(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("vstack of nothing");
  Tape* t = parts.front().tape();
  const auto c = parts.front().cols();
  Eigen::Index total = 0;
  for (const auto& p : parts) {
    same_tape(parts.front(), p);
    if (p.cols() != c) throw ShapeError("vstack: column count mismatch");
    total += p.rows();
  }
  Tensor y(total, c);
  std::vector<std::size_t> ids;
  std::vector<Eigen::Index> heights;
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    y.middleRows(at, p.rows()) = p.value();
    at += p.rows();
    ids.push_back(p.id());
    heights.push_back(p.rows());
  }
  return t->record(std::move(y), [ids, heights](const Tensor& up, std::vector<Tensor>& g) {
    Eigen::Index off = 0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      accumulate(g, ids[k], up.middleRows(off, heights[k]));
      off += heights[k];
    }
  });
}

Var gather_rows(const Var& a, std::span<const Eigen::Index> rows) {
  Tape* t = a.tape();
  Tensor y(static_cast<Eigen::Index>(rows.size()), a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= a.rows()) throw ShapeError("gather_rows: index out of range");
    y.row(static_cast<Eigen::Index>(i)) = a.value().row(rows[i]);
  }
  const std::size_t ia = a.id();
  const auto r = a.rows(), c = a.cols();
  std::vector<Eigen::Index> idx(rows.begin(), rows.end());
  return t->record(std::move(y), [ia, r, c, idx = std::move(idx)](const Tensor& up,
                                                                  std::vector<Tensor>& g) {
    Tensor full = Tensor::Zero(r, c);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      full.row(idx[i]) += up.row(static_cast<Eigen::Index>(i));
    }
    accumulate(g, ia, full);
  });
}

Var pick(const Var& a, std::span<const Eigen::Index> index) {
  if (static_cast<Eigen::Index>(index.size()) != a.rows()) {
    throw ShapeError("pick: one index per row required");
  }
  Tape* t = a.tape();
  Tensor y(a.rows(), 1);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const auto j = index[static_cast<std::size_t>(i)];
    if (j < 0 || j >= a.cols()) throw ShapeError("pick: column index out of range");
    y(i, 0) = a.value()(i, j);
  }
  const std::size_t ia = a.id();
  const auto r = a.rows(), c = a.cols();
  std::vector<Eigen::Index> idx(index.begin(), index.end());
  return t->record(std::move(y), [ia, r, c, idx = std::move(idx)](const Tensor& up,
                                                                  std::vector<Tensor>& g) {
    Tensor full = Tensor::Zero(r, c);
    for (Eigen::Index i = 0; i < r; ++i) full(i, idx[static_cast<std::size_t>(i)]) = up(i, 0);
    accumulate(g, ia, full);
  });
}

}  // namespace mplex::grad
