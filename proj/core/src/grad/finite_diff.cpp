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

#include "mplex/grad/finite_diff.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mplex::grad {

namespace {

double evaluate(const ScalarFn& f, const Tensor& point) {
  Tape tape;
  Var x = tape.leaf(point);
  return f(tape, x).item();
}

}  // namespace

std::string FdReport::summary() const {
  std::ostringstream os;
  os << (pass ? "pass" : "FAIL") << " max_rel_error=" << max_rel_error << " checked=" << checked
     << " skipped=" << skipped.size();
  return os.str();
}

FdReport finite_diff_check(const ScalarFn& f, const Tensor& point, const FdOptions& options) {
  Tensor analytic;
  double center = 0.0;
  {
    Tape tape;
    Var x = tape.leaf(point);
    Var out = f(tape, x);
    center = out.item();
    analytic = tape.backward(out).wrt(x);
  }

  FdReport report;
  const double h = options.step;
  // Row-major flat index so the report is independent of Eigen's storage order.
  for (Eigen::Index r = 0; r < point.rows(); ++r) {
    for (Eigen::Index c = 0; c < point.cols(); ++c) {
      const std::size_t flat = static_cast<std::size_t>(r * point.cols() + c);
      Tensor plus = point, minus = point;
      plus(r, c) += h;
      minus(r, c) -= h;
      const double fp = evaluate(f, plus);
      const double fm = evaluate(f, minus);
      const double forward = (fp - center) / h;
      const double backward = (center - fm) / h;
      const double scale = std::max({1.0, std::abs(forward), std::abs(backward)});
      if (std::abs(forward - backward) > options.kink_tol * scale) {
        report.skipped.push_back(flat);
        continue;
      }
      const double numeric = (fp - fm) / (2.0 * h);
      const double a = analytic(r, c);
      const double denom = std::max({std::abs(a), std::abs(numeric), options.floor});
      const double err = std::abs(a - numeric) / denom;
      if (!std::isfinite(err)) {
        report.pass = false;
        report.max_rel_error = err;
      } else {
        report.max_rel_error = std::max(report.max_rel_error, err);
      }
      ++report.checked;
    }
  }
  if (report.max_rel_error > options.tol) report.pass = false;
  return report;
}

}  // namespace mplex::grad
