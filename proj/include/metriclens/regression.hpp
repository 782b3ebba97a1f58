// Copyright 2026 The metriclens Authors
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

#pragma once

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "metriclens/error.hpp"
#include "metriclens/strings.hpp"
#include "metriclens/types.hpp"

namespace metriclens {

// ---------------------------------------------------------------------------
// z-normalization
// ---------------------------------------------------------------------------

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Population standard deviation (divide by n, not n-1).
inline double population_std(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

/// Subtracts the mean and divides by the population standard deviation.
/// `name` only labels error messages.
inline std::vector<double> z_normalize(const std::vector<double>& values,
                                       const std::string& name = "column") {
  if (values.size() < 2)
    fail_data("z_normalize: ", name, " has ", values.size(),
              " values, need at least 2");
  const double m = mean_of(values);
  const double sd = population_std(values);
  if (sd <= 0.0)
    fail_data("z_normalize: ", name,
              " is constant and cannot be normalized (no signal)");
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - m) / sd;
  return out;
}

// ---------------------------------------------------------------------------
// Small dense symmetric linear algebra (designs here have <= 6 columns)
// ---------------------------------------------------------------------------

namespace detail {

using Matrix = std::vector<std::vector<double>>;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
inline std::vector<double> jacobi_eigenvalues(Matrix a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-300) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double tau = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (tau >= 0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eigs(n);
  for (std::size_t i = 0; i < n; ++i) eigs[i] = a[i][i];
  return eigs;
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
inline Matrix cholesky(const Matrix& a) {
  const std::size_t n = a.size();
  Matrix l(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = a[i][j];
      for (std::size_t k = 0; k < j; ++k) sum -= l[i][k] * l[j][k];
      if (i == j) {
        if (sum <= 0.0)
          fail_data("Cholesky factorization failed: design matrix is not "
                    "positive definite");
        l[i][i] = std::sqrt(sum);
      } else {
        l[i][j] = sum / l[j][j];
      }
    }
  }
  return l;
}

/// Solves (L L^T) x = b given the Cholesky factor L.
inline std::vector<double> cholesky_solve(const Matrix& l,
                                          std::vector<double> b) {
  const std::size_t n = l.size();
  for (std::size_t i = 0; i < n; ++i) {  // forward: L z = b
    for (std::size_t k = 0; k < i; ++k) b[i] -= l[i][k] * b[k];
    b[i] /= l[i][i];
  }
  for (std::size_t ii = n; ii-- > 0;) {  // backward: L^T x = z
    for (std::size_t k = ii + 1; k < n; ++k) b[ii] -= l[k][ii] * b[k];
    b[ii] /= l[ii][ii];
  }
  return b;
}

/// Inverse of (L L^T) column by column.
inline Matrix cholesky_inverse(const Matrix& l) {
  const std::size_t n = l.size();
  Matrix inv(n, std::vector<double>(n, 0.0));
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<double> e(n, 0.0);
    e[c] = 1.0;
    std::vector<double> col = cholesky_solve(l, std::move(e));
    for (std::size_t r = 0; r < n; ++r) inv[r][c] = col[r];
  }
  return inv;
}

inline double pearson_raw(const std::vector<double>& xs,
                          const std::vector<double>& ys) {
  const double mx = mean_of(xs), my = mean_of(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double denom = std::sqrt(sxx) * std::sqrt(syy);
  return denom == 0.0 ? 0.0 : sxy / denom;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// OLS fit
// ---------------------------------------------------------------------------

struct RegressionFit {
  std::string metric;
  std::vector<FactorKind> factors;    // column order of the vectors below
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  std::vector<double> p_values;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t n_rows = 0;
  std::size_t dropped_rows = 0;
};

/// R^2 = 1 - SSE/SST: 1 for a perfect fit, 0 for predicting the mean,
/// negative when worse than the mean baseline.
inline double r_squared(const std::vector<double>& predictions,
                        const std::vector<double>& targets) {
  if (predictions.size() != targets.size())
    fail_data("r_squared: length mismatch (", predictions.size(), " vs ",
              targets.size(), ")");
  if (targets.size() < 2)
    fail_data("r_squared: need at least 2 observations");
  const double mean = mean_of(targets);
  double sse = 0.0, sst = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    sse += (targets[i] - predictions[i]) * (targets[i] - predictions[i]);
    sst += (targets[i] - mean) * (targets[i] - mean);
  }
  if (sst == 0.0) fail_data("r_squared: targets are constant (SST = 0)");
  return 1.0 - sse / sst;
}

/// Ordinary least squares with an intercept, solved via normal equations.
/// Two-sided coefficient p-values come from the t-distribution with
/// n - k - 1 degrees of freedom and standard errors sigma^2 (X^T X)^-1.
inline RegressionFit fit_ols(const FactorTable& table) {
  const std::size_t n = table.n_rows();
  const std::size_t k = table.n_factors();
  if (k == 0) fail_data("fit_ols: no factor columns");
  if (n <= k + 1)
    fail_data("fit_ols: ", n, " rows cannot identify ", k,
              " coefficients plus an intercept");

  // Normal equations, with column 0 the implicit intercept of ones.
  const std::size_t d = k + 1;
  detail::Matrix xtx(d, std::vector<double>(d, 0.0));
  std::vector<double> xty(d, 0.0);
  xtx[0][0] = static_cast<double>(n);
  for (std::size_t i = 0; i < k; ++i) {
    const std::vector<double>& ci = table.column(i);
    double s = 0.0;
    for (double v : ci) s += v;
    xtx[0][i + 1] = xtx[i + 1][0] = s;
    for (std::size_t j = i; j < k; ++j) {
      const std::vector<double>& cj = table.column(j);
      double dot = 0.0;
      for (std::size_t r = 0; r < n; ++r) dot += ci[r] * cj[r];
      xtx[i + 1][j + 1] = xtx[j + 1][i + 1] = dot;
    }
  }
  {
    double s = 0.0;
    for (double v : table.target()) s += v;
    xty[0] = s;
  }
  for (std::size_t i = 0; i < k; ++i) {
    const std::vector<double>& ci = table.column(i);
    double dot = 0.0;
    for (std::size_t r = 0; r < n; ++r) dot += ci[r] * table.target()[r];
    xty[i + 1] = dot;
  }

  // Conditioning check before solving; on failure, name the culprits.
  std::vector<double> eigs = detail::jacobi_eigenvalues(xtx);
  double emax = 0.0, emin = std::numeric_limits<double>::infinity();
  for (double e : eigs) {
    emax = std::max(emax, std::abs(e));
    emin = std::min(emin, std::abs(e));
  }
  if (emin <= 0.0 || emax / emin > 1e12) {
    std::string culprits;
    for (std::size_t i = 0; i < k; ++i) {
      if (population_std(table.column(i)) == 0.0) {
        if (!culprits.empty()) culprits += ", ";
        culprits += detail::concat(factor_name(table.factors()[i]), " (constant)");
      }
      for (std::size_t j = i + 1; j < k; ++j) {
        if (std::abs(detail::pearson_raw(table.column(i), table.column(j))) >
            0.9999) {
          if (!culprits.empty()) culprits += ", ";
          culprits += detail::concat(factor_name(table.factors()[i]), "~",
                                     factor_name(table.factors()[j]));
        }
      }
    }
    fail_data("fit_ols: near-singular design matrix (condition number ",
              emin <= 0.0 ? std::numeric_limits<double>::infinity() : emax / emin,
              "); collinear columns: ",
              culprits.empty() ? "none identified pairwise" : culprits);
  }

  detail::Matrix l = detail::cholesky(xtx);
  std::vector<double> beta = detail::cholesky_solve(l, xty);
  detail::Matrix xtx_inv = detail::cholesky_inverse(l);

  // Residuals and fit quality.
  std::vector<double> predictions(n);
  for (std::size_t r = 0; r < n; ++r) {
    double p = beta[0];
    for (std::size_t i = 0; i < k; ++i) p += beta[i + 1] * table.column(i)[r];
    predictions[r] = p;
  }
  double sse = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double e = table.target()[r] - predictions[r];
    sse += e * e;
  }
  const std::size_t df = n - k - 1;
  const double sigma2 = sse / static_cast<double>(df);

  RegressionFit fit;
  fit.metric = table.target_name();
  fit.factors = table.factors();
  fit.intercept = beta[0];
  fit.n_rows = n;
  fit.dropped_rows = table.dropped_rows();
  fit.r_squared = r_squared(predictions, table.target());

  const boost::math::students_t dist(static_cast<double>(df));
  for (std::size_t i = 0; i < k; ++i) {
    const double b = beta[i + 1];
    const double se = std::sqrt(sigma2 * xtx_inv[i + 1][i + 1]);
    double p;
    if (se == 0.0) {
      p = (b == 0.0) ? 1.0 : 0.0;  // exact fit: no residual uncertainty
    } else {
      const double t = std::abs(b / se);
      p = 2.0 * boost::math::cdf(boost::math::complement(dist, t));
    }
    fit.coefficients.push_back(b);
    fit.std_errors.push_back(se);
    fit.p_values.push_back(p);
  }
  return fit;
}

/// Evaluates the fitted linear model on one factor row.
inline double predict(const RegressionFit& fit,
                      const std::vector<std::pair<FactorKind, double>>& row) {
  double out = fit.intercept;
  for (std::size_t i = 0; i < fit.factors.size(); ++i) {
    bool found = false;
    for (const auto& [kind, value] : row) {
      if (kind == fit.factors[i]) {
        out += fit.coefficients[i] * value;
        found = true;
        break;
      }
    }
    if (!found)
      fail_data("predict: row is missing factor ", factor_name(fit.factors[i]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

namespace detail {

/// Positions of `fit.factors` in canonical SEM/SYN/LEX/MOR/CLB order.
inline std::vector<std::size_t> canonical_order(const RegressionFit& fit) {
  std::vector<std::size_t> order;
  for (FactorKind k : all_factor_kinds())
    for (std::size_t i = 0; i < fit.factors.size(); ++i)
      if (fit.factors[i] == k) order.push_back(i);
  return order;
}

}  // namespace detail

/// One row in the layout of the regression result tables: metric name,
/// per-factor coefficients (two decimals, '*' marking p >= 0.05), R^2.
inline std::string fit_report_tsv(const RegressionFit& fit) {
  const std::vector<std::size_t> order = detail::canonical_order(fit);
  std::string header = "metric";
  std::string row = fit.metric;
  for (std::size_t i : order) {
    header += detail::concat('\t', factor_name(fit.factors[i]));
    row += detail::concat('\t', format_fixed(fit.coefficients[i], 2),
                          fit.p_values[i] >= 0.05 ? "*" : "");
  }
  header += "\tR2\n";
  row += detail::concat('\t', format_fixed(fit.r_squared, 2), '\n');
  return header + row;
}

}  // namespace metriclens
