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

#include "metriclens/regression.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "metriclens/random.hpp"

namespace metriclens {
namespace {

// Independent oracle: solve (X^T X) b = X^T y by Gauss-Jordan elimination
// with partial pivoting on the fully materialized design matrix. Shares no
// code with the Cholesky path under test.
std::vector<double> oracle_ols(const std::vector<std::vector<double>>& rows,
                               const std::vector<double>& y) {
  const std::size_t n = rows.size();
  const std::size_t d = rows[0].size() + 1;  // + intercept
  std::vector<std::vector<double>> aug(d, std::vector<double>(d + 1, 0.0));
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<double> x(d, 1.0);
    for (std::size_t c = 1; c < d; ++c) x[c] = rows[r][c - 1];
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) aug[i][j] += x[i] * x[j];
      aug[i][d] += x[i] * y[r];
    }
  }
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < d; ++r)
      if (std::fabs(aug[r][col]) > std::fabs(aug[pivot][col])) pivot = r;
    std::swap(aug[col], aug[pivot]);
    const double p = aug[col][col];
    for (std::size_t j = col; j <= d; ++j) aug[col][j] /= p;
    for (std::size_t r = 0; r < d; ++r) {
      if (r == col) continue;
      const double f = aug[r][col];
      for (std::size_t j = col; j <= d; ++j) aug[r][j] -= f * aug[col][j];
    }
  }
  std::vector<double> beta(d);
  for (std::size_t i = 0; i < d; ++i) beta[i] = aug[i][d];
  return beta;  // beta[0] is the intercept
}

FactorTable make_table(const std::vector<FactorKind>& kinds,
                       const std::vector<std::vector<double>>& rows,
                       const std::vector<double>& y) {
  FactorTable t(kinds, "metric");
  for (std::size_t r = 0; r < rows.size(); ++r)
    t.add_row("r" + std::to_string(r), rows[r], y[r]);
  return t;
}

TEST(ZNormalize, ZeroMeanUnitVariance) {
  const std::vector<double> z = z_normalize({1.0, 2.0, 3.0, 4.0});
  EXPECT_NEAR(mean_of(z), 0.0, 1e-15);
  EXPECT_NEAR(population_std(z), 1.0, 1e-15);
  // Population convention: std of {1,2,3,4} is sqrt(5)/2.
  EXPECT_NEAR(z[3], (4.0 - 2.5) / (std::sqrt(5.0) / 2.0), 1e-15);
}

TEST(ZNormalize, ConstantColumnIsAnError) {
  try {
    z_normalize({2.0, 2.0, 2.0}, "SYN");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("SYN"), std::string::npos);
  }
}

TEST(FitOls, MatchesGaussJordanOracle) {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 40 + rng.below(40);
    const std::size_t k = 2 + rng.below(3);
    std::vector<std::vector<double>> rows(n, std::vector<double>(k));
    std::vector<double> y(n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < k; ++c) rows[r][c] = rng.normal();
      y[r] = rng.normal();
    }
    std::vector<FactorKind> kinds(all_factor_kinds().begin(),
                                  all_factor_kinds().begin() + k);
    const RegressionFit fit = fit_ols(make_table(kinds, rows, y));
    const std::vector<double> beta = oracle_ols(rows, y);
    ASSERT_NEAR(fit.intercept, beta[0], 1e-8);
    for (std::size_t c = 0; c < k; ++c)
      ASSERT_NEAR(fit.coefficients[c], beta[c + 1], 1e-8)
          << "trial " << trial << " coefficient " << c;
  }
}

TEST(FitOls, RecoversPlantedCoefficients) {
  // Planted linear model with per-factor coefficients over z-scored
  // regressors; noise sigma = 0.1.
  const std::vector<double> planted = {0.28, 0.15, 0.64, -0.06};
  const std::size_t n = 400;
  Rng rng(37);
  std::vector<std::vector<double>> rows(n, std::vector<double>(4));
  std::vector<double> y(n);
  for (std::size_t r = 0; r < n; ++r) {
    double signal = 0.0;
    for (std::size_t c = 0; c < 4; ++c) {
      rows[r][c] = rng.normal();
      signal += planted[c] * rows[r][c];
    }
    y[r] = signal + 0.1 * rng.normal();
  }
  const RegressionFit fit = fit_ols(make_table(
      {FactorKind::SEM, FactorKind::SYN, FactorKind::LEX, FactorKind::MOR},
      rows, y));
  for (std::size_t c = 0; c < 4; ++c)
    EXPECT_NEAR(fit.coefficients[c], planted[c], 0.05);
  EXPECT_LT(std::fabs(fit.intercept), 0.05);
  // All four planted effects are far larger than the noise floor.
  for (double p : fit.p_values) EXPECT_LT(p, 1e-4);
  EXPECT_GT(fit.r_squared, 0.9);
  EXPECT_EQ(fit.n_rows, n);
}

TEST(FitOls, PerfectFitHasUnitRSquaredAndZeroPValues) {
  Rng rng(41);
  std::vector<std::vector<double>> rows(10, std::vector<double>(1));
  std::vector<double> y(10);
  for (std::size_t r = 0; r < 10; ++r) {
    rows[r][0] = rng.normal();
    y[r] = 2.0 * rows[r][0] + 1.0;
  }
  const RegressionFit fit =
      fit_ols(make_table({FactorKind::LEX}, rows, y));
  EXPECT_NEAR(fit.coefficients[0], 2.0, 1e-10);
  EXPECT_NEAR(fit.intercept, 1.0, 1e-10);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-10);
  // Zero residual variance: the coefficient is infinitely significant.
  EXPECT_EQ(fit.p_values[0], 0.0);
}

TEST(FitOls, DuplicateColumnsAreReportedAsCollinear) {
  Rng rng(43);
  std::vector<std::vector<double>> rows(20, std::vector<double>(2));
  std::vector<double> y(20);
  for (auto& r : rows) {
    r[0] = rng.normal();
    r[1] = r[0];  // exact copy
  }
  for (double& v : y) v = rng.normal();
  try {
    fit_ols(make_table({FactorKind::SYN, FactorKind::LEX}, rows, y));
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("SYN"), std::string::npos) << msg;
    EXPECT_NE(msg.find("LEX"), std::string::npos) << msg;
  }
}

TEST(FitOls, ConstantColumnIsReportedByName) {
  Rng rng(47);
  std::vector<std::vector<double>> rows(20, std::vector<double>(2));
  std::vector<double> y(20);
  for (auto& r : rows) {
    r[0] = rng.normal();
    r[1] = 3.0;  // constant, collinear with the intercept
  }
  for (double& v : y) v = rng.normal();
  try {
    fit_ols(make_table({FactorKind::SEM, FactorKind::MOR}, rows, y));
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("MOR"), std::string::npos) << e.what();
  }
}

TEST(FitOls, RefusesUnderdeterminedSystems) {
  std::vector<std::vector<double>> rows = {{1.0, 2.0}, {2.0, 1.0}, {0.5, 0.25}};
  std::vector<double> y = {1.0, 2.0, 3.0};
  EXPECT_THROW(
      fit_ols(make_table({FactorKind::SEM, FactorKind::SYN}, rows, y)),
      DataError);
}

TEST(RSquared, KnownValues) {
  EXPECT_EQ(r_squared({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}), 1.0);
  // Predicting the mean scores exactly zero.
  EXPECT_NEAR(r_squared({2.0, 2.0, 2.0}, {1.0, 2.0, 3.0}), 0.0, 1e-15);
  EXPECT_THROW(r_squared({1.0}, {1.0, 2.0}), DataError);
  EXPECT_THROW(r_squared({1.0, 2.0}, {5.0, 5.0}), DataError);
}

TEST(Predict, AppliesCoefficientsByFactor) {
  RegressionFit fit;
  fit.factors = {FactorKind::SEM, FactorKind::LEX};
  fit.coefficients = {2.0, -1.0};
  fit.intercept = 0.5;
  EXPECT_EQ(predict(fit, {{FactorKind::LEX, 3.0}, {FactorKind::SEM, 1.0}}),
            0.5 + 2.0 * 1.0 - 1.0 * 3.0);
  EXPECT_THROW(predict(fit, {{FactorKind::SEM, 1.0}}), DataError);
}

TEST(FitReportTsv, CanonicalLayoutWithSignificanceStars) {
  RegressionFit fit;
  fit.metric = "toymetric";
  // Deliberately scrambled storage order; the report must re-order.
  fit.factors = {FactorKind::LEX, FactorKind::SEM, FactorKind::MOR,
                 FactorKind::SYN};
  fit.coefficients = {0.638, 0.281, -0.055, 0.149};
  fit.p_values = {0.001, 0.02, 0.3, 0.06};
  fit.r_squared = 0.787;
  EXPECT_EQ(fit_report_tsv(fit),
            "metric\tSEM\tSYN\tLEX\tMOR\tR2\n"
            "toymetric\t0.28\t0.15*\t0.64\t-0.06*\t0.79\n");
}

}  // namespace
}  // namespace metriclens
