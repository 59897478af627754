// Copyright 2026 The stgames Authors
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

#include "stgames/lp.h"

#include <cmath>
#include <cstddef>
#include <string>

#include <fmt/format.h>

#include "stgames/errors.h"

namespace stgames {
namespace {

// Internal standard form: minimize c.y subject to A y <= b, y >= 0.
// Original variable j equals offset[j] + sum over its columns of sign * y.
struct Column {
  int variable;
  double sign;
};

struct RowOrigin {
  int constraint;  // -1 for rows generated from finite upper bounds
  double sign;     // d(internal rhs) / d(original bound)
};

class Tableau {
 public:
  Tableau(int rows, int structural)
      : rows_(rows),
        structural_(structural),
        aux_(structural + rows),
        cols_(structural + rows + 1),
        stride_(cols_ + 1),
        data_(static_cast<std::size_t>(rows) * stride_, 0.0),
        basis_(rows),
        phase1_(cols_, 0.0),
        phase2_(cols_, 0.0) {
    for (int i = 0; i < rows; ++i) {
      basis_[i] = structural + i;
      at(i, structural + i) = 1.0;
    }
  }

  double& at(int row, int col) {
    return data_[static_cast<std::size_t>(row) * stride_ + col];
  }
  double& rhs(int row) { return at(row, cols_); }

  int rows() const { return rows_; }
  int aux() const { return aux_; }
  int cols() const { return cols_; }
  int basic(int row) const { return basis_[row]; }
  std::vector<double>& phase1() { return phase1_; }
  std::vector<double>& phase2() { return phase2_; }
  int pivots() const { return pivots_; }

  void Pivot(int row, int col) {
    if (++pivots_ > kMaxPivots) {
      throw IterationLimitError(
          fmt::format("simplex exceeded {} pivots", kMaxPivots));
    }
    double* pivot_row = &data_[static_cast<std::size_t>(row) * stride_];
    const double inv = 1.0 / pivot_row[col];
    for (int j = 0; j < stride_; ++j) pivot_row[j] *= inv;
    pivot_row[col] = 1.0;
    for (int i = 0; i < rows_; ++i) {
      if (i == row) continue;
      double* r = &data_[static_cast<std::size_t>(i) * stride_];
      const double factor = r[col];
      if (factor == 0.0) continue;
      for (int j = 0; j < stride_; ++j) r[j] -= factor * pivot_row[j];
      r[col] = 0.0;
    }
    EliminateFrom(phase1_, pivot_row, col);
    EliminateFrom(phase2_, pivot_row, col);
    basis_[row] = col;
  }

  // Price out the basic columns so the objective row holds reduced costs.
  void Canonicalize(std::vector<double>& objective) {
    for (int i = 0; i < rows_; ++i) {
      const double cost = objective[basis_[i]];
      if (cost == 0.0) continue;
      const double* r = &data_[static_cast<std::size_t>(i) * stride_];
      for (int j = 0; j < cols_; ++j) objective[j] -= cost * r[j];
      objective[basis_[i]] = 0.0;
    }
  }

  // Bland's rule. Returns false at optimality; sets *unbounded when the
  // entering column has no positive entry.
  bool Iterate(const std::vector<double>& objective, int allowed_cols,
               bool* unbounded) {
    int entering = -1;
    for (int j = 0; j < allowed_cols; ++j) {
      if (objective[j] < -kLpTolerance) {
        entering = j;
        break;
      }
    }
    if (entering < 0) return false;
    int leaving = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < rows_; ++i) {
      const double a = at(i, entering);
      if (a <= kLpTolerance) continue;
      const double ratio = rhs(i) / a;
      if (leaving < 0 || ratio < best_ratio - 1e-12) {
        leaving = i;
        best_ratio = ratio;
      } else if (ratio <= best_ratio + 1e-12 && basis_[i] < basis_[leaving]) {
        leaving = i;
      }
    }
    if (leaving < 0) {
      *unbounded = true;
      return false;
    }
    Pivot(leaving, entering);
    return true;
  }

 private:
  void EliminateFrom(std::vector<double>& objective, const double* pivot_row,
                     int col) {
    const double factor = objective[col];
    if (factor == 0.0) return;
    for (int j = 0; j < cols_; ++j) objective[j] -= factor * pivot_row[j];
    objective[col] = 0.0;
  }

  int rows_;
  int structural_;
  int aux_;
  int cols_;
  int stride_;
  std::vector<double> data_;
  std::vector<int> basis_;
  std::vector<double> phase1_;
  std::vector<double> phase2_;
  int pivots_ = 0;
};

void Validate(const LinearProgram& lp) {
  const int n = lp.num_variables();
  if (n > kMaxLpVariables) {
    throw CapacityError(fmt::format("LP has {} variables; limit is {}", n,
                                    kMaxLpVariables));
  }
  if (static_cast<long>(lp.constraints.size()) > kMaxLpConstraints) {
    throw CapacityError(fmt::format("LP has {} constraints; limit is {}",
                                    lp.constraints.size(), kMaxLpConstraints));
  }
  for (double c : lp.objective) {
    if (!std::isfinite(c)) throw DomainError("non-finite objective coefficient");
  }
  for (std::size_t k = 0; k < lp.constraints.size(); ++k) {
    const Constraint& row = lp.constraints[k];
    if (static_cast<int>(row.coefficients.size()) != n) {
      throw DomainError(fmt::format(
          "constraint {} has {} coefficients; objective has {}", k,
          row.coefficients.size(), n));
    }
    for (double a : row.coefficients) {
      if (!std::isfinite(a)) {
        throw DomainError(fmt::format("non-finite coefficient in constraint {}", k));
      }
    }
    if (!std::isfinite(row.bound)) {
      throw DomainError(fmt::format("non-finite bound in constraint {}", k));
    }
  }
  if (!lp.lower.empty() && static_cast<int>(lp.lower.size()) != n) {
    throw DomainError("lower-bound vector does not match variable count");
  }
  if (!lp.upper.empty() && static_cast<int>(lp.upper.size()) != n) {
    throw DomainError("upper-bound vector does not match variable count");
  }
  for (double l : lp.lower) {
    if (std::isnan(l) || l == kInfinity) throw DomainError("invalid lower bound");
  }
  for (double u : lp.upper) {
    if (std::isnan(u) || u == -kInfinity) throw DomainError("invalid upper bound");
  }
}

}  // namespace

const char* ToString(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
  }
  return "unknown";
}

LpSolution SolveLp(const LinearProgram& lp) {
  Validate(lp);
  const int n = lp.num_variables();
  auto lower_of = [&](int j) { return lp.lower.empty() ? 0.0 : lp.lower[j]; };
  auto upper_of = [&](int j) {
    return lp.upper.empty() ? kInfinity : lp.upper[j];
  };

  LpSolution solution;
  solution.duals.assign(lp.constraints.size(), 0.0);
  for (int j = 0; j < n; ++j) {
    if (lower_of(j) > upper_of(j)) return solution;  // empty box
  }

  // Variable substitution.
  std::vector<Column> columns;
  std::vector<double> offset(n, 0.0);
  std::vector<std::pair<int, double>> bound_rows;  // (column, capacity)
  for (int j = 0; j < n; ++j) {
    const double lo = lower_of(j);
    const double hi = upper_of(j);
    if (std::isfinite(lo)) {
      offset[j] = lo;
      columns.push_back({j, 1.0});
      if (std::isfinite(hi)) {
        bound_rows.emplace_back(static_cast<int>(columns.size()) - 1, hi - lo);
      }
    } else if (std::isfinite(hi)) {
      offset[j] = hi;
      columns.push_back({j, -1.0});
    } else {
      columns.push_back({j, 1.0});
      columns.push_back({j, -1.0});
    }
  }
  const int ny = static_cast<int>(columns.size());

  // Rows in <= form.
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  std::vector<RowOrigin> origins;
  auto push_row = [&](const Constraint& c, int index, double sign) {
    std::vector<double> row(ny);
    double shifted = c.bound;
    for (int j = 0; j < n; ++j) shifted -= c.coefficients[j] * offset[j];
    for (int k = 0; k < ny; ++k) {
      row[k] = sign * c.coefficients[columns[k].variable] * columns[k].sign;
    }
    rows.push_back(std::move(row));
    rhs.push_back(sign * shifted);
    origins.push_back({index, sign});
  };
  for (std::size_t k = 0; k < lp.constraints.size(); ++k) {
    const Constraint& c = lp.constraints[k];
    const int index = static_cast<int>(k);
    switch (c.relation) {
      case Relation::kLessEqual:
        push_row(c, index, 1.0);
        break;
      case Relation::kGreaterEqual:
        push_row(c, index, -1.0);
        break;
      case Relation::kEqual:
        push_row(c, index, 1.0);
        push_row(c, index, -1.0);
        break;
    }
  }
  for (const auto& [column, capacity] : bound_rows) {
    std::vector<double> row(ny, 0.0);
    row[column] = 1.0;
    rows.push_back(std::move(row));
    rhs.push_back(capacity);
    origins.push_back({-1, 1.0});
  }

  const int m = static_cast<int>(rows.size());
  Tableau tab(m, ny);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < ny; ++k) tab.at(i, k) = rows[i][k];
    tab.rhs(i) = rhs[i];
  }
  const double sense_sign = lp.sense == Sense::kMinimize ? 1.0 : -1.0;
  for (int k = 0; k < ny; ++k) {
    tab.phase2()[k] = sense_sign * lp.objective[columns[k].variable] * columns[k].sign;
  }

  // Phase 1 with a single auxiliary column entering every row with -1.
  int most_negative = -1;
  for (int i = 0; i < m; ++i) {
    if (tab.rhs(i) < 0.0 &&
        (most_negative < 0 || tab.rhs(i) < tab.rhs(most_negative))) {
      most_negative = i;
    }
  }
  const int aux = tab.aux();
  bool unbounded = false;
  if (most_negative >= 0) {
    for (int i = 0; i < m; ++i) tab.at(i, aux) = -1.0;
    tab.phase1()[aux] = 1.0;
    tab.Pivot(most_negative, aux);
    tab.Canonicalize(tab.phase1());
    while (tab.Iterate(tab.phase1(), tab.cols(), &unbounded)) {
    }
    int aux_row = -1;
    double aux_value = 0.0;
    for (int i = 0; i < m; ++i) {
      if (tab.basic(i) == aux) {
        aux_row = i;
        aux_value = tab.rhs(i);
      }
    }
    if (aux_value > kLpTolerance) {
      solution.pivots = tab.pivots();
      return solution;
    }
    if (aux_row >= 0) {
      for (int j = 0; j < aux; ++j) {
        if (std::abs(tab.at(aux_row, j)) > kLpTolerance) {
          tab.Pivot(aux_row, j);
          break;
        }
      }
    }
    for (int i = 0; i < m; ++i) {
      if (tab.basic(i) != aux) tab.at(i, aux) = 0.0;
    }
  }
  tab.Canonicalize(tab.phase2());
  unbounded = false;
  while (tab.Iterate(tab.phase2(), aux, &unbounded)) {
  }
  solution.pivots = tab.pivots();
  if (unbounded) {
    solution.status = LpStatus::kUnbounded;
    return solution;
  }

  std::vector<double> y(ny, 0.0);
  for (int i = 0; i < m; ++i) {
    const int b = tab.basic(i);
    if (b < ny) y[b] = std::max(0.0, tab.rhs(i));
  }
  solution.status = LpStatus::kOptimal;
  solution.x = offset;
  for (int k = 0; k < ny; ++k) {
    solution.x[columns[k].variable] += columns[k].sign * y[k];
  }
  solution.value = 0.0;
  for (int j = 0; j < n; ++j) solution.value += lp.objective[j] * solution.x[j];
  for (int i = 0; i < m; ++i) {
    const RowOrigin& origin = origins[i];
    if (origin.constraint < 0) continue;
    const double multiplier = -tab.phase2()[ny + i];
    solution.duals[origin.constraint] += sense_sign * origin.sign * multiplier;
  }
  return solution;
}

}  // namespace stgames
