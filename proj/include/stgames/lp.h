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

#ifndef STGAMES_LP_H_
#define STGAMES_LP_H_

#include <limits>
#include <vector>

namespace stgames {

// Dense linear programs solved by a two-phase tableau simplex with Bland's
// smallest-index pivot rule. Intended for desk-scale problems: at most
// kMaxLpVariables variables and kMaxLpConstraints rows.

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kLpTolerance = 1e-9;
inline constexpr int kMaxLpVariables = 64;
inline constexpr long kMaxLpConstraints = 1L << 20;
inline constexpr int kMaxPivots = 10000;

enum class Relation { kLessEqual, kEqual, kGreaterEqual };
enum class Sense { kMinimize, kMaximize };

struct Constraint {
  std::vector<double> coefficients;
  Relation relation = Relation::kLessEqual;
  double bound = 0.0;
};

struct LinearProgram {
  Sense sense = Sense::kMinimize;
  std::vector<double> objective;
  std::vector<Constraint> constraints;
  // Per-variable bounds. Empty means the default: lower 0, upper +inf.
  // Use -kInfinity / kInfinity for free directions.
  std::vector<double> lower;
  std::vector<double> upper;

  int num_variables() const { return static_cast<int>(objective.size()); }

  void AddConstraint(std::vector<double> coefficients, Relation relation,
                     double bound) {
    constraints.push_back({std::move(coefficients), relation, bound});
  }
  // Marks every variable as unbounded in both directions.
  void MakeFree() {
    lower.assign(objective.size(), -kInfinity);
    upper.assign(objective.size(), kInfinity);
  }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

const char* ToString(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> x;  // primal point (optimal status only)
  double value = 0.0;     // objective . x
  // One multiplier per constraint: the rate of change of the optimal value
  // with respect to that constraint's bound. For a minimization, binding
  // >= rows have nonnegative multipliers.
  std::vector<double> duals;
  int pivots = 0;
};

// Throws DomainError on dimension mismatch or non-finite coefficients,
// CapacityError above the size limits and IterationLimitError when the pivot
// budget is exhausted.
LpSolution SolveLp(const LinearProgram& lp);

}  // namespace stgames

#endif  // STGAMES_LP_H_
