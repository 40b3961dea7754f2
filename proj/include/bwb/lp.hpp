#pragma once

#include "bwb/dense.hpp"

#include <utility>
#include <vector>

namespace bwb {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };
enum class RowSense { le, eq, ge };

const char* to_string(LpStatus s);

template <class S> struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  S objective = S(0);
  Vec<S> x;
  int iterations = 0;
  bool optimal() const { return status == LpStatus::optimal; }
};

// Dense two-phase simplex.  Dantzig pricing, switching to Bland's rule after
// a run of degenerate pivots.  With an exact scalar the tolerance is unused.
template <class S> class LinearProgram {
 public:
  using Terms = std::vector<std::pair<int, S>>;

  int add_var(const S& cost = S(0), bool free = true) {
    cost_.push_back(cost);
    free_.push_back(free);
    return int(cost_.size()) - 1;
  }
  void set_cost(int var, const S& c) { cost_[var] = c; }
  void add_row(Terms terms, RowSense sense, const S& rhs) {
    rows_.push_back(Row{std::move(terms), sense, rhs});
  }
  int num_vars() const { return int(cost_.size()); }
  int num_rows() const { return int(rows_.size()); }

  LpSolution<S> minimize(int max_iter = 100000, double tol = 1e-11) const;

 private:
  struct Row {
    Terms terms;
    RowSense sense;
    S rhs;
  };
  std::vector<S> cost_;
  std::vector<bool> free_;
  std::vector<Row> rows_;
};

extern template class LinearProgram<double>;
extern template class LinearProgram<Rational>;

}  // namespace bwb
