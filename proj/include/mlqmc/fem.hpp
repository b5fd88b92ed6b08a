#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace mlqmc::fem {

// psi(x) = t0 sin 4x + t1 cos 4x + t2 sin 8x + t3 cos 8x
struct TrigForcing {
  std::array<double, 4> theta{};
  double operator()(double x) const;
};

class FemSolution {
 public:
  FemSolution(double h, std::size_t n_elements, std::vector<double> nodal_values);
  double h() const { return h_; }
  std::size_t n_elements() const { return n_elements_; }
  // Interior nodes 1..n_elements-1; boundary values are zero.
  const std::vector<double>& nodal_values() const { return nodal_; }

 private:
  double h_;
  std::size_t n_elements_;
  std::vector<double> nodal_;
};

std::size_t element_count(double h);
FemSolution solve(const TrigForcing& forcing, double h);
double evaluate(const FemSolution& sol, double x);
double exact_solution(const TrigForcing& forcing, double x);

}  // namespace mlqmc::fem
