#ifndef BROYDEN_LAB_QUADRATURE_HPP
#define BROYDEN_LAB_QUADRATURE_HPP

#include <vector>

namespace broyden_lab {

/// Gauss-Legendre rule mapped to [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes are the roots of P_order found by Newton iteration from the
/// Chebyshev-like initial guesses; exact for polynomials of degree 2*order - 1.
GaussRule gauss_legendre(int order);

}  // namespace broyden_lab

#endif  // BROYDEN_LAB_QUADRATURE_HPP
