#pragma once

// Roots of complex-coefficient polynomials.  Degrees 1-2 use the closed form
// (exact real parts matter for downstream exponent arithmetic); higher degrees
// use Aberth-Ehrlich simultaneous iteration with circle initial guesses.

#include <complex>
#include <vector>

namespace recurflow {

// coeffs lowest degree first, coeffs.back() != 0; returns degree(p) roots.
// Throws RootFindingFailure if the iteration cap (500) is exhausted.
std::vector<std::complex<double>> polynomial_roots(
    const std::vector<std::complex<double>>& coeffs);

}  // namespace recurflow
