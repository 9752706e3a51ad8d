#pragma once

// The linearized system xi_p = h_p + (1/p) sum_{q=2}^{p-1} G(q/p) xi_q:
// direct simulation, the moment/scaled-moment transformation, transition
// matrices M_p, matrix product norm scans, and the first-order matrix
// eigenvalue cross-check.

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "recurflow/kernel.hpp"
#include "recurflow/numerics.hpp"

namespace recurflow {

struct LinearTrace {
  std::int64_t P = 0;
  MonomialKernel kernel;
  std::vector<double> xi;  // index 0..1 unused; xi[2] is the seed
  std::vector<double> h;   // forcing, zero for homogeneous runs; h[p] enters at p >= 3
};

// Direct O(P^2) evaluation.  The kernel must be real-valued; h may be empty
// (homogeneous) or sized >= P+1.  Throws ConfigError on bad inputs.
LinearTrace run_linear(const MonomialKernel& kernel, double xi2,
                       const std::vector<double>& h, std::int64_t P);

// Worst absolute defect of xi_p - h_p - (1/p) sum G(q/p) xi_q over 3 <= p <= P.
double linear_residual(const LinearTrace& trace);

struct MomentState {
  int N = 0;
  // B[k][p] = sum_{q=2}^p xi_q q^{alpha_k};  B_tilde[k][p] = p^{-alpha_k-1} B[k][p].
  std::vector<std::vector<Complex>> B;
  std::vector<std::vector<Complex>> B_tilde;
  double reconstruction_residual = 0.0;  // worst |xi_p - h_p - sum_k C_k p^{-alpha_k-1} B[k][p-1]|
  double sup_B_tilde_norm = 0.0;         // max_p euclidean norm of (B_tilde[.][p])
};

MomentState moment_transform(const LinearTrace& trace);

struct TransitionMatrix {
  std::int64_t p = 0;
  ComplexMatrix entries;  // M_p^{(k,j)} = (1-1/p)^{alpha_k+1} d_kj + C_j (1-1/p)^{alpha_j+1}/p
};

// Complex powers use exp((alpha+1) log(1-1/p)) with the principal log of the
// positive real base.
TransitionMatrix transition_matrix(const MonomialKernel& kernel, std::int64_t p);

// Evolves the scaled moments with M_p and reads xi back out; cross-validates
// the direct convolution path.
std::vector<double> linear_via_moments(const MonomialKernel& kernel, double xi2,
                                       const std::vector<double>& h, std::int64_t P);

struct ScanEntry {
  std::int64_t q0 = 0;
  double sup_norm = 0.0;
  std::vector<std::pair<std::int64_t, double>> profile;  // log-spaced (p, norm)
  bool plateau_detected = false;  // running sup changed < 5% over the last doubling
};

struct ScanReport {
  std::vector<ScanEntry> entries;
  double overall_sup = 0.0;
};

// For each q0, accumulates ||M_p ... M_{q0}||_2 for p <= P (new factors on the
// left) and records the running sup.  Requires max Re sigma(kernel) <= 0 —
// apply shift_kernel with a maximal root first; throws HypothesisViolated
// otherwise and NormBlowup past norm_cap.
ScanReport product_norm_scan(const MonomialKernel& kernel,
                             const std::vector<std::int64_t>& q0_set, std::int64_t P,
                             double norm_cap = 1e8);

struct EigenReport {
  ComplexMatrix m_tilde;                 // C_j - (alpha_k+1) d_kj
  std::vector<Complex> eigenvalues;     // from the characteristic polynomial
  std::vector<Complex> expected_roots;  // characteristic roots of the kernel
  double max_mismatch = 0.0;
  ComplexMatrix S;          // eigenvector matrix S[k][i] = 1/(sigma_i + alpha_k + 1)
  double s_condition = 0.0;  // ||S|| ||S^{-1}||
};

// First-order transition matrix p(M_p - I) -> m_tilde; its eigenvalues must
// coincide with the kernel's characteristic roots.
EigenReport eigen_check(const MonomialKernel& kernel);

// ||S^{-1} M_p S||_2 for the eigen_check similarity; the diagonalized step is
// a contraction up to O(1/p^2) once max Re sigma <= 0.
double diagonalized_step_norm(const MonomialKernel& kernel, std::int64_t p);

}  // namespace recurflow
