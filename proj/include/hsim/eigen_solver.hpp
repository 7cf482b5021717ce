// eigen_solver.hpp: dense eigensolver for general complex matrices
//
// Balancing (radix-2 diagonal scaling), Householder reduction to upper
// Hessenberg form, then single-shift complex QR with Wilkinson shifts to a
// Schur form A = Z·T·Z*.  Eigenvectors come from back-substitution on T.
// The matrices handled here are small (≲ 32) and dense.

#pragma once

#include <Eigen/Dense>

#include <string_view>

namespace hsim {

struct EigenDecomposition {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors;   // column k pairs with values(k), unit 2-norm
    int iterations = 0;         // total QR sweeps
};

struct EigenSolverOptions {
    int iterations_per_dimension = 100;
    double deflation_tolerance = 1e-13;
};

// Unordered eigenpairs.  Each vector is phase-fixed so that its largest
// component is real and positive.  Throws NumericError naming `name` if the
// QR iteration exceeds iterations_per_dimension·n sweeps.
EigenDecomposition complex_eigensolve(const Eigen::MatrixXcd& a, std::string_view name = "matrix",
                                      const EigenSolverOptions& options = {});

} // namespace hsim
