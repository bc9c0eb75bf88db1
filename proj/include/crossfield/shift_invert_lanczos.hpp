#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstddef>
#include <cstdint>

namespace crossfield {

struct ShiftInvertOptions {
    double tolerance = 1e-12;       ///< relative Ritz residual in the transformed problem
    std::size_t min_krylov = 40;    ///< lower bound on the Krylov dimension per pass
    std::size_t max_passes = 64;    ///< deflation passes (one per missing degenerate copy)
    std::uint64_t seed = 0x5eedULL;
};

struct GeneralizedEigenpairs {
    Eigen::VectorXd values;   ///< ascending
    Eigen::MatrixXd vectors;  ///< B-orthonormal columns
};

/// The `count` eigenvalues of A x = lambda B x nearest `sigma`, for sparse
/// symmetric A and symmetric positive-definite B.
///
/// Lanczos on (A - sigma B)^{-1} B in the B inner product with full
/// reorthogonalization. Converged Ritz vectors are locked and further passes
/// run B-orthogonal to them, which recovers degenerate copies a single Krylov
/// sequence cannot see. Throws NumericalError when A - sigma B cannot be
/// factorized and InvalidArgument when count exceeds the dimension.
GeneralizedEigenpairs shift_invert_eigs(const Eigen::SparseMatrix<double>& a, const Eigen::SparseMatrix<double>& b,
                                        double sigma, std::size_t count, const ShiftInvertOptions& options = {});

} // namespace crossfield
