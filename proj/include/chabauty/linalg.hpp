#pragma once

#include "chabauty/lie.hpp"

#include <vector>

namespace chabauty::linalg {

/// Column-major flattening of a square matrix.
Vec vec(const Mat& m);
Mat unvec(const Vec& v, int dim);

/// Columns are the flattened matrices.
Mat stack(const std::vector<Mat>& mats);
std::vector<Mat> unstack(const Mat& cols, int dim);

/// Orthonormal basis of the column span; singular values below cutoff are dropped.
Mat orthonormal_columns(const Mat& A, double cutoff = 1e-8);
/// Orthonormal basis of the kernel of A; singular values below cutoff count as zero.
Mat null_space(const Mat& A, int ncols, double cutoff = 1e-8);

/// Largest sine of the principal angles between two column spans (orthonormal inputs).
/// Returns 1 when the dimensions differ.
double subspace_gap(const Mat& U, const Mat& V);

/// Frobenius distance from m to the span of the orthonormal columns Q (flattened).
double residual_to_span(const Mat& Q, const Mat& m);

}  // namespace chabauty::linalg
