#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace prunefield {

// Row-major so that one sample / one neuron is a contiguous row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// a * b. Throws ShapeError when a.cols() != b.rows().
Matrix matmul(const Matrix& a, const Matrix& b);

/// a * b^T, the dense-layer forward product for weights stored out x in.
Matrix matmul_nt(const Matrix& a, const Matrix& b);

/// a^T * b, the weight-gradient product.
Matrix matmul_tn(const Matrix& a, const Matrix& b);

bool all_finite(const Matrix& m);

/// Upper bound on worker threads used inside the products above. Read once
/// from PRNFLD_THREADS (default 1). Results are deterministic for a fixed
/// thread count.
int thread_limit();
void set_thread_limit(int threads);

}  // namespace prunefield
