#include "prunefield/tensor.hpp"

#include "prunefield/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace prunefield {
namespace {

int read_thread_env() {
  const char* env = std::getenv("PRNFLD_THREADS");
  if (env == nullptr) return 1;
  int n = std::atoi(env);
  return n >= 1 ? n : 1;
}

std::atomic<int>& thread_setting() {
  static std::atomic<int> threads{read_thread_env()};
  return threads;
}

// Splits the rows of `out` into contiguous blocks, one per worker. Each
// block is an independent product, so the result only depends on the
// thread count.
template <class Fn>
void for_row_blocks(Eigen::Index rows, Fn&& fn) {
  const int threads = std::min<int>(thread_limit(), static_cast<int>(rows / 64));
  if (threads <= 1) {
    fn(Eigen::Index{0}, rows);
    return;
  }
  std::vector<std::jthread> workers;
  const Eigen::Index chunk = (rows + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const Eigen::Index begin = t * chunk;
    const Eigen::Index count = std::min(chunk, rows - begin);
    if (count <= 0) break;
    workers.emplace_back([&fn, begin, count] { fn(begin, count); });
  }
}

[[noreturn]] void shape_error(const char* op, const Matrix& a, const Matrix& b) {
  throw ShapeError(std::string(op) + ": " + std::to_string(a.rows()) + "x" +
                   std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                   std::to_string(b.cols()));
}

}  // namespace

int thread_limit() { return thread_setting().load(); }

void set_thread_limit(int threads) { thread_setting().store(std::max(threads, 1)); }

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) shape_error("matmul", a, b);
  Matrix out(a.rows(), b.cols());
  for_row_blocks(a.rows(), [&](Eigen::Index begin, Eigen::Index count) {
    out.middleRows(begin, count).noalias() = a.middleRows(begin, count) * b;
  });
  return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) shape_error("matmul_nt", a, b);
  Matrix out(a.rows(), b.rows());
  for_row_blocks(a.rows(), [&](Eigen::Index begin, Eigen::Index count) {
    out.middleRows(begin, count).noalias() = a.middleRows(begin, count) * b.transpose();
  });
  return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) shape_error("matmul_tn", a, b);
  Matrix out(a.cols(), b.cols());
  for_row_blocks(a.cols(), [&](Eigen::Index begin, Eigen::Index count) {
    out.middleRows(begin, count).noalias() = a.middleCols(begin, count).transpose() * b;
  });
  return out;
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace prunefield
