#ifndef RISKCOMP_LINALG_HPP
#define RISKCOMP_LINALG_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace riskcomp::linalg {

/// Dense row-major matrix. Sized for the small (p <= ~10) problems here;
/// no attempt at blocking or BLAS.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double scalar, const Matrix& a);

Matrix transpose(const Matrix& a);
double trace(const Matrix& a);
double frobenius_norm(const Matrix& a);
double norm1(const Matrix& a);      // max column abs sum
double norm_inf(const Matrix& a);   // max row abs sum

std::vector<double> matvec(const Matrix& a, std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

/// Solve A X = B by LU with partial pivoting. Throws on singular A.
Matrix solve(Matrix a, Matrix b);
Matrix inverse(const Matrix& a);

bool is_symmetric(const Matrix& a, double tol = 0.0);

}  // namespace riskcomp::linalg

#endif  // RISKCOMP_LINALG_HPP
