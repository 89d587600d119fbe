#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace sdcs {

using Vector = std::vector<double>;

// Dense real matrix stored row-major. Every constructor that takes caller
// data rejects NaN/Inf entries with std::invalid_argument.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix from_column(std::span<const double> column);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  Vector column(std::size_t j) const;
  void set_column(std::size_t j, std::span<const double> values);

  Matrix transpose() const;
  // Columns listed in `indices`, in that order.
  Matrix select_columns(std::span<const std::size_t> indices) const;
  // First `count` rows.
  Matrix top_rows(std::size_t count) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

Vector multiply(const Matrix& a, std::span<const double> x);
// Aᵀ·x without forming the transpose.
Vector multiply_transpose(const Matrix& a, std::span<const double> x);

double frobenius_norm(const Matrix& a);
// max_ij |a_ij - b_ij|
double max_abs_diff(const Matrix& a, const Matrix& b);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> x);
double norm1(std::span<const double> x);
double norm_inf(std::span<const double> x);
Vector subtract(std::span<const double> a, std::span<const double> b);

}  // namespace sdcs
