#pragma once

#include "qes/rational.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace qes {

/// Dense row-major matrix of exact rationals.
class RatMatrix {
 public:
  RatMatrix() = default;
  RatMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static RatMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Rational trace() const;

  friend RatMatrix operator*(const RatMatrix& a, const RatMatrix& b);
  friend RatMatrix operator+(const RatMatrix& a, const RatMatrix& b);
  friend RatMatrix operator-(const RatMatrix& a, const RatMatrix& b);
  friend bool operator==(const RatMatrix& a, const RatMatrix& b) = default;

  std::vector<Rational> apply(const std::vector<Rational>& v) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

RatMatrix scaled(RatMatrix m, const Rational& c);

/// Reduced row echelon form in place; returns the pivot columns.
std::vector<std::size_t> rref(RatMatrix& m);

std::size_t rank(RatMatrix m);

/// Basis of {v : M v = 0}, one vector per free column. Each vector has a 1 in
/// its free column and is zero in every other free column, so the basis is
/// canonical (reduced) for a given column order.
std::vector<std::vector<Rational>> nullspace(RatMatrix m);

/// Some solution of M v = b, or nullopt if inconsistent. Free variables are 0.
std::optional<std::vector<Rational>> solve(RatMatrix m, const std::vector<Rational>& b);

}  // namespace qes
