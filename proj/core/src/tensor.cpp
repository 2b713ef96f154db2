#include "treeseq/autodiff/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "treeseq/errors.hpp"

namespace treeseq::ad {

namespace {

void require_positive(std::size_t n) {
  if (n == 0) throw DimensionError("tensor dimensions must be positive");
}

}  // namespace

Tensor Tensor::vector(std::size_t size, double fill) {
  require_positive(size);
  return Tensor({size}, std::vector<double>(size, fill));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, double fill) {
  require_positive(rows);
  require_positive(cols);
  return Tensor({rows, cols}, std::vector<double>(rows * cols, fill));
}

Tensor Tensor::from(std::vector<double> values) {
  require_positive(values.size());
  const std::size_t n = values.size();
  return Tensor({n}, std::move(values));
}

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  require_positive(rows.size());
  const std::size_t cols = rows.begin()->size();
  require_positive(cols);
  std::vector<double> data;
  data.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw DimensionError("ragged matrix rows");
    data.insert(data.end(), r.begin(), r.end());
  }
  return Tensor({rows.size(), cols}, std::move(data));
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

void Tensor::add(const Tensor& other) {
  if (!same_shape(other)) {
    throw DimensionError("cannot add " + other.shape_string() + " into " + shape_string());
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
}

void Tensor::scale(double factor) {
  for (double& x : data_) x *= factor;
}

bool Tensor::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

double Tensor::max_abs() const noexcept {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

std::string Tensor::shape_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i > 0) s += "x";
    s += std::to_string(shape_[i]);
  }
  return s + "]";
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) {
    throw DimensionError("shape mismatch " + a.shape_string() + " vs " + b.shape_string());
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace treeseq::ad
