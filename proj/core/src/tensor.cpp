#include "surprise/tensor.hpp"

#include <cmath>

namespace surprise {

namespace {
std::size_t product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t s : shape) n *= s;
  return n;
}
}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape_in, std::vector<double> data_in)
    : shape(std::move(shape_in)), data(std::move(data_in)) {
  require(product(shape) == data.size(),
          "Tensor: shape product does not match data length");
}

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
  std::size_t n = product(shape);
  return Tensor(std::move(shape), std::vector<double>(n, 0.0));
}

Tensor Tensor::full(std::vector<std::size_t> shape, double value) {
  std::size_t n = product(shape);
  return Tensor(std::move(shape), std::vector<double>(n, value));
}

std::size_t Tensor::numel() const { return data.size(); }

std::size_t Tensor::rows() const {
  require(rank() == 2, "Tensor: rows() requires rank 2");
  return shape[0];
}

std::size_t Tensor::cols() const {
  require(rank() == 2, "Tensor: cols() requires rank 2");
  return shape[1];
}

double& Tensor::at(std::size_t r, std::size_t c) {
  return data[r * shape[1] + c];
}

double Tensor::at(std::size_t r, std::size_t c) const {
  return data[r * shape[1] + c];
}

bool Tensor::all_finite() const {
  for (double v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void Tensor::require_finite(const char* what) const {
  if (!all_finite()) {
    throw std::runtime_error(std::string("non-finite values in ") + what);
  }
}

}  // namespace surprise
