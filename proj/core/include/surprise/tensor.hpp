#ifndef SURPRISE_TENSOR_HPP_
#define SURPRISE_TENSOR_HPP_

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace surprise {

// Dense row-major tensor of 64-bit floats. Mostly used rank-2 (batch, dim).
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::vector<std::size_t> shape_in, std::vector<double> data_in);

  static Tensor zeros(std::vector<std::size_t> shape);
  static Tensor full(std::vector<std::size_t> shape, double value);

  std::size_t numel() const;
  std::size_t rank() const { return shape.size(); }

  // Rank-2 accessors.
  std::size_t rows() const;
  std::size_t cols() const;
  double& at(std::size_t r, std::size_t c);
  double at(std::size_t r, std::size_t c) const;

  bool all_finite() const;
  // Throws std::runtime_error naming `what` if any element is NaN/Inf.
  void require_finite(const char* what) const;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace surprise

#endif  // SURPRISE_TENSOR_HPP_
