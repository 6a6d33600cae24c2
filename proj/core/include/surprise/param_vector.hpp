#ifndef SURPRISE_PARAM_VECTOR_HPP_
#define SURPRISE_PARAM_VECTOR_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "surprise/tensor.hpp"

namespace surprise {

struct ParamSegment {
  std::string name;
  std::vector<std::size_t> shape;
  std::size_t offset = 0;
  std::size_t size = 0;
};

// Flat float64 parameter vector with a named-segment layout. Segments are
// contiguous and non-overlapping; total length equals the sum of segment
// sizes.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::vector<ParamSegment> layout);

  static ParamVector zeros_like(const ParamVector& other);

  std::size_t size() const { return data_.size(); }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  const std::vector<ParamSegment>& layout() const { return layout_; }
  bool same_layout(const ParamVector& other) const;

  std::span<double> segment(const std::string& name);
  std::span<const double> segment(const std::string& name) const;
  const ParamSegment& segment_info(const std::string& name) const;

  // Segment contents as named tensors; pack() is the exact inverse.
  std::vector<std::pair<std::string, Tensor>> unpack() const;
  static ParamVector pack(const std::vector<ParamSegment>& layout,
                          const std::vector<std::pair<std::string, Tensor>>&
                              tensors);

  bool all_finite() const;

 private:
  std::vector<double> data_;
  std::vector<ParamSegment> layout_;
};

// Vector algebra used by the solvers; layouts must match.
double dot(const ParamVector& a, const ParamVector& b);
double norm(const ParamVector& a);
// y += alpha * x
void axpy(double alpha, const ParamVector& x, ParamVector& y);
ParamVector scaled(const ParamVector& a, double alpha);
ParamVector add(const ParamVector& a, const ParamVector& b);
ParamVector sub(const ParamVector& a, const ParamVector& b);

}  // namespace surprise

#endif  // SURPRISE_PARAM_VECTOR_HPP_
