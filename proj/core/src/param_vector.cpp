#include "surprise/param_vector.hpp"

#include <cmath>
#include <numeric>

namespace surprise {

namespace {
std::size_t shape_numel(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t s : shape) n *= s;
  return n;
}
}  // namespace

ParamVector::ParamVector(std::vector<ParamSegment> layout)
    : layout_(std::move(layout)) {
  std::size_t offset = 0;
  for (auto& seg : layout_) {
    seg.offset = offset;
    seg.size = shape_numel(seg.shape);
    offset += seg.size;
  }
  data_.assign(offset, 0.0);
}

ParamVector ParamVector::zeros_like(const ParamVector& other) {
  ParamVector out;
  out.layout_ = other.layout_;
  out.data_.assign(other.data_.size(), 0.0);
  return out;
}

bool ParamVector::same_layout(const ParamVector& other) const {
  if (layout_.size() != other.layout_.size()) return false;
  for (std::size_t i = 0; i < layout_.size(); ++i) {
    if (layout_[i].name != other.layout_[i].name ||
        layout_[i].shape != other.layout_[i].shape ||
        layout_[i].offset != other.layout_[i].offset) {
      return false;
    }
  }
  return true;
}

const ParamSegment& ParamVector::segment_info(const std::string& name) const {
  for (const auto& seg : layout_) {
    if (seg.name == name) return seg;
  }
  throw std::invalid_argument("ParamVector: no segment named " + name);
}

std::span<double> ParamVector::segment(const std::string& name) {
  const auto& seg = segment_info(name);
  return std::span<double>(data_.data() + seg.offset, seg.size);
}

std::span<const double> ParamVector::segment(const std::string& name) const {
  const auto& seg = segment_info(name);
  return std::span<const double>(data_.data() + seg.offset, seg.size);
}

std::vector<std::pair<std::string, Tensor>> ParamVector::unpack() const {
  std::vector<std::pair<std::string, Tensor>> out;
  out.reserve(layout_.size());
  for (const auto& seg : layout_) {
    Tensor t(seg.shape,
             std::vector<double>(data_.begin() + seg.offset,
                                 data_.begin() + seg.offset + seg.size));
    out.emplace_back(seg.name, std::move(t));
  }
  return out;
}

ParamVector ParamVector::pack(
    const std::vector<ParamSegment>& layout,
    const std::vector<std::pair<std::string, Tensor>>& tensors) {
  ParamVector out{layout};
  require(tensors.size() == out.layout_.size(),
          "ParamVector::pack: tensor count does not match layout");
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const auto& seg = out.layout_[i];
    require(tensors[i].first == seg.name && tensors[i].second.shape == seg.shape,
            "ParamVector::pack: segment mismatch at " + seg.name);
    std::copy(tensors[i].second.data.begin(), tensors[i].second.data.end(),
              out.data_.begin() + seg.offset);
  }
  return out;
}

bool ParamVector::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double dot(const ParamVector& a, const ParamVector& b) {
  require(a.size() == b.size(), "dot: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm(const ParamVector& a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, const ParamVector& x, ParamVector& y) {
  require(x.size() == y.size(), "axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

ParamVector scaled(const ParamVector& a, double alpha) {
  ParamVector out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= alpha;
  return out;
}

ParamVector add(const ParamVector& a, const ParamVector& b) {
  ParamVector out = a;
  axpy(1.0, b, out);
  return out;
}

ParamVector sub(const ParamVector& a, const ParamVector& b) {
  ParamVector out = a;
  axpy(-1.0, b, out);
  return out;
}

}  // namespace surprise
