#ifndef SURPRISE_NORMALIZER_HPP_
#define SURPRISE_NORMALIZER_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace surprise {

// Per-dimension running mean/std (Welford) plus a frozen snapshot used while
// an optimization step is in flight. Dimensions whose observed std is
// degenerate (< 1e-8) get scale 1 and are flagged inactive; density code
// treats them as deterministically known.
class Normalizer {
 public:
  Normalizer() = default;
  explicit Normalizer(std::size_t dim);

  std::size_t dim() const { return dim_; }
  double count() const { return count_; }

  void observe(std::span<const double> row);
  // Copies the running statistics into the frozen transform.
  void freeze();

  std::span<const double> mean() const { return frozen_mean_; }
  std::span<const double> scale() const { return frozen_scale_; }
  bool active(std::size_t i) const { return active_[i]; }
  std::size_t active_count() const;

  void apply(std::span<const double> in, std::span<double> out) const;
  void invert(std::span<const double> in, std::span<double> out) const;

  // Serialization hooks (running stats + frozen transform).
  std::vector<double> state() const;
  void restore(std::size_t dim, std::span<const double> state);

 private:
  std::size_t dim_ = 0;
  double count_ = 0.0;
  std::vector<double> run_mean_, run_m2_;
  std::vector<double> frozen_mean_, frozen_scale_;
  std::vector<bool> active_;
};

}  // namespace surprise

#endif  // SURPRISE_NORMALIZER_HPP_
