#include "surprise/replay.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "surprise/rng.hpp"

namespace surprise {

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) {
    throw std::invalid_argument("ReplayMemory: capacity must be positive");
  }
}

void ReplayMemory::insert(TransitionTuple t) {
  if (storage_.size() == capacity_) storage_.pop_front();
  storage_.push_back(std::move(t));
}

void ReplayMemory::insert(std::span<const TransitionTuple> tuples) {
  for (const auto& t : tuples) insert(t);
}

std::vector<TransitionTuple> ReplayMemory::sample(std::size_t count,
                                                  std::uint64_t seed) const {
  if (storage_.empty()) {
    throw std::runtime_error("ReplayMemory::sample: memory is empty");
  }
  if (count == 0) {
    throw std::invalid_argument("ReplayMemory::sample: count must be >= 1");
  }
  const std::size_t n = storage_.size();
  const std::size_t m = std::min(count, n);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + rng.below(n - i);
    std::swap(idx[i], idx[j]);
  }
  std::vector<TransitionTuple> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) out.push_back(storage_[idx[i]]);
  return out;
}

}  // namespace surprise
