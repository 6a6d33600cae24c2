#ifndef SURPRISE_REPLAY_HPP_
#define SURPRISE_REPLAY_HPP_

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

namespace surprise {

struct TransitionTuple {
  std::vector<double> s;
  std::vector<double> a;  // one-hot for discrete actions
  std::vector<double> s_next;
  double r_ext = 0.0;
  bool done = false;
};

// FIFO replay memory; inserting at capacity evicts the oldest element.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return storage_.size(); }
  const TransitionTuple& at(std::size_t i) const { return storage_[i]; }

  void insert(TransitionTuple t);
  void insert(std::span<const TransitionTuple> tuples);

  // Uniform sample without replacement; returns the whole memory (permuted)
  // when count >= size. Deterministic under seed. Throws when empty.
  std::vector<TransitionTuple> sample(std::size_t count,
                                      std::uint64_t seed) const;

 private:
  std::size_t capacity_;
  std::deque<TransitionTuple> storage_;
};

}  // namespace surprise

#endif  // SURPRISE_REPLAY_HPP_
