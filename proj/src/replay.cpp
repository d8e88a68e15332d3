#include "ixa/replay.hpp"

#include "ixa/error.hpp"

namespace ixa {

RingMemory::RingMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ConfigError("replay memory capacity must be >= 1");
  slots_.reserve(std::min<std::size_t>(capacity_, 4096));
}

void RingMemory::push(Transition t) {
  if (slots_.size() < capacity_) {
    slots_.push_back(std::move(t));
  } else {
    slots_[head_] = std::move(t);
  }
  head_ = (head_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

const Transition& RingMemory::at(std::size_t i) const {
  if (i >= size_) throw Error("replay index out of range");
  const std::size_t oldest = size_ < capacity_ ? 0 : head_;
  return slots_[(oldest + i) % capacity_];
}

}  // namespace ixa
