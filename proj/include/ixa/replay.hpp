#pragma once

#include <cstddef>
#include <vector>

#include "ixa/action_codec.hpp"
#include "ixa/tokenizer.hpp"

namespace ixa {

struct Transition {
  StateTokens state;
  ActionVec action;
  double reward = 0.0;
  StateTokens next_state;  // ignored when terminal
  bool terminal = false;
  bool is_demo = false;

  bool operator==(const Transition&) const = default;
};

/// Fixed-capacity FIFO; the oldest transition is overwritten when full.
class RingMemory {
 public:
  explicit RingMemory(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return size_ == 0; }
  /// i = 0 is the oldest retained transition.
  const Transition& at(std::size_t i) const;

 private:
  std::size_t capacity_;
  std::vector<Transition> slots_;
  std::size_t head_ = 0;  // next write position
  std::size_t size_ = 0;
};

/// Demonstrations (append-only, never evicted) plus online experience.
struct ReplayMemories {
  explicit ReplayMemories(std::size_t online_capacity) : online(online_capacity) {}

  std::vector<Transition> demo;
  RingMemory online;
};

}  // namespace ixa
