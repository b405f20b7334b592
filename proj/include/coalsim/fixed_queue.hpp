#ifndef COALSIM_FIXED_QUEUE_HPP
#define COALSIM_FIXED_QUEUE_HPP

#include <cstddef>
#include <vector>

#include "coalsim/types.hpp"

namespace coalsim {

// Bounded FIFO backing every hardware queue in the model. Overflow is a
// modeling bug, not a runtime condition: callers must test full() first,
// mirroring the ready/valid handshake.
template <typename T>
class FixedQueue {
 public:
  explicit FixedQueue(std::size_t capacity = 1)
      : buf_(capacity + 1), cap_(capacity) {}

  void reset(std::size_t capacity) {
    buf_.assign(capacity + 1, T{});
    cap_ = capacity;
    head_ = tail_ = 0;
  }

  bool empty() const { return head_ == tail_; }
  bool full() const { return size() == cap_; }
  std::size_t size() const {
    return (tail_ + buf_.size() - head_) % buf_.size();
  }
  std::size_t capacity() const { return cap_; }

  void push(const T& v) {
    COALSIM_CHECK(!full());
    buf_[tail_] = v;
    tail_ = (tail_ + 1) % buf_.size();
  }

  T& front() {
    COALSIM_CHECK(!empty());
    return buf_[head_];
  }
  const T& front() const {
    COALSIM_CHECK(!empty());
    return buf_[head_];
  }

  T pop() {
    COALSIM_CHECK(!empty());
    T v = buf_[head_];
    head_ = (head_ + 1) % buf_.size();
    return v;
  }

  void clear() { head_ = tail_ = 0; }

 private:
  std::vector<T> buf_;
  std::size_t cap_ = 0;
  std::size_t head_ = 0;
  std::size_t tail_ = 0;
};

}  // namespace coalsim

#endif  // COALSIM_FIXED_QUEUE_HPP
