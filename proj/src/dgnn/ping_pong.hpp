#pragma once

#include <array>
#include <atomic>
#include <cstddef>

namespace dgnn {

/// Two buffers of the same shape. Within a timestep readers use the front
/// half and the single writer fills the back half; flip() swaps them at the
/// timestep barrier.
///
/// Every access is recorded per half, and a half that is both read and
/// written between two flips counts as a violation.
template <typename T>
class PingPongPair {
public:
    PingPongPair() = default;
    explicit PingPongPair(const T& init) : buffers_{init, init} {}

    PingPongPair(const PingPongPair&) = delete;
    PingPongPair& operator=(const PingPongPair&) = delete;

    const T& read() { return reader(front_index()); }
    T& write() { return writer(1 - front_index()); }

    const T& reader(int half) {
        mark(half, kRead);
        return buffers_[half];
    }

    T& writer(int half) {
        mark(half, kWrite);
        return buffers_[half];
    }

    int front_index() const { return front_.load(std::memory_order_acquire); }

    /// Timestep barrier: the freshly written half becomes the front.
    void flip() {
        access_[0].store(0, std::memory_order_relaxed);
        access_[1].store(0, std::memory_order_relaxed);
        front_.store(1 - front_.load(std::memory_order_relaxed), std::memory_order_release);
    }

    std::size_t violations() const { return violations_.load(); }

private:
    static constexpr unsigned kRead = 1;
    static constexpr unsigned kWrite = 2;

    void mark(int half, unsigned kind) {
        const unsigned prev = access_[half].fetch_or(kind, std::memory_order_acq_rel);
        if ((prev | kind) == (kRead | kWrite) && (prev & kind) == 0)
            violations_.fetch_add(1);
    }

    std::array<T, 2> buffers_{};
    std::atomic<int> front_{0};
    std::array<std::atomic<unsigned>, 2> access_{};
    std::atomic<std::size_t> violations_{0};
};

} // namespace dgnn
