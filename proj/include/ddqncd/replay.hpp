#pragma once

#include <cstddef>
#include <vector>

#include "ddqncd/dag.hpp"
#include "ddqncd/rng.hpp"

namespace ddqncd {

struct Transition {
    Dag state;
    ActionIndex action = 0;
    double reward = 0.0;
    Dag next_state;
    bool valid = true;
    // Last step of an episode, or next_state has no legal action: target is r alone.
    bool terminal = false;
};

// Fixed-capacity FIFO ring of transitions with uniform sampling.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition t);
    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return items_.empty(); }

    // i = 0 is the oldest retained transition.
    const Transition& operator[](std::size_t i) const;

    // `count` draws with replacement.
    std::vector<const Transition*> sample(std::size_t count, Rng& rng) const;

private:
    std::size_t capacity_;
    std::size_t head_ = 0;  // next slot to overwrite once full
    std::vector<Transition> items_;
};

}  // namespace ddqncd
