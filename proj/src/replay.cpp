#include "ddqncd/replay.hpp"

#include <stdexcept>

#include "ddqncd/errors.hpp"

namespace ddqncd {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ConfigError("replay buffer capacity must be positive");
}

void ReplayBuffer::push(Transition t) {
    if (items_.size() < capacity_) {
        items_.push_back(std::move(t));
        return;
    }
    items_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::operator[](std::size_t i) const {
    if (i >= items_.size()) throw std::out_of_range("ReplayBuffer index");
    return items_.size() < capacity_ ? items_[i] : items_[(head_ + i) % capacity_];
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t count, Rng& rng) const {
    if (items_.empty()) throw std::logic_error("cannot sample from an empty replay buffer");
    std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
    std::vector<const Transition*> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) out.push_back(&items_[pick(rng)]);
    return out;
}

}  // namespace ddqncd
