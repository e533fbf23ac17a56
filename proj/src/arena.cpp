#include "survsynth/arena.hpp"

#include <stdexcept>

namespace survsynth {

NodeId Arena::open_node() {
    if (finished_) throw std::logic_error("arena already finished");
    node_begin_.push_back(node_begin_.back());
    return static_cast<NodeId>(node_begin_.size() - 2);
}

ChoiceId Arena::add_choice(std::span<const NodeId> replies) {
    if (finished_ || node_begin_.size() < 2) throw std::logic_error("no open arena node");
    if (replies.empty()) throw std::invalid_argument("a choice needs at least one reply");
    replies_.insert(replies_.end(), replies.begin(), replies.end());
    reply_begin_.push_back(static_cast<std::uint32_t>(replies_.size()));
    owner_.push_back(static_cast<NodeId>(node_begin_.size() - 2));
    ++node_begin_.back();
    return static_cast<ChoiceId>(reply_begin_.size() - 2);
}

void Arena::finish(NodeId initial) {
    const std::size_t n = node_count();
    if (initial >= n) throw std::invalid_argument("initial node out of range");
    for (NodeId r : replies_)
        if (r >= n) throw std::invalid_argument("reply to a node that was never opened");
    initial_ = initial;
    pred_begin_.assign(n + 1, 0);
    for (NodeId r : replies_) ++pred_begin_[r + 1];
    for (std::size_t i = 0; i < n; ++i) pred_begin_[i + 1] += pred_begin_[i];
    pred_.assign(replies_.size(), 0);
    std::vector<std::uint32_t> fill(pred_begin_.begin(), pred_begin_.end() - 1);
    for (ChoiceId c = 0; c < choice_count(); ++c)
        for (NodeId r : replies(c)) pred_[fill[r]++] = c;
    finished_ = true;
}

BitSet Arena::full_set() const {
    BitSet s(node_count());
    for (NodeId i = 0; i < node_count(); ++i) s.insert(i);
    return s;
}

}  // namespace survsynth
