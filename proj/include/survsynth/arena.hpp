#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "survsynth/bitset.hpp"

namespace survsynth {

using NodeId = std::uint32_t;
using ChoiceId = std::uint32_t;

// Turn-expanded game graph in compressed rows. At a node the target picks one
// of the node's choices; the agent then picks one of that choice's replies,
// which is the next node. Nodes are numbered in the owning game's canonical
// state order and choices in canonical order within their node.
class Arena {
public:
    Arena() = default;

    // Nodes must be opened in increasing id order.
    NodeId open_node();
    ChoiceId add_choice(std::span<const NodeId> replies);
    // Computes the reverse index. No further nodes may be added.
    void finish(NodeId initial);

    std::size_t node_count() const { return node_begin_.size() - 1; }
    std::size_t choice_count() const { return reply_begin_.size() - 1; }
    NodeId initial() const { return initial_; }

    std::span<const NodeId> replies(ChoiceId c) const {
        return {replies_.data() + reply_begin_[c], replies_.data() + reply_begin_[c + 1]};
    }
    ChoiceId first_choice(NodeId n) const { return node_begin_[n]; }
    ChoiceId end_choice(NodeId n) const { return node_begin_[n + 1]; }
    std::size_t choice_count(NodeId n) const { return node_begin_[n + 1] - node_begin_[n]; }
    NodeId owner(ChoiceId c) const { return owner_[c]; }
    // Choices that list `n` among their replies.
    std::span<const ChoiceId> choices_into(NodeId n) const {
        return {pred_.data() + pred_begin_[n], pred_.data() + pred_begin_[n + 1]};
    }

    BitSet empty_set() const { return BitSet(node_count()); }
    BitSet full_set() const;

private:
    std::vector<std::uint32_t> node_begin_{0};
    std::vector<std::uint32_t> reply_begin_{0};
    std::vector<NodeId> replies_;
    std::vector<NodeId> owner_;
    std::vector<std::uint32_t> pred_begin_;
    std::vector<ChoiceId> pred_;
    NodeId initial_ = 0;
    bool finished_ = false;
};

}  // namespace survsynth
