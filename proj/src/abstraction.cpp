#include "survsynth/abstraction.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <stdexcept>
#include <unordered_set>

#include "survsynth/belief.hpp"
#include "survsynth/errors.hpp"

namespace survsynth {

Partition::Partition(LocSet domain, std::vector<LocSet> blocks) : domain_(std::move(domain)), blocks_(std::move(blocks)) {
    LocSet covered(domain_.universe());
    for (const LocSet& b : blocks_) {
        if (b.universe() != domain_.universe()) throw std::invalid_argument("block universe mismatch");
        if (b.empty()) throw std::invalid_argument("empty block");
        if (b.intersects(covered)) throw std::invalid_argument("overlapping blocks");
        covered |= b;
    }
    if (!(covered == domain_)) throw std::invalid_argument("blocks do not cover the target locations");
    std::sort(blocks_.begin(), blocks_.end(), [](const LocSet& a, const LocSet& b) { return a.first() < b.first(); });
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        ids_.push_back(next_id_++);
        parents_.push_back(ids_.back());
    }
    reindex();
}

void Partition::reindex() {
    block_of_.assign(domain_.universe(), blocks_.size());
    for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i].for_each([&](Loc l) { block_of_[l] = i; });
}

BlockSet Partition::alpha(const LocSet& cells) const {
    BlockSet out(size());
    cells.for_each([&](Loc l) {
        if (block_of(l) < size()) out.insert(static_cast<Loc>(block_of(l)));
    });
    return out;
}

LocSet Partition::gamma(const BlockSet& blocks) const {
    LocSet out(universe());
    blocks.for_each([&](Loc i) { out |= blocks_[i]; });
    return out;
}

bool Partition::split(const LocSet& scope, const LocSet& by) {
    struct Entry {
        LocSet cells;
        BlockId id;
        BlockId parent;
    };
    std::vector<Entry> next;
    bool changed = false;
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        const LocSet& b = blocks_[i];
        if (b.is_subset_of(scope) && b.intersects(by) && b.count_outside(by) > 0) {
            next.push_back({b & by, next_id_++, ids_[i]});
            next.push_back({b - by, next_id_++, ids_[i]});
            changed = true;
        } else {
            next.push_back({b, ids_[i], parents_[i]});
        }
    }
    if (!changed) return false;
    std::sort(next.begin(), next.end(), [](const Entry& a, const Entry& b) { return a.cells.first() < b.cells.first(); });
    blocks_.clear();
    ids_.clear();
    parents_.clear();
    for (Entry& e : next) {
        blocks_.push_back(std::move(e.cells));
        ids_.push_back(e.id);
        parents_.push_back(e.parent);
    }
    reindex();
    return true;
}

bool refines(const Partition& fine, const Partition& coarse) {
    if (!(fine.domain() == coarse.domain())) return false;
    for (const LocSet& b : fine.blocks()) {
        std::size_t home = coarse.block_of(b.first());
        if (home >= coarse.size() || !b.is_subset_of(coarse.block(home))) return false;
    }
    return true;
}

Partition meet(const Partition& a, const Partition& b) {
    Partition out = a;
    for (const LocSet& cut : b.blocks()) out.split(out.domain(), cut);
    return out;
}

std::optional<std::string> uniformity_violation(const Partition& q, const PredicateTable& preds,
                                               const std::set<std::string>& names) {
    for (const std::string& name : names) {
        auto it = preds.find(name);
        if (it == preds.end()) throw Error("undeclared predicate '" + name + "'");
        const TaskPredicate& p = it->second;
        if (p.subject == TaskPredicate::Subject::agent) continue;
        for (const LocSet& b : q.blocks())
            if (b.intersects(p.cells) && !b.is_subset_of(p.cells)) return name;
    }
    return std::nullopt;
}

Partition initial_partition(const SurveillanceGame& g, const PredicateTable& preds,
                            const std::set<std::string>& names) {
    Partition q(g.target_locations(), {g.target_locations()});
    for (const std::string& name : names) {
        auto it = preds.find(name);
        if (it == preds.end()) throw Error("undeclared predicate '" + name + "'");
        if (it->second.subject == TaskPredicate::Subject::target) q.split(q.domain(), it->second.cells);
    }
    return q;
}

std::string dump_partition(const Partition& q) {
    std::string out;
    for (const LocSet& b : q.blocks()) {
        bool first = true;
        b.for_each([&](Loc l) {
            if (!first) out += ',';
            out += std::to_string(l);
            first = false;
        });
        out += '\n';
    }
    return out;
}

Partition parse_partition(std::string_view text, const LocSet& domain) {
    std::vector<LocSet> blocks;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        std::size_t end = text.find('\n');
        std::string_view line = text.substr(0, end);
        text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        LocSet block(domain.universe());
        std::size_t col = 0;
        while (col < line.size()) {
            while (col < line.size() && (line[col] == ' ' || line[col] == '\t' || line[col] == '\r' || line[col] == ','))
                ++col;
            if (col >= line.size()) break;
            unsigned value = 0;
            auto [ptr, ec] = std::from_chars(line.data() + col, line.data() + line.size(), value);
            if (ec != std::errc{}) throw ParseError("expected a cell index", line_no, col + 1);
            if (!domain.contains(value))
                throw ParseError("cell " + std::to_string(value) + " is not a target location", line_no, col + 1);
            if (block.contains(value)) throw ParseError("cell listed twice", line_no, col + 1);
            block.insert(value);
            col = static_cast<std::size_t>(ptr - line.data());
        }
        if (!block.empty()) blocks.push_back(std::move(block));
    }
    try {
        return Partition(domain, std::move(blocks));
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("invalid partition: ") + e.what(), line_no, 1);
    }
}

std::strong_ordering AbstractState::operator<=>(const AbstractState& o) const {
    if (auto c = agent <=> o.agent; c != 0) return c;
    if (auto c = cells <=> o.cells; c != 0) return c;
    if (concrete != o.concrete) return concrete ? std::strong_ordering::less : std::strong_ordering::greater;
    if (concrete) return target <=> o.target;
    return blocks <=> o.blocks;
}

std::string AbstractState::str() const {
    std::string out = "(" + std::to_string(agent) + ",";
    if (concrete) return out + std::to_string(target) + ")";
    out += "{";
    bool first = true;
    blocks.for_each([&](Loc b) {
        if (!first) out += ",";
        out += "Q" + std::to_string(b);
        first = false;
    });
    return out + "})";
}

AbstractState concrete_state(const Partition& q, Loc agent, Loc target) {
    return AbstractState{agent, true, target, BlockSet(q.size()), LocSet(q.universe(), {target})};
}

AbstractState block_state(const Partition& q, Loc agent, BlockSet blocks) {
    LocSet cells = q.gamma(blocks);
    return AbstractState{agent, false, 0, std::move(blocks), std::move(cells)};
}

std::vector<AbstractChoice> abstract_successors(const SurveillanceGame& g, const Partition& q,
                                                const AbstractState& s) {
    std::vector<AbstractChoice> out;
    for (BeliefChoice& c : belief_successors(g, s.agent, s.cells)) {
        if (c.visible) {
            Loc t = c.belief.first();
            out.push_back({true, t, BlockSet(q.size()), std::move(c.belief), std::move(c.replies)});
        } else {
            BlockSet blocks = q.alpha(c.belief);
            LocSet cells = q.gamma(blocks);
            out.push_back({false, 0, std::move(blocks), std::move(cells), std::move(c.replies)});
        }
    }
    std::sort(out.begin(), out.end(), [](const AbstractChoice& a, const AbstractChoice& b) {
        if (auto c = a.cells <=> b.cells; c != 0) return c < 0;
        return a.concrete && !b.concrete;
    });
    return out;
}

std::optional<NodeId> AbstractGame::find(const AbstractState& s) const {
    auto it = std::lower_bound(states.begin(), states.end(), s);
    if (it == states.end() || !(*it == s)) return std::nullopt;
    return static_cast<NodeId>(it - states.begin());
}

namespace {

AbstractState successor_state(const AbstractChoice& c, Loc agent) {
    return AbstractState{agent, c.concrete, c.target, c.blocks, c.cells};
}

}  // namespace

AbstractGame build_abstract_game(const SurveillanceGame& g, const Partition& q, std::size_t max_states) {
    const AbstractState init = concrete_state(q, g.initial().agent, g.initial().target);
    std::unordered_set<AbstractState, AbstractStateHash> seen{init};
    std::vector<AbstractState> order{init};
    for (std::size_t i = 0; i < order.size(); ++i) {
        const AbstractState s = order[i];
        for (const AbstractChoice& c : abstract_successors(g, q, s)) {
            c.replies.for_each([&](Loc a) {
                AbstractState next = successor_state(c, a);
                if (seen.contains(next)) return;
                if (order.size() >= max_states) throw BudgetExceeded("abstract game state budget exceeded", max_states);
                seen.insert(next);
                order.push_back(std::move(next));
            });
        }
    }
    seen.clear();

    AbstractGame game;
    game.partition = q;
    std::sort(order.begin(), order.end());
    game.states = std::move(order);
    std::vector<NodeId> replies;
    for (const AbstractState& s : game.states) {
        game.arena.open_node();
        for (AbstractChoice& c : abstract_successors(g, q, s)) {
            replies.clear();
            c.replies.for_each([&](Loc a) { replies.push_back(*game.find(successor_state(c, a))); });
            game.arena.add_choice(replies);
            c.replies = LocSet();
            game.choices.push_back(std::move(c));
        }
    }
    game.arena.finish(*game.find(init));
    return game;
}

}  // namespace survsynth
