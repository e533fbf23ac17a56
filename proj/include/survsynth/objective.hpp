#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "survsynth/bitset.hpp"
#include "survsynth/errors.hpp"

namespace survsynth {

// Either a surveillance predicate p<=k or a named task predicate.
struct Atom {
    enum class Kind { surveillance, task };
    Kind kind = Kind::surveillance;
    int k = 0;
    std::string name;

    static Atom surveillance(int k) { return Atom{Kind::surveillance, k, {}}; }
    static Atom task(std::string name) { return Atom{Kind::task, 0, std::move(name)}; }

    std::string str() const { return kind == Kind::surveillance ? "p<=" + std::to_string(k) : name; }
    auto operator<=>(const Atom&) const = default;
};

// G(conjunction of safety atoms) & GF a_1 & ... & GF a_m.
struct Objective {
    std::vector<Atom> safety;      // sorted, unique
    std::vector<Atom> recurrence;  // first-occurrence order, unique

    bool pure_safety() const { return recurrence.empty(); }
    bool operator==(const Objective&) const = default;
};

// A parse error that names the out-of-fragment operator.
class UnsupportedFragment : public ParseError {
public:
    UnsupportedFragment(const std::string& op, std::size_t line, std::size_t column)
        : ParseError("unsupported fragment: operator '" + op + "'", line, column), op_(op) {}
    const std::string& op() const { return op_; }

private:
    std::string op_;
};

// spec := conj ; conj := term ('&' term)* ; term := 'G' atom | 'GF' atom | '(' conj ')'
// atom := 'p<=' INT | IDENT
Objective parse_spec(std::string_view text);
std::string print_spec(const Objective& o);

// Task predicate names mentioned anywhere in the objective.
std::set<std::string> task_names(const Objective& o);

// Task predicates are cell sets over either the agent's or the target's location.
struct TaskPredicate {
    enum class Subject { agent, target };
    std::string name;
    Subject subject = Subject::agent;
    LocSet cells;
};
using PredicateTable = std::map<std::string, TaskPredicate>;

}  // namespace survsynth
