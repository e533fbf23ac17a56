#include "doctest.h"
#include "survsynth/errors.hpp"
#include "survsynth/objective.hpp"

using namespace survsynth;

TEST_SUITE("objective") {
    TEST_CASE("safety with recurrence") {
        const Objective o = parse_spec("G p<=5 & GF p<=2");
        CHECK(o.safety == std::vector<Atom>{Atom::surveillance(5)});
        CHECK(o.recurrence == std::vector<Atom>{Atom::surveillance(2)});
        CHECK_FALSE(o.pure_safety());
    }

    TEST_CASE("two recurrence atoms keep their order") {
        const Objective o = parse_spec("GF p<=1 & GF goal");
        CHECK(o.safety.empty());
        CHECK(o.recurrence == std::vector<Atom>{Atom::surveillance(1), Atom::task("goal")});
        CHECK(task_names(o) == std::set<std::string>{"goal"});
    }

    TEST_CASE("duplicates, grouping and spacing") {
        const Objective o = parse_spec("(G p<=3 && G p<=3) & ( GF goal & G F goal )");
        CHECK(o.safety.size() == 1);
        CHECK(o.recurrence.size() == 1);
        CHECK(parse_spec(print_spec(o)) == o);
        CHECK(parse_spec("G\np<=2") == parse_spec("G p<=2"));
    }

    TEST_CASE("print and reparse") {
        for (const char* s : {"G p<=5", "GF p<=2", "G p<=5 & GF p<=2", "G safe & GF p<=1 & GF goal"}) {
            const Objective o = parse_spec(s);
            CHECK(parse_spec(print_spec(o)) == o);
        }
    }

    TEST_CASE("out-of-fragment operators are named") {
        try {
            parse_spec("p<=1 U goal");
            FAIL("expected an error");
        } catch (const UnsupportedFragment& e) {
            CHECK(e.op() == "U");
        } catch (const ParseError&) {
            // The leading atom without G is a plain parse error; the operator
            // must still be rejected when it appears in term position.
            CHECK_THROWS_AS(parse_spec("G p<=1 & U goal"), UnsupportedFragment);
        }
        CHECK_THROWS_AS(parse_spec("G p<=1 | GF goal"), UnsupportedFragment);
        CHECK_THROWS_AS(parse_spec("G !goal"), UnsupportedFragment);
        CHECK_THROWS_AS(parse_spec("G p<=1 -> GF goal"), UnsupportedFragment);
        CHECK_THROWS_AS(parse_spec("X p<=1"), UnsupportedFragment);
    }

    TEST_CASE("syntax errors carry positions") {
        CHECK_THROWS_AS(parse_spec(""), ParseError);
        CHECK_THROWS_AS(parse_spec("G"), ParseError);
        CHECK_THROWS_AS(parse_spec("G p<="), ParseError);
        CHECK_THROWS_AS(parse_spec("G p<=2 &"), ParseError);
        CHECK_THROWS_AS(parse_spec("(G p<=2"), ParseError);
        try {
            parse_spec("G p<=2 &\n  GF )");
            FAIL("expected an error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
            CHECK(e.column() == 6);
        }
    }
}
