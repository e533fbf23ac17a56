#include "survsynth/objective.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace survsynth {
namespace {

struct Token {
    enum class Kind { ident, integer, amp, lparen, rparen, le, op, end };
    Kind kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

bool is_temporal_or_boolean(const std::string& id) {
    return id == "U" || id == "R" || id == "W" || id == "M" || id == "X" || id == "F" || id == "true" ||
           id == "false";
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space();
            if (pos_ >= text_.size()) {
                out.push_back({Token::Kind::end, "", line_, col_});
                return out;
            }
            const std::size_t line = line_, col = col_;
            const char c = text_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t start = pos_;
                while (pos_ < text_.size() &&
                       (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                    advance();
                out.push_back({Token::Kind::ident, std::string(text_.substr(start, pos_ - start)), line, col});
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                std::size_t start = pos_;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
                out.push_back({Token::Kind::integer, std::string(text_.substr(start, pos_ - start)), line, col});
            } else if (c == '&') {
                advance();
                if (peek() == '&') advance();
                out.push_back({Token::Kind::amp, "&", line, col});
            } else if (c == '(') {
                advance();
                out.push_back({Token::Kind::lparen, "(", line, col});
            } else if (c == ')') {
                advance();
                out.push_back({Token::Kind::rparen, ")", line, col});
            } else if (c == '<' && peek(1) == '=' && peek(2) != '>') {
                advance();
                advance();
                out.push_back({Token::Kind::le, "<=", line, col});
            } else {
                out.push_back({Token::Kind::op, lex_operator(), line, col});
            }
        }
    }

private:
    // Operators outside the fragment, lexed only so they can be named in errors.
    std::string lex_operator() {
        static const char* const multi[] = {"<->", "->", "||", "|", "!", "~", "[]", "<>", "=>"};
        for (const char* m : multi) {
            std::string_view mv(m);
            if (text_.substr(pos_, mv.size()) == mv) {
                for (std::size_t i = 0; i < mv.size(); ++i) advance();
                return std::string(mv);
            }
        }
        std::string one(1, text_[pos_]);
        advance();
        return one;
    }

    char peek(std::size_t ahead = 0) const { return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0'; }
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }
    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) advance();
    }

    std::string_view text_;
    std::size_t pos_ = 0, line_ = 1, col_ = 1;
};

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    Objective run() {
        conjunction();
        const Token& t = cur();
        if (t.kind != Token::Kind::end) fail_at(t, "expected '&' or end of input");
        Objective o;
        std::sort(safety_.begin(), safety_.end());
        safety_.erase(std::unique(safety_.begin(), safety_.end()), safety_.end());
        o.safety = std::move(safety_);
        for (Atom& a : recurrence_)
            if (std::find(o.recurrence.begin(), o.recurrence.end(), a) == o.recurrence.end())
                o.recurrence.push_back(std::move(a));
        return o;
    }

private:
    const Token& cur() const { return toks_[i_]; }
    const Token& take() { return toks_[i_ == toks_.size() - 1 ? i_ : i_++]; }

    [[noreturn]] void fail_at(const Token& t, const std::string& msg) {
        if (t.kind == Token::Kind::op) throw UnsupportedFragment(t.text, t.line, t.column);
        if (t.kind == Token::Kind::ident && is_temporal_or_boolean(t.text))
            throw UnsupportedFragment(t.text, t.line, t.column);
        std::string got = t.kind == Token::Kind::end ? "end of input" : "'" + t.text + "'";
        throw ParseError(msg + ", got " + got, t.line, t.column);
    }

    void conjunction() {
        term();
        while (cur().kind == Token::Kind::amp) {
            take();
            term();
        }
    }

    void term() {
        const Token t = take();
        if (t.kind == Token::Kind::lparen) {
            conjunction();
            if (cur().kind != Token::Kind::rparen) fail_at(cur(), "expected ')'");
            take();
            return;
        }
        if (t.kind != Token::Kind::ident || (t.text != "G" && t.text != "GF")) fail_at(t, "expected 'G' or 'GF'");
        bool recurrent = t.text == "GF";
        if (!recurrent && cur().kind == Token::Kind::ident && cur().text == "F") {
            take();
            recurrent = true;
        }
        Atom a = atom();
        // A binary temporal operator right after an atom, e.g. "G p<=1 U goal".
        if (cur().kind == Token::Kind::ident || cur().kind == Token::Kind::op) fail_at(cur(), "expected '&'");
        (recurrent ? recurrence_ : safety_).push_back(std::move(a));
    }

    Atom atom() {
        const Token t = take();
        if (t.kind != Token::Kind::ident || t.text == "G" || t.text == "GF" || is_temporal_or_boolean(t.text))
            fail_at(t, "expected an atom");
        if (t.text == "p" && cur().kind == Token::Kind::le) {
            take();
            const Token n = take();
            if (n.kind != Token::Kind::integer) fail_at(n, "expected an integer bound");
            int k = 0;
            auto [ptr, ec] = std::from_chars(n.text.data(), n.text.data() + n.text.size(), k);
            if (ec != std::errc{} || k < 1) throw ParseError("bound must be a positive integer", n.line, n.column);
            return Atom::surveillance(k);
        }
        return Atom::task(t.text);
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
    std::vector<Atom> safety_;
    std::vector<Atom> recurrence_;
};

}  // namespace

Objective parse_spec(std::string_view text) { return Parser(Lexer(text).run()).run(); }

std::string print_spec(const Objective& o) {
    std::string out;
    auto add = [&](const char* op, const Atom& a) {
        if (!out.empty()) out += " & ";
        out += op;
        out += a.str();
    };
    for (const Atom& a : o.safety) add("G ", a);
    for (const Atom& a : o.recurrence) add("GF ", a);
    return out;
}

std::set<std::string> task_names(const Objective& o) {
    std::set<std::string> out;
    for (const auto* list : {&o.safety, &o.recurrence})
        for (const Atom& a : *list)
            if (a.kind == Atom::Kind::task) out.insert(a.name);
    return out;
}

}  // namespace survsynth
