#pragma once

// HSMT instance text format and the `v`-line assignment format.
//
//   p hsmt <n_bool> <n_real>
//   a <id> <rel> <rhs> <j>:<coeff> ...        rel in {<=, <, >=, >}
//   c <kind> [<k>] <weight> <lit> ...          kind in {or, card, nae, xor}
//   e <weight> <sexpr>                         (and ..) (or ..) (xor ..) (not e) b<i> a<id>
//   n b<i>|y<j> <symbol>                       optional names
//
// Literal tokens are +b<i>, -b<i>, +a<id>, -a<id>. `#` starts a comment.
// Numbers are decimal or rational (`p/q`); they are stored as doubles.

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "fsmt/errors.hpp"
#include "fsmt/model.hpp"

namespace fsmt {

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace detail {

struct Token {
    std::string_view text;
    std::size_t column = 0;  // 1-based
};

inline std::vector<Token> split_tokens(std::string_view line, bool split_parens) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        const char ch = line[i];
        if (ch == ' ' || ch == '\t' || ch == '\r') {
            ++i;
            continue;
        }
        if (split_parens && (ch == '(' || ch == ')')) {
            out.push_back({line.substr(i, 1), i + 1});
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r' &&
               !(split_parens && (line[j] == '(' || line[j] == ')')))
            ++j;
        out.push_back({line.substr(i, j - i), i + 1});
        i = j;
    }
    return out;
}

inline std::optional<double> parse_plain_number(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline double parse_number(std::size_t line, const Token& tok, std::string_view what) {
    const auto slash = tok.text.find('/');
    std::optional<double> v;
    if (slash == std::string_view::npos) {
        v = parse_plain_number(tok.text);
    } else {
        const auto num = parse_plain_number(tok.text.substr(0, slash));
        const auto den = parse_plain_number(tok.text.substr(slash + 1));
        if (num && den && *den != 0.0) v = *num / *den;
    }
    if (!v || !std::isfinite(*v))
        throw ParseError(line, tok.column, "expected " + std::string(what) + ", got '" + std::string(tok.text) + "'");
    return *v;
}

inline std::uint32_t parse_index(std::size_t line, std::size_t column, std::string_view s, std::string_view what) {
    std::uint32_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ParseError(line, column, "expected " + std::string(what) + ", got '" + std::string(s) + "'");
    return v;
}

struct PendingLiteral {
    std::size_t line;
    std::size_t column;
    Literal lit;
};

class SexprParser {
public:
    SexprParser(std::size_t line, std::vector<Token> toks, std::vector<PendingLiteral>& pending)
        : line_(line), toks_(std::move(toks)), pending_(pending) {}

    Expr parse_all() {
        if (toks_.empty()) throw ParseError(line_, 1, "missing expression");
        Expr e = parse();
        if (pos_ != toks_.size()) throw ParseError(line_, toks_[pos_].column, "trailing tokens after expression");
        return e;
    }

private:
    const Token& next(std::string_view expected) {
        if (pos_ >= toks_.size())
            throw ParseError(line_, toks_.empty() ? 1 : toks_.back().column, "unexpected end, expected " +
                                                                                  std::string(expected));
        return toks_[pos_++];
    }

    Expr parse() {
        const Token& t = next("expression");
        if (t.text == "(") {
            const Token& op = next("operator");
            Expr::Op kind;
            if (op.text == "and")
                kind = Expr::Op::And;
            else if (op.text == "or")
                kind = Expr::Op::Or;
            else if (op.text == "xor")
                kind = Expr::Op::Xor;
            else if (op.text == "not")
                kind = Expr::Op::Not;
            else
                throw ParseError(line_, op.column, "unknown operator '" + std::string(op.text) + "'");
            std::vector<Expr> args;
            while (pos_ < toks_.size() && toks_[pos_].text != ")") args.push_back(parse());
            const Token& close = next("')'");
            if (args.empty()) throw ParseError(line_, close.column, "operator without arguments");
            if (kind == Expr::Op::Not && args.size() != 1)
                throw ParseError(line_, op.column, "not takes exactly one argument");
            if (kind == Expr::Op::Not) return Expr::negate(std::move(args.front()));
            return Expr::nary(kind, std::move(args));
        }
        if (t.text == ")") throw ParseError(line_, t.column, "unexpected ')'");
        if (t.text.size() >= 2 && (t.text[0] == 'b' || t.text[0] == 'a')) {
            const auto idx = parse_index(line_, t.column + 1, t.text.substr(1), "index");
            const Literal l{t.text[0] == 'b' ? VarKind::Bool : VarKind::Atom, idx, false};
            pending_.push_back({line_, t.column, l});
            return Expr::leaf(l);
        }
        throw ParseError(line_, t.column, "expected b<i>, a<id> or '(', got '" + std::string(t.text) + "'");
    }

    std::size_t line_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<PendingLiteral>& pending_;
};

inline Literal parse_literal_token(std::size_t line, const Token& tok) {
    const auto s = tok.text;
    if (s.size() < 3 || (s[0] != '+' && s[0] != '-') || (s[1] != 'b' && s[1] != 'a'))
        throw ParseError(line, tok.column, "expected literal (+b<i>, -b<i>, +a<id>, -a<id>), got '" +
                                               std::string(s) + "'");
    const auto idx = parse_index(line, tok.column + 2, s.substr(2), "literal index");
    return Literal{s[1] == 'b' ? VarKind::Bool : VarKind::Atom, idx, s[0] == '-'};
}

inline double parse_weight(std::size_t line, const Token& tok) {
    const double w = parse_number(line, tok, "weight");
    if (!(w > 0.0)) throw ParseError(line, tok.column, "weight must be positive");
    return w;
}

}  // namespace detail

/// Parses HSMT text into a validated, canonical Formula.
inline Formula parse_instance(std::string_view text) {
    using detail::Token;
    Formula f;
    bool have_header = false;
    std::map<std::uint32_t, std::pair<std::size_t, Atom>> atoms;  // id -> (line, atom)
    std::vector<detail::PendingLiteral> pending;

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const auto toks = detail::split_tokens(line, false);
        if (toks.empty()) {
            if (end == text.size()) break;
            continue;
        }
        const Token& head = toks.front();
        if (!have_header) {
            if (head.text != "p" || toks.size() != 4 || toks[1].text != "hsmt")
                throw ParseError(line_no, head.column, "expected header 'p hsmt <n_bool> <n_real>'");
            f.n_bool = detail::parse_index(line_no, toks[2].column, toks[2].text, "Boolean count");
            f.n_real = detail::parse_index(line_no, toks[3].column, toks[3].text, "real count");
            have_header = true;
            continue;
        }
        if (head.text == "p") throw ParseError(line_no, head.column, "duplicate header");
        if (head.text == "a") {
            if (toks.size() < 5) throw ParseError(line_no, head.column, "atom line needs id, relation, rhs, terms");
            const auto id = detail::parse_index(line_no, toks[1].column, toks[1].text, "atom id");
            const auto rel_text = toks[2].text;
            Relation rel;
            if (rel_text == "<=")
                rel = Relation::Le;
            else if (rel_text == "<")
                rel = Relation::Lt;
            else if (rel_text == ">=")
                rel = Relation::Ge;
            else if (rel_text == ">")
                rel = Relation::Gt;
            else if (rel_text == "=" || rel_text == "==")
                throw ParseError(line_no, toks[2].column, "equality atoms unsupported; use two inequalities");
            else
                throw ParseError(line_no, toks[2].column, "unknown relation '" + std::string(rel_text) + "'");
            const double rhs = detail::parse_number(line_no, toks[3], "right-hand side");
            std::vector<std::pair<std::uint32_t, double>> coeffs;
            for (std::size_t t = 4; t < toks.size(); ++t) {
                const auto colon = toks[t].text.find(':');
                if (colon == std::string_view::npos)
                    throw ParseError(line_no, toks[t].column, "expected <j>:<coeff>");
                const auto j = detail::parse_index(line_no, toks[t].column, toks[t].text.substr(0, colon), "real index");
                if (j >= f.n_real) throw ParseError(line_no, toks[t].column, "real index out of range");
                if (std::any_of(coeffs.begin(), coeffs.end(), [&](const auto& c) { return c.first == j; }))
                    throw ParseError(line_no, toks[t].column, "duplicate real index in atom");
                const Token coeff_tok{toks[t].text.substr(colon + 1), toks[t].column + colon + 1};
                coeffs.emplace_back(j, detail::parse_number(line_no, coeff_tok, "coefficient"));
            }
            if (atoms.contains(id)) throw ParseError(line_no, toks[1].column, "duplicate atom id");
            try {
                atoms.emplace(id, std::pair{line_no, make_atom(id, std::move(coeffs), rel, rhs)});
            } catch (const InvalidArgument& e) {
                throw ParseError(line_no, head.column, e.what());
            }
            continue;
        }
        if (head.text == "c") {
            if (toks.size() < 3) throw ParseError(line_no, head.column, "constraint line too short");
            Symmetric body;
            const auto kind = toks[1].text;
            if (kind == "or")
                body.kind = SymKind::Or;
            else if (kind == "card")
                body.kind = SymKind::Card;
            else if (kind == "nae")
                body.kind = SymKind::Nae;
            else if (kind == "xor")
                body.kind = SymKind::Xor;
            else
                throw ParseError(line_no, toks[1].column, "unknown constraint kind '" + std::string(kind) + "'");
            std::size_t t = 2;
            if (body.kind == SymKind::Card) {
                body.threshold = detail::parse_index(line_no, toks[t].column, toks[t].text, "cardinality bound");
                ++t;
            }
            if (t >= toks.size()) throw ParseError(line_no, head.column, "missing weight");
            const double w = detail::parse_weight(line_no, toks[t++]);
            if (t >= toks.size()) throw ParseError(line_no, head.column, "constraint without literals");
            for (; t < toks.size(); ++t) {
                const Literal l = detail::parse_literal_token(line_no, toks[t]);
                pending.push_back({line_no, toks[t].column, l});
                body.literals.push_back(l);
            }
            if (body.kind == SymKind::Card && body.threshold > body.literals.size())
                throw ParseError(line_no, toks[2].column, "cardinality bound exceeds literal count");
            f.constraints.push_back(Constraint{std::move(body), w});
            continue;
        }
        if (head.text == "e") {
            if (toks.size() < 3) throw ParseError(line_no, head.column, "expression line needs weight and expression");
            const double w = detail::parse_weight(line_no, toks[1]);
            // Re-tokenize the remainder with parentheses split out.
            const std::size_t off = toks[2].column - 1;
            auto sub = detail::split_tokens(line.substr(off), true);
            for (auto& tk : sub) tk.column += off;
            detail::SexprParser parser(line_no, std::move(sub), pending);
            f.constraints.push_back(Constraint{parser.parse_all(), w});
            continue;
        }
        if (head.text == "n") {
            if (toks.size() != 3) throw ParseError(line_no, head.column, "name line is 'n b<i>|y<j> <symbol>'");
            const auto ref = toks[1].text;
            if (ref.size() < 2 || (ref[0] != 'b' && ref[0] != 'y'))
                throw ParseError(line_no, toks[1].column, "expected b<i> or y<j>");
            const auto idx = detail::parse_index(line_no, toks[1].column + 1, ref.substr(1), "index");
            auto& table = ref[0] == 'b' ? f.names.bools : f.names.reals;
            const auto size = ref[0] == 'b' ? f.n_bool : f.n_real;
            if (idx >= size) throw ParseError(line_no, toks[1].column, "name index out of range");
            table.resize(size);
            table[idx] = std::string(toks[2].text);
            continue;
        }
        throw ParseError(line_no, head.column, "unknown line type '" + std::string(head.text) + "'");
    }
    if (!have_header) throw ParseError(line_no == 0 ? 1 : line_no, 1, "missing header");

    std::uint32_t expect = 0;
    for (auto& [id, entry] : atoms) {
        if (id != expect) throw ParseError(entry.first, 1, "atom ids must be dense; missing id " + std::to_string(expect));
        f.atoms.push_back(std::move(entry.second));
        ++expect;
    }
    for (const auto& p : pending) {
        const auto limit = p.lit.kind == VarKind::Bool ? f.n_bool : f.n_atoms();
        if (p.lit.index >= limit)
            throw ParseError(p.line, p.column, std::string(p.lit.kind == VarKind::Bool ? "Boolean" : "atom") +
                                                   " index " + std::to_string(p.lit.index) + " out of range");
    }
    for (auto* table : {&f.names.bools, &f.names.reals})
        if (std::any_of(table->begin(), table->end(), [](const std::string& s) { return s.empty(); }))
            throw ParseError(line_no, 1, "symbol table must name every variable of a kind");
    validate(f);
    return f;
}

namespace detail {

inline std::string literal_token(const Literal& l) {
    return std::string(l.negated ? "-" : "+") + (l.kind == VarKind::Bool ? "b" : "a") + std::to_string(l.index);
}

inline void write_expr(std::ostream& os, const Expr& e) {
    auto leaf = [&](const Literal& l) {
        if (l.negated) os << "(not ";
        os << (l.kind == VarKind::Bool ? 'b' : 'a') << l.index;
        if (l.negated) os << ')';
    };
    switch (e.op) {
        case Expr::Op::Leaf: leaf(e.lit); return;
        case Expr::Op::Not: os << "(not"; break;
        case Expr::Op::And: os << "(and"; break;
        case Expr::Op::Or: os << "(or"; break;
        case Expr::Op::Xor: os << "(xor"; break;
    }
    for (const auto& a : e.args) {
        os << ' ';
        write_expr(os, a);
    }
    os << ')';
}

}  // namespace detail

inline std::string serialize_instance(const Formula& f) {
    std::ostringstream os;
    os << "p hsmt " << f.n_bool << ' ' << f.n_real << '\n';
    for (std::size_t i = 0; i < f.names.bools.size(); ++i) os << "n b" << i << ' ' << f.names.bools[i] << '\n';
    for (std::size_t j = 0; j < f.names.reals.size(); ++j) os << "n y" << j << ' ' << f.names.reals[j] << '\n';
    for (const auto& a : f.atoms) {
        os << "a " << a.id << ' ' << (a.strict ? "<" : "<=") << ' ' << format_double(a.rhs);
        for (const auto& [j, q] : a.coeffs) os << ' ' << j << ':' << format_double(q);
        os << '\n';
    }
    for (const auto& c : f.constraints) {
        if (c.is_symmetric()) {
            const auto& s = c.symmetric();
            static constexpr const char* kNames[] = {"or", "card", "nae", "xor"};
            os << "c " << kNames[static_cast<int>(s.kind)];
            if (s.kind == SymKind::Card) os << ' ' << s.threshold;
            os << ' ' << format_double(c.weight);
            for (const auto& l : s.literals) os << ' ' << detail::literal_token(l);
        } else {
            os << "e " << format_double(c.weight) << ' ';
            detail::write_expr(os, c.expr());
        }
        os << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Assignments: `v b<i>=<-1|+1> ... y<j>=<real> ...`

inline std::string format_assignment(const Assignment& asg) {
    std::ostringstream os;
    if (!asg.x.empty()) {
        os << 'v';
        for (std::size_t i = 0; i < asg.x.size(); ++i) os << " b" << i << '=' << (asg.x[i] < 0 ? "-1" : "+1");
        os << '\n';
    }
    if (!asg.y.empty()) {
        os << 'v';
        for (std::size_t j = 0; j < asg.y.size(); ++j) os << " y" << j << '=' << format_double(asg.y[j]);
        os << '\n';
    }
    return os.str();
}

/// Reads every `v` line; other lines (`s`, `c`, blanks) are ignored. Each
/// variable must be given exactly once and the indices must be dense.
inline Assignment parse_assignment(std::string_view text) {
    std::map<std::uint32_t, int> xs;
    std::map<std::uint32_t, double> ys;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        const auto toks = detail::split_tokens(line, false);
        if (toks.empty() || toks.front().text != "v") continue;
        for (std::size_t t = 1; t < toks.size(); ++t) {
            const auto tok = toks[t];
            const auto eq = tok.text.find('=');
            if (eq == std::string_view::npos || eq < 2 || (tok.text[0] != 'b' && tok.text[0] != 'y'))
                throw ParseError(line_no, tok.column, "expected b<i>=<value> or y<j>=<value>");
            const auto idx = detail::parse_index(line_no, tok.column + 1, tok.text.substr(1, eq - 1), "index");
            const detail::Token val{tok.text.substr(eq + 1), tok.column + eq + 1};
            const double v = detail::parse_number(line_no, val, "value");
            if (tok.text[0] == 'b') {
                if (v != -1.0 && v != 1.0) throw ParseError(line_no, val.column, "Boolean value must be -1 or +1");
                if (!xs.emplace(idx, static_cast<int>(v)).second)
                    throw ParseError(line_no, tok.column, "duplicate Boolean b" + std::to_string(idx));
            } else if (!ys.emplace(idx, v).second) {
                throw ParseError(line_no, tok.column, "duplicate real y" + std::to_string(idx));
            }
        }
    }
    Assignment asg;
    for (const auto& [i, v] : xs) {
        if (i != asg.x.size()) throw InvalidArgument("assignment is missing b" + std::to_string(asg.x.size()));
        asg.x.push_back(v);
    }
    for (const auto& [j, v] : ys) {
        if (j != asg.y.size()) throw InvalidArgument("assignment is missing y" + std::to_string(asg.y.size()));
        asg.y.push_back(v);
    }
    return asg;
}

}  // namespace fsmt
