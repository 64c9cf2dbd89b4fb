#pragma once

// SMT-LIB2 (QF_LRA) export. Every double is written as its exact decimal
// expansion, so the script is satisfiability-equivalent to the in-memory
// formula with no rounding.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "fsmt/model.hpp"

namespace fsmt {

namespace detail {

/// Little-endian base-1e9 unsigned integer, just enough for exact decimals.
class Decimal {
public:
    explicit Decimal(std::uint64_t v) {
        do {
            limbs_.push_back(static_cast<std::uint32_t>(v % kBase));
            v /= kBase;
        } while (v != 0);
    }
    void mul(std::uint32_t m) {
        std::uint64_t carry = 0;
        for (auto& l : limbs_) {
            const std::uint64_t cur = std::uint64_t{l} * m + carry;
            l = static_cast<std::uint32_t>(cur % kBase);
            carry = cur / kBase;
        }
        while (carry != 0) {
            limbs_.push_back(static_cast<std::uint32_t>(carry % kBase));
            carry /= kBase;
        }
    }
    std::string str() const {
        std::string s = std::to_string(limbs_.back());
        for (auto it = limbs_.rbegin() + 1; it != limbs_.rend(); ++it) {
            const std::string part = std::to_string(*it);
            s += std::string(9 - part.size(), '0') + part;
        }
        return s;
    }

private:
    static constexpr std::uint64_t kBase = 1000000000;
    std::vector<std::uint32_t> limbs_;
};

}  // namespace detail

/// Exact SMT-LIB numeral/decimal for a finite double; negatives as `(- x)`.
inline std::string smt2_number(double v) {
    if (v == 0.0) return "0";
    const bool neg = std::signbit(v);
    const double mag = std::fabs(v);
    int exp = 0;
    const double frac = std::frexp(mag, &exp);  // mag = frac * 2^exp, frac in [0.5, 1)
    auto mant = static_cast<std::uint64_t>(std::ldexp(frac, 53));
    exp -= 53;
    while (mant != 0 && (mant & 1u) == 0 && exp < 0) {
        mant >>= 1;
        ++exp;
    }
    std::string text;
    detail::Decimal d(mant);
    if (exp >= 0) {
        for (int i = 0; i < exp; ++i) d.mul(2);
        text = d.str();
    } else {
        const int k = -exp;  // mant / 2^k == mant * 5^k / 10^k
        for (int i = 0; i < k; ++i) d.mul(5);
        std::string digits = d.str();
        if (digits.size() <= static_cast<std::size_t>(k)) digits.insert(0, k + 1 - digits.size(), '0');
        text = digits.substr(0, digits.size() - k) + "." + digits.substr(digits.size() - k);
    }
    return neg ? "(- " + text + ")" : text;
}

namespace detail {

inline bool simple_symbol(const std::string& s) {
    if (s.empty() || std::isdigit(static_cast<unsigned char>(s.front()))) return false;
    for (char ch : s)
        if (!std::isalnum(static_cast<unsigned char>(ch)) && std::string("~!@$%^&*_-+=<>.?/").find(ch) == std::string::npos)
            return false;
    return true;
}

class Smt2Writer {
public:
    explicit Smt2Writer(const Formula& f) : f_(f) {}

    std::string bool_name(std::uint32_t i) const { return name(f_.names.bools, i, 'b'); }
    std::string real_name(std::uint32_t j) const { return name(f_.names.reals, j, 'y'); }

    std::string atom(const Atom& a) const {
        std::string lhs;
        std::vector<std::string> terms;
        for (const auto& [j, q] : a.coeffs)
            terms.push_back(q == 1.0 ? real_name(j) : "(* " + smt2_number(q) + " " + real_name(j) + ")");
        if (terms.size() == 1) {
            lhs = terms.front();
        } else {
            lhs = "(+";
            for (const auto& t : terms) lhs += " " + t;
            lhs += ")";
        }
        return std::string("(") + (a.strict ? "<" : "<=") + " " + lhs + " " + smt2_number(a.rhs) + ")";
    }

    std::string literal(const Literal& l) const {
        const std::string base = l.kind == VarKind::Bool ? bool_name(l.index) : atom(f_.atoms[l.index]);
        return l.negated ? "(not " + base + ")" : base;
    }

    std::string nary(const std::string& op, const std::vector<std::string>& args) const {
        if (args.size() == 1) return args.front();
        std::string s = "(" + op;
        for (const auto& a : args) s += " " + a;
        return s + ")";
    }

    std::string expr(const Expr& e) const {
        if (e.op == Expr::Op::Leaf) return literal(e.lit);
        std::vector<std::string> args;
        for (const auto& a : e.args) args.push_back(expr(a));
        switch (e.op) {
            case Expr::Op::Not: return "(not " + args.front() + ")";
            case Expr::Op::And: return nary("and", args);
            case Expr::Op::Or: return nary("or", args);
            default: return nary("xor", args);
        }
    }

    std::string constraint(const Constraint& c) const {
        if (!c.is_symmetric()) return expr(c.expr());
        const auto& s = c.symmetric();
        std::vector<std::string> lits;
        for (const auto& l : s.literals) lits.push_back(literal(l));
        switch (s.kind) {
            case SymKind::Or: return nary("or", lits);
            case SymKind::Xor: return nary("xor", lits);
            case SymKind::Nae: return lits.size() == 1 ? "false" : "(not " + nary("=", lits) + ")";
            case SymKind::Card: {
                std::vector<std::string> terms;
                for (const auto& l : lits) terms.push_back("(ite " + l + " 1 0)");
                return "(<= " + nary("+", terms) + " " + std::to_string(s.threshold) + ")";
            }
        }
        return "true";
    }

private:
    static std::string name(const std::vector<std::string>& table, std::uint32_t i, char prefix) {
        if (table.empty()) return prefix + std::to_string(i);
        return simple_symbol(table[i]) ? table[i] : "|" + table[i] + "|";
    }

    const Formula& f_;
};

}  // namespace detail

/// QF_LRA script: Booleans as Bool, reals as Real, one assert per constraint.
inline std::string export_smt2(const Formula& f) {
    const detail::Smt2Writer w(f);
    std::ostringstream os;
    os << "(set-logic QF_LRA)\n";
    for (std::uint32_t i = 0; i < f.n_bool; ++i) os << "(declare-fun " << w.bool_name(i) << " () Bool)\n";
    for (std::uint32_t j = 0; j < f.n_real; ++j) os << "(declare-fun " << w.real_name(j) << " () Real)\n";
    for (const auto& c : f.constraints) os << "(assert " << w.constraint(c) << ")\n";
    os << "(check-sat)\n(exit)\n";
    return os.str();
}

}  // namespace fsmt
