// Arithmetic expressions compiled to ensemble circuits.
//
// Grammar: +, -, *, / are left-associative with the usual precedence;
// ^ binds tighter than unary minus, is right-associative, and its
// exponent must be a nonnegative integer literal. Decimal literals may
// carry a fractional part and a scientific exponent.
#pragma once

#include <charconv>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qcm/arith.hpp"
#include "qcm/estimate.hpp"

namespace qcm {

enum class ExprKind { Literal, Neg, Add, Sub, Mul, Div, Pow };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    ExprKind kind = ExprKind::Literal;
    double literal = 0.0;        // Literal
    std::uint64_t exponent = 0;  // Pow
    ExprPtr lhs;                 // Neg child, Pow base, binary left
    ExprPtr rhs;                 // binary right
};

inline ExprPtr make_literal(double v) {
    return std::make_shared<ExprNode>(ExprNode{ExprKind::Literal, v, 0, nullptr, nullptr});
}
inline ExprPtr make_neg(ExprPtr child) {
    return std::make_shared<ExprNode>(ExprNode{ExprKind::Neg, 0.0, 0, std::move(child), nullptr});
}
inline ExprPtr make_binary(ExprKind kind, ExprPtr l, ExprPtr r) {
    return std::make_shared<ExprNode>(ExprNode{kind, 0.0, 0, std::move(l), std::move(r)});
}
inline ExprPtr make_pow(ExprPtr base, std::uint64_t exponent) {
    return std::make_shared<ExprNode>(
        ExprNode{ExprKind::Pow, 0.0, exponent, std::move(base), nullptr});
}

inline bool ast_equal(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return a == b;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case ExprKind::Literal: return a->literal == b->literal;
        case ExprKind::Neg: return ast_equal(a->lhs, b->lhs);
        case ExprKind::Pow: return a->exponent == b->exponent && ast_equal(a->lhs, b->lhs);
        default: return ast_equal(a->lhs, b->lhs) && ast_equal(a->rhs, b->rhs);
    }
}

namespace detail {

struct Token {
    enum Kind { Number, Plus, Minus, Star, Slash, Caret, LParen, RParen, End } kind;
    std::size_t offset = 0;
    double value = 0.0;
    bool is_integer = false;
    std::uint64_t integer = 0;
};

inline std::vector<Token> lex(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            ++i;
            continue;
        }
        const std::size_t start = i;
        switch (c) {
            case '+': out.push_back({Token::Plus, start}); ++i; continue;
            case '-': out.push_back({Token::Minus, start}); ++i; continue;
            case '*': out.push_back({Token::Star, start}); ++i; continue;
            case '/': out.push_back({Token::Slash, start}); ++i; continue;
            case '^': out.push_back({Token::Caret, start}); ++i; continue;
            case '(': out.push_back({Token::LParen, start}); ++i; continue;
            case ')': out.push_back({Token::RParen, start}); ++i; continue;
            default: break;
        }
        auto is_digit = [](char ch) { return ch >= '0' && ch <= '9'; };
        if (is_digit(c) || (c == '.' && i + 1 < text.size() && is_digit(text[i + 1]))) {
            bool saw_dot = false, saw_exp = false;
            while (i < text.size() && is_digit(text[i])) ++i;
            if (i < text.size() && text[i] == '.') {
                saw_dot = true;
                ++i;
                while (i < text.size() && is_digit(text[i])) ++i;
            }
            if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < text.size() && (text[j] == '+' || text[j] == '-')) ++j;
                if (j < text.size() && is_digit(text[j])) {
                    saw_exp = true;
                    i = j;
                    while (i < text.size() && is_digit(text[i])) ++i;
                }
            }
            std::string body(text.substr(start, i - start));
            if (body.front() == '.') body.insert(body.begin(), '0');
            if (body.back() == '.') body.push_back('0');
            Token t{Token::Number, start};
            auto res = std::from_chars(body.data(), body.data() + body.size(), t.value);
            if (res.ec != std::errc{} || res.ptr != body.data() + body.size())
                throw ParseError("malformed number at offset " + std::to_string(start), start,
                                 {"number"});
            t.is_integer = !saw_dot && !saw_exp;
            if (t.is_integer) {
                auto ires =
                    std::from_chars(body.data(), body.data() + body.size(), t.integer);
                if (ires.ec != std::errc{}) t.is_integer = false;
            }
            out.push_back(t);
            continue;
        }
        throw ParseError("unexpected character '" + std::string(1, c) + "' at offset " +
                             std::to_string(start),
                         start, {"number", "operator", "parenthesis"});
    }
    out.push_back({Token::End, text.size()});
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view text) : tokens_(lex(text)) {}

    ExprPtr parse() {
        ExprPtr e = parse_sum();
        if (peek().kind != Token::End)
            throw ParseError("trailing input at offset " + std::to_string(peek().offset),
                             peek().offset, {"'+'", "'-'", "'*'", "'/'", "'^'", "end"});
        return e;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    Token next() { return tokens_[pos_++]; }

    ExprPtr parse_sum() {
        ExprPtr left = parse_product();
        while (peek().kind == Token::Plus || peek().kind == Token::Minus) {
            const bool plus = next().kind == Token::Plus;
            ExprPtr right = parse_product();
            left = make_binary(plus ? ExprKind::Add : ExprKind::Sub, std::move(left),
                               std::move(right));
        }
        return left;
    }

    ExprPtr parse_product() {
        ExprPtr left = parse_unary();
        while (peek().kind == Token::Star || peek().kind == Token::Slash) {
            const bool star = next().kind == Token::Star;
            ExprPtr right = parse_unary();
            left = make_binary(star ? ExprKind::Mul : ExprKind::Div, std::move(left),
                               std::move(right));
        }
        return left;
    }

    ExprPtr parse_unary() {
        if (peek().kind == Token::Minus) {
            next();
            return make_neg(parse_unary());
        }
        if (peek().kind == Token::Plus) {
            next();
            return parse_unary();
        }
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_primary();
        if (peek().kind != Token::Caret) return base;
        // collect the chain of integer exponents and fold it
        // right-associatively into a single value
        std::vector<std::pair<std::uint64_t, std::size_t>> chain;
        while (peek().kind == Token::Caret) {
            next();
            const Token& t = peek();
            if (t.kind != Token::Number || !t.is_integer)
                throw ParseError("expected a nonnegative integer exponent at offset " +
                                     std::to_string(t.offset),
                                 t.offset, {"nonnegative integer exponent"});
            chain.emplace_back(t.integer, t.offset);
            next();
        }
        std::uint64_t exp = chain.back().first;
        for (std::size_t i = chain.size() - 1; i-- > 0;) {
            exp = checked_ipow(chain[i].first, exp, chain[i].second);
        }
        return make_pow(std::move(base), exp);
    }

    static std::uint64_t checked_ipow(std::uint64_t b, std::uint64_t e, std::size_t offset) {
        constexpr std::uint64_t cap = 1'000'000'000;
        if (b == 0) return e == 0 ? 1 : 0;
        if (b == 1) return 1;
        std::uint64_t r = 1;
        for (std::uint64_t i = 0; i < e; ++i) {
            if (r > cap / b)
                throw ParseError("exponent too large at offset " + std::to_string(offset), offset,
                                 {"smaller exponent"});
            r *= b;
        }
        return r;
    }

    ExprPtr parse_primary() {
        const Token& t = peek();
        if (t.kind == Token::Number) {
            next();
            return make_literal(t.value);
        }
        if (t.kind == Token::LParen) {
            next();
            ExprPtr inner = parse_sum();
            if (peek().kind != Token::RParen)
                throw ParseError("expected ')' at offset " + std::to_string(peek().offset),
                                 peek().offset, {"')'"});
            next();
            return inner;
        }
        throw ParseError("expected a value at offset " + std::to_string(t.offset), t.offset,
                         {"number", "'('", "'-'"});
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline ExprPtr parse(std::string_view text) { return detail::Parser(text).parse(); }

// Canonical fully parenthesized form; literals print in shortest
// round-trip notation, so parse(print(ast)) reproduces the tree.
inline std::string print(const ExprPtr& node) {
    switch (node->kind) {
        case ExprKind::Literal: {
            char buf[32];
            auto res = std::to_chars(buf, buf + sizeof buf, node->literal);
            return std::string(buf, res.ptr);
        }
        case ExprKind::Neg: return "(-" + print(node->lhs) + ")";
        case ExprKind::Pow:
            return "(" + print(node->lhs) + " ^ " + std::to_string(node->exponent) + ")";
        case ExprKind::Add: return "(" + print(node->lhs) + " + " + print(node->rhs) + ")";
        case ExprKind::Sub: return "(" + print(node->lhs) + " - " + print(node->rhs) + ")";
        case ExprKind::Mul: return "(" + print(node->lhs) + " * " + print(node->rhs) + ")";
        case ExprKind::Div: return "(" + print(node->lhs) + " / " + print(node->rhs) + ")";
    }
    throw EvaluationError("corrupt expression node");
}

// Floating-point reference evaluation. Divisors smaller in magnitude
// than `divisor_guard` are rejected up front; they would push the
// encoded denominators outside the range the circuits handle well.
inline double exact_eval(const ExprPtr& node, double divisor_guard = 1e-3) {
    double v = 0.0;
    switch (node->kind) {
        case ExprKind::Literal: v = node->literal; break;
        case ExprKind::Neg: v = -exact_eval(node->lhs, divisor_guard); break;
        case ExprKind::Add:
            v = exact_eval(node->lhs, divisor_guard) + exact_eval(node->rhs, divisor_guard);
            break;
        case ExprKind::Sub:
            v = exact_eval(node->lhs, divisor_guard) - exact_eval(node->rhs, divisor_guard);
            break;
        case ExprKind::Mul:
            v = exact_eval(node->lhs, divisor_guard) * exact_eval(node->rhs, divisor_guard);
            break;
        case ExprKind::Div: {
            const double num = exact_eval(node->lhs, divisor_guard);
            const double den = exact_eval(node->rhs, divisor_guard);
            if (std::abs(den) < divisor_guard)
                throw DivisorNearZero("division by a value of magnitude below the guard");
            v = num / den;
            break;
        }
        case ExprKind::Pow:
            v = std::pow(exact_eval(node->lhs, divisor_guard),
                         static_cast<double>(node->exponent));
            break;
    }
    if (!std::isfinite(v)) throw EvaluationError("expression value is not finite");
    return v;
}

enum class EvalMode { exact, sampled };

struct EvalOptions {
    EvalMode mode = EvalMode::exact;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    bool renorm = true;
    double den_floor = kDenFloor;
    double divisor_guard = 1e-3;
    double ci_level = 0.95;
};

struct EvalReport {
    double exact_value = 0.0;
    double circuit_value = 0.0;
    double abs_err = 0.0;
    double rel_err = 0.0;  // abs_err / max(1, |exact_value|)
    std::int64_t physical_gates = 0;
    std::int64_t clones = 0;
    std::int64_t renorms = 0;
    double num_component = 0.0;  // decoded numerator difference of the result
    double den_component = 0.0;  // decoded denominator difference
    std::optional<EstimateReport> estimate;

    nlohmann::json to_json() const {
        nlohmann::json j{{"exact", exact_value},
                         {"circuit", circuit_value},
                         {"abs_err", abs_err},
                         {"rel_err", rel_err},
                         {"physical_gates", physical_gates},
                         {"clones", clones},
                         {"renorms", renorms},
                         {"num_component", num_component},
                         {"den_component", den_component}};
        if (estimate) j["estimate"] = estimate->to_json();
        return j;
    }
};

namespace detail {

inline Real4 build_circuit(EnsembleStore& store, const ExprPtr& node, const EvalOptions& opts) {
    auto finish = [&](Real4 v) {
        return opts.renorm ? renormalize(store, v, opts.den_floor) : v;
    };
    switch (node->kind) {
        case ExprKind::Literal: return encode_real4(store, node->literal);
        case ExprKind::Neg: return neg_r4(build_circuit(store, node->lhs, opts));
        case ExprKind::Add: {
            Real4 l = build_circuit(store, node->lhs, opts);
            Real4 r = build_circuit(store, node->rhs, opts);
            return finish(add_r4(store, l, r));
        }
        case ExprKind::Sub: {
            Real4 l = build_circuit(store, node->lhs, opts);
            Real4 r = build_circuit(store, node->rhs, opts);
            return finish(sub_r4(store, l, r));
        }
        case ExprKind::Mul: {
            Real4 l = build_circuit(store, node->lhs, opts);
            Real4 r = build_circuit(store, node->rhs, opts);
            return finish(mul_r4(store, l, r));
        }
        case ExprKind::Div: {
            Real4 l = build_circuit(store, node->lhs, opts);
            Real4 r = build_circuit(store, node->rhs, opts);
            return finish(div_r4(store, l, r, opts.den_floor));
        }
        case ExprKind::Pow: {
            Real4 base = build_circuit(store, node->lhs, opts);
            return pow_r4(store, base, node->exponent, opts.renorm, opts.den_floor);
        }
    }
    throw EvaluationError("corrupt expression node");
}

}  // namespace detail

// Bottom-up circuit evaluation of the tree against the given store. The
// reference value is computed first (this also runs the divisor guard),
// then the circuit, then optionally a finite-shot estimate of the result.
inline EvalReport evaluate(EnsembleStore& store, const ExprPtr& ast,
                           const EvalOptions& opts = {}) {
    EvalReport rep;
    rep.exact_value = exact_eval(ast, opts.divisor_guard);

    const std::int64_t gates0 =
        store.count_events({std::nullopt, true}) -
        store.count_events({std::string(event_label::alloc), true}) -
        store.count_events({std::string(event_label::clone), true});
    const std::int64_t clones0 = store.count_events({std::string(event_label::clone), {}});
    const std::int64_t renorms0 = store.count_events({std::string(event_label::renorm), {}});

    Real4 result = detail::build_circuit(store, ast, opts);

    rep.physical_gates = store.count_events({std::nullopt, true}) -
                         store.count_events({std::string(event_label::alloc), true}) -
                         store.count_events({std::string(event_label::clone), true}) - gates0;
    rep.clones = store.count_events({std::string(event_label::clone), {}}) - clones0;
    rep.renorms = store.count_events({std::string(event_label::renorm), {}}) - renorms0;

    rep.num_component = r2(store, result.num);
    rep.den_component = r2(store, result.den);
    rep.circuit_value = r4(store, result, opts.den_floor);
    rep.abs_err = std::abs(rep.circuit_value - rep.exact_value);
    rep.rel_err = rep.abs_err / std::max(1.0, std::abs(rep.exact_value));

    if (opts.mode == EvalMode::sampled)
        rep.estimate = estimate_real4(store, result, opts.shots, opts.seed, opts.ci_level);
    return rep;
}

}  // namespace qcm
