// LTL formulas in negation normal form.
//
// Formulas are immutable trees over literals and the operators
// {&, |, X, F, G, U}. Every node caches its size, temporal nesting depth and
// a structural hash, so sharing subtrees between formulas is free and
// equality checks reject most mismatches without walking the tree.

#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pltl {

enum class LtlOp : std::uint8_t { Literal, And, Or, Next, Finally, Globally, Until };

class LtlFormula {
public:
    static LtlFormula literal(std::string prop, bool negated = false);
    static LtlFormula conj(LtlFormula lhs, LtlFormula rhs);
    static LtlFormula disj(LtlFormula lhs, LtlFormula rhs);
    static LtlFormula next(LtlFormula child);
    static LtlFormula finally(LtlFormula child);
    static LtlFormula globally(LtlFormula child);
    static LtlFormula until(LtlFormula lhs, LtlFormula rhs);
    static LtlFormula unary(LtlOp op, LtlFormula child);
    static LtlFormula binary(LtlOp op, LtlFormula lhs, LtlFormula rhs);

    LtlOp op() const noexcept;
    const std::string& prop() const noexcept;
    bool negated() const noexcept;
    // Child of a unary node, or left operand of a binary node.
    const LtlFormula& left() const noexcept;
    const LtlFormula& right() const noexcept;
    const LtlFormula& child() const noexcept { return left(); }

    std::size_t size() const noexcept;
    std::size_t depth() const noexcept;
    std::uint64_t hash() const noexcept;
    // True when the formula contains no temporal operator.
    bool propositional() const noexcept;

    bool is_literal() const noexcept { return op() == LtlOp::Literal; }
    bool is_unary() const noexcept {
        return op() == LtlOp::Next || op() == LtlOp::Finally || op() == LtlOp::Globally;
    }
    bool is_binary() const noexcept {
        return op() == LtlOp::And || op() == LtlOp::Or || op() == LtlOp::Until;
    }
    bool is_temporal() const noexcept { return is_unary() || op() == LtlOp::Until; }

    std::string to_string() const;

    friend bool operator==(const LtlFormula& a, const LtlFormula& b) noexcept;
    friend bool operator!=(const LtlFormula& a, const LtlFormula& b) noexcept { return !(a == b); }

private:
    struct Node;
    explicit LtlFormula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

struct LtlFormula::Node {
    LtlOp op = LtlOp::Literal;
    std::string prop;
    bool negated = false;
    std::optional<LtlFormula> lhs;
    std::optional<LtlFormula> rhs;
    std::size_t size = 1;
    std::size_t depth = 0;
    std::uint64_t hash = 0;
    bool propositional = true;
};

namespace detail {

inline std::uint64_t mix_hash(std::uint64_t seed, std::uint64_t value) noexcept {
    // splitmix64 finalizer over the combined value
    std::uint64_t z = seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view text) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline const char* op_symbol(LtlOp op) noexcept {
    switch (op) {
    case LtlOp::And: return "&";
    case LtlOp::Or: return "|";
    case LtlOp::Next: return "X";
    case LtlOp::Finally: return "F";
    case LtlOp::Globally: return "G";
    case LtlOp::Until: return "U";
    case LtlOp::Literal: break;
    }
    return "";
}

} // namespace detail

inline LtlFormula LtlFormula::literal(std::string prop, bool negated) {
    auto node = std::make_shared<Node>();
    node->op = LtlOp::Literal;
    node->hash = detail::mix_hash(detail::fnv1a(prop), negated ? 2 : 1);
    node->prop = std::move(prop);
    node->negated = negated;
    return LtlFormula(std::move(node));
}

inline LtlFormula LtlFormula::unary(LtlOp op, LtlFormula child) {
    if (op != LtlOp::Next && op != LtlOp::Finally && op != LtlOp::Globally)
        throw std::invalid_argument("LtlFormula::unary: not a unary operator");
    auto node = std::make_shared<Node>();
    node->op = op;
    node->size = child.size() + 1;
    node->depth = child.depth() + 1;
    node->hash = detail::mix_hash(static_cast<std::uint64_t>(op) * 0x1000193ULL, child.hash());
    node->propositional = false;
    node->lhs = std::move(child);
    return LtlFormula(std::move(node));
}

inline LtlFormula LtlFormula::binary(LtlOp op, LtlFormula lhs, LtlFormula rhs) {
    if (op != LtlOp::And && op != LtlOp::Or && op != LtlOp::Until)
        throw std::invalid_argument("LtlFormula::binary: not a binary operator");
    auto node = std::make_shared<Node>();
    node->op = op;
    node->size = lhs.size() + rhs.size() + 1;
    const std::size_t deepest = std::max(lhs.depth(), rhs.depth());
    node->depth = op == LtlOp::Until ? deepest + 1 : deepest;
    node->hash = detail::mix_hash(
        detail::mix_hash(static_cast<std::uint64_t>(op) * 0x1000193ULL, lhs.hash()), rhs.hash());
    node->propositional = op != LtlOp::Until && lhs.propositional() && rhs.propositional();
    node->lhs = std::move(lhs);
    node->rhs = std::move(rhs);
    return LtlFormula(std::move(node));
}

inline LtlFormula LtlFormula::conj(LtlFormula lhs, LtlFormula rhs) {
    return binary(LtlOp::And, std::move(lhs), std::move(rhs));
}
inline LtlFormula LtlFormula::disj(LtlFormula lhs, LtlFormula rhs) {
    return binary(LtlOp::Or, std::move(lhs), std::move(rhs));
}
inline LtlFormula LtlFormula::until(LtlFormula lhs, LtlFormula rhs) {
    return binary(LtlOp::Until, std::move(lhs), std::move(rhs));
}
inline LtlFormula LtlFormula::next(LtlFormula child) { return unary(LtlOp::Next, std::move(child)); }
inline LtlFormula LtlFormula::finally(LtlFormula child) {
    return unary(LtlOp::Finally, std::move(child));
}
inline LtlFormula LtlFormula::globally(LtlFormula child) {
    return unary(LtlOp::Globally, std::move(child));
}

inline LtlOp LtlFormula::op() const noexcept { return node_->op; }
inline const std::string& LtlFormula::prop() const noexcept { return node_->prop; }
inline bool LtlFormula::negated() const noexcept { return node_->negated; }
inline const LtlFormula& LtlFormula::left() const noexcept { return *node_->lhs; }
inline const LtlFormula& LtlFormula::right() const noexcept { return *node_->rhs; }
inline std::size_t LtlFormula::size() const noexcept { return node_->size; }
inline std::size_t LtlFormula::depth() const noexcept { return node_->depth; }
inline std::uint64_t LtlFormula::hash() const noexcept { return node_->hash; }
inline bool LtlFormula::propositional() const noexcept { return node_->propositional; }

inline bool operator==(const LtlFormula& a, const LtlFormula& b) noexcept {
    if (a.node_ == b.node_) return true;
    if (a.hash() != b.hash() || a.size() != b.size() || a.op() != b.op()) return false;
    if (a.is_literal()) return a.negated() == b.negated() && a.prop() == b.prop();
    if (a.is_unary()) return a.child() == b.child();
    return a.left() == b.left() && a.right() == b.right();
}

inline std::string LtlFormula::to_string() const {
    switch (op()) {
    case LtlOp::Literal:
        return negated() ? "!" + prop() : prop();
    case LtlOp::Next:
    case LtlOp::Finally:
    case LtlOp::Globally:
        return std::string(detail::op_symbol(op())) + "(" + child().to_string() + ")";
    case LtlOp::And:
    case LtlOp::Or:
    case LtlOp::Until:
        return "(" + left().to_string() + " " + detail::op_symbol(op()) + " " +
               right().to_string() + ")";
    }
    return {};
}

struct LtlMeasure {
    std::size_t size = 0;
    std::size_t depth = 0;
};

inline LtlMeasure measure(const LtlFormula& f) noexcept { return {f.size(), f.depth()}; }

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

class LtlParseError : public std::runtime_error {
public:
    LtlParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

namespace detail {

// Surface syntax tree; negation may appear anywhere until NNF conversion.
struct RawLtl {
    enum class Kind { Ident, Not, And, Or, Next, Finally, Globally, Until } kind;
    std::string ident;
    std::unique_ptr<RawLtl> lhs, rhs;
    std::size_t position = 0;
};

class LtlParser {
public:
    explicit LtlParser(std::string_view text) : text_(text) {}

    std::unique_ptr<RawLtl> parse() {
        auto root = parse_or();
        skip_space();
        if (pos_ != text_.size())
            throw LtlParseError("unexpected '" + std::string(1, text_[pos_]) + "' at position " +
                                    std::to_string(pos_),
                                pos_);
        return root;
    }

private:
    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    static bool ident_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    }

    // Returns the next word without consuming it; empty when not at a word.
    std::string_view peek_word() {
        skip_space();
        std::size_t end = pos_;
        while (end < text_.size() && ident_char(text_[end])) ++end;
        return text_.substr(pos_, end - pos_);
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static std::unique_ptr<RawLtl> make(RawLtl::Kind kind, std::size_t at,
                                        std::unique_ptr<RawLtl> lhs = nullptr,
                                        std::unique_ptr<RawLtl> rhs = nullptr) {
        auto node = std::make_unique<RawLtl>();
        node->kind = kind;
        node->position = at;
        node->lhs = std::move(lhs);
        node->rhs = std::move(rhs);
        return node;
    }

    std::unique_ptr<RawLtl> parse_or() {
        auto lhs = parse_and();
        for (;;) {
            const std::size_t at = pos_;
            if (!accept('|')) return lhs;
            lhs = make(RawLtl::Kind::Or, at, std::move(lhs), parse_and());
        }
    }

    std::unique_ptr<RawLtl> parse_and() {
        auto lhs = parse_until();
        for (;;) {
            const std::size_t at = pos_;
            if (!accept('&')) return lhs;
            lhs = make(RawLtl::Kind::And, at, std::move(lhs), parse_until());
        }
    }

    std::unique_ptr<RawLtl> parse_until() {
        auto lhs = parse_unary();
        if (peek_word() == "U") {
            const std::size_t at = pos_;
            ++pos_;
            return make(RawLtl::Kind::Until, at, std::move(lhs), parse_until());
        }
        return lhs;
    }

    std::unique_ptr<RawLtl> parse_unary() {
        skip_space();
        const std::size_t at = pos_;
        if (pos_ >= text_.size()) throw LtlParseError("unexpected end of formula", pos_);
        if (accept('!')) return make(RawLtl::Kind::Not, at, parse_unary());
        if (accept('(')) {
            auto inner = parse_or();
            if (!accept(')'))
                throw LtlParseError("expected ')' at position " + std::to_string(pos_), pos_);
            return inner;
        }
        const std::string_view word = peek_word();
        if (word.empty())
            throw LtlParseError("unexpected '" + std::string(1, text_[pos_]) + "' at position " +
                                    std::to_string(pos_),
                                pos_);
        if (word == "X" || word == "F" || word == "G") {
            pos_ += 1;
            const auto kind = word == "X"   ? RawLtl::Kind::Next
                              : word == "F" ? RawLtl::Kind::Finally
                                            : RawLtl::Kind::Globally;
            return make(kind, at, parse_unary());
        }
        if (word == "U")
            throw LtlParseError("'U' needs a left operand at position " + std::to_string(pos_), pos_);
        if (std::isdigit(static_cast<unsigned char>(word.front())))
            throw LtlParseError("proposition may not start with a digit at position " +
                                    std::to_string(pos_),
                                pos_);
        pos_ += word.size();
        auto node = make(RawLtl::Kind::Ident, at);
        node->ident = std::string(word);
        return node;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

inline std::string raw_to_string(const RawLtl& raw) {
    using K = RawLtl::Kind;
    switch (raw.kind) {
    case K::Ident: return raw.ident;
    case K::Not: return "!" + raw_to_string(*raw.lhs);
    case K::Next: return "X(" + raw_to_string(*raw.lhs) + ")";
    case K::Finally: return "F(" + raw_to_string(*raw.lhs) + ")";
    case K::Globally: return "G(" + raw_to_string(*raw.lhs) + ")";
    case K::And: return "(" + raw_to_string(*raw.lhs) + " & " + raw_to_string(*raw.rhs) + ")";
    case K::Or: return "(" + raw_to_string(*raw.lhs) + " | " + raw_to_string(*raw.rhs) + ")";
    case K::Until: return "(" + raw_to_string(*raw.lhs) + " U " + raw_to_string(*raw.rhs) + ")";
    }
    return {};
}

inline LtlFormula to_nnf(const RawLtl& raw, bool negate) {
    using K = RawLtl::Kind;
    switch (raw.kind) {
    case K::Ident: return LtlFormula::literal(raw.ident, negate);
    case K::Not: return to_nnf(*raw.lhs, !negate);
    case K::Next: return LtlFormula::next(to_nnf(*raw.lhs, negate));
    case K::Finally:
        return negate ? LtlFormula::globally(to_nnf(*raw.lhs, true))
                      : LtlFormula::finally(to_nnf(*raw.lhs, false));
    case K::Globally:
        return negate ? LtlFormula::finally(to_nnf(*raw.lhs, true))
                      : LtlFormula::globally(to_nnf(*raw.lhs, false));
    case K::And:
    case K::Or: {
        const bool as_and = (raw.kind == K::And) != negate;
        auto lhs = to_nnf(*raw.lhs, negate);
        auto rhs = to_nnf(*raw.rhs, negate);
        return as_and ? LtlFormula::conj(std::move(lhs), std::move(rhs))
                      : LtlFormula::disj(std::move(lhs), std::move(rhs));
    }
    case K::Until:
        if (negate)
            throw LtlParseError("negated Until is outside the formula grammar: !" +
                                    raw_to_string(raw),
                                raw.position);
        return LtlFormula::until(to_nnf(*raw.lhs, false), to_nnf(*raw.rhs, false));
    }
    throw LtlParseError("internal: unknown node", raw.position);
}

} // namespace detail

// Parses the ASCII grammar and pushes negations down to literals.
inline LtlFormula parse_ltl(std::string_view text) {
    detail::LtlParser parser(text);
    const auto raw = parser.parse();
    return detail::to_nnf(*raw, false);
}

// ---------------------------------------------------------------------------
// Canonical form and pruning predicates
// ---------------------------------------------------------------------------

namespace detail {

inline void collect_chain(const LtlFormula& f, LtlOp op, std::vector<LtlFormula>& out) {
    if (f.op() == op) {
        collect_chain(f.left(), op, out);
        collect_chain(f.right(), op, out);
    } else {
        out.push_back(f);
    }
}

} // namespace detail

// Operands of the maximal same-operator &/| chain rooted at f (f itself otherwise).
inline std::vector<LtlFormula> chain_operands(const LtlFormula& f) {
    std::vector<LtlFormula> out;
    if (f.op() == LtlOp::And || f.op() == LtlOp::Or)
        detail::collect_chain(f, f.op(), out);
    else
        out.push_back(f);
    return out;
}

// Flattens &/| chains and orders their operands by printed form, rebuilding
// them left-nested. Size, depth and semantics are preserved.
inline LtlFormula canonicalize(const LtlFormula& f) {
    switch (f.op()) {
    case LtlOp::Literal: return f;
    case LtlOp::Next:
    case LtlOp::Finally:
    case LtlOp::Globally: {
        auto child = canonicalize(f.child());
        if (child == f.child()) return f;
        return LtlFormula::unary(f.op(), std::move(child));
    }
    case LtlOp::Until: {
        auto lhs = canonicalize(f.left());
        auto rhs = canonicalize(f.right());
        if (lhs == f.left() && rhs == f.right()) return f;
        return LtlFormula::until(std::move(lhs), std::move(rhs));
    }
    case LtlOp::And:
    case LtlOp::Or: break;
    }
    std::vector<LtlFormula> raw;
    detail::collect_chain(f, f.op(), raw);
    std::vector<std::pair<std::string, LtlFormula>> keyed;
    keyed.reserve(raw.size());
    for (const auto& operand : raw) {
        auto c = canonicalize(operand);
        keyed.emplace_back(c.to_string(), std::move(c));
    }
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    LtlFormula out = keyed.front().second;
    for (std::size_t i = 1; i < keyed.size(); ++i)
        out = LtlFormula::binary(f.op(), std::move(out), keyed[i].second);
    return out;
}

// NNF negation, when it stays inside the grammar (no Until anywhere).
inline std::optional<LtlFormula> nnf_dual(const LtlFormula& f) {
    switch (f.op()) {
    case LtlOp::Literal: return LtlFormula::literal(f.prop(), !f.negated());
    case LtlOp::Until: return std::nullopt;
    case LtlOp::Next:
    case LtlOp::Finally:
    case LtlOp::Globally: {
        auto child = nnf_dual(f.child());
        if (!child) return std::nullopt;
        const LtlOp op = f.op() == LtlOp::Finally    ? LtlOp::Globally
                         : f.op() == LtlOp::Globally ? LtlOp::Finally
                                                     : LtlOp::Next;
        return LtlFormula::unary(op, std::move(*child));
    }
    case LtlOp::And:
    case LtlOp::Or: {
        auto lhs = nnf_dual(f.left());
        auto rhs = nnf_dual(f.right());
        if (!lhs || !rhs) return std::nullopt;
        return LtlFormula::binary(f.op() == LtlOp::And ? LtlOp::Or : LtlOp::And, std::move(*lhs),
                                  std::move(*rhs));
    }
    }
    return std::nullopt;
}

inline bool is_complement(const LtlFormula& f, const LtlFormula& g) {
    const auto dual = nnf_dual(f);
    return dual && canonicalize(*dual) == canonicalize(g);
}

// Root rewrite rules that mark a constructed formula as redundant. Each
// names an equivalent formula of equal or smaller size that the enumeration
// keeps instead.
enum class TemporalRule : std::uint8_t {
    FinallyFinally = 1,     // FF f   == F f
    GloballyGlobally,       // GG f   == G f
    FinallyNext,            // FX f   == XF f
    GloballyNext,           // GX f   == XG f
    FinallyGloballyFinally, // FGF f  == GF f
    GloballyFinallyGlobally,// GFG f  == FG f
    OrOfFinally,            // F f | F g == F(f | g)
    AndOfGlobally,          // G f & G g == G(f & g)
    NextDistributes,        // X f o X g == X(f o g)
    UntilAbsorbs,           // f U (f U g) == (f U g) U g == f U g
};

inline std::optional<TemporalRule> matching_temporal_rule(const LtlFormula& f) {
    const auto count_op = [](const std::vector<LtlFormula>& xs, LtlOp op) {
        return std::count_if(xs.begin(), xs.end(), [op](const LtlFormula& x) { return x.op() == op; });
    };
    switch (f.op()) {
    case LtlOp::Literal:
    case LtlOp::Next: return std::nullopt;
    case LtlOp::Finally: {
        const auto& c = f.child();
        if (c.op() == LtlOp::Finally) return TemporalRule::FinallyFinally;
        if (c.op() == LtlOp::Next) return TemporalRule::FinallyNext;
        if (c.op() == LtlOp::Globally && c.child().op() == LtlOp::Finally)
            return TemporalRule::FinallyGloballyFinally;
        return std::nullopt;
    }
    case LtlOp::Globally: {
        const auto& c = f.child();
        if (c.op() == LtlOp::Globally) return TemporalRule::GloballyGlobally;
        if (c.op() == LtlOp::Next) return TemporalRule::GloballyNext;
        if (c.op() == LtlOp::Finally && c.child().op() == LtlOp::Globally)
            return TemporalRule::GloballyFinallyGlobally;
        return std::nullopt;
    }
    case LtlOp::Or:
    case LtlOp::And: {
        const auto operands = chain_operands(f);
        if (f.op() == LtlOp::Or && count_op(operands, LtlOp::Finally) >= 2)
            return TemporalRule::OrOfFinally;
        if (f.op() == LtlOp::And && count_op(operands, LtlOp::Globally) >= 2)
            return TemporalRule::AndOfGlobally;
        if (count_op(operands, LtlOp::Next) >= 2) return TemporalRule::NextDistributes;
        return std::nullopt;
    }
    case LtlOp::Until: {
        const auto& l = f.left();
        const auto& r = f.right();
        if (l.op() == LtlOp::Next && r.op() == LtlOp::Next) return TemporalRule::NextDistributes;
        if (r.op() == LtlOp::Until && r.left() == l) return TemporalRule::UntilAbsorbs;
        if (l.op() == LtlOp::Until && l.right() == r) return TemporalRule::UntilAbsorbs;
        return std::nullopt;
    }
    }
    return std::nullopt;
}

inline bool temporal_simplify_applies(const LtlFormula& f) {
    return matching_temporal_rule(f).has_value();
}

// True when combining lhs and rhs with op yields a formula equivalent to a
// strictly smaller one (the operands are equal or complementary).
inline bool boolean_simplify_applies(LtlOp op, const LtlFormula& lhs, const LtlFormula& rhs) {
    (void)op; // every binary operator collapses under both conditions
    return canonicalize(lhs) == canonicalize(rhs) || is_complement(lhs, rhs);
}

// Replaces every occurrence of target inside f with replacement.
inline LtlFormula substitute(const LtlFormula& f, const LtlFormula& target,
                             const LtlFormula& replacement) {
    if (f == target) return replacement;
    if (f.is_literal() || f.size() <= target.size()) return f;
    if (f.is_unary()) {
        auto child = substitute(f.child(), target, replacement);
        return child == f.child() ? f : LtlFormula::unary(f.op(), std::move(child));
    }
    auto lhs = substitute(f.left(), target, replacement);
    auto rhs = substitute(f.right(), target, replacement);
    if (lhs == f.left() && rhs == f.right()) return f;
    return LtlFormula::binary(f.op(), std::move(lhs), std::move(rhs));
}

// Proposition names in order of first appearance.
inline std::vector<std::string> propositions(const LtlFormula& f) {
    std::vector<std::string> out;
    std::function<void(const LtlFormula&)> walk = [&](const LtlFormula& g) {
        if (g.is_literal()) {
            if (std::find(out.begin(), out.end(), g.prop()) == out.end()) out.push_back(g.prop());
            return;
        }
        walk(g.left());
        if (g.is_binary()) walk(g.right());
    };
    walk(f);
    return out;
}

} // namespace pltl

template <>
struct std::hash<pltl::LtlFormula> {
    std::size_t operator()(const pltl::LtlFormula& f) const noexcept {
        return static_cast<std::size_t>(f.hash());
    }
};
