// Positive Boolean combinations of probability-threshold atoms P>r [ body ].

#pragma once

#include <cstdio>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "pltl/ltl.hpp"

namespace pltl {

enum class PltlOp : std::uint8_t { Atom, And, Or };

// Threshold rendered with 6 significant digits, e.g. 0.65 -> "0.65".
inline std::string format_threshold(double r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", r);
    return buf;
}

class PltlFormula {
public:
    // P>threshold [ body ]; thresholds outside (0,1) are rejected.
    static PltlFormula atom(double threshold, LtlFormula body);
    static PltlFormula combine(PltlOp op, PltlFormula lhs, PltlFormula rhs);
    static PltlFormula conj(PltlFormula lhs, PltlFormula rhs) {
        return combine(PltlOp::And, std::move(lhs), std::move(rhs));
    }
    static PltlFormula disj(PltlFormula lhs, PltlFormula rhs) {
        return combine(PltlOp::Or, std::move(lhs), std::move(rhs));
    }

    PltlOp op() const noexcept;
    bool is_atom() const noexcept { return op() == PltlOp::Atom; }
    double threshold() const noexcept;
    const LtlFormula& body() const;
    const PltlFormula& left() const;
    const PltlFormula& right() const;

    // Atoms count as their body; the probability operator itself is free.
    std::size_t size() const {
        if (is_atom()) return body().size();
        return left().size() + right().size() + 1;
    }

    std::string to_string() const { return render(true); }

    template <typename Visitor>
    void for_each_atom(Visitor&& visit) const {
        if (is_atom()) {
            visit(*this);
            return;
        }
        left().for_each_atom(visit);
        right().for_each_atom(visit);
    }

    friend bool operator==(const PltlFormula& a, const PltlFormula& b) {
        if (a.op() != b.op()) return false;
        if (a.is_atom()) return a.threshold() == b.threshold() && a.body() == b.body();
        return a.left() == b.left() && a.right() == b.right();
    }

private:
    struct Node;
    explicit PltlFormula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    std::string render(bool top) const {
        if (is_atom()) {
            const std::string head = "P>" + format_threshold(threshold());
            return top ? head + " [ " + body().to_string() + " ]"
                       : head + " [" + body().to_string() + "]";
        }
        return "(" + left().render(false) + (op() == PltlOp::And ? " & " : " | ") +
               right().render(false) + ")";
    }

    std::shared_ptr<const Node> node_;
};

struct PltlFormula::Node {
    PltlOp op = PltlOp::Atom;
    double threshold = 0.0;
    std::optional<LtlFormula> body;
    std::optional<PltlFormula> lhs;
    std::optional<PltlFormula> rhs;
};

inline PltlFormula PltlFormula::atom(double threshold, LtlFormula body) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw std::invalid_argument("PltlFormula::atom: threshold " + format_threshold(threshold) +
                                    " outside (0,1)");
    auto node = std::make_shared<Node>();
    node->op = PltlOp::Atom;
    node->threshold = threshold;
    node->body = std::move(body);
    return PltlFormula(std::move(node));
}

inline PltlFormula PltlFormula::combine(PltlOp op, PltlFormula lhs, PltlFormula rhs) {
    if (op == PltlOp::Atom) throw std::invalid_argument("PltlFormula::combine: Atom is not binary");
    auto node = std::make_shared<Node>();
    node->op = op;
    node->lhs = std::move(lhs);
    node->rhs = std::move(rhs);
    return PltlFormula(std::move(node));
}

inline PltlOp PltlFormula::op() const noexcept { return node_->op; }
inline double PltlFormula::threshold() const noexcept { return node_->threshold; }
inline const LtlFormula& PltlFormula::body() const { return *node_->body; }
inline const PltlFormula& PltlFormula::left() const { return *node_->lhs; }
inline const PltlFormula& PltlFormula::right() const { return *node_->rhs; }

} // namespace pltl
