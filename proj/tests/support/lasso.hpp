// Reference LTL semantics on ultimately periodic words u·v^ω, used to
// check enumeration completeness and pruning soundness by brute force.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pltl/ltl.hpp"

namespace pltl::fixtures {

// Letter i of the word is a bitmask over the proposition list.
struct Lasso {
    std::vector<std::uint32_t> letters; // u then v
    std::size_t loop_start = 0;         // |u|

    std::size_t next(std::size_t i) const { return i + 1 < letters.size() ? i + 1 : loop_start; }
};

// Truth of f at every position of the lasso.
inline std::vector<bool> eval_positions(const LtlFormula& f, const Lasso& w,
                                        const std::vector<std::string>& props) {
    const std::size_t n = w.letters.size();
    std::vector<bool> out(n);
    switch (f.op()) {
    case LtlOp::Literal: {
        std::size_t bit = props.size();
        for (std::size_t i = 0; i < props.size(); ++i)
            if (props[i] == f.prop()) bit = i;
        for (std::size_t i = 0; i < n; ++i) {
            const bool holds = bit < props.size() && ((w.letters[i] >> bit) & 1U);
            out[i] = holds != f.negated();
        }
        return out;
    }
    case LtlOp::And:
    case LtlOp::Or: {
        const auto l = eval_positions(f.left(), w, props), r = eval_positions(f.right(), w, props);
        for (std::size_t i = 0; i < n; ++i) out[i] = f.op() == LtlOp::And ? l[i] && r[i] : l[i] || r[i];
        return out;
    }
    case LtlOp::Next: {
        const auto c = eval_positions(f.child(), w, props);
        for (std::size_t i = 0; i < n; ++i) out[i] = c[w.next(i)];
        return out;
    }
    case LtlOp::Finally:
    case LtlOp::Until: {
        // Least fixpoint of x_i = b_i | (a_i & x_next(i)).
        const auto b = eval_positions(f.op() == LtlOp::Until ? f.right() : f.child(), w, props);
        const auto a = f.op() == LtlOp::Until ? eval_positions(f.left(), w, props)
                                               : std::vector<bool>(n, true);
        std::vector<bool> x(n, false);
        for (std::size_t round = 0; round <= n; ++round)
            for (std::size_t i = n; i-- > 0;) x[i] = b[i] || (a[i] && x[w.next(i)]);
        return x;
    }
    case LtlOp::Globally: {
        // Greatest fixpoint of x_i = a_i & x_next(i).
        const auto a = eval_positions(f.child(), w, props);
        std::vector<bool> x(n, true);
        for (std::size_t round = 0; round <= n; ++round)
            for (std::size_t i = n; i-- > 0;) x[i] = a[i] && x[w.next(i)];
        return x;
    }
    }
    return out;
}

inline bool eval(const LtlFormula& f, const Lasso& w, const std::vector<std::string>& props) {
    return eval_positions(f, w, props)[0];
}

// Every lasso with 1 <= |u|+|v| <= max_len and |v| >= 1.
inline std::vector<Lasso> all_lassos(std::size_t num_props, std::size_t max_len) {
    std::vector<Lasso> out;
    const std::uint32_t alphabet = 1U << num_props;
    for (std::size_t len = 1; len <= max_len; ++len) {
        std::uint64_t words = 1;
        for (std::size_t i = 0; i < len; ++i) words *= alphabet;
        for (std::uint64_t code = 0; code < words; ++code) {
            Lasso w;
            std::uint64_t c = code;
            for (std::size_t i = 0; i < len; ++i, c /= alphabet) w.letters.push_back(static_cast<std::uint32_t>(c % alphabet));
            for (std::size_t start = 0; start < len; ++start) {
                w.loop_start = start;
                out.push_back(w);
            }
        }
    }
    return out;
}

// Truth of f at position 0 of every lasso, as a packed string of '0'/'1'.
inline std::string signature(const LtlFormula& f, const std::vector<Lasso>& words,
                             const std::vector<std::string>& props) {
    std::string sig(words.size(), '0');
    for (std::size_t i = 0; i < words.size(); ++i)
        if (eval(f, words[i], props)) sig[i] = '1';
    return sig;
}

inline bool constant_signature(const std::string& sig) {
    return sig.find('0') == std::string::npos || sig.find('1') == std::string::npos;
}

} // namespace pltl::fixtures
