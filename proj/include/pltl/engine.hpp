// Probabilistic LTL model checking on DTMCs.
//
// check_ltl resolves temporal subformulas innermost-first. For each one it
// computes the per-state probability p of the subformula with a single
// reachability or next-step computation, then splits every state t into a
// copy that "will" satisfy it (weight p(t)) and one that "will not"
// (weight 1-p(t)), conditioning the outgoing transitions on that prophecy.
// In the refined chain the subformula is an ordinary state label, so it is
// replaced by a fresh proposition and the procedure repeats. Once the formula
// is propositional, the probability for an original state s is the total
// weight of its copies whose labels satisfy it.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pltl/dtmc.hpp"
#include "pltl/linear.hpp"
#include "pltl/ltl.hpp"

namespace pltl {

class EngineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using StatePredicate = std::vector<bool>;
using TransitionRows = std::vector<std::vector<Transition>>;

class ProbVector {
public:
    ProbVector() = default;
    ProbVector(std::vector<double> values, std::size_t initial)
        : values_(std::move(values)), initial_(initial) {}

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t s) const noexcept { return values_[s]; }
    double initial_value() const noexcept { return values_[initial_]; }
    std::size_t initial_state() const noexcept { return initial_; }
    const std::vector<double>& values() const noexcept { return values_; }

    bool all_zero(double tol = 1e-9) const {
        return std::all_of(values_.begin(), values_.end(), [tol](double v) { return v <= tol; });
    }
    bool all_one(double tol = 1e-9) const {
        return std::all_of(values_.begin(), values_.end(), [tol](double v) { return v >= 1.0 - tol; });
    }

private:
    std::vector<double> values_;
    std::size_t initial_ = 0;
};

// ---------------------------------------------------------------------------
// Basic probability computations over explicit transition rows
// ---------------------------------------------------------------------------

inline std::vector<double> next_prob(const TransitionRows& rows, const StatePredicate& a) {
    std::vector<double> v(rows.size(), 0.0);
    for (std::size_t s = 0; s < rows.size(); ++s)
        for (const auto& t : rows[s])
            if (a[t.target]) v[s] += t.prob;
    return v;
}

namespace detail {

inline std::vector<std::vector<std::size_t>> predecessors(const TransitionRows& rows) {
    std::vector<std::vector<std::size_t>> pred(rows.size());
    for (std::size_t s = 0; s < rows.size(); ++s)
        for (const auto& t : rows[s]) pred[t.target].push_back(s);
    return pred;
}

// States reaching `from` backwards through states satisfying `through`.
inline std::vector<bool> backward_reach(const std::vector<std::vector<std::size_t>>& pred,
                                        const std::vector<bool>& from,
                                        const std::vector<bool>& through) {
    std::vector<bool> reached = from;
    std::deque<std::size_t> queue;
    for (std::size_t s = 0; s < from.size(); ++s)
        if (from[s]) queue.push_back(s);
    while (!queue.empty()) {
        const auto t = queue.front();
        queue.pop_front();
        for (auto s : pred[t])
            if (!reached[s] && through[s]) {
                reached[s] = true;
                queue.push_back(s);
            }
    }
    return reached;
}

} // namespace detail

// Pr_s(a U b). Zero and one sets come from graph analysis; the remaining
// states are solved exactly.
inline std::vector<double> until_prob(const TransitionRows& rows, const StatePredicate& a,
                                      const StatePredicate& b) {
    const std::size_t n = rows.size();
    const auto pred = detail::predecessors(rows);

    const auto can_reach_b = detail::backward_reach(pred, b, a);
    std::vector<bool> no(n), a_not_b(n);
    for (std::size_t s = 0; s < n; ++s) {
        no[s] = !can_reach_b[s];
        a_not_b[s] = a[s] && !b[s];
    }
    const auto may_fail = detail::backward_reach(pred, no, a_not_b);

    std::vector<double> v(n, 0.0);
    std::vector<std::size_t> maybe;
    std::vector<std::size_t> slot(n, static_cast<std::size_t>(-1));
    for (std::size_t s = 0; s < n; ++s) {
        if (no[s]) continue;
        if (!may_fail[s]) {
            v[s] = 1.0;
            continue;
        }
        slot[s] = maybe.size();
        maybe.push_back(s);
    }
    if (maybe.empty()) return v;

    DenseMatrix system = DenseMatrix::identity(maybe.size());
    std::vector<double> rhs(maybe.size(), 0.0);
    for (std::size_t i = 0; i < maybe.size(); ++i)
        for (const auto& t : rows[maybe[i]]) {
            if (slot[t.target] != static_cast<std::size_t>(-1))
                system(i, slot[t.target]) -= t.prob;
            else
                rhs[i] += t.prob * v[t.target];
        }
    const auto x = solve_linear(std::move(system), std::move(rhs));
    for (std::size_t i = 0; i < maybe.size(); ++i) v[maybe[i]] = std::clamp(x[i], 0.0, 1.0);
    return v;
}

inline std::vector<double> finally_prob(const TransitionRows& rows, const StatePredicate& a) {
    return until_prob(rows, StatePredicate(rows.size(), true), a);
}

inline std::vector<double> globally_prob(const TransitionRows& rows, const StatePredicate& a) {
    StatePredicate not_a(a.size());
    for (std::size_t s = 0; s < a.size(); ++s) not_a[s] = !a[s];
    auto v = finally_prob(rows, not_a);
    for (auto& x : v) x = 1.0 - x;
    return v;
}

// Truth of a propositional formula in every state of m. Unknown
// propositions are false.
inline StatePredicate state_predicate(const Dtmc& m, const LtlFormula& f) {
    if (!f.propositional()) throw EngineError("state_predicate: " + f.to_string() + " is temporal");
    StatePredicate out(m.num_states);
    std::function<bool(const LtlFormula&, std::size_t)> eval = [&](const LtlFormula& g,
                                                                   std::size_t s) -> bool {
        switch (g.op()) {
        case LtlOp::Literal: {
            const auto p = m.prop_index(g.prop());
            const bool holds = p && m.holds(s, *p);
            return holds != g.negated();
        }
        case LtlOp::And: return eval(g.left(), s) && eval(g.right(), s);
        case LtlOp::Or: return eval(g.left(), s) || eval(g.right(), s);
        default: return false;
        }
    };
    for (std::size_t s = 0; s < m.num_states; ++s) out[s] = eval(f, s);
    return out;
}

inline ProbVector next_prob(const Dtmc& m, const StatePredicate& a) {
    return {next_prob(m.rows, a), m.initial};
}

inline ProbVector until_prob(const Dtmc& m, const StatePredicate& a, const StatePredicate& b) {
    return {until_prob(m.rows, a, b), m.initial};
}

// ---------------------------------------------------------------------------
// Prophecy refinement
// ---------------------------------------------------------------------------

struct RefinedState {
    std::size_t origin = 0;
    std::vector<bool> prophecy; // one bit per resolved subformula
    double weight = 1.0;
};

struct RefinedChain {
    std::size_t num_original = 0;
    std::vector<RefinedState> states;
    TransitionRows rows;
    std::vector<std::string> ap;       // original propositions, then fresh ones
    std::vector<std::vector<bool>> truth; // truth[state][prop]
    // Largest |row sum - 1| seen before rows were renormalized.
    double max_row_defect = 0.0;

    static RefinedChain from(const Dtmc& m) {
        RefinedChain r;
        r.num_original = m.num_states;
        r.ap = m.ap;
        r.rows = m.rows;
        r.states.resize(m.num_states);
        r.truth.assign(m.num_states, std::vector<bool>(m.ap.size(), false));
        for (std::size_t s = 0; s < m.num_states; ++s) {
            r.states[s].origin = s;
            for (auto p : m.labels[s]) r.truth[s][p] = true;
        }
        return r;
    }

    std::size_t size() const noexcept { return states.size(); }

    std::optional<std::size_t> prop_index(const std::string& name) const {
        const auto it = std::find(ap.begin(), ap.end(), name);
        if (it == ap.end()) return std::nullopt;
        return static_cast<std::size_t>(it - ap.begin());
    }

    bool satisfies(std::size_t state, const LtlFormula& f) const {
        switch (f.op()) {
        case LtlOp::Literal: {
            const auto p = prop_index(f.prop());
            const bool holds = p && truth[state][*p];
            return holds != f.negated();
        }
        case LtlOp::And: return satisfies(state, f.left()) && satisfies(state, f.right());
        case LtlOp::Or: return satisfies(state, f.left()) || satisfies(state, f.right());
        default: throw EngineError("satisfies: " + f.to_string() + " is not propositional");
        }
    }

    StatePredicate predicate(const LtlFormula& f) const {
        if (!f.propositional())
            throw EngineError("operand " + f.to_string() + " is not propositional");
        StatePredicate out(size());
        for (std::size_t s = 0; s < size(); ++s) out[s] = satisfies(s, f);
        return out;
    }
};

inline constexpr double kProphecyDropThreshold = 1e-12;

// Pr_t(psi) for every state t of r, psi temporal with propositional operands.
inline std::vector<double> temporal_prob(const RefinedChain& r, const LtlFormula& psi) {
    switch (psi.op()) {
    case LtlOp::Next: return next_prob(r.rows, r.predicate(psi.child()));
    case LtlOp::Finally: return finally_prob(r.rows, r.predicate(psi.child()));
    case LtlOp::Globally: return globally_prob(r.rows, r.predicate(psi.child()));
    case LtlOp::Until:
        return until_prob(r.rows, r.predicate(psi.left()), r.predicate(psi.right()));
    default: throw EngineError("temporal_prob: " + psi.to_string() + " is not temporal");
    }
}

// Splits every state of r by the future truth value of psi and labels the
// "true" copies with fresh_prop. p must hold Pr_t(psi) for every state t.
inline RefinedChain refine(const RefinedChain& r, const LtlFormula& psi, const std::vector<double>& p,
                           const std::string& fresh_prop) {
    if (!psi.is_temporal() || !psi.left().propositional() ||
        (psi.is_binary() && !psi.right().propositional()))
        throw EngineError("refine: " + psi.to_string() +
                          " is not a temporal operator over propositional operands");
    if (p.size() != r.size()) throw EngineError("refine: probability vector size mismatch");
    for (double x : p)
        if (!(x >= -1e-9 && x <= 1.0 + 1e-9))
            throw EngineError("refine: probability " + std::to_string(x) + " outside [0,1]");

    const std::size_t n = r.size();
    StatePredicate a, b;
    if (psi.op() == LtlOp::Until) {
        a = r.predicate(psi.left());
        b = r.predicate(psi.right());
    } else {
        a = r.predicate(psi.child());
    }
    const auto factor = [&](std::size_t t, bool v) {
        const double x = std::clamp(p[t], 0.0, 1.0);
        return v ? x : 1.0 - x;
    };
    // Truth of psi at t given its truth v_next at the successor t_next.
    const auto consistent = [&](std::size_t t, std::size_t t_next, bool v_next) -> bool {
        switch (psi.op()) {
        case LtlOp::Next: return a[t_next];
        case LtlOp::Until:
            if (b[t]) return true;
            if (!a[t]) return false;
            return v_next;
        case LtlOp::Finally: return a[t] ? true : v_next;
        case LtlOp::Globally: return a[t] ? v_next : false;
        default: return false;
        }
    };

    constexpr std::size_t absent = static_cast<std::size_t>(-1);
    std::vector<std::size_t> copy_of(2 * n, absent); // index 2t+v
    RefinedChain out;
    out.num_original = r.num_original;
    out.ap = r.ap;
    out.ap.push_back(fresh_prop);
    out.max_row_defect = r.max_row_defect;
    for (std::size_t t = 0; t < n; ++t)
        for (int v = 1; v >= 0; --v) {
            const double f = factor(t, v != 0);
            if (f < kProphecyDropThreshold) continue;
            copy_of[2 * t + static_cast<std::size_t>(v)] = out.states.size();
            RefinedState s = r.states[t];
            s.prophecy.push_back(v != 0);
            s.weight *= f;
            out.states.push_back(std::move(s));
            auto labels = r.truth[t];
            labels.push_back(v != 0);
            out.truth.push_back(std::move(labels));
        }
    out.rows.resize(out.states.size());
    for (std::size_t t = 0; t < n; ++t)
        for (int v = 1; v >= 0; --v) {
            const auto idx = copy_of[2 * t + static_cast<std::size_t>(v)];
            if (idx == absent) continue;
            const double denom = factor(t, v != 0);
            auto& row = out.rows[idx];
            double sum = 0.0;
            for (const auto& tr : r.rows[t])
                for (int w = 1; w >= 0; --w) {
                    const auto target = copy_of[2 * tr.target + static_cast<std::size_t>(w)];
                    if (target == absent) continue;
                    if (consistent(t, tr.target, w != 0) != (v != 0)) continue;
                    const double prob = tr.prob * factor(tr.target, w != 0) / denom;
                    if (prob <= 0.0) continue;
                    row.push_back({target, prob});
                    sum += prob;
                }
            if (row.empty() || sum <= 0.0)
                throw EngineError("refine: state copy without consistent successors while resolving " +
                                  psi.to_string());
            out.max_row_defect = std::max(out.max_row_defect, std::abs(sum - 1.0));
            for (auto& tr : row) tr.prob /= sum;
        }
    return out;
}

// Leftmost temporal subformula whose operands are propositional.
inline std::optional<LtlFormula> innermost_temporal(const LtlFormula& f) {
    if (f.propositional()) return std::nullopt;
    if (auto inner = innermost_temporal(f.left())) return inner;
    if (f.is_binary())
        if (auto inner = innermost_temporal(f.right())) return inner;
    return f.is_temporal() ? std::optional<LtlFormula>(f) : std::nullopt;
}

struct EngineOptions {
    // When the remaining formula is a single temporal operator over
    // propositional operands, fold its probabilities back directly instead
    // of refining once more. Disabling it forces every temporal operator
    // through refinement.
    bool fold_root_directly = true;
    // Called with every refined chain produced.
    std::function<void(const RefinedChain&)> on_refine;
};

inline ProbVector check_ltl(const Dtmc& m, const LtlFormula& phi, const EngineOptions& options = {}) {
    RefinedChain chain = RefinedChain::from(m);
    LtlFormula rest = phi;
    std::size_t fresh = 0;
    std::vector<double> v(m.num_states, 0.0);

    while (!rest.propositional()) {
        const auto psi = *innermost_temporal(rest);
        const auto p = temporal_prob(chain, psi);
        if (options.fold_root_directly && psi == rest) {
            for (std::size_t t = 0; t < chain.size(); ++t)
                v[chain.states[t].origin] += chain.states[t].weight * p[t];
            for (auto& x : v) x = std::clamp(x, 0.0, 1.0);
            return {std::move(v), m.initial};
        }
        // '$' cannot appear in parsed propositions, so fresh names never clash.
        std::string name = "$q" + std::to_string(fresh++);
        chain = refine(chain, psi, p, name);
        if (options.on_refine) options.on_refine(chain);
        rest = substitute(rest, psi, LtlFormula::literal(std::move(name)));
    }
    for (std::size_t t = 0; t < chain.size(); ++t)
        if (chain.satisfies(t, rest)) v[chain.states[t].origin] += chain.states[t].weight;
    for (auto& x : v) x = std::clamp(x, 0.0, 1.0);
    return {std::move(v), m.initial};
}

// ---------------------------------------------------------------------------
// Independent oracles via bottom SCCs
// ---------------------------------------------------------------------------

// Pr_s(GF a): reach a bottom SCC that contains an a-state.
inline ProbVector gf_oracle(const Dtmc& m, const StatePredicate& a) {
    StatePredicate target(m.num_states, false);
    for (const auto& c : bsccs(m))
        if (std::any_of(c.begin(), c.end(), [&](auto s) { return a[s]; }))
            for (auto s : c) target[s] = true;
    return until_prob(m, StatePredicate(m.num_states, true), target);
}

// Pr_s(FG a): reach a bottom SCC made only of a-states.
inline ProbVector fg_oracle(const Dtmc& m, const StatePredicate& a) {
    StatePredicate target(m.num_states, false);
    for (const auto& c : bsccs(m))
        if (std::all_of(c.begin(), c.end(), [&](auto s) { return a[s]; }))
            for (auto s : c) target[s] = true;
    return until_prob(m, StatePredicate(m.num_states, true), target);
}

} // namespace pltl
