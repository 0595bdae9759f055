// Learning a minimal PLTL+ formula that separates positive from negative
// Markov chains.
//
// The search runs over increasing formula size n. For each n it
//   1. enumerates LTL formulas of size n and depth <= D bottom-up from the
//      smaller ones, dropping candidates that a rewrite rule or a Boolean
//      collapse shows to be redundant (gbe_step);
//   2. model checks every new formula on every chain and emits P>m [f] when
//      the least positive probability exceeds the greatest negative one by
//      more than delta, m being their midpoint (pts);
//   3. scores the remaining formulas by how many chains their best single
//      threshold classifies correctly and tries conjunctions/disjunctions
//      of the highest-scored atoms (bsc).
// The loop stops once no strictly smaller formula can be found.

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "pltl/dtmc.hpp"
#include "pltl/engine.hpp"
#include "pltl/ltl.hpp"
#include "pltl/pltl_formula.hpp"

namespace pltl {

struct LearnerConfig {
    std::size_t max_size = 0;  // K
    std::size_t max_depth = 2; // D
    double delta = 0.05;
    std::size_t bool_limit = 10; // L
    std::size_t jobs = 1;
    bool all_minimal = false;
    bool eager_return = false;
};

inline void validate_config(const LearnerConfig& c) {
    if (c.max_size < 1) throw std::invalid_argument("max size K must be at least 1");
    if (!(c.delta > 0.0 && c.delta < 0.1))
        throw std::invalid_argument("tolerance delta must lie in (0, 0.1)");
    if (c.bool_limit < 1) throw std::invalid_argument("Boolean combination limit L must be at least 1");
    if (c.jobs < 1) throw std::invalid_argument("jobs must be at least 1");
}

// Values within this distance of 0 or 1 count as exactly 0 or 1.
inline constexpr double kProbabilityEpsilon = 1e-9;

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

struct SizeStats {
    std::size_t size = 0;
    std::size_t constructed = 0;
    std::size_t pruned_temporal = 0;
    std::size_t pruned_boolean = 0;
    std::size_t pruned_duplicate = 0;
    std::size_t checked = 0;
    std::size_t discarded = 0;
    std::size_t pooled = 0;
    std::size_t consistent = 0;

    std::size_t pruned() const { return pruned_temporal + pruned_boolean + pruned_duplicate; }
};

struct RunStats {
    std::vector<SizeStats> per_size;
    double gbe_seconds = 0.0;
    double pts_seconds = 0.0;
    double bsc_seconds = 0.0;
    std::size_t engine_calls = 0;
    std::size_t heap_size = 0;
    std::size_t combinations_tried = 0;

    SizeStats& at(std::size_t n) {
        while (per_size.size() < n) per_size.push_back(SizeStats{per_size.size() + 1});
        return per_size[n - 1];
    }
};

// ---------------------------------------------------------------------------
// Threshold arithmetic
// ---------------------------------------------------------------------------

struct ThresholdResult {
    double p_min = 0.0; // least initial-state probability over positives
    double n_max = 0.0; // greatest over negatives
    double margin = 0.0;
    double midpoint = 0.0;

    bool consistent(double delta) const { return margin > delta; }
};

inline ThresholdResult threshold_result(const std::vector<double>& positives,
                                        const std::vector<double>& negatives) {
    ThresholdResult r;
    r.p_min = *std::min_element(positives.begin(), positives.end());
    r.n_max = *std::max_element(negatives.begin(), negatives.end());
    r.margin = r.p_min - r.n_max;
    r.midpoint = (r.p_min + r.n_max) / 2.0;
    return r;
}

// Number of chains P>r classifies correctly: positives strictly above r,
// negatives strictly below.
inline std::size_t cover_count(const std::vector<double>& positives,
                               const std::vector<double>& negatives, double r) {
    std::size_t c = 0;
    for (double v : positives) c += v > r ? 1 : 0;
    for (double v : negatives) c += v < r ? 1 : 0;
    return c;
}

struct BestThreshold {
    double threshold = 0.5;
    std::size_t cover = 0;
};

// Candidates are the midpoints between consecutive distinct values of
// {0} u values u {1}. Ties go to the widest gap, then the smallest threshold.
inline BestThreshold best_threshold(const std::vector<double>& positives,
                                    const std::vector<double>& negatives) {
    std::vector<double> points{0.0, 1.0};
    points.insert(points.end(), positives.begin(), positives.end());
    points.insert(points.end(), negatives.begin(), negatives.end());
    for (auto& p : points) p = std::clamp(p, 0.0, 1.0);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    BestThreshold best;
    double best_gap = -1.0;
    bool have = false;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const double gap = points[i + 1] - points[i];
        const double r = (points[i] + points[i + 1]) / 2.0;
        const std::size_t c = cover_count(positives, negatives, r);
        if (!have || c > best.cover || (c == best.cover && gap > best_gap)) {
            best = {r, c};
            best_gap = gap;
            have = true;
        }
    }
    return best;
}

inline double score(std::size_t cover, std::size_t size) {
    return static_cast<double>(cover) / (1.0 + std::sqrt(static_cast<double>(size)));
}

// ---------------------------------------------------------------------------
// Search state
// ---------------------------------------------------------------------------

struct ScoredCandidate {
    PltlFormula atom;
    double threshold = 0.0;
    std::size_t cover = 0;
    double score = 0.0;
    std::vector<bool> truth; // positives first, then negatives
    std::string key;         // printed body, for ordering

    std::size_t size() const { return atom.size(); }
};

inline bool heap_before(const ScoredCandidate& a, const ScoredCandidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.size() != b.size()) return a.size() < b.size();
    return a.key < b.key;
}

enum class SolutionOrigin { ThresholdSearch, SetCover };

struct Solution {
    PltlFormula formula;
    std::optional<double> margin; // p - n, for single atoms
    SolutionOrigin origin = SolutionOrigin::ThresholdSearch;
};

// A formula kept for Boolean combination with its initial-state probabilities.
struct PoolEntry {
    LtlFormula body;
    std::vector<double> positives;
    std::vector<double> negatives;
};

struct SearchState {
    LearnerConfig config;
    std::vector<std::string> ap;
    // formulas[n-1][d]: retained formulas of size n and depth d, sorted by print.
    std::vector<std::vector<std::vector<LtlFormula>>> formulas;
    std::unordered_set<LtlFormula> seen;
    std::vector<LtlFormula> discarded;
    std::vector<ScoredCandidate> heap;
    std::vector<Solution> best;
    std::size_t best_size = 0; // 0 while nothing has been found
    RunStats stats;
    // Sees every candidate GBE rejects by a simplification rule (not plain
    // duplicates), already canonicalized where the rule ran after that.
    std::function<void(const LtlFormula&)> on_prune;

    SearchState(LearnerConfig c, std::vector<std::string> props)
        : config(c), ap(std::move(props)) {}

    // Largest size worth storing from now on.
    std::size_t size_bound() const {
        if (best_size == 0) return config.max_size;
        return std::min(config.max_size, config.all_minimal ? best_size : best_size - 1);
    }

    const std::vector<LtlFormula>& level(std::size_t n, std::size_t d) const {
        static const std::vector<LtlFormula> empty;
        if (n == 0 || n > formulas.size() || d >= formulas[n - 1].size()) return empty;
        return formulas[n - 1][d];
    }

    // Depth-major, then print order.
    std::vector<LtlFormula> of_size(std::size_t n) const {
        std::vector<LtlFormula> out;
        for (std::size_t d = 0; d <= config.max_depth; ++d) {
            const auto& xs = level(n, d);
            out.insert(out.end(), xs.begin(), xs.end());
        }
        return out;
    }

    void record(Solution s) {
        const std::size_t size = s.formula.size();
        if (best_size != 0 && size > best_size) return;
        if (best_size == 0 || size < best_size) {
            best.clear();
            best_size = size;
        }
        const auto text = s.formula.to_string();
        for (const auto& b : best)
            if (b.formula.to_string() == text) return;
        best.push_back(std::move(s));
    }
};

// ---------------------------------------------------------------------------
// Grammar-based enumeration
// ---------------------------------------------------------------------------

namespace detail {

inline void sort_by_print(std::vector<LtlFormula>& xs) {
    std::vector<std::pair<std::string, LtlFormula>> keyed;
    keyed.reserve(xs.size());
    for (auto& x : xs) keyed.emplace_back(x.to_string(), std::move(x));
    std::sort(keyed.begin(), keyed.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    xs.clear();
    for (auto& [_, f] : keyed) xs.push_back(std::move(f));
}

} // namespace detail

// F_1: every positive and negative literal, at depth 0.
inline void gbe_init(SearchState& state) {
    if (state.ap.empty()) throw std::invalid_argument("enumeration needs at least one proposition");
    state.formulas.assign(1, std::vector<std::vector<LtlFormula>>(state.config.max_depth + 1));
    auto& level0 = state.formulas[0][0];
    auto& stats = state.stats.at(1);
    for (const auto& p : state.ap)
        for (bool neg : {false, true}) {
            auto lit = LtlFormula::literal(p, neg);
            ++stats.constructed;
            if (!state.seen.insert(lit).second) {
                ++stats.pruned_duplicate;
                continue;
            }
            level0.push_back(std::move(lit));
        }
    detail::sort_by_print(level0);
    stats.checked = level0.size();
}

// Builds the retained formulas of size n+1 from those of sizes 1..n.
inline void gbe_step(SearchState& state, std::size_t n) {
    const std::size_t target = n + 1;
    const std::size_t max_depth = state.config.max_depth;
    if (state.formulas.size() < n)
        throw std::logic_error("gbe_step: sizes below " + std::to_string(n) + " not enumerated");
    state.formulas.resize(target, std::vector<std::vector<LtlFormula>>(max_depth + 1));
    auto& out = state.formulas[target - 1];
    auto& stats = state.stats.at(target);

    const auto consider = [&](LtlFormula candidate, const LtlFormula* lhs, const LtlFormula* rhs) {
        ++stats.constructed;
        if (lhs && rhs && boolean_simplify_applies(candidate.op(), *lhs, *rhs)) {
            ++stats.pruned_boolean;
            if (state.on_prune) state.on_prune(candidate);
            return;
        }
        auto canon = canonicalize(candidate);
        if (temporal_simplify_applies(canon)) {
            ++stats.pruned_temporal;
            if (state.on_prune) state.on_prune(canon);
            return;
        }
        if (!state.seen.insert(canon).second) {
            ++stats.pruned_duplicate;
            return;
        }
        out[canon.depth()].push_back(std::move(canon));
    };

    for (std::size_t d = 0; d <= max_depth; ++d) {
        if (d >= 1)
            for (const auto& f : state.level(n, d - 1))
                for (LtlOp op : {LtlOp::Next, LtlOp::Finally, LtlOp::Globally})
                    consider(LtlFormula::unary(op, f), nullptr, nullptr);

        for (std::size_t k = 1; k + 1 <= n; ++k) {
            const std::size_t rest = n - k;
            // U raises depth by one; either operand may carry depth d-1.
            if (d >= 1)
                for (std::size_t dl = 0; dl < d; ++dl)
                    for (std::size_t dr = 0; dr < d; ++dr) {
                        if (std::max(dl, dr) != d - 1) continue;
                        for (const auto& l : state.level(k, dl))
                            for (const auto& r : state.level(rest, dr))
                                consider(LtlFormula::until(l, r), &l, &r);
                    }
            // & and | are commutative and canonicalized, so k <= rest suffices.
            if (k > rest) continue;
            for (std::size_t dl = 0; dl <= d; ++dl)
                for (std::size_t dr = 0; dr <= d; ++dr) {
                    if (std::max(dl, dr) != d) continue;
                    for (const auto& l : state.level(k, dl))
                        for (const auto& r : state.level(rest, dr)) {
                            consider(LtlFormula::conj(l, r), &l, &r);
                            consider(LtlFormula::disj(l, r), &l, &r);
                        }
                }
        }
    }
    for (auto& level : out) detail::sort_by_print(level);
    std::size_t retained = 0;
    for (const auto& level : out) retained += level.size();
    stats.checked = retained;
}

// ---------------------------------------------------------------------------
// Probabilistic threshold search
// ---------------------------------------------------------------------------

namespace detail {

// Runs body(i) for i in [0, count) on up to `jobs` threads.
inline void parallel_for(std::size_t jobs, std::size_t count,
                         const std::function<void(std::size_t)>& body) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> workers;
    const std::size_t n = std::min(jobs, count);
    for (std::size_t w = 0; w < n; ++w)
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < count && !failed; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    for (auto& t : workers) t.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace detail

class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FormulaEvaluation {
    LtlFormula body;
    std::vector<ProbVector> positives;
    std::vector<ProbVector> negatives;

    std::vector<double> positive_initials() const {
        std::vector<double> v;
        for (const auto& p : positives) v.push_back(p.initial_value());
        return v;
    }
    std::vector<double> negative_initials() const {
        std::vector<double> v;
        for (const auto& p : negatives) v.push_back(p.initial_value());
        return v;
    }
};

// Model checks every formula on every chain of the sample.
inline std::vector<FormulaEvaluation> evaluate_all(const std::vector<LtlFormula>& formulas,
                                                   const Sample& sample, std::size_t jobs,
                                                   std::size_t* engine_calls = nullptr) {
    const std::size_t chains = sample.size();
    std::vector<FormulaEvaluation> out;
    out.reserve(formulas.size());
    for (const auto& f : formulas)
        out.push_back({f, std::vector<ProbVector>(sample.positives.size()),
                       std::vector<ProbVector>(sample.negatives.size())});
    detail::parallel_for(jobs, formulas.size() * chains, [&](std::size_t job) {
        const std::size_t fi = job / chains, ci = job % chains;
        const bool positive = ci < sample.positives.size();
        const Dtmc& m = positive ? sample.positives[ci] : sample.negatives[ci - sample.positives.size()];
        try {
            auto v = check_ltl(m, formulas[fi]);
            if (positive)
                out[fi].positives[ci] = std::move(v);
            else
                out[fi].negatives[ci - sample.positives.size()] = std::move(v);
        } catch (const std::exception& e) {
            throw EvaluationError("model checking " + formulas[fi].to_string() + " on " +
                                  (positive ? "positive" : "negative") + " chain #" +
                                  std::to_string(positive ? ci : ci - sample.positives.size()) +
                                  " failed: " + e.what());
        }
    });
    if (engine_calls) *engine_calls += formulas.size() * chains;
    return out;
}

// Zero on every state of every positive, or one on every state of every
// negative: such a formula cannot occur in a minimal consistent formula.
inline bool inconsistency_removal_applies(const FormulaEvaluation& e) {
    const bool zero_on_positives = std::all_of(e.positives.begin(), e.positives.end(),
                                               [](const ProbVector& v) { return v.all_zero(kProbabilityEpsilon); });
    const bool one_on_negatives = std::all_of(e.negatives.begin(), e.negatives.end(),
                                              [](const ProbVector& v) { return v.all_one(kProbabilityEpsilon); });
    return zero_on_positives || one_on_negatives;
}

struct PtsResult {
    // Atoms of maximal margin (several on exact ties).
    std::vector<Solution> found;
    // Every consistent atom, in iteration order.
    std::vector<Solution> consistent;
    std::vector<LtlFormula> discarded; // D_n
    std::vector<PoolEntry> pool;       // B_n
};

inline constexpr double kMarginTieTolerance = 1e-12;

inline PtsResult pts(const std::vector<LtlFormula>& formulas, const Sample& sample, double delta,
                     std::size_t jobs = 1, std::size_t* engine_calls = nullptr) {
    const auto evaluations = evaluate_all(formulas, sample, jobs, engine_calls);
    PtsResult result;
    double best_margin = -1.0;
    for (const auto& e : evaluations) {
        const auto pos = e.positive_initials();
        const auto neg = e.negative_initials();
        const auto t = threshold_result(pos, neg);
        if (t.consistent(delta)) {
            result.consistent.push_back(
                {PltlFormula::atom(t.midpoint, e.body), t.margin, SolutionOrigin::ThresholdSearch});
            best_margin = std::max(best_margin, t.margin);
            continue;
        }
        if (inconsistency_removal_applies(e))
            result.discarded.push_back(e.body);
        else
            result.pool.push_back({e.body, pos, neg});
    }
    for (const auto& s : result.consistent)
        if (*s.margin >= best_margin - kMarginTieTolerance) result.found.push_back(s);
    return result;
}

// ---------------------------------------------------------------------------
// Boolean set cover
// ---------------------------------------------------------------------------

inline bool bsc_usable(const PoolEntry& e) {
    const bool zero_on_positives = std::all_of(e.positives.begin(), e.positives.end(),
                                               [](double v) { return v <= kProbabilityEpsilon; });
    const bool one_on_negatives = std::all_of(e.negatives.begin(), e.negatives.end(),
                                              [](double v) { return v >= 1.0 - kProbabilityEpsilon; });
    return !(zero_on_positives || one_on_negatives);
}

inline ScoredCandidate make_candidate(const PoolEntry& e) {
    const auto best = best_threshold(e.positives, e.negatives);
    ScoredCandidate c{PltlFormula::atom(best.threshold, e.body), best.threshold, best.cover,
                      score(best.cover, e.body.size()), {}, e.body.to_string()};
    for (double v : e.positives) c.truth.push_back(v > best.threshold);
    for (double v : e.negatives) c.truth.push_back(v > best.threshold);
    return c;
}

// Scores the pool into the persistent heap and combines the top-L atoms
// with every heap atom.
inline void bsc(const std::vector<PoolEntry>& pool, SearchState& state, std::size_t num_positives) {
    for (const auto& e : pool)
        if (bsc_usable(e)) state.heap.push_back(make_candidate(e));
    std::stable_sort(state.heap.begin(), state.heap.end(), heap_before);
    state.stats.heap_size = state.heap.size();

    const std::size_t top = std::min(state.config.bool_limit, state.heap.size());
    std::size_t bound = state.size_bound();
    for (std::size_t i = 0; i < state.heap.size(); ++i)
        for (std::size_t j = 0; j < top; ++j) {
            if (i == j || (i < top && i > j)) continue; // each unordered pair once
            const auto& first = state.heap[std::min(i, j)];
            const auto& second = state.heap[std::max(i, j)];
            const std::size_t size = first.size() + second.size() + 1;
            if (size > bound) continue;
            for (PltlOp op : {PltlOp::And, PltlOp::Or}) {
                ++state.stats.combinations_tried;
                bool consistent = true;
                for (std::size_t k = 0; k < first.truth.size() && consistent; ++k) {
                    const bool holds = op == PltlOp::And ? first.truth[k] && second.truth[k]
                                                         : first.truth[k] || second.truth[k];
                    consistent = holds == (k < num_positives);
                }
                if (!consistent) continue;
                state.record({PltlFormula::combine(op, first.atom, second.atom), std::nullopt,
                              SolutionOrigin::SetCover});
                bound = state.size_bound();
                if (size > bound) break;
            }
        }
}

// ---------------------------------------------------------------------------
// Consistency and the main loop
// ---------------------------------------------------------------------------

// Truth of f at the initial state of m; atoms hold iff Pr > threshold.
inline bool holds_initially(const PltlFormula& f, const Dtmc& m) {
    if (f.is_atom()) return check_ltl(m, f.body()).initial_value() > f.threshold();
    const bool lhs = holds_initially(f.left(), m);
    if (f.op() == PltlOp::And) return lhs && holds_initially(f.right(), m);
    return lhs || holds_initially(f.right(), m);
}

inline bool check_consistency(const PltlFormula& f, const Sample& sample) {
    for (const auto& m : sample.positives)
        if (!holds_initially(f, m)) return false;
    for (const auto& m : sample.negatives)
        if (holds_initially(f, m)) return false;
    return true;
}

struct LearnResult {
    std::vector<Solution> solutions; // empty: nothing in the search space
    LearnerConfig config;
    RunStats stats;

    bool found() const { return !solutions.empty(); }
};

inline LearnResult learn(const Sample& sample, const LearnerConfig& config) {
    validate_config(config);
    if (sample.positives.empty() || sample.negatives.empty())
        throw std::invalid_argument("sample needs positive and negative chains");
    using clock = std::chrono::steady_clock;
    const auto seconds = [](clock::time_point since) {
        return std::chrono::duration<double>(clock::now() - since).count();
    };

    SearchState state(config, sample.ap);
    for (std::size_t n = 1; n <= config.max_size; ++n) {
        if (state.best_size != 0 && n > state.size_bound()) break;

        auto t0 = clock::now();
        if (n == 1)
            gbe_init(state);
        else
            gbe_step(state, n - 1);
        state.stats.gbe_seconds += seconds(t0);

        t0 = clock::now();
        const auto formulas = state.of_size(n);
        auto result = pts(formulas, sample, config.delta, config.jobs, &state.stats.engine_calls);
        state.stats.pts_seconds += seconds(t0);

        auto& stats = state.stats.at(n);
        stats.consistent = result.consistent.size();
        stats.discarded = result.discarded.size();
        stats.pooled = result.pool.size();
        for (auto& s : config.all_minimal ? result.consistent : result.found) state.record(s);
        if (config.eager_return && state.best_size != 0) break;

        if (!result.discarded.empty()) {
            const std::unordered_set<LtlFormula> drop(result.discarded.begin(),
                                                      result.discarded.end());
            for (auto& level : state.formulas[n - 1])
                level.erase(std::remove_if(level.begin(), level.end(),
                                           [&](const LtlFormula& f) { return drop.count(f) != 0; }),
                            level.end());
            state.discarded.insert(state.discarded.end(), result.discarded.begin(),
                                   result.discarded.end());
        }

        t0 = clock::now();
        bsc(result.pool, state, sample.positives.size());
        state.stats.bsc_seconds += seconds(t0);
        if (config.eager_return && state.best_size != 0) break;
    }

    for (const auto& s : state.best)
        if (!check_consistency(s.formula, sample) || s.formula.size() > config.max_size)
            throw std::logic_error("learned formula " + s.formula.to_string() +
                                   " failed re-verification against the sample");

    // Atoms first, by decreasing margin; set-cover results keep discovery order.
    std::stable_sort(state.best.begin(), state.best.end(), [](const Solution& a, const Solution& b) {
        if (a.margin.has_value() != b.margin.has_value()) return a.margin.has_value();
        if (a.margin && b.margin) return *a.margin > *b.margin;
        return false;
    });
    return {std::move(state.best), config, std::move(state.stats)};
}

} // namespace pltl
