// Deterministic generators for planted-formula samples.
//
// Every generator builds chains whose initial-state probabilities realize a
// known separating formula, and checks that formula against the sample
// before returning it. Randomness comes from mt19937_64 mapped to doubles by
// hand, so a seed yields identical files on every platform.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pltl/dtmc.hpp"
#include "pltl/engine.hpp"
#include "pltl/learner.hpp"
#include "pltl/pltl_formula.hpp"

namespace pltl::bench {

class BenchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Params = std::map<std::string, std::string>;

struct NamedChain {
    std::string name;
    Dtmc chain;
};

struct GeneratedSample {
    std::string generator;
    std::vector<NamedChain> positives;
    std::vector<NamedChain> negatives;
    std::vector<std::string> ap;
    LearnerConfig params;
    PltlFormula planted;

    Sample sample() const {
        std::vector<Dtmc> pos, neg;
        for (const auto& c : positives) pos.push_back(c.chain);
        for (const auto& c : negatives) neg.push_back(c.chain);
        return make_sample(pos, neg, ap);
    }
};

namespace detail {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    // Uniform in [0,1) from the top 53 bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937_64 engine_;
};

inline double param(const Params& params, const std::string& key, double fallback) {
    const auto it = params.find(key);
    if (it == params.end()) return fallback;
    try {
        std::size_t used = 0;
        const double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument(key);
        return v;
    } catch (const std::exception&) {
        throw BenchError("parameter '" + key + "' expects a number, got '" + it->second + "'");
    }
}

inline std::string text_param(const Params& params, const std::string& key, std::string fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

struct ChainBuilder {
    Dtmc m;

    explicit ChainBuilder(std::vector<std::string> ap) { m.ap = std::move(ap); }

    std::size_t add_state(const std::vector<std::string>& props = {}) {
        m.rows.emplace_back();
        m.labels.emplace_back();
        for (const auto& p : props) {
            const auto idx = m.prop_index(p);
            if (!idx) throw BenchError("unknown proposition " + p);
            m.labels.back().push_back(*idx);
        }
        return m.num_states++;
    }

    void edge(std::size_t from, std::size_t to, double p) {
        if (p <= 0.0) return;
        for (auto& t : m.rows[from])
            if (t.target == to) {
                t.prob += p;
                return;
            }
        m.rows[from].push_back({to, p});
    }

    void absorbing(std::size_t s) { edge(s, s, 1.0); }

    Dtmc build() {
        if (const auto errors = validate(m); !errors.empty())
            throw BenchError("generated chain is invalid: " + errors.front());
        return m;
    }
};

inline void verify_planted(const GeneratedSample& g) {
    if (!check_consistency(g.planted, g.sample()))
        throw BenchError(g.generator + ": planted formula " + g.planted.to_string() +
                         " is not consistent with the generated sample");
}

} // namespace detail

// C1: s0 -> s1{a} with p, -> s2 with 1-p; s1 and s2 absorbing.
inline Dtmc reach_chain(double p) {
    detail::ChainBuilder b({"a"});
    const auto s0 = b.add_state(), s1 = b.add_state({"a"}), s2 = b.add_state();
    b.edge(s0, s1, p);
    b.edge(s0, s2, 1.0 - p);
    b.absorbing(s1);
    b.absorbing(s2);
    return b.build();
}

// C2: s0 -> s0 and s0 -> s1{a} with probability 1/2 each; s1 absorbing.
inline Dtmc delayed_reach_chain() {
    detail::ChainBuilder b({"a"});
    const auto s0 = b.add_state(), s1 = b.add_state({"a"});
    b.edge(s0, s0, 0.5);
    b.edge(s0, s1, 0.5);
    b.absorbing(s1);
    return b.build();
}

// Positive: delayed_reach_chain (F a almost surely); negative: reach_chain(p).
inline GeneratedSample two_state(std::uint64_t /*seed*/, const Params& params) {
    const double p = detail::param(params, "p", 0.3);
    if (!(p > 0.0 && p < 0.95)) throw BenchError("two-state: p must lie in (0, 0.95)");
    GeneratedSample g{"two-state", {{"pos_0", delayed_reach_chain()}}, {{"neg_0", reach_chain(p)}},
                      {"a"}, LearnerConfig{}, PltlFormula::atom((1.0 + p) / 2.0, parse_ltl("F a"))};
    g.params.max_size = 3;
    detail::verify_planted(g);
    return g;
}

// A start state, a corridor state that lingers with a random self-loop, then
// a hole {h} with probability `hazard` or a safe branch that reaches a camp
// {a} half of the time. Pr(G !h) = 1 - hazard.
inline Dtmc hazard_chain(double hazard, double linger) {
    detail::ChainBuilder b({"a", "h"});
    const auto start = b.add_state(), corridor = b.add_state(), hole = b.add_state({"h"}),
               safe = b.add_state(), camp = b.add_state({"a"}), idle = b.add_state();
    b.edge(start, corridor, 1.0);
    b.edge(corridor, corridor, linger);
    b.edge(corridor, hole, (1.0 - linger) * hazard);
    b.edge(corridor, safe, (1.0 - linger) * (1.0 - hazard));
    b.edge(safe, camp, 0.5);
    b.edge(safe, idle, 0.5);
    b.absorbing(hole);
    b.absorbing(camp);
    b.absorbing(idle);
    return b.build();
}

inline GeneratedSample planted_safety(std::uint64_t seed, const Params& params) {
    const double pos_hazard = detail::param(params, "pos-hazard", 0.1);
    const double neg_hazard = detail::param(params, "h-density", 0.7);
    const auto count = static_cast<std::size_t>(detail::param(params, "count", 3));
    if (!(pos_hazard >= 0.0 && neg_hazard <= 1.0 && pos_hazard + 0.1 < neg_hazard))
        throw BenchError("planted-safety: need 0 <= pos-hazard < h-density - 0.1 <= 0.9");
    detail::Rng rng(seed);
    GeneratedSample g{"planted-safety", {}, {}, {"a", "h"}, LearnerConfig{},
                      PltlFormula::atom((2.0 - pos_hazard - neg_hazard) / 2.0, parse_ltl("G !h"))};
    for (std::size_t i = 0; i < count; ++i) {
        const double jitter = rng.uniform(-0.02, 0.02);
        g.positives.push_back({"pos_" + std::to_string(i),
                               hazard_chain(std::clamp(pos_hazard + jitter, 0.0, 1.0),
                                            rng.uniform(0.0, 0.5))});
    }
    for (std::size_t i = 0; i < count; ++i) {
        const double jitter = rng.uniform(-0.02, 0.02);
        g.negatives.push_back({"neg_" + std::to_string(i),
                               hazard_chain(std::clamp(neg_hazard + jitter, 0.0, 1.0),
                                            rng.uniform(0.0, 0.5))});
    }
    g.params.max_size = 4;
    detail::verify_planted(g);
    return g;
}

// s0 visits `first` with probability p_first, then, after two unlabeled
// steps, `second` with probability p_second_given_first; every other branch
// ends in an unlabeled sink. The gap keeps until-formulas such as
// (F(a) U b) from standing in for "both were visited".
inline Dtmc ordered_visit_chain(const std::string& first, const std::string& second, double p_first,
                                double p_second_given_first) {
    detail::ChainBuilder b({"a", "b"});
    const auto s0 = b.add_state(), one = b.add_state({first}), gap1 = b.add_state(),
               gap2 = b.add_state(), two = b.add_state({second}), sink = b.add_state();
    b.edge(s0, one, p_first);
    b.edge(s0, sink, 1.0 - p_first);
    b.edge(one, gap1, p_second_given_first);
    b.edge(one, sink, 1.0 - p_second_given_first);
    b.edge(gap1, gap2, 1.0);
    b.edge(gap2, two, 1.0);
    b.edge(two, sink, 1.0);
    b.absorbing(sink);
    return b.build();
}

// Initial (Pr F a, Pr F b): positives (.9,.9) twice, visiting a and b in
// opposite orders; negatives (.9,.1) and (.1,.9). Neither eventuality
// separates alone, their conjunction does.
inline GeneratedSample truth_table(std::uint64_t /*seed*/, const Params& params) {
    const double high = detail::param(params, "high", 0.9);
    const double low = detail::param(params, "low", 0.1);
    if (!(low > 0.0 && low < high && high < 1.0)) throw BenchError("truth-table: need 0 < low < high < 1");
    GeneratedSample g{"truth-table",
                      {{"pos_ab", ordered_visit_chain("a", "b", high, 1.0)},
                       {"pos_ba", ordered_visit_chain("b", "a", high, 1.0)}},
                      {{"neg_a", ordered_visit_chain("a", "b", high, low / high)},
                       {"neg_b", ordered_visit_chain("b", "a", high, low / high)}},
                      {"a", "b"},
                      LearnerConfig{},
                      PltlFormula::conj(PltlFormula::atom((high + low) / 2.0, parse_ltl("F a")),
                                        PltlFormula::atom((high + low) / 2.0, parse_ltl("F b")))};
    g.params.max_size = 6;
    detail::verify_planted(g);
    return g;
}

// Two parties learn each other's secret. After a long random wait, B learns
// first with probability b_first, otherwise A does; both end up knowing.
inline Dtmc knowledge_race_chain(double b_first, double wait) {
    detail::ChainBuilder b({"kA", "kB"});
    const auto s0 = b.add_state(), kb = b.add_state({"kB"}), ka = b.add_state({"kA"}),
               both = b.add_state({"kA", "kB"});
    b.edge(s0, s0, wait);
    b.edge(s0, kb, (1.0 - wait) * b_first);
    b.edge(s0, ka, (1.0 - wait) * (1.0 - b_first));
    b.edge(kb, both, 1.0);
    b.edge(ka, both, 1.0);
    b.absorbing(both);
    return b.build();
}

inline GeneratedSample planted_until(std::uint64_t seed, const Params& params) {
    const double pos = detail::param(params, "pos", 0.9);
    const double neg = detail::param(params, "neg", 0.4);
    const auto count = static_cast<std::size_t>(detail::param(params, "count", 3));
    if (!(neg + 0.1 < pos && pos < 0.98 && neg > 0.02))
        throw BenchError("planted-until: need 0.02 < neg < pos - 0.1 < 0.88");
    detail::Rng rng(seed);
    GeneratedSample g{"planted-until", {}, {}, {"kA", "kB"}, LearnerConfig{},
                      PltlFormula::atom((pos + neg) / 2.0, parse_ltl("!kA U kB"))};
    // The wait keeps one- and two-step formulas from telling the classes apart.
    for (std::size_t i = 0; i < count; ++i)
        g.positives.push_back({"pos_" + std::to_string(i),
                               knowledge_race_chain(pos + rng.uniform(-0.02, 0.02),
                                                    rng.uniform(0.94, 0.95))});
    for (std::size_t i = 0; i < count; ++i)
        g.negatives.push_back({"neg_" + std::to_string(i),
                               knowledge_race_chain(neg + rng.uniform(-0.02, 0.02),
                                                    rng.uniform(0.94, 0.95))});
    g.params.max_size = 6;
    detail::verify_planted(g);
    return g;
}

// ---------------------------------------------------------------------------
// Slippery gridworld
// ---------------------------------------------------------------------------

// Rows separated by '/'. 'S' start, '.' ice, 'h' hole (absorbing), 'a'/'b'
// camps.
inline constexpr const char* kDefaultLayout = "S...b/..h../...../.h..a";

struct Grid {
    std::size_t rows = 0, cols = 0;
    std::vector<std::string> cells;
    std::size_t start = 0;

    char at(std::size_t s) const { return cells[s / cols][s % cols]; }
};

inline Grid parse_layout(const std::string& layout) {
    Grid g;
    std::size_t begin = 0;
    for (;;) {
        const auto end = layout.find('/', begin);
        g.cells.push_back(layout.substr(begin, end == std::string::npos ? std::string::npos : end - begin));
        if (end == std::string::npos) break;
        begin = end + 1;
    }
    g.rows = g.cells.size();
    g.cols = g.cells.front().size();
    if (g.cols == 0) throw BenchError("gridworld: empty layout row");
    std::size_t starts = 0;
    for (std::size_t r = 0; r < g.rows; ++r) {
        if (g.cells[r].size() != g.cols) throw BenchError("gridworld: layout rows differ in length");
        for (std::size_t c = 0; c < g.cols; ++c) {
            const char ch = g.cells[r][c];
            if (std::string_view("S.hab").find(ch) == std::string_view::npos)
                throw BenchError(std::string("gridworld: unknown layout cell '") + ch + "'");
            if (ch == 'S') {
                ++starts;
                g.start = r * g.cols + c;
            }
        }
    }
    if (starts != 1) throw BenchError("gridworld: layout needs exactly one 'S'");
    return g;
}

inline constexpr const char* kMoves[4] = {"left", "down", "right", "up"};

// Moving with slip: the intended direction and both perpendicular ones each
// get `1/3`; bumping into the border stays put.
inline Mdp gridworld_mdp(const Grid& g, double slip = 1.0 / 3.0) {
    Mdp mdp;
    mdp.num_states = g.rows * g.cols;
    mdp.initial = g.start;
    mdp.ap = {"a", "b", "h"};
    mdp.actions.resize(mdp.num_states);
    mdp.labels.resize(mdp.num_states);
    const int dr[4] = {0, 1, 0, -1}, dc[4] = {-1, 0, 1, 0};
    for (std::size_t s = 0; s < mdp.num_states; ++s) {
        const char ch = g.at(s);
        if (ch == 'a') mdp.labels[s] = {0};
        if (ch == 'b') mdp.labels[s] = {1};
        if (ch == 'h') mdp.labels[s] = {2};
        const auto r = static_cast<int>(s / g.cols), c = static_cast<int>(s % g.cols);
        const auto step = [&](int dir) {
            const int nr = r + dr[dir], nc = c + dc[dir];
            if (nr < 0 || nc < 0 || nr >= static_cast<int>(g.rows) || nc >= static_cast<int>(g.cols))
                return s;
            return static_cast<std::size_t>(nr) * g.cols + static_cast<std::size_t>(nc);
        };
        for (int dir = 0; dir < 4; ++dir) {
            MdpAction action{kMoves[dir], {}};
            if (ch == 'h') {
                action.distribution.push_back({s, 1.0});
            } else {
                std::map<std::size_t, double> dist;
                dist[step(dir)] += 1.0 - 2.0 * slip;
                dist[step((dir + 1) % 4)] += slip;
                dist[step((dir + 3) % 4)] += slip;
                for (const auto& [t, p] : dist)
                    if (p > 0.0) action.distribution.push_back({t, p});
            }
            mdp.actions[s].push_back(std::move(action));
        }
    }
    return mdp;
}

// Deterministic strategy maximizing the discounted probability of reaching a
// `goal` cell (value iteration, ties to the first move in kMoves order). The
// discount makes shorter routes win; without it every safe cell has value 1
// and the argmax can pick moves that never arrive. Goal "uniform" gives the
// uniform strategy.
inline MemorylessStrategy grid_strategy(const Grid& g, const Mdp& mdp, const std::string& goal) {
    MemorylessStrategy sigma(mdp.num_states);
    if (goal == "uniform") {
        for (auto& row : sigma)
            for (const char* m : kMoves) row.emplace_back(m, 0.25);
        return sigma;
    }
    if (goal.size() != 1 || (goal[0] != 'a' && goal[0] != 'b'))
        throw BenchError("gridworld: strategy must be 'a', 'b' or 'uniform'");
    std::vector<double> value(mdp.num_states, 0.0);
    bool any = false;
    for (std::size_t s = 0; s < mdp.num_states; ++s)
        if (g.at(s) == goal[0]) value[s] = 1.0, any = true;
    if (!any) throw BenchError("gridworld: layout has no '" + goal + "' cell");
    const auto action_value = [&](std::size_t s, std::size_t i) {
        double v = 0.0;
        for (const auto& t : mdp.actions[s][i].distribution) v += t.prob * value[t.target];
        return 0.95 * v;
    };
    for (int sweep = 0; sweep < 10000; ++sweep) {
        double change = 0.0;
        for (std::size_t s = 0; s < mdp.num_states; ++s) {
            if (g.at(s) == goal[0] || g.at(s) == 'h') continue;
            double best = 0.0;
            for (std::size_t i = 0; i < mdp.actions[s].size(); ++i) best = std::max(best, action_value(s, i));
            change = std::max(change, best - value[s]);
            value[s] = best;
        }
        if (change < 1e-13) break;
    }
    for (std::size_t s = 0; s < mdp.num_states; ++s) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < mdp.actions[s].size(); ++i)
            if (action_value(s, i) > action_value(s, best) + 1e-12) best = i;
        sigma[s].emplace_back(mdp.actions[s][best].name, 1.0);
    }
    return sigma;
}

// Positives follow a goal-directed strategy, negatives a uniform one; the
// planted atom is P>m [F(goal)] with m the midpoint of the two classes.
inline GeneratedSample gridworld(std::uint64_t seed, const Params& params) {
    const auto grid = parse_layout(detail::text_param(params, "layout", kDefaultLayout));
    const std::string goal = detail::text_param(params, "strategy", "a");
    const double slip = detail::param(params, "slip", 1.0 / 3.0);
    if (!(slip >= 0.0 && slip <= 1.0 / 3.0 + 1e-12))
        throw BenchError("gridworld: slip must lie in [0, 1/3]");
    const auto mdp = gridworld_mdp(grid, slip);
    const auto good = induced_dtmc(mdp, grid_strategy(grid, mdp, goal));
    const auto bad = induced_dtmc(mdp, grid_strategy(grid, mdp, "uniform"));
    (void)seed;

    const auto body = parse_ltl("F " + goal);
    const double p = check_ltl(good, body).initial_value();
    const double n = check_ltl(bad, body).initial_value();
    if (!(p > n)) throw BenchError("gridworld: goal-directed strategy does not beat the uniform one");
    GeneratedSample g{"gridworld", {{"pos_0", good}}, {{"neg_0", bad}}, {"a", "b", "h"},
                      LearnerConfig{}, PltlFormula::atom((p + n) / 2.0, body)};
    g.params.max_size = 10;
    detail::verify_planted(g);
    return g;
}

inline std::vector<std::string> generator_names() {
    return {"two-state", "planted-safety", "gridworld", "truth-table", "planted-until"};
}

inline GeneratedSample generate(const std::string& name, std::uint64_t seed, const Params& params = {}) {
    if (name == "two-state") return two_state(seed, params);
    if (name == "planted-safety") return planted_safety(seed, params);
    if (name == "truth-table") return truth_table(seed, params);
    if (name == "planted-until") return planted_until(seed, params);
    if (name == "gridworld") return gridworld(seed, params);
    std::string known;
    for (const auto& n : generator_names()) known += (known.empty() ? "" : ", ") + n;
    throw BenchError("unknown generator '" + name + "' (known: " + known + ")");
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw BenchError("cannot write '" + path.string() + "'");
    out << text;
}

// Writes <name>.json, <name>.tra and <name>.lab for every chain plus
// manifest.json referencing the JSON files. Returns the manifest path.
inline std::filesystem::path write_sample(const GeneratedSample& g, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    nlohmann::ordered_json manifest;
    manifest["generator"] = g.generator;
    manifest["planted"] = g.planted.to_string();
    manifest["ap"] = g.ap;
    const auto emit = [&](const std::vector<NamedChain>& chains) {
        auto refs = nlohmann::ordered_json::array();
        for (const auto& c : chains) {
            write_text(dir / (c.name + ".json"), to_json(c.chain));
            write_text(dir / (c.name + ".tra"), to_prism_tra(c.chain));
            write_text(dir / (c.name + ".lab"), to_prism_lab(c.chain));
            refs.push_back({{"path", c.name + ".json"}, {"format", "json"}});
        }
        return refs;
    };
    manifest["positives"] = emit(g.positives);
    manifest["negatives"] = emit(g.negatives);
    manifest["params"] = {{"max_size", g.params.max_size},
                          {"max_depth", g.params.max_depth},
                          {"delta", g.params.delta},
                          {"bool_limit", g.params.bool_limit}};
    const auto path = dir / "manifest.json";
    write_text(path, manifest.dump(2) + "\n");
    return path;
}

} // namespace pltl::bench
