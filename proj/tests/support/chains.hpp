// Small hand-built chains shared by the unit and acceptance tests.

#pragma once

#include <string>
#include <vector>

#include "pltl/dtmc.hpp"

namespace pltl::fixtures {

struct EdgeList {
    std::size_t from, to;
    double prob;
};

inline Dtmc make_chain(std::size_t n, const std::vector<EdgeList>& edges,
                       const std::vector<std::vector<std::string>>& labels,
                       std::vector<std::string> ap, std::size_t initial = 0) {
    Dtmc m;
    m.num_states = n;
    m.initial = initial;
    m.ap = std::move(ap);
    m.rows.resize(n);
    m.labels.resize(n);
    for (const auto& e : edges) m.rows[e.from].push_back({e.to, e.prob});
    for (std::size_t s = 0; s < labels.size(); ++s)
        for (const auto& name : labels[s]) m.labels[s].push_back(*m.prop_index(name));
    detail::throw_if_invalid(m);
    return m;
}

// s0 ->0.3 s1{a}, ->0.7 s2{}; s1, s2 absorbing.
inline Dtmc c1() { return make_chain(3, {{0, 1, 0.3}, {0, 2, 0.7}, {1, 1, 1}, {2, 2, 1}}, {{}, {"a"}, {}}, {"a"}); }

// s0 ->0.5 s0, ->0.5 s1{a}; s1 absorbing.
inline Dtmc c2() { return make_chain(2, {{0, 0, 0.5}, {0, 1, 0.5}, {1, 1, 1}}, {{}, {"a"}}, {"a"}); }

// s0{a} ->0.4 s1{b}, ->0.6 s2{}; absorbing.
inline Dtmc c3() {
    return make_chain(3, {{0, 1, 0.4}, {0, 2, 0.6}, {1, 1, 1}, {2, 2, 1}}, {{"a"}, {"b"}, {}}, {"a", "b"});
}

// s0 ->0.5 s1{a}, ->0.5 s2{}; absorbing.
inline Dtmc c4() { return make_chain(3, {{0, 1, 0.5}, {0, 2, 0.5}, {1, 1, 1}, {2, 2, 1}}, {{}, {"a"}, {}}, {"a"}); }

// s0 ->0.5 s1{a} ->1 s3{b} absorbing; s0 ->0.5 s2{} absorbing.
inline Dtmc c5() {
    return make_chain(4, {{0, 1, 0.5}, {0, 2, 0.5}, {1, 3, 1}, {2, 2, 1}, {3, 3, 1}},
                      {{}, {"a"}, {}, {"b"}}, {"a", "b"});
}

} // namespace pltl::fixtures
