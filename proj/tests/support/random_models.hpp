// Seeded random chains and formulas for property tests.

#pragma once

#include <algorithm>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "pltl/dtmc.hpp"
#include "pltl/ltl.hpp"

namespace pltl::fixtures {

// Up to max_states states, each with 1..3 successors; about a fifth of the
// states are absorbing. Labels drawn independently per proposition.
inline Dtmc random_dtmc(std::mt19937_64& rng, std::size_t max_states,
                        const std::vector<std::string>& ap = {"a", "b"}) {
    std::uniform_int_distribution<std::size_t> count(1, max_states);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Dtmc m;
    m.num_states = count(rng);
    m.ap = ap;
    m.rows.resize(m.num_states);
    m.labels.resize(m.num_states);
    std::uniform_int_distribution<std::size_t> pick(0, m.num_states - 1);
    for (std::size_t s = 0; s < m.num_states; ++s) {
        for (std::size_t p = 0; p < ap.size(); ++p)
            if (unit(rng) < 0.4) m.labels[s].push_back(p);
        if (unit(rng) < 0.2) {
            m.rows[s].push_back({s, 1.0});
            continue;
        }
        std::vector<std::size_t> targets;
        const std::size_t k = 1 + rng() % 3;
        for (std::size_t i = 0; i < k; ++i) targets.push_back(pick(rng));
        std::sort(targets.begin(), targets.end());
        targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
        std::vector<double> w;
        double total = 0.0;
        for (std::size_t i = 0; i < targets.size(); ++i) {
            w.push_back(0.05 + unit(rng));
            total += w.back();
        }
        double assigned = 0.0;
        for (std::size_t i = 0; i < targets.size(); ++i) {
            const double p = i + 1 == targets.size() ? 1.0 - assigned : w[i] / total;
            assigned += p;
            m.rows[s].push_back({targets[i], p});
        }
    }
    m.initial = pick(rng);
    return m;
}

// Random NNF formula of exactly the given size over props (size >= 1).
inline LtlFormula random_formula(std::mt19937_64& rng, std::size_t size,
                                 const std::vector<std::string>& props) {
    if (size == 1) return LtlFormula::literal(props[rng() % props.size()], rng() % 2 == 0);
    if (size == 2 || rng() % 2 == 0) {
        static constexpr LtlOp unary[] = {LtlOp::Next, LtlOp::Finally, LtlOp::Globally};
        return LtlFormula::unary(unary[rng() % 3], random_formula(rng, size - 1, props));
    }
    static constexpr LtlOp binary[] = {LtlOp::And, LtlOp::Or, LtlOp::Until};
    const std::size_t left = 1 + rng() % (size - 2);
    return LtlFormula::binary(binary[rng() % 3], random_formula(rng, left, props),
                              random_formula(rng, size - 1 - left, props));
}

} // namespace pltl::fixtures
