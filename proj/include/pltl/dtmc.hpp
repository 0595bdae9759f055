// Finite labeled discrete-time Markov chains: representation, validation,
// file ingestion (PRISM explicit export and a single-document JSON format),
// bottom-SCC analysis, and chains induced by memoryless MDP strategies.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace pltl {

inline constexpr double kRowSumTolerance = 1e-9;

struct Transition {
    std::size_t target = 0;
    double prob = 0.0;
};

// Rows are sparse and indexed by source state; labels hold indices into ap.
struct Dtmc {
    std::size_t num_states = 0;
    std::size_t initial = 0;
    std::vector<std::vector<Transition>> rows;
    std::vector<std::string> ap;
    std::vector<std::vector<std::size_t>> labels;

    std::optional<std::size_t> prop_index(std::string_view name) const {
        for (std::size_t i = 0; i < ap.size(); ++i)
            if (ap[i] == name) return i;
        return std::nullopt;
    }

    bool holds(std::size_t state, std::size_t prop) const {
        const auto& l = labels[state];
        return std::find(l.begin(), l.end(), prop) != l.end();
    }

    std::size_t num_transitions() const {
        std::size_t n = 0;
        for (const auto& row : rows) n += row.size();
        return n;
    }
};

class DtmcError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Every violated invariant, one message each; empty means valid.
inline std::vector<std::string> validate(const Dtmc& m) {
    std::vector<std::string> errors;
    if (m.num_states == 0) errors.emplace_back("chain has no states");
    if (m.initial >= m.num_states)
        errors.push_back("initial state " + std::to_string(m.initial) + " out of range");
    if (m.rows.size() != m.num_states)
        errors.push_back("expected " + std::to_string(m.num_states) + " transition rows, got " +
                         std::to_string(m.rows.size()));
    if (m.labels.size() != m.num_states)
        errors.push_back("expected " + std::to_string(m.num_states) + " label sets, got " +
                         std::to_string(m.labels.size()));
    for (std::size_t s = 0; s < m.rows.size(); ++s) {
        double sum = 0.0;
        std::vector<std::size_t> seen;
        for (const auto& t : m.rows[s]) {
            if (t.target >= m.num_states)
                errors.push_back("transition " + std::to_string(s) + " -> " +
                                 std::to_string(t.target) + " targets a missing state");
            if (!(t.prob > 0.0 && t.prob <= 1.0))
                errors.push_back("transition " + std::to_string(s) + " -> " +
                                 std::to_string(t.target) + " has probability " +
                                 std::to_string(t.prob) + " outside (0,1]");
            if (std::find(seen.begin(), seen.end(), t.target) != seen.end())
                errors.push_back("duplicate transition " + std::to_string(s) + " -> " +
                                 std::to_string(t.target));
            seen.push_back(t.target);
            sum += t.prob;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance) {
            std::ostringstream msg;
            msg.precision(12);
            msg << "row " << s << " sums to " << sum << ", expected 1";
            errors.push_back(msg.str());
        }
    }
    for (std::size_t s = 0; s < m.labels.size(); ++s)
        for (auto p : m.labels[s])
            if (p >= m.ap.size())
                errors.push_back("state " + std::to_string(s) + " carries unknown proposition index " +
                                 std::to_string(p));
    return errors;
}

namespace detail {

inline void throw_if_invalid(const Dtmc& m) {
    const auto errors = validate(m);
    if (errors.empty()) return;
    std::string msg = "invalid chain: " + errors.front();
    for (std::size_t i = 1; i < errors.size(); ++i) msg += "; " + errors[i];
    throw DtmcError(msg);
}

struct RawTransition {
    std::size_t source, target;
    double prob;
};

inline Dtmc assemble(std::size_t num_states, std::size_t initial, std::vector<std::string> ap,
                     std::vector<std::vector<std::size_t>> labels,
                     const std::vector<RawTransition>& transitions) {
    Dtmc m;
    m.num_states = num_states;
    m.initial = initial;
    m.ap = std::move(ap);
    m.labels = std::move(labels);
    m.rows.resize(num_states);
    for (const auto& t : transitions) {
        if (t.source >= num_states || t.target >= num_states)
            throw DtmcError("transition " + std::to_string(t.source) + " -> " +
                            std::to_string(t.target) + " references a state outside 0.." +
                            std::to_string(num_states == 0 ? 0 : num_states - 1));
        m.rows[t.source].push_back({t.target, t.prob});
    }
    for (auto& l : m.labels) std::sort(l.begin(), l.end());
    throw_if_invalid(m);
    return m;
}

inline std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::istringstream in{std::string(text)};
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    return lines;
}

inline bool blank(const std::string& line) {
    return line.find_first_not_of(" \t") == std::string::npos;
}

inline std::size_t parse_index(const std::string& token, const std::string& where) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(token, &used);
    } catch (const std::exception&) {
        throw DtmcError(where + ": expected a state index, got '" + token + "'");
    }
    if (used != token.size() || token.front() == '-')
        throw DtmcError(where + ": expected a state index, got '" + token + "'");
    return static_cast<std::size_t>(v);
}

inline double parse_prob(const std::string& token, const std::string& where) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(token, &used);
    } catch (const std::exception&) {
        throw DtmcError(where + ": expected a probability, got '" + token + "'");
    }
    if (used != token.size()) throw DtmcError(where + ": expected a probability, got '" + token + "'");
    return v;
}

} // namespace detail

// PRISM explicit export: .tra text plus .lab text. The unique state labeled
// "init" becomes the initial state; "init" and "deadlock" are not kept as
// propositions.
inline Dtmc parse_prism_explicit(std::string_view tra_text, std::string_view lab_text) {
    const auto tra = detail::split_lines(tra_text);
    std::size_t line_no = 0;
    while (line_no < tra.size() && detail::blank(tra[line_no])) ++line_no;
    if (line_no == tra.size()) throw DtmcError("tra line 1: missing header '<#states> <#transitions>'");

    std::size_t num_states = 0, declared = 0;
    {
        std::istringstream head(tra[line_no]);
        std::string a, b, extra;
        const std::string where = "tra line " + std::to_string(line_no + 1);
        if (!(head >> a >> b) || (head >> extra))
            throw DtmcError(where + ": malformed header, expected '<#states> <#transitions>'");
        num_states = detail::parse_index(a, where);
        declared = detail::parse_index(b, where);
    }
    std::vector<detail::RawTransition> transitions;
    for (std::size_t i = line_no + 1; i < tra.size(); ++i) {
        if (detail::blank(tra[i])) continue;
        const std::string where = "tra line " + std::to_string(i + 1);
        std::istringstream row(tra[i]);
        std::string src, dst, prob, extra;
        if (!(row >> src >> dst >> prob) || (row >> extra))
            throw DtmcError(where + ": malformed transition, expected '<src> <dst> <prob>'");
        transitions.push_back({detail::parse_index(src, where), detail::parse_index(dst, where),
                               detail::parse_prob(prob, where)});
    }
    if (transitions.size() != declared)
        throw DtmcError("tra: header declares " + std::to_string(declared) + " transitions, found " +
                        std::to_string(transitions.size()));

    const auto lab = detail::split_lines(lab_text);
    std::size_t lab_line = 0;
    while (lab_line < lab.size() && detail::blank(lab[lab_line])) ++lab_line;
    if (lab_line == lab.size()) throw DtmcError("lab line 1: missing label header");

    // header: 0="init" 1="deadlock" 2="a" ...
    std::map<std::size_t, std::string> label_names;
    {
        const std::string where = "lab line " + std::to_string(lab_line + 1);
        std::istringstream head(lab[lab_line]);
        for (std::string token; head >> token;) {
            const auto eq = token.find('=');
            if (eq == std::string::npos || token.size() < eq + 3 || token[eq + 1] != '"' ||
                token.back() != '"')
                throw DtmcError(where + ": malformed label declaration '" + token + "'");
            const auto id = detail::parse_index(token.substr(0, eq), where);
            if (!label_names.emplace(id, token.substr(eq + 2, token.size() - eq - 3)).second)
                throw DtmcError(where + ": label id " + std::to_string(id) + " declared twice");
        }
    }
    std::vector<std::string> ap;
    std::map<std::size_t, std::optional<std::size_t>> id_to_prop;
    std::optional<std::size_t> init_id;
    for (const auto& [id, name] : label_names) {
        if (name == "init") {
            init_id = id;
            id_to_prop[id] = std::nullopt;
        } else if (name == "deadlock") {
            id_to_prop[id] = std::nullopt;
        } else {
            id_to_prop[id] = ap.size();
            ap.push_back(name);
        }
    }
    if (!init_id) throw DtmcError("lab: no \"init\" label declared");

    std::vector<std::vector<std::size_t>> labels(num_states);
    std::vector<std::size_t> init_states;
    for (std::size_t i = lab_line + 1; i < lab.size(); ++i) {
        if (detail::blank(lab[i])) continue;
        const std::string where = "lab line " + std::to_string(i + 1);
        const auto colon = lab[i].find(':');
        if (colon == std::string::npos) throw DtmcError(where + ": expected '<state>: <id> ...'");
        std::string state_tok = lab[i].substr(0, colon);
        state_tok.erase(0, state_tok.find_first_not_of(" \t"));
        state_tok.erase(state_tok.find_last_not_of(" \t") + 1);
        const auto state = detail::parse_index(state_tok, where);
        if (state >= num_states)
            throw DtmcError(where + ": state " + std::to_string(state) + " outside 0.." +
                            std::to_string(num_states == 0 ? 0 : num_states - 1));
        std::istringstream ids(lab[i].substr(colon + 1));
        for (std::string tok; ids >> tok;) {
            const auto id = detail::parse_index(tok, where);
            const auto it = id_to_prop.find(id);
            if (it == id_to_prop.end())
                throw DtmcError(where + ": undeclared label id " + std::to_string(id));
            if (id == *init_id) init_states.push_back(state);
            if (it->second && std::find(labels[state].begin(), labels[state].end(), *it->second) ==
                                  labels[state].end())
                labels[state].push_back(*it->second);
        }
    }
    if (init_states.empty()) throw DtmcError("lab: no state carries the \"init\" label");
    if (init_states.size() > 1) throw DtmcError("lab: more than one state carries the \"init\" label");
    return detail::assemble(num_states, init_states.front(), std::move(ap), std::move(labels),
                            transitions);
}

// {"states": n, "init": i, "ap": [...], "labels": [[names]...], "transitions": [[s,t,p]...]}
inline Dtmc parse_json_dtmc(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DtmcError(std::string("json: ") + e.what());
    }
    try {
        const auto num_states = doc.at("states").get<std::size_t>();
        const auto initial = doc.at("init").get<std::size_t>();
        auto ap = doc.value("ap", std::vector<std::string>{});
        std::vector<std::vector<std::size_t>> labels(num_states);
        if (doc.contains("labels")) {
            const auto& raw = doc.at("labels");
            if (!raw.is_array() || raw.size() != num_states)
                throw DtmcError("json: 'labels' must list one name list per state");
            for (std::size_t s = 0; s < num_states; ++s)
                for (const auto& name : raw[s]) {
                    const auto n = name.get<std::string>();
                    const auto it = std::find(ap.begin(), ap.end(), n);
                    if (it == ap.end())
                        throw DtmcError("json: state " + std::to_string(s) + " label '" + n +
                                        "' is not declared in 'ap'");
                    labels[s].push_back(static_cast<std::size_t>(it - ap.begin()));
                }
        }
        std::vector<detail::RawTransition> transitions;
        std::size_t index = 0;
        for (const auto& t : doc.at("transitions")) {
            if (!t.is_array() || t.size() != 3)
                throw DtmcError("json: transition #" + std::to_string(index) +
                                " must be [src, dst, prob]");
            transitions.push_back(
                {t[0].get<std::size_t>(), t[1].get<std::size_t>(), t[2].get<double>()});
            ++index;
        }
        return detail::assemble(num_states, initial, std::move(ap), std::move(labels), transitions);
    } catch (const nlohmann::json::exception& e) {
        throw DtmcError(std::string("json: ") + e.what());
    }
}

inline std::string to_json(const Dtmc& m) {
    nlohmann::ordered_json doc;
    doc["states"] = m.num_states;
    doc["init"] = m.initial;
    doc["ap"] = m.ap;
    auto labels = nlohmann::ordered_json::array();
    for (const auto& l : m.labels) {
        auto names = nlohmann::ordered_json::array();
        for (auto p : l) names.push_back(m.ap[p]);
        labels.push_back(names);
    }
    doc["labels"] = labels;
    auto transitions = nlohmann::ordered_json::array();
    for (std::size_t s = 0; s < m.rows.size(); ++s)
        for (const auto& t : m.rows[s]) transitions.push_back({s, t.target, t.prob});
    doc["transitions"] = transitions;
    return doc.dump(1) + "\n";
}

namespace detail {
inline std::string format_prob(double p) {
    std::ostringstream out;
    out.precision(17);
    out << p;
    return out.str();
}
} // namespace detail

inline std::string to_prism_tra(const Dtmc& m) {
    std::string out = std::to_string(m.num_states) + " " + std::to_string(m.num_transitions()) + "\n";
    for (std::size_t s = 0; s < m.rows.size(); ++s)
        for (const auto& t : m.rows[s])
            out += std::to_string(s) + " " + std::to_string(t.target) + " " +
                   detail::format_prob(t.prob) + "\n";
    return out;
}

inline std::string to_prism_lab(const Dtmc& m) {
    std::string out = "0=\"init\" 1=\"deadlock\"";
    for (std::size_t i = 0; i < m.ap.size(); ++i)
        out += " " + std::to_string(i + 2) + "=\"" + m.ap[i] + "\"";
    out += "\n";
    for (std::size_t s = 0; s < m.num_states; ++s) {
        std::vector<std::size_t> ids;
        if (s == m.initial) ids.push_back(0);
        for (auto p : m.labels[s]) ids.push_back(p + 2);
        if (ids.empty()) continue;
        out += std::to_string(s) + ":";
        for (auto id : ids) out += " " + std::to_string(id);
        out += "\n";
    }
    return out;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DtmcError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Loads by extension: .json, or .tra with a sibling .lab file.
inline Dtmc load_dtmc(const std::string& path) {
    const auto dot = path.rfind('.');
    const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
    try {
        if (ext == ".tra") {
            const std::string lab = path.substr(0, dot) + ".lab";
            return parse_prism_explicit(read_text_file(path), read_text_file(lab));
        }
        return parse_json_dtmc(read_text_file(path));
    } catch (const DtmcError& e) {
        throw DtmcError(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Graph analysis
// ---------------------------------------------------------------------------

// Strongly connected components (Tarjan, iterative). Each component sorted.
inline std::vector<std::vector<std::size_t>> sccs(const Dtmc& m) {
    const std::size_t n = m.num_states;
    constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, unvisited), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> out;
    std::size_t counter = 0;

    struct Frame {
        std::size_t state, edge;
    };
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unvisited) continue;
        std::vector<Frame> call{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            auto& frame = call.back();
            const auto& row = m.rows[frame.state];
            if (frame.edge < row.size()) {
                const auto next = row[frame.edge++].target;
                if (index[next] == unvisited) {
                    index[next] = low[next] = counter++;
                    stack.push_back(next);
                    on_stack[next] = true;
                    call.push_back({next, 0});
                } else if (on_stack[next]) {
                    low[frame.state] = std::min(low[frame.state], index[next]);
                }
                continue;
            }
            const auto v = frame.state;
            call.pop_back();
            if (!call.empty()) low[call.back().state] = std::min(low[call.back().state], low[v]);
            if (low[v] == index[v]) {
                std::vector<std::size_t> component;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    component.push_back(w);
                } while (w != v);
                std::sort(component.begin(), component.end());
                out.push_back(std::move(component));
            }
        }
    }
    return out;
}

// Bottom SCCs: components with no transition leaving them. Sorted by least state.
inline std::vector<std::vector<std::size_t>> bsccs(const Dtmc& m) {
    const auto components = sccs(m);
    std::vector<std::size_t> owner(m.num_states);
    for (std::size_t c = 0; c < components.size(); ++c)
        for (auto s : components[c]) owner[s] = c;
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t c = 0; c < components.size(); ++c) {
        const bool bottom = std::all_of(components[c].begin(), components[c].end(), [&](auto s) {
            return std::all_of(m.rows[s].begin(), m.rows[s].end(),
                               [&](const Transition& t) { return owner[t.target] == c; });
        });
        if (bottom) out.push_back(components[c]);
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return out;
}

// ---------------------------------------------------------------------------
// MDPs and memoryless strategies
// ---------------------------------------------------------------------------

struct MdpAction {
    std::string name;
    std::vector<Transition> distribution;
};

struct Mdp {
    std::size_t num_states = 0;
    std::size_t initial = 0;
    std::vector<std::vector<MdpAction>> actions; // per state
    std::vector<std::string> ap;
    std::vector<std::vector<std::size_t>> labels;
};

// Per state: (action name, probability) pairs.
using MemorylessStrategy = std::vector<std::vector<std::pair<std::string, double>>>;

inline std::vector<std::string> validate(const Mdp& m) {
    std::vector<std::string> errors;
    if (m.actions.size() != m.num_states) errors.emplace_back("action table size mismatch");
    for (std::size_t s = 0; s < m.actions.size(); ++s)
        for (const auto& a : m.actions[s]) {
            double sum = 0.0;
            for (const auto& t : a.distribution) {
                sum += t.prob;
                if (t.target >= m.num_states)
                    errors.push_back("state " + std::to_string(s) + " action " + a.name +
                                     " targets a missing state");
            }
            if (std::abs(sum - 1.0) > kRowSumTolerance)
                errors.push_back("state " + std::to_string(s) + " action " + a.name +
                                 " does not sum to 1");
        }
    return errors;
}

// P'(s,s') = sum_a strategy(s)(a) * P(s,a,s'). Labels and initial state carry over.
inline Dtmc induced_dtmc(const Mdp& mdp, const MemorylessStrategy& strategy) {
    if (const auto errors = validate(mdp); !errors.empty())
        throw DtmcError("invalid MDP: " + errors.front());
    if (strategy.size() != mdp.num_states)
        throw DtmcError("strategy covers " + std::to_string(strategy.size()) + " states, MDP has " +
                        std::to_string(mdp.num_states));
    Dtmc out;
    out.num_states = mdp.num_states;
    out.initial = mdp.initial;
    out.ap = mdp.ap;
    out.labels = mdp.labels;
    out.rows.resize(mdp.num_states);
    for (std::size_t s = 0; s < mdp.num_states; ++s) {
        std::map<std::size_t, double> mixed;
        double mass = 0.0;
        for (const auto& [name, weight] : strategy[s]) {
            const auto it = std::find_if(mdp.actions[s].begin(), mdp.actions[s].end(),
                                         [&](const MdpAction& a) { return a.name == name; });
            if (it == mdp.actions[s].end())
                throw DtmcError("strategy picks action '" + name + "' unavailable in state " +
                                std::to_string(s));
            mass += weight;
            if (weight <= 0.0) continue;
            for (const auto& t : it->distribution) mixed[t.target] += weight * t.prob;
        }
        if (std::abs(mass - 1.0) > kRowSumTolerance)
            throw DtmcError("strategy distribution at state " + std::to_string(s) +
                            " does not sum to 1");
        for (const auto& [target, p] : mixed)
            if (p > 0.0) out.rows[s].push_back({target, p});
    }
    detail::throw_if_invalid(out);
    return out;
}

// ---------------------------------------------------------------------------
// Samples
// ---------------------------------------------------------------------------

// Relabels m over the given proposition list; names m does not know are
// false everywhere, names outside the list are dropped.
inline Dtmc project(const Dtmc& m, const std::vector<std::string>& ap) {
    Dtmc out = m;
    out.ap = ap;
    for (std::size_t s = 0; s < m.num_states; ++s) {
        std::vector<std::size_t> l;
        for (auto p : m.labels[s]) {
            const auto it = std::find(ap.begin(), ap.end(), m.ap[p]);
            if (it != ap.end()) l.push_back(static_cast<std::size_t>(it - ap.begin()));
        }
        std::sort(l.begin(), l.end());
        out.labels[s] = std::move(l);
    }
    return out;
}

struct Sample {
    std::vector<Dtmc> positives;
    std::vector<Dtmc> negatives;
    std::vector<std::string> ap;

    std::size_t size() const { return positives.size() + negatives.size(); }
};

inline Sample make_sample(const std::vector<Dtmc>& positives, const std::vector<Dtmc>& negatives,
                          std::vector<std::string> ap) {
    if (positives.empty()) throw DtmcError("sample needs at least one positive chain");
    if (negatives.empty()) throw DtmcError("sample needs at least one negative chain");
    if (ap.empty()) throw DtmcError("sample needs at least one proposition");
    Sample out;
    out.ap = std::move(ap);
    for (const auto& m : positives) out.positives.push_back(project(m, out.ap));
    for (const auto& m : negatives) out.negatives.push_back(project(m, out.ap));
    return out;
}

} // namespace pltl
