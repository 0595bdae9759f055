// Sample manifests, report formatting and the command bodies behind the
// `pltl` executable. Commands write to the given streams and return the
// process exit status, so tests can drive them in-process.

#pragma once

#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pltl/bench.hpp"
#include "pltl/dtmc.hpp"
#include "pltl/engine.hpp"
#include "pltl/learner.hpp"
#include "pltl/ltl.hpp"

namespace pltl::cli {

enum ExitCode : int { kExitSolution = 0, kExitNoSolution = 1, kExitInputError = 2 };

class ManifestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ChainFormat { Json, PrismExplicit };

struct ChainRef {
    std::filesystem::path path; // .json file, or the .tra file
    std::filesystem::path lab;  // only for prism-explicit
    ChainFormat format = ChainFormat::Json;
};

// Unset params fall back to the learner defaults, except K which must come
// from the manifest or the command line.
struct ManifestParams {
    std::optional<std::size_t> max_size;
    std::optional<std::size_t> max_depth;
    std::optional<double> delta;
    std::optional<std::size_t> bool_limit;
};

struct SampleManifest {
    std::vector<ChainRef> positives;
    std::vector<ChainRef> negatives;
    std::vector<std::string> ap;
    ManifestParams params;
};

namespace detail {

inline ChainRef chain_ref(const nlohmann::json& entry, const std::filesystem::path& base,
                          const std::string& where) {
    ChainRef ref;
    std::string format;
    if (entry.is_string()) {
        ref.path = base / entry.get<std::string>();
    } else if (entry.is_object() && entry.contains("path") && entry["path"].is_string()) {
        ref.path = base / entry["path"].get<std::string>();
        if (entry.contains("format")) {
            if (!entry["format"].is_string()) throw ManifestError(where + ": format must be a string");
            format = entry["format"].get<std::string>();
        }
        if (entry.contains("lab")) {
            if (!entry["lab"].is_string()) throw ManifestError(where + ": lab must be a string");
            ref.lab = base / entry["lab"].get<std::string>();
        }
    } else {
        throw ManifestError(where + ": expected a path string or an object with \"path\"");
    }
    if (format.empty()) format = ref.path.extension() == ".tra" ? "prism-explicit" : "json";
    if (format == "json") {
        ref.format = ChainFormat::Json;
    } else if (format == "prism-explicit") {
        ref.format = ChainFormat::PrismExplicit;
        if (ref.lab.empty()) ref.lab = std::filesystem::path(ref.path).replace_extension(".lab");
    } else {
        throw ManifestError(where + ": unknown format '" + format + "' (json | prism-explicit)");
    }
    return ref;
}

template <typename T>
std::optional<T> optional_number(const nlohmann::json& params, const char* key) {
    if (!params.contains(key)) return std::nullopt;
    const auto& v = params[key];
    if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer() || v.get<long long>() < 0)
            throw ManifestError(std::string("params.") + key + " must be a non-negative integer");
    } else {
        if (!v.is_number()) throw ManifestError(std::string("params.") + key + " must be a number");
    }
    return v.get<T>();
}

} // namespace detail

inline SampleManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ManifestError(e.what());
    }
    if (!doc.is_object()) throw ManifestError("top level must be an object");
    SampleManifest m;
    for (const char* side : {"positives", "negatives"}) {
        if (!doc.contains(side) || !doc[side].is_array())
            throw ManifestError(std::string("missing array \"") + side + "\"");
        auto& out = std::string(side) == "positives" ? m.positives : m.negatives;
        for (std::size_t i = 0; i < doc[side].size(); ++i)
            out.push_back(detail::chain_ref(doc[side][i], base_dir,
                                            std::string(side) + "[" + std::to_string(i) + "]"));
        if (out.empty()) throw ManifestError(std::string("\"") + side + "\" lists no chains");
    }
    if (!doc.contains("ap") || !doc["ap"].is_array() || doc["ap"].empty())
        throw ManifestError("missing non-empty array \"ap\"");
    for (const auto& p : doc["ap"]) {
        if (!p.is_string()) throw ManifestError("\"ap\" entries must be strings");
        m.ap.push_back(p.get<std::string>());
    }
    if (doc.contains("params")) {
        const auto& params = doc["params"];
        if (!params.is_object()) throw ManifestError("\"params\" must be an object");
        m.params.max_size = detail::optional_number<std::size_t>(params, "max_size");
        m.params.max_depth = detail::optional_number<std::size_t>(params, "max_depth");
        m.params.delta = detail::optional_number<double>(params, "delta");
        m.params.bool_limit = detail::optional_number<std::size_t>(params, "bool_limit");
    }
    return m;
}

inline SampleManifest load_manifest(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_text_file(path.string());
    } catch (const std::exception& e) {
        throw ManifestError(e.what());
    }
    try {
        return parse_manifest(text, path.parent_path());
    } catch (const ManifestError& e) {
        throw ManifestError(path.string() + ": " + e.what());
    }
}

inline Dtmc load_chain(const ChainRef& ref) {
    if (ref.format == ChainFormat::Json) return load_dtmc(ref.path.string());
    std::string tra, lab;
    try {
        tra = read_text_file(ref.path.string());
        lab = read_text_file(ref.lab.string());
    } catch (const std::exception& e) {
        throw DtmcError(e.what());
    }
    try {
        return parse_prism_explicit(tra, lab);
    } catch (const DtmcError& e) {
        throw DtmcError(ref.path.string() + ": " + e.what());
    }
}

inline Sample load_sample(const SampleManifest& m) {
    std::vector<Dtmc> pos, neg;
    for (const auto& r : m.positives) pos.push_back(load_chain(r));
    for (const auto& r : m.negatives) neg.push_back(load_chain(r));
    return make_sample(pos, neg, m.ap);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline std::string format_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

inline std::string no_solution_message(const LearnerConfig& c) {
    std::ostringstream out;
    out << "no formula in the search space (K=" << c.max_size << ", D=" << c.max_depth
        << ", δ=" << format_threshold(c.delta) << ")";
    return out.str();
}

inline std::string format_solutions(const LearnResult& r) {
    std::ostringstream out;
    for (const auto& s : r.solutions) {
        out << s.formula.to_string() << "\n";
        out << "  size " << s.formula.size() << ", margin "
            << (s.margin ? format_fixed(*s.margin, 6) : std::string("n/a")) << ", via "
            << (s.origin == SolutionOrigin::ThresholdSearch ? "threshold search" : "set cover")
            << "\n";
    }
    return out.str();
}

// Deterministic counts only; timings go through format_timings.
inline std::string format_stats(const RunStats& s) {
    std::ostringstream out;
    out << "size  constructed  pruned(temporal/boolean/duplicate)  checked  discarded  pooled  "
           "consistent\n";
    std::size_t constructed = 0, checked = 0;
    for (const auto& row : s.per_size) {
        char line[160];
        std::snprintf(line, sizeof line, "%4zu  %11zu  %10zu (%zu/%zu/%zu)  %7zu  %9zu  %6zu  %10zu\n",
                      row.size, row.constructed, row.pruned(), row.pruned_temporal,
                      row.pruned_boolean, row.pruned_duplicate, row.checked, row.discarded,
                      row.pooled, row.consistent);
        out << line;
        constructed += row.constructed;
        checked += row.checked;
    }
    out << "searched " << checked << "/" << constructed << ", engine calls " << s.engine_calls
        << ", heap " << s.heap_size << ", combinations " << s.combinations_tried << "\n";
    return out.str();
}

inline std::string format_timings(const RunStats& s) {
    std::ostringstream out;
    out << "time gbe " << format_fixed(s.gbe_seconds, 3) << "s, pts " << format_fixed(s.pts_seconds, 3)
        << "s, bsc " << format_fixed(s.bsc_seconds, 3) << "s\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct LearnOptions {
    std::filesystem::path sample;
    std::optional<std::size_t> max_size, max_depth, bool_limit, jobs;
    std::optional<double> delta;
    bool stats = false;
    bool all_minimal = false;
    bool eager_return = false;
};

// Command-line flags override manifest params.
inline LearnerConfig resolve_config(const ManifestParams& params, const LearnOptions& o) {
    LearnerConfig c;
    const auto pick = [](auto flag, auto manifest, auto fallback) {
        return flag ? *flag : manifest ? *manifest : fallback;
    };
    if (!o.max_size && !params.max_size)
        throw std::invalid_argument("max size K is required (--max-size or params.max_size)");
    c.max_size = pick(o.max_size, params.max_size, std::size_t{0});
    c.max_depth = pick(o.max_depth, params.max_depth, c.max_depth);
    c.delta = pick(o.delta, params.delta, c.delta);
    c.bool_limit = pick(o.bool_limit, params.bool_limit, c.bool_limit);
    c.jobs = o.jobs.value_or(1);
    c.all_minimal = o.all_minimal;
    c.eager_return = o.eager_return;
    validate_config(c);
    return c;
}

inline int run_learn(const LearnOptions& o, std::ostream& out, std::ostream& err) {
    LearnerConfig config;
    Sample sample;
    try {
        const auto manifest = load_manifest(o.sample);
        try {
            config = resolve_config(manifest.params, o);
        } catch (const std::invalid_argument& e) {
            throw ManifestError(o.sample.string() + ": " + e.what());
        }
        sample = load_sample(manifest);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    LearnResult result;
    try {
        result = learn(sample, config);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    if (result.found())
        out << format_solutions(result);
    else
        out << no_solution_message(config) << "\n";
    out << format_stats(result.stats);
    if (o.stats) err << format_timings(result.stats);
    return result.found() ? kExitSolution : kExitNoSolution;
}

inline int run_check(const std::filesystem::path& model, const std::string& formula, std::ostream& out,
                     std::ostream& err) {
    Dtmc m;
    std::optional<LtlFormula> phi;
    try {
        m = model.extension() == ".tra"
                ? load_chain({model, std::filesystem::path(model).replace_extension(".lab"),
                              ChainFormat::PrismExplicit})
                : load_dtmc(model.string());
        phi = parse_ltl(formula);
        for (const auto& p : propositions(*phi))
            if (!m.prop_index(p)) throw std::invalid_argument("formula uses unknown proposition '" + p + "'");
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    try {
        const auto v = check_ltl(m, *phi);
        for (std::size_t s = 0; s < v.size(); ++s) out << "s" << s << " " << format_fixed(v[s], 9) << "\n";
        out << "v_I = " << format_fixed(v.initial_value(), 9) << "\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitSolution;
}

inline int run_benchgen(const std::string& name, std::uint64_t seed, const bench::Params& params,
                        const std::filesystem::path& dir, std::ostream& out, std::ostream& err) {
    try {
        const auto sample = bench::generate(name, seed, params);
        const auto manifest = bench::write_sample(sample, dir);
        out << manifest.string() << "\n";
        out << "planted " << sample.planted.to_string() << "\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitSolution;
}

} // namespace pltl::cli
