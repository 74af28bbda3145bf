#ifndef DNR_CONFIG_HPP
#define DNR_CONFIG_HPP

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"
#include "smoothing.hpp"
#include "terms.hpp"

namespace dnr {

// Model formula grammar
//
//   formula  := term ('+' term)*
//   term     := name [ '(' args ')' ] [ '@' lags ]
//   lags     := 'lag' '(' range ')'
//   range    := int | int '..' int | int (',' int)*
//
// Edge terms:   edges, lag(r), triangle@lag(r), twopath@lag(r),
//               sharedpartner@lag(r), popularity@lag(r), reciprocity@lag(r),
//               edgecov(x), group(a), maxlag(k)
// Vertex terms: intercept, presence@lag(r), degree@lag(r), eigen@lag(r),
//               closeness@lag(r), betweenness@lag(r), cycles@lag(r),
//               attr(a), attrpresence(a)@lag(r), timecov(x), maxlag(k)
//
// Without maxlag(k) the maximum lag is the largest lag used (at least 1).

namespace detail {

inline std::string trim(std::string_view s)
{
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

inline std::size_t parse_count(const std::string& s, const std::string& what)
{
    std::size_t v = 0;
    const auto t = trim(s);
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || p != t.data() + t.size())
        throw SpecError("expected a non-negative integer for " + what + ", got '" + t + "'");
    return v;
}

inline std::vector<std::size_t> parse_lags(const std::string& text)
{
    std::vector<std::size_t> out;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const auto lo = parse_count(text.substr(0, dots), "lag"), hi = parse_count(text.substr(dots + 2), "lag");
        if (lo > hi) throw SpecError("empty lag range '" + text + "'");
        for (auto j = lo; j <= hi; ++j) out.push_back(j);
    } else {
        std::stringstream ss(text);
        std::string part;
        while (std::getline(ss, part, ',')) out.push_back(parse_count(part, "lag"));
    }
    if (out.empty()) throw SpecError("empty lag list");
    for (auto j : out)
        if (j == 0) throw SpecError("lags start at 1 (got lag(0))");
    return out;
}

struct RawTerm {
    std::string name;
    std::optional<std::string> arg;
    std::vector<std::size_t> lags;  // from '@lag(..)' or, for 'lag', its own argument
};

// Splits on '+' outside parentheses.
inline std::vector<RawTerm> tokenize_formula(const std::string& text)
{
    std::vector<std::string> parts;
    int depth = 0;
    std::string cur;
    for (char c : text) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (depth < 0) throw SpecError("unbalanced ')' in formula");
        if (c == '+' && depth == 0) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (depth != 0) throw SpecError("unbalanced '(' in formula");
    parts.push_back(cur);

    std::vector<RawTerm> out;
    for (auto& p : parts) {
        auto s = trim(p);
        if (s.empty()) throw SpecError("empty term in formula '" + trim(text) + "'");
        RawTerm t;
        std::string lag_part;
        if (auto at = s.find('@'); at != std::string::npos) {
            lag_part = trim(s.substr(at + 1));
            s = trim(s.substr(0, at));
        }
        if (auto open = s.find('('); open != std::string::npos) {
            if (s.back() != ')') throw SpecError("malformed term '" + s + "'");
            t.arg = trim(s.substr(open + 1, s.size() - open - 2));
            t.name = trim(s.substr(0, open));
        } else {
            t.name = s;
        }
        if (!lag_part.empty()) {
            if (lag_part.rfind("lag(", 0) != 0 || lag_part.back() != ')')
                throw SpecError("expected '@lag(..)' in term '" + trim(p) + "'");
            t.lags = parse_lags(lag_part.substr(4, lag_part.size() - 5));
        }
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace detail

inline ModelSpec parse_edge_formula(const std::string& text)
{
    std::optional<std::size_t> max_lag;
    std::vector<EdgeTerm> terms;
    for (const auto& t : detail::tokenize_formula(text)) {
        auto need_arg = [&] {
            if (!t.arg || t.arg->empty()) throw SpecError("term '" + t.name + "' needs an argument");
            return *t.arg;
        };
        auto no_lags = [&] {
            if (!t.lags.empty()) throw SpecError("term '" + t.name + "' does not take a lag");
        };
        if (t.name == "maxlag") {
            no_lags();
            max_lag = detail::parse_count(need_arg(), "maxlag");
        } else if (t.name == "edges") {
            no_lags();
            if (t.arg) throw SpecError("edges takes no argument");
            terms.push_back({EdgeStat::Edges, 0, {}});
        } else if (t.name == "lag") {
            no_lags();
            for (auto j : detail::parse_lags(need_arg())) terms.push_back({EdgeStat::Inertia, j, {}});
        } else if (t.name == "edgecov" || t.name == "group") {
            no_lags();
            terms.push_back({t.name == "edgecov" ? EdgeStat::EdgeCov : EdgeStat::Group, 0, need_arg()});
        } else {
            std::optional<EdgeStat> stat;
            for (auto s : {EdgeStat::Triangle, EdgeStat::TwoPath, EdgeStat::SharedPartner, EdgeStat::Popularity,
                           EdgeStat::Reciprocity})
                if (t.name == edge_stat_name(s)) stat = s;
            if (!stat) throw SpecError("unknown edge term '" + t.name + "'");
            if (t.arg) throw SpecError("term '" + t.name + "' takes no argument");
            if (t.lags.empty()) throw SpecError("term '" + t.name + "' needs '@lag(..)'");
            for (auto j : t.lags) terms.push_back({*stat, j, {}});
        }
    }
    std::size_t used = 1;
    for (const auto& t : terms) used = std::max(used, t.lag);
    ModelSpec spec{max_lag.value_or(used), std::move(terms)};
    spec.validate();
    return spec;
}

inline VertexSpec parse_vertex_formula(const std::string& text)
{
    std::optional<std::size_t> max_lag;
    std::vector<VertexTerm> terms;
    for (const auto& t : detail::tokenize_formula(text)) {
        auto need_arg = [&] {
            if (!t.arg || t.arg->empty()) throw SpecError("term '" + t.name + "' needs an argument");
            return *t.arg;
        };
        if (t.name == "maxlag") {
            max_lag = detail::parse_count(need_arg(), "maxlag");
            continue;
        }
        std::optional<VertexStat> stat;
        for (auto s : {VertexStat::Intercept, VertexStat::Presence, VertexStat::Degree, VertexStat::Eigenvector,
                       VertexStat::Closeness, VertexStat::Betweenness, VertexStat::Cycles, VertexStat::Attr,
                       VertexStat::AttrPresence, VertexStat::TimeCov})
            if (t.name == vertex_stat_name(s)) stat = s;
        if (!stat) throw SpecError("unknown vertex term '" + t.name + "'");
        const bool named = *stat == VertexStat::Attr || *stat == VertexStat::AttrPresence || *stat == VertexStat::TimeCov;
        std::string name = named ? need_arg() : std::string{};
        if (!named && t.arg) throw SpecError("term '" + t.name + "' takes no argument");
        if (vertex_stat_lagged(*stat)) {
            if (t.lags.empty()) throw SpecError("term '" + t.name + "' needs '@lag(..)'");
            for (auto j : t.lags) terms.push_back({*stat, j, name});
        } else {
            if (!t.lags.empty()) throw SpecError("term '" + t.name + "' does not take a lag");
            terms.push_back({*stat, 0, name});
        }
    }
    std::size_t used = 1;
    for (const auto& t : terms) used = std::max(used, t.lag);
    VertexSpec spec{max_lag.value_or(used), std::move(terms)};
    spec.validate();
    vertex_labels(spec);  // rejects duplicates
    return spec;
}

/// Canonical formula text; parse_edge_formula(formula_of(s)) == s.
inline std::string formula_of(const ModelSpec& spec)
{
    std::string out = "maxlag(" + std::to_string(spec.max_lag) + ")";
    for (const auto& t : spec.terms) {
        out += " + ";
        switch (t.stat) {
            case EdgeStat::Edges: out += "edges"; break;
            case EdgeStat::Inertia: out += "lag(" + std::to_string(t.lag) + ")"; break;
            case EdgeStat::EdgeCov:
            case EdgeStat::Group: out += std::string(edge_stat_name(t.stat)) + "(" + t.name + ")"; break;
            default: out += std::string(edge_stat_name(t.stat)) + "@lag(" + std::to_string(t.lag) + ")";
        }
    }
    return out;
}

inline std::string formula_of(const VertexSpec& spec)
{
    std::string out = "maxlag(" + std::to_string(spec.max_lag) + ")";
    for (const auto& t : spec.terms) {
        out += " + ";
        out += vertex_stat_name(t.stat);
        if (!t.name.empty()) out += "(" + t.name + ")";
        if (vertex_stat_lagged(t.stat)) out += "@lag(" + std::to_string(t.lag) + ")";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Experiment configuration: one `key = value` per line, '#' comments. A line
// without '=' is an edge formula.
//
//   edge = edges + lag(1)          vertex = intercept + presence@lag(1)
//   stats = triangle, twopath      lag_matrix = 1 0; 0 1     lag_vector = 1 1
//   maxlag = 2
//   lambda = auto | <value>        smoother = mean|median|min|max|mode|none
//   smoothing_window = 0           horizon = 20      seed = 1
//   split = 50                     replicates = 1    drift_window = 20
//   out_dir = results
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    ModelSpec edge;
    std::optional<VertexSpec> vertex;
    std::optional<double> lambda;  // nullopt = BIC selection
    SmootherKind smoother = SmootherKind::Mean;
    std::size_t smoothing_window = 0;
    std::size_t horizon = 0;
    std::uint64_t seed = 1;
    std::size_t split = 0;  // 0 = no holdout
    std::size_t replicates = 1;
    std::size_t drift_window = 20;
    std::string out_dir;

    std::size_t max_lag() const { return std::max(edge.max_lag, vertex ? vertex->max_lag : std::size_t{0}); }
};

inline std::optional<double> parse_lambda(const std::string& text)
{
    const auto t = detail::trim(text);
    if (t == "auto") return std::nullopt;
    double v = 0.0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || p != t.data() + t.size() || !(v >= 0.0) || !std::isfinite(v))
        throw SpecError("lambda must be 'auto' or a finite value >= 0, got '" + t + "'");
    return v;
}

namespace detail {

inline std::vector<std::uint8_t> parse_bits(const std::string& row, const std::string& what)
{
    std::vector<std::uint8_t> out;
    std::stringstream ss(row);
    std::string tok;
    while (ss >> tok) {
        if (tok != "0" && tok != "1") throw SpecError(what + " entries must be 0 or 1, got '" + tok + "'");
        out.push_back(tok == "1" ? 1 : 0);
    }
    return out;
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(const std::string& text)
{
    ExperimentConfig cfg;
    std::string edge_formula;
    std::optional<std::string> vertex_formula, stats, lag_matrix, lag_vector;
    std::optional<std::size_t> max_lag;

    std::stringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        try {
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                edge_formula += (edge_formula.empty() ? "" : " + ") + line;
                continue;
            }
            const auto key = detail::trim(line.substr(0, eq));
            const auto value = detail::trim(line.substr(eq + 1));
            if (key == "edge") edge_formula += (edge_formula.empty() ? "" : " + ") + value;
            else if (key == "vertex") vertex_formula = value;
            else if (key == "stats") stats = value;
            else if (key == "lag_matrix") lag_matrix = value;
            else if (key == "lag_vector") lag_vector = value;
            else if (key == "maxlag") max_lag = detail::parse_count(value, key);
            else if (key == "lambda") cfg.lambda = parse_lambda(value);
            else if (key == "smoother") cfg.smoother = parse_smoother(value);
            else if (key == "smoothing_window") cfg.smoothing_window = detail::parse_count(value, key);
            else if (key == "horizon") cfg.horizon = detail::parse_count(value, key);
            else if (key == "seed") cfg.seed = detail::parse_count(value, key);
            else if (key == "split") cfg.split = detail::parse_count(value, key);
            else if (key == "replicates") cfg.replicates = detail::parse_count(value, key);
            else if (key == "drift_window") cfg.drift_window = detail::parse_count(value, key);
            else if (key == "out_dir") cfg.out_dir = value;
            else throw SpecError("unknown setting '" + key + "'");
        } catch (const SpecError& e) {
            throw SpecError("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (cfg.replicates < 1) throw SpecError("replicates must be at least 1");

    if (stats || lag_matrix || lag_vector) {
        // explicit lag selection; the formula then holds only non-lagged terms
        std::vector<EdgeStat> stat_list;
        if (stats) {
            std::string list = *stats;
            std::replace(list.begin(), list.end(), ',', ' ');
            std::stringstream ss(list);
            std::string tok;
            while (ss >> tok) {
                auto spec = parse_edge_formula(tok + "@lag(1)");
                stat_list.push_back(spec.terms.front().stat);
            }
        }
        std::vector<std::vector<std::uint8_t>> m;
        if (lag_matrix) {
            std::stringstream ss(*lag_matrix);
            std::string row;
            while (std::getline(ss, row, ';')) m.push_back(detail::parse_bits(row, "lag matrix"));
        }
        auto v = lag_vector ? detail::parse_bits(*lag_vector, "lag vector") : std::vector<std::uint8_t>{};
        const std::size_t k = max_lag.value_or(std::max(m.size(), v.size()));
        if (!lag_matrix) m.assign(k, std::vector<std::uint8_t>(stat_list.size(), 0));
        if (!lag_vector) v.assign(k, 0);
        std::vector<EdgeTerm> fixed;
        if (!edge_formula.empty()) {
            auto base = parse_edge_formula(edge_formula);
            for (const auto& t : base.terms) {
                if (t.stat == EdgeStat::Inertia || is_lagged_network_stat(t.stat))
                    throw SpecError("lagged terms must go in lag_matrix/lag_vector when those are given");
                fixed.push_back(t);
            }
        }
        cfg.edge = ModelSpec::from_lag_selection(k, std::move(fixed), stat_list, m, v);
    } else {
        if (edge_formula.empty()) throw SpecError("config has no edge formula");
        cfg.edge = parse_edge_formula(edge_formula);
        if (max_lag) {
            if (*max_lag < cfg.edge.max_lag)
                throw SpecError("maxlag " + std::to_string(*max_lag) + " is below a lag used in the formula");
            cfg.edge.max_lag = *max_lag;
        }
    }
    if (vertex_formula) cfg.vertex = parse_vertex_formula(*vertex_formula);
    return cfg;
}

/// Edge spec and optional vertex spec from a model config (formula or full experiment config).
inline std::pair<ModelSpec, std::optional<VertexSpec>> parse_model_config(const std::string& text)
{
    auto cfg = parse_experiment_config(text);
    return {cfg.edge, cfg.vertex};
}

}  // namespace dnr

#endif  // DNR_CONFIG_HPP
