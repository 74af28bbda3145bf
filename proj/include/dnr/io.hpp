#ifndef DNR_IO_HPP
#define DNR_IO_HPP

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "error.hpp"
#include "estimator.hpp"
#include "panel.hpp"

namespace dnr {

// Panel file: line-oriented text with typed sections, '#' starts a comment.
//
//   [header]
//   directed = true
//   [vertices]                 one id per line, then optional key=value attributes
//   a party=dem
//   [times]                    time labels in order; records refer to these
//   2004-08
//   [forecast]                 optional labels past the panel, covariates only
//   [edges]                    time source target
//   [activity]                 time vertex        (section present = vertex dynamics)
//   [edge_covariates]          time source target name value
//   [vertex_covariates]        time vertex name value   (vertex '*' = all vertices)
//
// Without a [times] section the labels are the distinct times used by the
// records, ordered numerically when all are integers and lexically otherwise.

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

inline bool is_integer(const std::string& s)
{
    if (s.empty()) return false;
    std::size_t a = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (a == s.size()) return false;
    for (std::size_t i = a; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

inline double parse_real(const std::string& s, std::size_t line)
{
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v))
        throw ValidationError("line " + std::to_string(line) + ": '" + s + "' is not a finite number");
    return v;
}

inline std::string format_real(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Record {
    std::size_t line;
    std::vector<std::string> fields;
};

}  // namespace detail

/// Parses panel text. `source` names the input in error messages.
inline NetworkPanel parse_panel(const std::string& text, const std::string& source = "panel")
{
    std::map<std::string, std::vector<detail::Record>> sections;
    std::set<std::string> seen;
    std::string current;
    std::stringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    static const std::set<std::string> known{"header", "vertices", "times", "forecast", "edges",
                                             "activity", "edge_covariates", "vertex_covariates"};
    auto fail = [&](std::size_t line, const std::string& msg) -> ValidationError {
        return ValidationError(source + ":" + std::to_string(line) + ": " + msg);
    };
    while (std::getline(in, raw)) {
        ++lineno;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const auto line = detail::trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw fail(lineno, "malformed section header '" + line + "'");
            current = detail::trim(line.substr(1, line.size() - 2));
            if (!known.count(current)) throw fail(lineno, "unknown section [" + current + "]");
            if (!seen.insert(current).second) throw fail(lineno, "section [" + current + "] appears twice");
            sections[current];
            continue;
        }
        if (current.empty()) throw fail(lineno, "record outside any section");
        sections[current].push_back({lineno, detail::split_ws(line)});
    }

    bool directed = false;
    for (const auto& r : sections["header"]) {
        const std::string joined = [&] {
            std::string s;
            for (const auto& f : r.fields) s += f;
            return s;
        }();
        const auto eq = joined.find('=');
        if (eq == std::string::npos) throw fail(r.line, "expected key = value");
        const auto key = joined.substr(0, eq), value = joined.substr(eq + 1);
        if (key == "directed") {
            if (value != "true" && value != "false") throw fail(r.line, "directed must be true or false");
            directed = value == "true";
        } else {
            throw fail(r.line, "unknown header key '" + key + "'");
        }
    }

    // universe and static attributes
    std::vector<std::string> universe;
    std::unordered_map<std::string, std::size_t> index;
    std::map<std::string, std::map<std::size_t, std::string>> attrs;
    for (const auto& r : sections["vertices"]) {
        const auto& id = r.fields[0];
        if (!index.emplace(id, universe.size()).second) throw fail(r.line, "duplicate vertex id '" + id + "'");
        universe.push_back(id);
        for (std::size_t f = 1; f < r.fields.size(); ++f) {
            const auto eq = r.fields[f].find('=');
            if (eq == std::string::npos || eq == 0) throw fail(r.line, "expected key=value attribute");
            attrs[r.fields[f].substr(0, eq)][universe.size() - 1] = r.fields[f].substr(eq + 1);
        }
    }
    if (universe.empty()) throw ValidationError(source + ": no vertices listed");
    auto vertex = [&](const std::string& id, std::size_t line) {
        auto it = index.find(id);
        if (it == index.end()) throw fail(line, "unknown vertex id '" + id + "'");
        return it->second;
    };

    // time labels
    std::vector<std::string> labels;
    if (sections.count("times")) {
        for (const auto& r : sections["times"]) {
            if (r.fields.size() != 1) throw fail(r.line, "expected one time label per line");
            labels.push_back(r.fields[0]);
        }
    } else {
        std::set<std::string> used;
        for (const char* s : {"edges", "activity", "edge_covariates", "vertex_covariates"})
            if (auto it = sections.find(s); it != sections.end())
                for (const auto& r : it->second) used.insert(r.fields[0]);
        labels.assign(used.begin(), used.end());
        const bool numeric = std::all_of(labels.begin(), labels.end(), detail::is_integer);
        if (numeric)
            std::sort(labels.begin(), labels.end(),
                      [](const std::string& a, const std::string& b) { return std::stoll(a) < std::stoll(b); });
    }
    if (labels.empty()) throw ValidationError(source + ": panel has no time points");
    std::vector<std::string> forecast;
    for (const auto& r : sections["forecast"]) {
        if (r.fields.size() != 1) throw fail(r.line, "expected one time label per line");
        forecast.push_back(r.fields[0]);
    }
    std::unordered_map<std::string, std::size_t> time_index;
    for (std::size_t t = 0; t < labels.size() + forecast.size(); ++t) {
        const auto& l = t < labels.size() ? labels[t] : forecast[t - labels.size()];
        if (!time_index.emplace(l, t + 1).second)
            throw ValidationError(source + ": duplicate time label '" + l + "'");
    }
    const std::size_t T = labels.size(), n = universe.size();
    auto time = [&](const std::string& label, std::size_t line, bool allow_forecast) {
        auto it = time_index.find(label);
        if (it == time_index.end()) throw fail(line, "unknown time '" + label + "'");
        if (it->second > T && !allow_forecast) throw fail(line, "time '" + label + "' is a forecast time");
        return it->second;
    };

    std::vector<std::string> warnings;
    const bool dynamic = sections.count("activity") != 0;
    std::vector<std::vector<std::uint8_t>> activity(T, std::vector<std::uint8_t>(n, dynamic ? 0 : 1));
    for (const auto& r : sections["activity"]) {
        if (r.fields.size() != 2) throw fail(r.line, "expected: time vertex");
        activity[time(r.fields[0], r.line, false) - 1][vertex(r.fields[1], r.line)] = 1;
    }

    std::vector<Graph> graphs(T, Graph(n, directed));
    std::size_t loops = 0;
    for (const auto& r : sections["edges"]) {
        if (r.fields.size() != 3) throw fail(r.line, "expected: time source target");
        const auto t = time(r.fields[0], r.line, false);
        const auto i = vertex(r.fields[1], r.line), j = vertex(r.fields[2], r.line);
        if (i == j) {
            ++loops;
            continue;
        }
        if (!activity[t - 1][i] || !activity[t - 1][j])
            throw fail(r.line, "edge (" + r.fields[0] + ", " + r.fields[1] + ", " + r.fields[2] +
                                   ") is incident to a vertex inactive at that time");
        graphs[t - 1].set_edge(i, j, true);
    }
    if (loops) warnings.push_back(std::to_string(loops) + " self-loop record(s) dropped");

    NetworkPanel panel = dynamic ? NetworkPanel(universe, graphs, activity) : NetworkPanel(universe, graphs);
    panel.set_time_labels(labels);
    for (const auto& [name, values] : attrs) {
        std::vector<std::string> col(n);
        std::size_t missing = 0;
        for (std::size_t i = 0; i < n; ++i) {
            auto it = values.find(i);
            if (it == values.end()) {
                col[i] = "0";
                ++missing;
            } else {
                col[i] = it->second;
            }
        }
        if (missing) warnings.push_back("attribute '" + name + "' missing for " + std::to_string(missing) +
                                        " vertex(es); set to 0");
        panel.set_attribute(name, std::move(col));
    }

    const std::size_t horizon = T + forecast.size();
    {
        std::map<std::string, std::vector<DyadMatrix>> ecov;
        std::map<std::string, std::vector<std::vector<std::uint8_t>>> given;
        for (const auto& r : sections["edge_covariates"]) {
            if (r.fields.size() != 5) throw fail(r.line, "expected: time source target name value");
            const auto t = time(r.fields[0], r.line, true);
            const auto i = vertex(r.fields[1], r.line), j = vertex(r.fields[2], r.line);
            if (i == j) continue;
            const auto& name = r.fields[3];
            const double v = detail::parse_real(r.fields[4], r.line);
            auto& series = ecov[name];
            auto& mask = given[name];
            if (series.empty()) {
                series.assign(horizon, DyadMatrix(n));
                mask.assign(horizon, std::vector<std::uint8_t>(n * n, 0));
            }
            series[t - 1](i, j) = v;
            mask[t - 1][i * n + j] = 1;
            if (!directed) {
                series[t - 1](j, i) = v;
                mask[t - 1][j * n + i] = 1;
            }
        }
        for (auto& [name, series] : ecov) {
            std::size_t missing = 0;
            for (std::size_t t = 0; t < T; ++t)
                for (const auto& [i, j] : enumerate_dyads(n, directed))
                    if (!given[name][t][i * n + j]) ++missing;
            if (missing)
                warnings.push_back("edge covariate '" + name + "' missing for " + std::to_string(missing) +
                                   " dyad-time(s); set to 0");
            // forecast times without any record carry the last value forward
            std::size_t last = T;
            for (std::size_t t = T; t < horizon; ++t) {
                bool any = false;
                for (auto b : given[name][t]) any = any || b;
                if (!any) series[t] = series[last - 1];
                else last = t + 1;
            }
            panel.set_edge_covariate(name, std::move(series));
        }
    }
    {
        std::map<std::string, std::vector<std::vector<double>>> vcov;
        std::map<std::string, std::vector<std::vector<std::uint8_t>>> given;
        for (const auto& r : sections["vertex_covariates"]) {
            if (r.fields.size() != 4) throw fail(r.line, "expected: time vertex name value");
            const auto t = time(r.fields[0], r.line, true);
            const auto& name = r.fields[2];
            const double v = detail::parse_real(r.fields[3], r.line);
            auto& series = vcov[name];
            auto& mask = given[name];
            if (series.empty()) {
                series.assign(horizon, std::vector<double>(n, 0.0));
                mask.assign(horizon, std::vector<std::uint8_t>(n, 0));
            }
            if (r.fields[1] == "*") {
                std::fill(series[t - 1].begin(), series[t - 1].end(), v);
                std::fill(mask[t - 1].begin(), mask[t - 1].end(), std::uint8_t{1});
            } else {
                const auto i = vertex(r.fields[1], r.line);
                series[t - 1][i] = v;
                mask[t - 1][i] = 1;
            }
        }
        for (auto& [name, series] : vcov) {
            std::size_t missing = 0;
            for (std::size_t t = 0; t < T; ++t)
                for (auto b : given[name][t]) missing += b ? 0 : 1;
            if (missing)
                warnings.push_back("vertex covariate '" + name + "' missing for " + std::to_string(missing) +
                                   " vertex-time(s); set to 0");
            std::size_t last = T;
            for (std::size_t t = T; t < horizon; ++t) {
                bool any = false;
                for (auto b : given[name][t]) any = any || b;
                if (!any) series[t] = series[last - 1];
                else last = t + 1;
            }
            panel.set_vertex_covariate(name, std::move(series));
        }
    }
    for (auto& w : warnings) panel.add_warning(std::move(w));
    return panel;
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline NetworkPanel load_panel(const std::string& path) { return parse_panel(read_file(path), path); }

/// Canonical text of a panel; parse_panel(format_panel(p)) == p.
inline std::string format_panel(const NetworkPanel& p)
{
    auto check_token = [](const std::string& s, const std::string& what) {
        if (s.empty() || s.find_first_of(" \t\r\n#=[]") != std::string::npos)
            throw ValidationError(what + " '" + s + "' cannot be written (empty or contains a reserved character)");
    };
    const std::size_t n = p.order(), T = p.length();
    std::ostringstream out;
    out << "[header]\ndirected = " << (p.directed() ? "true" : "false") << "\n\n[vertices]\n";
    for (std::size_t i = 0; i < n; ++i) {
        check_token(p.universe()[i], "vertex id");
        out << p.universe()[i];
        for (const auto& [name, values] : p.attributes()) {
            check_token(name, "attribute name");
            check_token(values[i], "attribute value");
            out << ' ' << name << '=' << values[i];
        }
        out << '\n';
    }
    out << "\n[times]\n";
    for (const auto& l : p.time_labels()) {
        check_token(l, "time label");
        out << l << '\n';
    }
    std::size_t horizon = T;
    for (const auto& [name, s] : p.edge_covariates()) horizon = std::max(horizon, s.size());
    for (const auto& [name, s] : p.vertex_covariates()) horizon = std::max(horizon, s.size());
    std::vector<std::string> labels = p.time_labels();
    if (horizon > T) {
        out << "\n[forecast]\n";
        std::set<std::string> taken(labels.begin(), labels.end());
        for (std::size_t t = T + 1; t <= horizon; ++t) {
            std::string l = "forecast" + std::to_string(t);
            while (taken.count(l)) l += "_";
            labels.push_back(l);
            out << l << '\n';
        }
    }
    out << "\n[edges]\n";
    for (std::size_t t = 1; t <= T; ++t)
        for (const auto& [i, j] : enumerate_dyads(n, p.directed()))
            if (p.graph(t).edge(i, j)) out << labels[t - 1] << ' ' << p.universe()[i] << ' ' << p.universe()[j] << '\n';
    if (p.has_vertex_dynamics()) {
        out << "\n[activity]\n";
        for (std::size_t t = 1; t <= T; ++t)
            for (std::size_t i = 0; i < n; ++i)
                if (p.active(t, i)) out << labels[t - 1] << ' ' << p.universe()[i] << '\n';
    }
    if (!p.edge_covariates().empty()) {
        out << "\n[edge_covariates]\n";
        for (const auto& [name, series] : p.edge_covariates()) {
            check_token(name, "covariate name");
            for (std::size_t t = 1; t <= series.size(); ++t)
                for (const auto& [i, j] : enumerate_dyads(n, p.directed()))
                    out << labels[t - 1] << ' ' << p.universe()[i] << ' ' << p.universe()[j] << ' ' << name << ' '
                        << detail::format_real(series[t - 1](i, j)) << '\n';
        }
    }
    if (!p.vertex_covariates().empty()) {
        out << "\n[vertex_covariates]\n";
        for (const auto& [name, series] : p.vertex_covariates()) {
            check_token(name, "covariate name");
            for (std::size_t t = 1; t <= series.size(); ++t)
                for (std::size_t i = 0; i < n; ++i)
                    out << labels[t - 1] << ' ' << p.universe()[i] << ' ' << name << ' '
                        << detail::format_real(series[t - 1][i]) << '\n';
        }
    }
    return out.str();
}

/// Extends the panel's covariate series with the values in a forecast file.
/// The file lists the future times under [times] and uses the panel's ids.
inline NetworkPanel merge_covariate_forecast(NetworkPanel panel, const std::string& text,
                                             const std::string& source = "forecast")
{
    const std::size_t n = panel.order();
    std::string header = "[header]\ndirected = " + std::string(panel.directed() ? "true" : "false") + "\n[vertices]\n";
    for (const auto& id : panel.universe()) header += id + "\n";
    NetworkPanel f = parse_panel(header + text, source);
    for (const auto& [name, series] : f.edge_covariates()) {
        std::vector<DyadMatrix> s;
        if (panel.has_edge_covariate(name)) {
            for (std::size_t t = 1; t <= panel.length(); ++t) s.push_back(panel.edge_covariate(name, t));
        } else {
            s.assign(panel.length(), DyadMatrix(n));
            panel.add_warning("edge covariate '" + name + "' only has forecast values; history set to 0");
        }
        s.insert(s.end(), series.begin(), series.end());
        panel.set_edge_covariate(name, std::move(s));
    }
    for (const auto& [name, series] : f.vertex_covariates()) {
        std::vector<std::vector<double>> s;
        if (panel.has_vertex_covariate(name)) {
            const auto& all = panel.vertex_covariates().at(name);
            s.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(panel.length()));
        } else {
            s.assign(panel.length(), std::vector<double>(n, 0.0));
            panel.add_warning("vertex covariate '" + name + "' only has forecast values; history set to 0");
        }
        s.insert(s.end(), series.begin(), series.end());
        panel.set_vertex_covariate(name, std::move(s));
    }
    return panel;
}

// ---------------------------------------------------------------------------
// Fitted models as JSON

namespace detail {

inline nlohmann::json number_or_null(double v)
{
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

inline double number_from(const nlohmann::json& j)
{
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

inline nlohmann::json block_to_json(const CoefficientBlock& b)
{
    nlohmann::json j;
    j["labels"] = b.labels;
    j["values"] = nlohmann::json::array();
    j["std_errors"] = nlohmann::json::array();
    for (double v : b.values) j["values"].push_back(number_or_null(v));
    for (double v : b.std_errors) j["std_errors"].push_back(number_or_null(v));
    j["lambda"] = b.lambda;
    j["support"] = b.support;
    j["refit"] = b.refit;
    j["loglik"] = number_or_null(b.loglik);
    j["n_obs"] = b.n_obs;
    j["iterations"] = b.iterations;
    j["converged"] = b.converged;
    j["failure"] = b.failure;
    j["warnings"] = b.warnings;
    return j;
}

inline CoefficientBlock block_from_json(const nlohmann::json& j)
{
    CoefficientBlock b;
    b.labels = j.at("labels").get<std::vector<std::string>>();
    for (const auto& v : j.at("values")) b.values.push_back(number_from(v));
    for (const auto& v : j.at("std_errors")) b.std_errors.push_back(number_from(v));
    b.lambda = j.at("lambda").get<double>();
    b.support = j.at("support").get<std::vector<std::size_t>>();
    b.refit = j.at("refit").get<bool>();
    b.loglik = number_from(j.at("loglik"));
    b.n_obs = j.at("n_obs").get<std::size_t>();
    b.iterations = j.at("iterations").get<std::size_t>();
    b.converged = j.at("converged").get<bool>();
    b.failure = j.at("failure").get<std::string>();
    b.warnings = j.at("warnings").get<std::vector<std::string>>();
    if (b.values.size() != b.labels.size() || b.std_errors.size() != b.labels.size())
        throw ValidationError("coefficient block has inconsistent lengths");
    return b;
}

}  // namespace detail

inline std::string model_to_json(const FittedModel& m)
{
    nlohmann::json j;
    j["edge_formula"] = formula_of(m.edge_spec);
    j["theta"] = detail::block_to_json(m.theta);
    if (m.vertex_spec) j["vertex_formula"] = formula_of(*m.vertex_spec);
    if (m.psi) j["psi"] = detail::block_to_json(*m.psi);
    return j.dump(2) + "\n";
}

inline FittedModel model_from_json(const std::string& text)
{
    try {
        const auto j = nlohmann::json::parse(text);
        FittedModel m;
        m.edge_spec = parse_edge_formula(j.at("edge_formula").get<std::string>());
        m.theta = detail::block_from_json(j.at("theta"));
        if (j.contains("vertex_formula")) m.vertex_spec = parse_vertex_formula(j.at("vertex_formula").get<std::string>());
        if (j.contains("psi")) m.psi = detail::block_from_json(j.at("psi"));
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed model file: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// CSV reports: fixed column order, 6 significant digits, seed in the header.

class CsvWriter {
public:
    CsvWriter(std::uint64_t seed, const std::vector<std::string>& columns)
    {
        out_ << "# seed=" << seed << '\n';
        row_begin();
        for (const auto& c : columns) cell(c);
        row_end();
    }

    CsvWriter& cell(const std::string& s)
    {
        out_ << (first_ ? "" : ",") << s;
        first_ = false;
        return *this;
    }
    CsvWriter& cell(double v)
    {
        char buf[32];
        if (std::isnan(v)) std::snprintf(buf, sizeof buf, "NA");
        else std::snprintf(buf, sizeof buf, "%.6g", v);
        return cell(std::string(buf));
    }
    CsvWriter& cell(std::size_t v) { return cell(std::to_string(v)); }
    CsvWriter& cell(int v) { return cell(std::to_string(v)); }

    void row_begin() { first_ = true; }
    void row_end() { out_ << '\n'; }

    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
    bool first_ = true;
};

}  // namespace dnr

#endif  // DNR_IO_HPP
