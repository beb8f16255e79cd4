#pragma once

#include <json.hpp>

#include <cctype>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ldpcsec/analysis.hpp"
#include "ldpcsec/decoder.hpp"
#include "ldpcsec/ensemble.hpp"
#include "ldpcsec/harness.hpp"
#include "ldpcsec/rational.hpp"
#include "ldpcsec/secrecy.hpp"

namespace ldpcsec {

using json = nlohmann::json;

// --- degree distributions ---

inline json degree_terms_to_json(const std::vector<DegreeTerm>& terms) {
    json j = json::object();
    for (const auto& t : terms) j[std::to_string(t.degree)] = format_rational(t.weight);
    return j;
}

inline std::vector<DegreeTerm> degree_terms_from_json(const json& j, const char* side) {
    if (!j.is_object())
        throw std::invalid_argument(std::string(side) + " must be a degree->weight object");
    std::vector<DegreeTerm> terms;
    for (const auto& [key, value] : j.items()) {
        int degree = 0;
        try {
            degree = std::stoi(key);
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string(side) + ": bad degree key '" + key + "'");
        }
        const std::string w = value.is_string() ? value.get<std::string>() : value.dump();
        terms.push_back({degree, parse_rational(w)});
    }
    return terms;
}

inline json dist_to_json(const DegreeDistribution& dist) {
    return {{"lambda", degree_terms_to_json(dist.lambda())},
            {"rho", degree_terms_to_json(dist.rho())}};
}

inline DegreeDistribution dist_from_json(const json& j) {
    return DegreeDistribution(degree_terms_from_json(j.at("lambda"), "lambda"),
                              degree_terms_from_json(j.at("rho"), "rho"));
}

/// Parse an edge-perspective polynomial like "x^2", "0.5x+0.5x^2" or
/// "1/4x+3/4x^2" into degree terms: a term c*x^p weights node degree p+1.
inline std::vector<DegreeTerm> parse_degree_polynomial(const std::string& text) {
    std::string stripped;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) stripped.push_back(c);
    if (stripped.empty()) throw std::invalid_argument("empty polynomial");
    std::vector<DegreeTerm> terms;
    std::size_t pos = 0;
    while (pos < stripped.size()) {
        if (stripped[pos] == '+') ++pos;
        std::size_t end = stripped.find('+', pos);
        if (end == std::string::npos) end = stripped.size();
        const std::string term = stripped.substr(pos, end - pos);
        pos = end;
        if (term.empty()) throw std::invalid_argument("empty term in polynomial");
        const std::size_t xpos = term.find('x');
        Rational coef = 1;
        int power = 0;
        if (xpos == std::string::npos) {
            coef = parse_rational(term);
        } else {
            if (xpos > 0) coef = parse_rational(term.substr(0, xpos));
            power = 1;
            if (xpos + 1 < term.size()) {
                if (term[xpos + 1] != '^')
                    throw std::invalid_argument("bad polynomial term '" + term + "'");
                power = std::stoi(term.substr(xpos + 2));
            }
        }
        // merge repeated powers
        bool merged = false;
        for (auto& t : terms)
            if (t.degree == power + 1) {
                t.weight += coef;
                merged = true;
                break;
            }
        if (!merged) terms.push_back({power + 1, coef});
    }
    return terms;
}

// --- Tanner graphs ---

inline json graph_to_json(const TannerGraph& g, std::uint64_t seed) {
    json edges = json::array();
    for (auto [vs, cs] : g.edge_pairs()) edges.push_back({vs, cs});
    const int gi = girth(g);
    json j{{"n", g.n_vars()},
           {"var_degrees", g.var_degrees()},
           {"check_degrees", g.check_degrees()},
           {"edges", std::move(edges)},
           {"seed", seed}};
    if (gi == kGirthInfinity)
        j["girth"] = nullptr;
    else
        j["girth"] = gi;
    return j;
}

inline TannerGraph graph_from_json(const json& j) {
    std::vector<std::pair<int, int>> pairs;
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2)
            throw std::invalid_argument("graph edges must be [var_socket, check_socket] pairs");
        pairs.push_back({e[0].get<int>(), e[1].get<int>()});
    }
    return TannerGraph::from_edge_pairs(j.at("var_degrees").get<std::vector<int>>(),
                                        j.at("check_degrees").get<std::vector<int>>(), pairs);
}

// --- decode results ---

inline json decode_result_to_json(const DecodeResult& r) {
    return {{"success", r.success},
            {"residual_size", r.residual.size()},
            {"residual", r.residual}};
}

// --- experiment configs ---

inline ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c{dist_from_json(j)};
    c.min_girth = j.value("min_girth", 0);
    if (j.contains("n")) c.n_list = j.at("n").get<std::vector<int>>();
    if (j.contains("eps")) c.eps_list = j.at("eps").get<std::vector<double>>();
    c.trials = j.value("trials", 1000L);
    c.master_seed = j.value("master_seed", std::uint64_t{1});
    if (j.contains("budget")) {
        const auto& b = j.at("budget");
        c.budget.max_tries = b.value("max_tries", c.budget.max_tries);
        c.budget.enum_nodes = b.value("enum_nodes", c.budget.enum_nodes);
    }
    c.fixed_graph = j.value("fixed_graph", false);
    return c;
}

inline json config_to_json(const ExperimentConfig& c) {
    json j = dist_to_json(c.dist);
    j["min_girth"] = c.min_girth;
    j["n"] = c.n_list;
    j["eps"] = c.eps_list;
    j["trials"] = c.trials;
    j["master_seed"] = c.master_seed;
    j["budget"] = {{"max_tries", c.budget.max_tries}, {"enum_nodes", c.budget.enum_nodes}};
    j["fixed_graph"] = c.fixed_graph;
    return j;
}

// --- reports ---

inline json threshold_report_to_json(const DegreeDistribution& dist,
                                     const ThresholdReport& r) {
    json j = dist_to_json(dist);
    j["eps_th"] = r.eps_th;
    j["eps_ef"] = r.eps_ef;
    j["alpha_star"] = r.alpha_star;
    j["design_rate"] = r.design_rate;
    j["weak_interval"] = {r.weak_interval.first, r.weak_interval.second};
    j["strong_from"] = r.strong_from;
    return j;
}

inline json leakage_record_to_json(int n, std::uint64_t seed, double eps,
                                   const LeakageEstimate& est) {
    return {{"n", n},          {"seed", seed},
            {"eps", eps},      {"trials", est.trials},
            {"leakage_bits", est.leakage_bits}, {"stderr", est.stderr_bits},
            {"p_nf", est.p_nf}, {"k", est.k}};
}

// --- CSV (frozen schema, versioned in the header comment) ---

inline constexpr const char* kBlockErrorCsvHeader =
    "# ldpcsec block-error v1\nn,eps,trials,failures,p_hat,ci_lo,ci_hi,seed\n";

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string block_error_csv(std::span<const BlockErrorEstimate> rows) {
    std::string out = kBlockErrorCsvHeader;
    for (const auto& r : rows) {
        out += std::to_string(r.n) + "," + format_double(r.eps) + "," +
               std::to_string(r.trials) + "," + std::to_string(r.failures) + "," +
               format_double(r.p_hat) + "," + format_double(r.ci_lo) + "," +
               format_double(r.ci_hi) + "," + std::to_string(r.seed) + "\n";
    }
    return out;
}

inline std::vector<BlockErrorEstimate> block_error_from_csv(const std::string& text) {
    std::vector<BlockErrorEstimate> rows;
    std::size_t pos = 0;
    int lineno = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        ++lineno;
        if (line.empty() || line[0] == '#' || line.rfind("n,", 0) == 0) continue;
        std::vector<std::string> fields;
        std::size_t fpos = 0;
        while (fpos <= line.size()) {
            std::size_t fend = line.find(',', fpos);
            if (fend == std::string::npos) fend = line.size();
            fields.push_back(line.substr(fpos, fend - fpos));
            fpos = fend + 1;
        }
        if (fields.size() != 8)
            throw std::invalid_argument("csv line " + std::to_string(lineno) +
                                        ": expected 8 fields, got " +
                                        std::to_string(fields.size()));
        try {
            BlockErrorEstimate e;
            e.n = std::stoi(fields[0]);
            e.eps = std::stod(fields[1]);
            e.trials = std::stol(fields[2]);
            e.failures = std::stol(fields[3]);
            e.p_hat = std::stod(fields[4]);
            e.ci_lo = std::stod(fields[5]);
            e.ci_hi = std::stod(fields[6]);
            e.seed = std::stoull(fields[7]);
            rows.push_back(e);
        } catch (const std::exception&) {
            throw std::invalid_argument("csv line " + std::to_string(lineno) +
                                        ": malformed field");
        }
    }
    return rows;
}

inline constexpr const char* kStoppingScanCsvHeader =
    "# ldpcsec stopping-scan v1\nn,s,mean,stderr,exact_unrestricted,remark_bound\n";

inline std::string stopping_scan_csv(std::span<const StoppingScanRow> rows) {
    std::string out = kStoppingScanCsvHeader;
    for (const auto& r : rows) {
        out += std::to_string(r.n) + "," + std::to_string(r.s) + "," +
               format_double(r.mean) + "," + format_double(r.stderr_mean) + "," +
               format_double(r.exact_unrestricted) + "," + format_double(r.remark_bound) +
               "\n";
    }
    return out;
}

}  // namespace ldpcsec
