#include "credal/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <utility>

#include "json_io.hpp"

namespace credal {

using ordered_json = nlohmann::ordered_json;

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// *******************************************************
// serialization (deterministic, fixed number format)
// *******************************************************

namespace {

/// Arrays whose elements are all scalars print on one line; everything
/// else gets one element per line.
bool flat_array(const ordered_json& j) {
    for (const auto& item : j)
        if (item.is_structured()) return false;
    return true;
}

void dump_value(const ordered_json& j, std::string& out, int depth) {
    const std::string pad(std::size_t(depth) * 2, ' ');
    const std::string inner(std::size_t(depth + 1) * 2, ' ');
    switch (j.type()) {
    case ordered_json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += inner;
            out += ordered_json(it.key()).dump();
            out += ": ";
            dump_value(it.value(), out, depth + 1);
        }
        out += "\n" + pad + "}";
        return;
    }
    case ordered_json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        const bool flat = flat_array(j);
        out += flat ? "[" : "[\n";
        bool first = true;
        for (const auto& item : j) {
            if (!first) out += flat ? ", " : ",\n";
            first = false;
            if (!flat) out += inner;
            dump_value(item, out, depth + 1);
        }
        out += flat ? "]" : "\n" + pad + "]";
        return;
    }
    case ordered_json::value_t::number_float:
        out += format_number(j.get<double>());
        return;
    default:
        out += j.dump(); // strings, integers, booleans, null
        return;
    }
}

} // namespace

namespace detail {

std::string dump_document(const ordered_json& j) {
    std::string out;
    dump_value(j, out, 0);
    out += "\n";
    return out;
}

ordered_json point_json(const numvec& p) {
    ordered_json a = ordered_json::array();
    for (double v : p)
        a.push_back(v);
    return a;
}

ordered_json vertex_list_json(const std::vector<numvec>& vs) {
    ordered_json a = ordered_json::array();
    for (const numvec& v : vs)
        a.push_back(point_json(v));
    return a;
}

} // namespace detail

using detail::dump_document;
using detail::point_json;
using detail::vertex_list_json;

std::string serialize_scenario(const sequence& seq) {
    ordered_json j;
    j["version"] = 1;
    j["dimension"] = seq.dimension();
    ordered_json marginals = ordered_json::array();
    for (const marginal& m : seq.marginals()) {
        ordered_json entry;
        if (!m.label().empty()) entry["label"] = m.label();
        entry["support"] = vertex_list_json(m.support());
        entry["generators"] = vertex_list_json(m.generators());
        marginals.push_back(std::move(entry));
    }
    j["marginals"] = std::move(marginals);
    return dump_document(j);
}

std::string report_json(const check_report& r) {
    ordered_json j;
    j["scenario"] = r.scenario;
    j["dimension"] = r.dimension;
    j["n"] = r.n;
    j["rng"] = {{"algorithm", r.rng_algorithm}, {"seed", r.seed},
                {"directions", r.directions}};
    j["tolerances"] = {{"identity", r.tolerances.identity},
                       {"membership", r.tolerances.membership},
                       {"inequality_slack", r.tolerances.inequality_slack},
                       {"minimax", r.tolerances.minimax},
                       {"conditional", r.tolerances.conditional},
                       {"classical", r.tolerances.classical},
                       {"oracle_rel", r.tolerances.oracle_rel}};
    ordered_json sets = ordered_json::array();
    for (const auto& vs : r.marginal_mean_vertices)
        sets.push_back(vertex_list_json(vs));
    j["mean_sets"] = std::move(sets);
    j["mean_set_average"] = vertex_list_json(r.mean_vertices);
    j["variance_proxy"] = {{"per_index", point_json(r.variance_per_index)},
                           {"value", r.variance_proxy}};
    j["bound"] = r.bound;
    j["mean_distance_sq"] = r.mean_distance;
    j["minimax_distance_sq"] = r.minimax_distance;
    if (r.scalar_applicable) j["scalar_deviation_sq"] = r.scalar_deviation;
    j["measured"] = {{"support_mismatch", r.support_mismatch},
                     {"membership_excess", r.membership_excess},
                     {"conditional_excess", r.conditional_excess},
                     {"minimax_gap", r.minimax_gap},
                     {"scalar_gap", r.scalar_gap}};
    j["checks"] = {{"concentration", r.concentration_ok},
                   {"minimax", r.minimax_ok},
                   {"mean_set", r.mean_set_ok},
                   {"conditional", r.conditional_ok},
                   {"scalar", r.scalar_ok}};
    j["pass"] = r.all_ok();
    return dump_document(j);
}

std::string error_json(const std::string& kind, const std::string& message) {
    ordered_json j;
    j["error"] = {{"kind", kind}, {"message", message}};
    return dump_document(j);
}

// *******************************************************
// parsing
// *******************************************************

namespace {

using plain_json = nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw invalid_input(field + ": " + what);
}

double need_number(const plain_json& j, const std::string& field) {
    if (!j.is_number()) fail(field, "must be a number");
    return j.get<double>();
}

std::size_t need_count(const plain_json& j, const std::string& field) {
    if (!j.is_number_integer() || j.get<long long>() < 1)
        fail(field, "must be a positive integer");
    return std::size_t(j.get<long long>());
}

void check_keys(const plain_json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* key : allowed)
            if (it.key() == key) ok = true;
        if (!ok) fail(where.empty() ? it.key() : where + "." + it.key(),
                      "unknown field");
    }
}

numvec parse_point(const plain_json& j, std::size_t dim, const std::string& field) {
    if (j.is_number() && dim == 1) return {j.get<double>()};
    if (!j.is_array()) fail(field, "must be an array of " + std::to_string(dim) +
                                       " numbers");
    if (j.size() != dim)
        fail(field, "has " + std::to_string(j.size()) + " entries, expected " +
                        std::to_string(dim));
    numvec p(dim);
    for (std::size_t c = 0; c < dim; c++)
        p[c] = need_number(j[c], field + "[" + std::to_string(c) + "]");
    return p;
}

marginal parse_marginal(const plain_json& j, std::size_t dim,
                        const std::string& field) {
    if (!j.is_object()) fail(field, "must be an object");
    check_keys(j, field, {"label", "support", "generators"});
    if (!j.contains("support")) fail(field + ".support", "is required");
    if (!j.contains("generators")) fail(field + ".generators", "is required");

    const plain_json& sup = j["support"];
    if (!sup.is_array() || sup.empty())
        fail(field + ".support", "must be a nonempty array of points");
    std::vector<numvec> support;
    support.reserve(sup.size());
    for (std::size_t p = 0; p < sup.size(); p++)
        support.push_back(
            parse_point(sup[p], dim, field + ".support[" + std::to_string(p) + "]"));

    const plain_json& gen = j["generators"];
    if (!gen.is_array() || gen.empty())
        fail(field + ".generators", "must be a nonempty array of probability vectors");
    std::vector<numvec> generators;
    generators.reserve(gen.size());
    for (std::size_t k = 0; k < gen.size(); k++) {
        const std::string gfield = field + ".generators[" + std::to_string(k) + "]";
        if (!gen[k].is_array()) fail(gfield, "must be an array of probabilities");
        numvec probs(gen[k].size());
        for (std::size_t p = 0; p < gen[k].size(); p++)
            probs[p] = need_number(gen[k][p], gfield + "[" + std::to_string(p) + "]");
        generators.push_back(std::move(probs));
    }

    std::string label;
    if (j.contains("label")) {
        if (!j["label"].is_string()) fail(field + ".label", "must be a string");
        label = j["label"].get<std::string>();
    }
    try {
        return marginal(std::move(support), std::move(generators), std::move(label));
    } catch (const invalid_input& e) {
        fail(field, e.what());
    }
}

} // namespace

scenario_file parse_scenario(const std::string& text) {
    plain_json j;
    try {
        j = plain_json::parse(text);
    } catch (const plain_json::parse_error& e) {
        throw invalid_input(std::string("scenario: not valid JSON: ") + e.what());
    }
    if (!j.is_object()) fail("scenario", "top level must be an object");
    check_keys(j, "",
               {"version", "dimension", "marginals", "iid", "budget", "tolerances"});

    if (!j.contains("version")) fail("version", "is required");
    if (!j["version"].is_number_integer() || j["version"].get<long long>() != 1)
        fail("version", "unsupported value, expected 1");

    if (!j.contains("dimension")) fail("dimension", "is required");
    const std::size_t dim = need_count(j["dimension"], "dimension");

    if (!j.contains("marginals")) fail("marginals", "is required");
    const plain_json& list = j["marginals"];
    if (!list.is_array() || list.empty())
        fail("marginals", "must be a nonempty array");
    std::vector<marginal> marginals;
    marginals.reserve(list.size());
    for (std::size_t i = 0; i < list.size(); i++)
        marginals.push_back(
            parse_marginal(list[i], dim, "marginals[" + std::to_string(i) + "]"));

    if (j.contains("iid")) {
        const std::size_t copies = need_count(j["iid"], "iid");
        if (marginals.size() != 1)
            fail("iid", "requires exactly one marginal, got " +
                            std::to_string(marginals.size()));
        marginals.reserve(copies);
        for (std::size_t i = 1; i < copies; i++)
            marginals.push_back(marginals.front());
    }

    check_options options;
    if (j.contains("budget")) {
        const plain_json& b = j["budget"];
        if (!b.is_object()) fail("budget", "must be an object");
        check_keys(b, "budget", {"paths", "selections"});
        if (b.contains("paths")) {
            options.eval.limits.paths = need_number(b["paths"], "budget.paths");
            if (!(options.eval.limits.paths >= 1.0))
                fail("budget.paths", "must be at least 1");
        }
        if (b.contains("selections")) {
            options.eval.limits.selections =
                need_number(b["selections"], "budget.selections");
            if (!(options.eval.limits.selections >= 1.0))
                fail("budget.selections", "must be at least 1");
        }
    }
    if (j.contains("tolerances")) {
        const plain_json& t = j["tolerances"];
        if (!t.is_object()) fail("tolerances", "must be an object");
        check_keys(t, "tolerances",
                   {"identity", "membership", "inequality_slack", "minimax",
                    "conditional", "classical", "oracle_rel"});
        auto read = [&](const char* key, double& into) {
            if (!t.contains(key)) return;
            into = need_number(t[key], std::string("tolerances.") + key);
            if (!(into > 0.0) || !std::isfinite(into))
                fail(std::string("tolerances.") + key, "must be a positive number");
        };
        read("identity", options.tol.identity);
        read("membership", options.tol.membership);
        read("inequality_slack", options.tol.inequality_slack);
        read("minimax", options.tol.minimax);
        read("conditional", options.tol.conditional);
        read("classical", options.tol.classical);
        read("oracle_rel", options.tol.oracle_rel);
    }

    return scenario_file{sequence(std::move(marginals)), options};
}

// *******************************************************
// sweep
// *******************************************************

sweep_result sweep(const marginal& base, std::size_t n_max, const eval_options& opts) {
    sweep_result out;
    out.csv = "n,lhs,bound,gap\n";
    for (std::size_t n = 1; n <= n_max; n++) {
        std::vector<marginal> copies(n, base);
        const sequence seq(std::move(copies));
        double lhs, bound;
        try {
            lhs = mean_distance_sq(seq, opts);
            bound = variance_proxy(seq).value / double(n);
        } catch (const budget_exceeded& e) {
            out.truncated = true;
            out.note = "stopped at n=" + std::to_string(n) + ": " + e.what();
            break;
        } catch (const convergence_failure& e) {
            out.truncated = true;
            out.note = "stopped at n=" + std::to_string(n) + ": " + e.what();
            break;
        }
        out.csv += std::to_string(n) + "," + format_number(lhs) + "," +
                   format_number(bound) + "," + format_number(bound - lhs) + "\n";
        out.rows++;
    }
    return out;
}

} // namespace credal
