#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "contractlab/combinatorial.hpp"
#include "contractlab/model.hpp"

namespace contractlab {

using json = nlohmann::json;

// ─── instance files ─────────────────────────────────────────────────────
//
// JSON, machine written. Every number may be an exact rational string
// ("p/q" or "p") or a plain JSON number. Exact strings must satisfy their
// constraints exactly; rows containing floats are renormalized when within
// 1e-12 of stochastic and rejected otherwise. Costs accept "inf". The
// optional blocks:
//   weights        distribution over the matrix types
//   thresholds + witness_space   a shattering instance
//   comb_types     combinatorial set-function types

struct CombSpec {
    SuccessKind success = SuccessKind::additive;
    CostKind cost = CostKind::additive;
    std::vector<Rat> q;
    std::vector<Rat> w;
};

struct Instance {
    Rewards rewards;
    std::vector<AgentType> types;
    std::optional<std::vector<Rat>> weights;
    std::optional<std::vector<Rat>> thresholds;
    std::optional<std::vector<Contract>> witness_space;
    std::vector<CombSpec> comb_types;

    TypeDistribution distribution() const {
        if (types.empty()) throw ValidationError("instance has no matrix types");
        if (weights) return TypeDistribution(types, *weights);
        return TypeDistribution(types,
                                std::vector<Rat>(types.size(), rat(1, types.size())));
    }
};

namespace detail {

struct ParsedRat {
    Rat value;
    bool exact;  // rational string or integer literal
};

inline ParsedRat parse_number(const json& j, const std::string& where) {
    if (j.is_string()) return {rat_from_string(j.get<std::string>()), true};
    if (j.is_number_integer()) return {Rat(j.get<long>()), true};
    if (j.is_number_unsigned()) return {Rat(static_cast<long>(j.get<unsigned long>())), true};
    if (j.is_number_float()) return {rat_from_double(j.get<double>()), false};
    throw ValidationError(where + ": expected a number or rational string");
}

// Parse a probability row. All-exact rows must sum to exactly 1; rows with
// float entries are renormalized if the sum is within 1e-12 of 1.
inline std::vector<Rat> parse_prob_row(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty())
        throw ValidationError(where + ": expected a nonempty array");
    std::vector<Rat> row;
    bool exact = true;
    Rat sum = 0;
    for (const json& e : j) {
        ParsedRat p = parse_number(e, where);
        exact = exact && p.exact;
        sum += p.value;
        row.push_back(std::move(p.value));
    }
    if (sum != 1) {
        if (exact) throw ValidationError(where + ": exact entries must sum to 1");
        const double drift = std::fabs(rat_d(sum) - 1.0);
        if (drift > 1e-12)
            throw ValidationError(where + ": float entries sum too far from 1");
        if (sgn(sum) <= 0) throw ValidationError(where + ": nonpositive row sum");
        for (Rat& v : row) v /= sum;
    }
    return row;
}

inline json rat_json(const Rat& q) { return json(rat_str(q)); }

}  // namespace detail

inline Instance instance_from_json(const json& root) {
    if (!root.is_object()) throw ValidationError("instance file must be a JSON object");
    if (!root.contains("rewards")) throw ValidationError("instance needs a rewards array");

    std::vector<Rat> rewards;
    for (const json& e : root.at("rewards"))
        rewards.push_back(detail::parse_number(e, "rewards").value);
    Instance inst{Rewards(std::move(rewards)), {}, std::nullopt, std::nullopt,
                  std::nullopt, {}};

    if (root.contains("types")) {
        for (const json& jt : root.at("types")) {
            if (!jt.is_object() || !jt.contains("f") || !jt.contains("c"))
                throw ValidationError("each type needs 'f' and 'c'");
            std::vector<std::vector<Rat>> f;
            for (const json& jrow : jt.at("f"))
                f.push_back(detail::parse_prob_row(jrow, "types.f"));
            std::vector<Cost> c;
            for (const json& jc : jt.at("c")) {
                if (jc.is_string() && jc.get<std::string>() == "inf")
                    c.push_back(Cost::inf());
                else
                    c.push_back(Cost(detail::parse_number(jc, "types.c").value));
            }
            AgentType type(std::move(f), std::move(c));
            if (type.outcomes() != inst.rewards.m())
                throw ValidationError("type outcome count disagrees with rewards");
            inst.types.push_back(std::move(type));
        }
    }

    if (root.contains("weights")) {
        inst.weights = detail::parse_prob_row(root.at("weights"), "weights");
        if (inst.weights->size() != inst.types.size())
            throw ValidationError("one weight per type required");
    }

    if (root.contains("thresholds")) {
        std::vector<Rat> th;
        for (const json& e : root.at("thresholds"))
            th.push_back(detail::parse_number(e, "thresholds").value);
        if (th.size() != inst.types.size())
            throw ValidationError("one threshold per type required");
        inst.thresholds = std::move(th);
    }

    if (root.contains("witness_space")) {
        std::vector<Contract> ws;
        for (const json& jc : root.at("witness_space")) {
            std::vector<Rat> t;
            for (const json& e : jc)
                t.push_back(detail::parse_number(e, "witness_space").value);
            Contract c(std::move(t));
            if (c.m() != inst.rewards.m())
                throw ValidationError("witness dimension disagrees with rewards");
            ws.push_back(std::move(c));
        }
        inst.witness_space = std::move(ws);
    }

    if (root.contains("comb_types")) {
        for (const json& jc : root.at("comb_types")) {
            CombSpec spec;
            const std::string success = jc.value("success", "additive");
            const std::string cost = jc.value("cost", "additive");
            if (success == "additive")
                spec.success = SuccessKind::additive;
            else if (success == "coverage")
                spec.success = SuccessKind::coverage;
            else
                throw ValidationError("unknown success family: " + success);
            if (cost == "additive")
                spec.cost = CostKind::additive;
            else if (cost == "supermodular")
                spec.cost = CostKind::supermodular;
            else
                throw ValidationError("unknown cost family: " + cost);
            for (const json& e : jc.at("q"))
                spec.q.push_back(detail::parse_number(e, "comb_types.q").value);
            for (const json& e : jc.at("w"))
                spec.w.push_back(detail::parse_number(e, "comb_types.w").value);
            inst.comb_types.push_back(std::move(spec));
        }
    }

    if (inst.types.empty() && inst.comb_types.empty())
        throw ValidationError("instance has neither matrix nor combinatorial types");
    return inst;
}

inline json instance_to_json(const Instance& inst) {
    json root;
    root["rewards"] = json::array();
    for (const Rat& r : inst.rewards.values) root["rewards"].push_back(detail::rat_json(r));
    if (!inst.types.empty()) {
        root["types"] = json::array();
        for (const AgentType& t : inst.types) {
            json jt;
            jt["f"] = json::array();
            for (const auto& row : t.f) {
                json jrow = json::array();
                for (const Rat& p : row) jrow.push_back(detail::rat_json(p));
                jt["f"].push_back(std::move(jrow));
            }
            jt["c"] = json::array();
            for (const Cost& c : t.c)
                jt["c"].push_back(c.is_inf() ? json("inf") : detail::rat_json(c.value()));
            root["types"].push_back(std::move(jt));
        }
    }
    if (inst.weights) {
        root["weights"] = json::array();
        for (const Rat& w : *inst.weights) root["weights"].push_back(detail::rat_json(w));
    }
    if (inst.thresholds) {
        root["thresholds"] = json::array();
        for (const Rat& t : *inst.thresholds)
            root["thresholds"].push_back(detail::rat_json(t));
    }
    if (inst.witness_space) {
        root["witness_space"] = json::array();
        for (const Contract& c : *inst.witness_space) {
            json jc = json::array();
            for (const Rat& p : c.t) jc.push_back(detail::rat_json(p));
            root["witness_space"].push_back(std::move(jc));
        }
    }
    if (!inst.comb_types.empty()) {
        root["comb_types"] = json::array();
        for (const CombSpec& spec : inst.comb_types) {
            json jc;
            jc["success"] = spec.success == SuccessKind::additive ? "additive" : "coverage";
            jc["cost"] = spec.cost == CostKind::additive ? "additive" : "supermodular";
            jc["q"] = json::array();
            for (const Rat& v : spec.q) jc["q"].push_back(detail::rat_json(v));
            jc["w"] = json::array();
            for (const Rat& v : spec.w) jc["w"].push_back(detail::rat_json(v));
            root["comb_types"].push_back(std::move(jc));
        }
    }
    return root;
}

inline Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    json root;
    try {
        in >> root;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed JSON: ") + e.what());
    }
    return instance_from_json(root);
}

inline void save_instance(const Instance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    out << instance_to_json(inst).dump(2) << "\n";
}

inline std::vector<CombinatorialType> comb_types_of(const Instance& inst) {
    std::vector<CombinatorialType> out;
    out.reserve(inst.comb_types.size());
    for (const CombSpec& spec : inst.comb_types)
        out.push_back(make_comb_type(spec.success, spec.q, spec.cost, spec.w, inst.rewards));
    return out;
}

// ─── CSV output ─────────────────────────────────────────────────────────

// Deterministic CSV: fixed header, '\n' endings, rationals as exact "p/q",
// doubles via a fixed %.12g format.
class CsvWriter {
  public:
    explicit CsvWriter(std::ostream& out, const std::vector<std::string>& header)
        : out_(out) {
        write_row(header);
    }

    void write_row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) out_ << ",";
            out_ << cells[i];
        }
        out_ << "\n";
    }

    static std::string cell(const Rat& q) { return rat_str(q); }
    static std::string cell(double d) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.12g", d);
        return buf;
    }
    static std::string cell(long v) { return std::to_string(v); }
    static std::string cell(std::size_t v) { return std::to_string(v); }

  private:
    std::ostream& out_;
};

}  // namespace contractlab
