#include "interim/io.hpp"

#include <fstream>
#include <map>

namespace interim {

using nlohmann::json;

namespace {

const json& need(const json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end()) throw InputError(std::string("missing field '") + key + "'");
    return *it;
}

Rational rat(const json& v) { return rational_from_json(v); }

std::vector<int> parse_profile(const json& doc, const Instance& inst) {
    if (!doc.is_array() || doc.size() != static_cast<std::size_t>(inst.num_agents()))
        throw InputError("profile must list one type per agent/unit");
    std::vector<int> profile(inst.num_agents());
    for (int a = 0; a < inst.num_agents(); ++a)
        profile[a] = inst.type_index(a, doc[a].get<std::string>());
    return profile;
}

UnitSet parse_unit_set(const json& doc, const Instance& inst) {
    UnitSet mask = 0;
    for (const json& entry : doc) {
        int unit;
        if (entry.is_string()) {
            unit = inst.agent_index(entry.get<std::string>());
        } else {
            unit = inst.unit_index(inst.agent_index(need(entry, "agent").get<std::string>()),
                                   inst.item_index(need(entry, "item").get<std::string>()));
        }
        mask |= UnitSet(1) << unit;
    }
    return mask;
}

ExPostPolytope parse_polytope(const json& doc, const Instance& inst) {
    const std::string variant = need(doc, "variant").get<std::string>();
    const int units = inst.num_units();
    if (variant == "matching") {
        if (inst.kind() != Kind::Matching)
            throw InputError("matching polytope needs a matching instance");
        return ExPostPolytope::matching(inst.num_agents(), inst.num_items());
    }
    if (variant == "single_item") {
        return ExPostPolytope::polymatroid(ConstraintFunction(
            units, true, [](UnitSet a, int) { return Rational(a == 0 ? 0 : 1); }));
    }
    if (variant == "polymatroid") {
        if (doc.contains("table")) {
            auto table = std::make_shared<std::map<UnitSet, Rational>>();
            for (const json& row : need(doc, "table"))
                (*table)[parse_unit_set(need(row, "set"), inst)] = rat(need(row, "value"));
            for (UnitSet a = 1; a < (UnitSet(1) << units); ++a)
                if (!table->count(a))
                    throw InputError("polymatroid table must cover every nonempty subset");
            return ExPostPolytope::polymatroid(ConstraintFunction(
                units, true,
                [table](UnitSet a, int) { return a == 0 ? Rational(0) : table->at(a); }));
        }
        auto table = std::make_shared<std::map<std::pair<int, UnitSet>, Rational>>();
        for (const json& row : need(doc, "state_table")) {
            const int s = inst.state_index(parse_profile(need(row, "profile"), inst));
            (*table)[{s, parse_unit_set(need(row, "set"), inst)}] = rat(need(row, "value"));
        }
        for (int s = 0; s < inst.num_states(); ++s)
            for (UnitSet a = 1; a < (UnitSet(1) << units); ++a)
                if (!table->count({s, a}))
                    throw InputError("state table must cover every (state, subset) pair");
        return ExPostPolytope::polymatroid(ConstraintFunction(
            units, false, [table](UnitSet a, int s) {
                return a == 0 ? Rational(0) : table->at({s, a});
            }));
    }
    if (variant == "explicit") {
        std::vector<Halfspace> rows;
        for (const json& row : need(doc, "halfspaces")) {
            Halfspace h;
            h.coeffs.assign(units, Rational(0));
            for (const auto& [name, coeff] : need(row, "coeffs").items()) {
                int unit;
                if (inst.kind() == Kind::Matching) {
                    auto colon = name.find(':');
                    if (colon == std::string::npos)
                        throw InputError("matching coefficients use 'agent:item' keys");
                    unit = inst.unit_index(inst.agent_index(name.substr(0, colon)),
                                           inst.item_index(name.substr(colon + 1)));
                } else {
                    unit = inst.agent_index(name);
                }
                h.coeffs[unit] = rat(coeff);
            }
            h.rhs = rat(need(row, "rhs"));
            rows.push_back(std::move(h));
        }
        return ExPostPolytope::explicit_halfspaces(units, std::move(rows));
    }
    throw InputError("unknown polytope variant '" + variant + "'");
}

int parse_tstar_ref(const json& doc, const Instance& inst) {
    int agent, type, item = -1;
    if (doc.is_array()) {
        agent = inst.agent_index(doc.at(0).get<std::string>());
        type = inst.type_index(agent, doc.at(1).get<std::string>());
        if (inst.kind() == Kind::Matching) item = inst.item_index(doc.at(2).get<std::string>());
    } else {
        agent = inst.agent_index(
            need(doc, inst.kind() == Kind::Matching ? "agent" : "unit").get<std::string>());
        type = inst.type_index(agent, need(doc, "type").get<std::string>());
        if (inst.kind() == Kind::Matching)
            item = inst.item_index(need(doc, "item").get<std::string>());
    }
    const int k = inst.tstar_lookup(agent, type, item);
    if (k < 0) throw InputError("reference to a zero-marginal type");
    return k;
}

Objective parse_objective(const json& doc, const Instance& inst) {
    auto parse_weights = [&](const json& arr) {
        std::vector<Rational> weights(inst.tstar_size(), Rational(0));
        for (const json& row : arr)
            weights[parse_tstar_ref(row, inst)] = rat(need(row, "value"));
        return weights;
    };
    const std::string variant = need(doc, "variant").get<std::string>();
    if (variant == "utilitarian") return Objective::utilitarian(parse_weights(need(doc, "weights")));
    if (variant == "rank_dependent") {
        PiecewiseLinear f;
        for (const json& bp : need(doc, "f"))
            f.breakpoints.emplace_back(rat(bp.at(0)), rat(bp.at(1)));
        return Objective::rank_dependent(parse_weights(need(doc, "weights")), std::move(f));
    }
    if (variant == "max_min") {
        std::vector<std::vector<Rational>> members;
        for (const json& member : need(doc, "members")) members.push_back(parse_weights(member));
        return Objective::max_min(std::move(members));
    }
    throw InputError("unknown objective variant '" + variant + "'");
}

CardinalTypeSpace parse_cardinal(const json& doc, const std::vector<std::string>& agents,
                                 const std::vector<std::string>& items) {
    std::vector<CardinalAgent> specs(agents.size());
    const json& block = need(doc, "agents");
    std::vector<std::string> item_names = items;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const json& a = need(block, agents[i].c_str());
        CardinalAgent& spec = specs[i];
        if (a.contains("mass_by_h")) {
            for (const json& v : need(a, "verticals")) spec.verticals.push_back(rat(v));
            for (const json& row : a["mass_by_h"]) {
                spec.vertical_mass.emplace_back();
                for (const json& m : row) spec.vertical_mass.back().push_back(rat(m));
            }
        } else {
            spec.vertical_mass.emplace_back();
            for (const json& v : need(a, "verticals")) {
                spec.verticals.push_back(rat(need(v, "v")));
                spec.vertical_mass.back().push_back(rat(need(v, "mass")));
            }
        }
        if (a.contains("horizontals")) {
            for (const json& h : a["horizontals"]) {
                std::vector<int> ranking;
                for (const json& label : need(h, "ranking")) {
                    auto it = std::find(item_names.begin(), item_names.end(),
                                        label.get<std::string>());
                    if (it == item_names.end())
                        throw InputError("unknown item in horizontal type");
                    ranking.push_back(static_cast<int>(it - item_names.begin()));
                }
                spec.horizontals.push_back(std::move(ranking));
                spec.horizontal_mass.push_back(rat(need(h, "mass")));
            }
        }
    }
    const bool uniform = doc.value("uniform", false);
    if (uniform) return CardinalTypeSpace::uniform(agents, item_names, std::move(specs));
    std::vector<Rational> rank_values;
    for (const json& v : need(doc, "rank_values")) rank_values.push_back(rat(v));
    return CardinalTypeSpace(agents, item_names, std::move(rank_values), std::move(specs), false);
}

} // namespace

LoadedInstance parse_instance(const json& doc) {
    InstanceDescription d;
    const std::string kind = need(doc, "kind").get<std::string>();
    if (kind == "general") d.kind = Kind::General;
    else if (kind == "matching") d.kind = Kind::Matching;
    else throw InputError("kind must be 'general' or 'matching'");
    d.max_states = doc.value("max_states", 10000);

    for (const json& name : need(doc, d.kind == Kind::General ? "units" : "agents"))
        d.agents.push_back(name.get<std::string>());
    if (d.kind == Kind::Matching)
        for (const json& name : need(doc, "items")) d.items.push_back(name.get<std::string>());

    // Cardinal instances derive their type structure from the cardinal block.
    if (doc.contains("cardinal")) {
        LoadedInstance out{Instance(), ExPostPolytope::matching(1, 1), {}, {}, {}, {}, {},
                           d.max_states};
        out.cardinal = parse_cardinal(doc["cardinal"], d.agents, d.items);
        out.instance = out.cardinal->instance();
        out.polytope =
            ExPostPolytope::matching(out.instance.num_agents(), out.instance.num_items());
        return out;
    }

    d.type_labels.resize(d.agents.size());
    d.rankings.resize(d.agents.size());
    const json& types = need(doc, "types");
    for (std::size_t a = 0; a < d.agents.size(); ++a) {
        const json& list = need(types, d.agents[a].c_str());
        for (const json& entry : list) {
            if (entry.is_string()) {
                d.type_labels[a].push_back(entry.get<std::string>());
                d.rankings[a].push_back({});
            } else {
                d.type_labels[a].push_back(need(entry, "name").get<std::string>());
                std::vector<int> ranking;
                if (entry.contains("ranking")) {
                    for (const json& label : entry["ranking"]) {
                        auto it = std::find(d.items.begin(), d.items.end(),
                                            label.get<std::string>());
                        if (it == d.items.end())
                            throw InputError("ranking mentions unknown item");
                        ranking.push_back(static_cast<int>(it - d.items.begin()));
                    }
                }
                d.rankings[a].push_back(std::move(ranking));
            }
        }
    }

    const json& prior = need(doc, "prior");
    if (prior.value("independent", false)) {
        d.independent = true;
        const json& marg = need(prior, "marginals");
        d.marginals.resize(d.agents.size());
        for (std::size_t a = 0; a < d.agents.size(); ++a) {
            const json& row = need(marg, d.agents[a].c_str());
            d.marginals[a].assign(d.type_labels[a].size(), Rational(0));
            for (const auto& [label, p] : row.items()) {
                auto it = std::find(d.type_labels[a].begin(), d.type_labels[a].end(), label);
                if (it == d.type_labels[a].end())
                    throw InputError("marginal mentions unknown type '" + label + "'");
                d.marginals[a][it - d.type_labels[a].begin()] = rat(p);
            }
        }
    } else {
        const json& joint = need(prior, "joint");
        for (const json& row : joint) {
            const json& profile = need(row, "profile");
            std::vector<int> idx(d.agents.size());
            for (std::size_t a = 0; a < d.agents.size(); ++a) {
                const std::string label = profile.at(a).get<std::string>();
                auto it = std::find(d.type_labels[a].begin(), d.type_labels[a].end(), label);
                if (it == d.type_labels[a].end())
                    throw InputError("prior mentions unknown type '" + label + "'");
                idx[a] = static_cast<int>(it - d.type_labels[a].begin());
            }
            d.joint.emplace_back(std::move(idx), rat(need(row, "p")));
        }
    }

    LoadedInstance out{Instance::build(d), ExPostPolytope::matching(1, 1), {}, {}, {}, {}, {},
                       d.max_states};
    if (doc.contains("polytope")) {
        out.polytope = parse_polytope(doc["polytope"], out.instance);
    } else if (out.instance.kind() == Kind::Matching) {
        out.polytope =
            ExPostPolytope::matching(out.instance.num_agents(), out.instance.num_items());
    } else {
        throw InputError("general instances need a polytope block");
    }
    if (doc.contains("allocation"))
        out.allocation = allocation_from_json(doc["allocation"], out.instance);
    if (doc.contains("interim")) out.interim = interim_from_json(doc["interim"], out.instance);
    if (doc.contains("priority"))
        out.priority = priority_from_json(doc["priority"], out.instance);
    if (doc.contains("objective")) out.objective = parse_objective(doc["objective"], out.instance);
    return out;
}

LoadedInstance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open instance file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError("instance parse error at byte " + std::to_string(e.byte) + ": " +
                         e.what());
    }
    return parse_instance(doc);
}

json rational_json(const Rational& value) { return to_string(value); }

Rational rational_from_json(const json& value) {
    if (value.is_number_integer()) return Rational(value.get<long long>());
    if (value.is_string()) return parse_rational(value.get<std::string>());
    throw InputError("rationals must be integers or 'p/q' strings");
}

json allocation_json(const AllocationRule& q, const Instance& inst) {
    json out = json::array();
    for (int s = 0; s < inst.num_states(); ++s) {
        json profile = json::array();
        for (int a = 0; a < inst.num_agents(); ++a)
            profile.push_back(inst.type_name(a, inst.state_type(s, a)));
        json values = json::object();
        for (int u = 0; u < inst.num_units(); ++u)
            if (q.at(s, u) != 0) values[inst.unit_name(u)] = rational_json(q.at(s, u));
        out.push_back({{"profile", profile}, {"values", values}});
    }
    return out;
}

AllocationRule allocation_from_json(const json& doc, const Instance& inst) {
    AllocationRule q = AllocationRule::zeros(inst);
    for (const json& row : doc) {
        const int s = inst.state_index(parse_profile(need(row, "profile"), inst));
        for (const auto& [name, value] : need(row, "values").items()) {
            int unit;
            if (inst.kind() == Kind::Matching) {
                auto colon = name.find(':');
                if (colon == std::string::npos)
                    throw InputError("matching allocations use 'agent:item' keys");
                unit = inst.unit_index(inst.agent_index(name.substr(0, colon)),
                                       inst.item_index(name.substr(colon + 1)));
            } else {
                unit = inst.agent_index(name);
            }
            q.at(s, unit) = rat(value);
            if (q.at(s, unit) < 0) throw InputError("allocation values must be nonnegative");
        }
    }
    return q;
}

json interim_json(const InterimAllocation& q, const Instance& inst) {
    json out = json::array();
    for (int k = 0; k < inst.tstar_size(); ++k) {
        const TStarElem& e = inst.tstar_elem(k);
        json row;
        row[inst.kind() == Kind::Matching ? "agent" : "unit"] = inst.agent_name(e.agent);
        row["type"] = inst.type_name(e.agent, e.type);
        if (e.item >= 0) row["item"] = inst.item_name(e.item);
        row["value"] = rational_json(q[k]);
        out.push_back(std::move(row));
    }
    return out;
}

InterimAllocation interim_from_json(const json& doc, const Instance& inst) {
    InterimAllocation q(inst.tstar_size());
    for (const json& row : doc) q[parse_tstar_ref(row, inst)] = rat(need(row, "value"));
    return q;
}

json weight_json(const WeightVector& lambda, const Instance& inst) {
    json out = json::array();
    for (int k = 0; k < inst.tstar_size(); ++k) {
        if (lambda[k] == 0) continue;
        json row;
        row["element"] = inst.tstar_name(k);
        row["value"] = rational_json(lambda[k]);
        out.push_back(std::move(row));
    }
    return out;
}

json subset_json(TSubset a, const Instance& inst) {
    json out = json::array();
    for (int k = 0; k < inst.tstar_size(); ++k)
        if (a >> k & 1) out.push_back(inst.tstar_name(k));
    return out;
}

json priority_json(const PriorityOrder& order, const Instance& inst) {
    json out = json::array();
    for (int pos = 0; pos < order.size(); ++pos) {
        const TStarElem& e = inst.tstar_elem(order.order[pos]);
        json row = json::array();
        row.push_back(inst.agent_name(e.agent));
        row.push_back(inst.type_name(e.agent, e.type));
        if (e.item >= 0) row.push_back(inst.item_name(e.item));
        out.push_back(std::move(row));
    }
    return out;
}

PriorityOrder priority_from_json(const json& doc, const Instance& inst) {
    std::vector<int> order;
    for (const json& row : doc) order.push_back(parse_tstar_ref(row, inst));
    if (static_cast<int>(order.size()) != inst.tstar_size())
        throw InputError("priority order must list every T* element exactly once");
    return PriorityOrder::of(std::move(order));
}

} // namespace interim
