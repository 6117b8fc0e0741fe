#include "interim/instance.hpp"

#include <algorithm>
#include <numeric>

namespace interim {

namespace {

int find_name(const std::vector<std::string>& names, const std::string& name,
              const char* what) {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw InputError(std::string("unknown ") + what + ": " + name);
    return static_cast<int>(it - names.begin());
}

} // namespace

Instance Instance::build(const InstanceDescription& d) {
    Instance inst;
    inst.kind_ = d.kind;
    inst.agent_names_ = d.agents;
    inst.item_names_ = d.items;
    inst.type_names_ = d.type_labels;

    const int A = inst.num_agents();
    if (A == 0) throw InputError("instance has no agents/units");
    if (d.kind == Kind::Matching && inst.num_items() == 0)
        throw InputError("matching instance has no items");
    if (static_cast<int>(d.type_labels.size()) != A)
        throw InputError("type sets must be given for every agent/unit");
    for (int a = 0; a < A; ++a)
        if (d.type_labels[a].empty())
            throw InputError("empty type set for " + inst.agent_names_[a]);

    inst.rankings_.assign(A, {});
    for (int a = 0; a < A; ++a) {
        inst.rankings_[a].assign(inst.num_types(a), {});
        if (a < static_cast<int>(d.rankings.size()) && !d.rankings[a].empty()) {
            if (static_cast<int>(d.rankings[a].size()) != inst.num_types(a))
                throw InputError("rankings must cover every type of " + inst.agent_names_[a]);
            for (int ty = 0; ty < inst.num_types(a); ++ty) {
                const auto& r = d.rankings[a][ty];
                if (r.empty()) continue;
                std::vector<int> seen = r;
                std::sort(seen.begin(), seen.end());
                for (int i = 0; i < static_cast<int>(seen.size()); ++i)
                    if (seen[i] != i)
                        throw InputError("ranking for type " + inst.type_names_[a][ty] +
                                         " is not a permutation of the items");
                if (static_cast<int>(r.size()) != inst.num_items())
                    throw InputError("ranking must list every item");
                inst.rankings_[a][ty] = r;
            }
        }
    }

    // Mixed-radix layout of states: agent 0 is the fastest-varying digit.
    inst.radix_.resize(A);
    inst.stride_.resize(A);
    std::size_t total = 1;
    for (int a = 0; a < A; ++a) {
        inst.radix_[a] = inst.type_names_[a].size();
        inst.stride_[a] = total;
        total *= inst.radix_[a];
        if (total > static_cast<std::size_t>(d.max_states))
            throw CapExceeded("state space exceeds cap of " + std::to_string(d.max_states));
    }
    inst.num_states_ = static_cast<int>(total);

    // Joint prior.
    inst.joint_.assign(total, Rational(0));
    if (d.independent) {
        if (!d.joint.empty())
            throw InputError("give either a joint table or independent marginals, not both");
        if (static_cast<int>(d.marginals.size()) != A)
            throw InputError("independent prior needs marginals for every agent");
        for (int a = 0; a < A; ++a) {
            if (static_cast<int>(d.marginals[a].size()) != inst.num_types(a))
                throw InputError("marginal size mismatch for " + inst.agent_names_[a]);
            Rational sum = 0;
            for (const Rational& p : d.marginals[a]) {
                if (p < 0) throw InputError("negative probability in marginal of " +
                                            inst.agent_names_[a]);
                sum += p;
            }
            if (sum != 1)
                throw InputError("marginal of " + inst.agent_names_[a] +
                                 " sums to " + to_string(sum) + ", expected 1");
        }
        for (int s = 0; s < inst.num_states_; ++s) {
            Rational p = 1;
            for (int a = 0; a < A; ++a) p *= d.marginals[a][inst.state_type(s, a)];
            inst.joint_[s] = p;
        }
    } else {
        if (d.joint.empty()) throw InputError("prior missing");
        for (const auto& [profile, p] : d.joint) {
            if (static_cast<int>(profile.size()) != A)
                throw InputError("prior profile length mismatch");
            if (p < 0) throw InputError("negative probability in joint prior");
            inst.joint_[inst.state_index(profile)] += p;
        }
        Rational sum = std::accumulate(inst.joint_.begin(), inst.joint_.end(), Rational(0));
        if (sum != 1)
            throw InputError("joint prior sums to " + to_string(sum) + ", expected 1");
    }

    // Marginals and T*.
    inst.marginal_.assign(A, {});
    for (int a = 0; a < A; ++a) inst.marginal_[a].assign(inst.num_types(a), Rational(0));
    for (int s = 0; s < inst.num_states_; ++s) {
        if (inst.joint_[s] == 0) continue;
        for (int a = 0; a < A; ++a) inst.marginal_[a][inst.state_type(s, a)] += inst.joint_[s];
    }

    const int item_slots = d.kind == Kind::Matching ? inst.num_items() : 1;
    inst.tstar_index_.assign(A, {});
    for (int a = 0; a < A; ++a) {
        inst.tstar_index_[a].assign(inst.num_types(a), std::vector<int>(item_slots, -1));
        for (int ty = 0; ty < inst.num_types(a); ++ty) {
            if (inst.marginal_[a][ty] == 0) continue;
            if (d.kind == Kind::Matching) {
                for (int n = 0; n < inst.num_items(); ++n) {
                    inst.tstar_index_[a][ty][n] = static_cast<int>(inst.tstar_.size());
                    inst.tstar_.push_back({a, ty, n});
                }
            } else {
                inst.tstar_index_[a][ty][0] = static_cast<int>(inst.tstar_.size());
                inst.tstar_.push_back({a, ty, -1});
            }
        }
    }
    return inst;
}

int Instance::agent_index(const std::string& name) const {
    return find_name(agent_names_, name, "agent/unit");
}

int Instance::item_index(const std::string& name) const {
    return find_name(item_names_, name, "item");
}

int Instance::type_index(int agent, const std::string& label) const {
    auto it = std::find(type_names_[agent].begin(), type_names_[agent].end(), label);
    if (it == type_names_[agent].end())
        throw InputError("unknown type '" + label + "' for " + agent_names_[agent]);
    return static_cast<int>(it - type_names_[agent].begin());
}

bool Instance::has_rankings() const {
    for (int a = 0; a < num_agents(); ++a)
        for (int ty = 0; ty < num_types(a); ++ty)
            if (rankings_[a][ty].empty()) return false;
    return kind_ == Kind::Matching;
}

std::string Instance::unit_name(int unit) const {
    if (kind_ == Kind::Matching)
        return agent_names_[unit_agent(unit)] + ":" + item_names_[unit_item(unit)];
    return agent_names_[unit];
}

int Instance::state_index(const std::vector<int>& profile) const {
    int s = 0;
    for (int a = 0; a < num_agents(); ++a) {
        if (profile[a] < 0 || profile[a] >= static_cast<int>(radix_[a]))
            throw InputError("type index out of range in profile");
        s += profile[a] * static_cast<int>(stride_[a]);
    }
    return s;
}

std::vector<int> Instance::state_profile(int state) const {
    std::vector<int> profile(num_agents());
    for (int a = 0; a < num_agents(); ++a) profile[a] = state_type(state, a);
    return profile;
}

Rational Instance::conditional(int state, int agent) const {
    const Rational& m = marginal_[agent][state_type(state, agent)];
    if (m == 0) throw InputError("conditional requested at a zero-marginal type");
    return joint_[state] / m;
}

int Instance::tstar_lookup(int agent, int type, int item) const {
    const auto& slot = tstar_index_[agent][type];
    return kind_ == Kind::Matching ? slot[item] : slot[0];
}

std::string Instance::tstar_name(int k) const {
    const TStarElem& e = tstar_[k];
    std::string s = agent_names_[e.agent] + "," + type_names_[e.agent][e.type];
    if (e.item >= 0) s += "," + item_names_[e.item];
    return s;
}

std::vector<Rational> AllocationRule::state_row(int state) const {
    auto begin = values_.begin() + static_cast<std::size_t>(state) * num_units_;
    return std::vector<Rational>(begin, begin + num_units_);
}

void AllocationRule::set_state_row(int state, const std::vector<Rational>& row) {
    std::copy(row.begin(), row.end(),
              values_.begin() + static_cast<std::size_t>(state) * num_units_);
}

InterimAllocation interim_of(const AllocationRule& q, const Instance& inst) {
    InterimAllocation result(inst.tstar_size());
    for (int s = 0; s < inst.num_states(); ++s) {
        const Rational& p = inst.prob(s);
        if (p == 0) continue;
        for (int k = 0; k < inst.tstar_size(); ++k) {
            if (!inst.realized(k, s)) continue;
            const Rational& v = q.at(s, inst.tstar_unit(k));
            if (v != 0) result[k] += v * p;
        }
    }
    for (int k = 0; k < inst.tstar_size(); ++k) result[k] /= inst.tstar_marginal(k);
    return result;
}

InterimAllocation scale(const InterimAllocation& q, const Rational& alpha) {
    if (alpha < 0 || alpha > 1) throw InputError("scale factor must lie in [0,1]");
    InterimAllocation result = q;
    for (Rational& v : result.values) v *= alpha;
    return result;
}

UnitSet active_set(TSubset a, int state, const Instance& inst) {
    require_mask_capacity(inst.tstar_size(), "T*");
    require_mask_capacity(inst.num_units(), "units");
    UnitSet units = 0;
    for (int k = 0; k < inst.tstar_size(); ++k)
        if ((a >> k & 1) && inst.realized(k, state))
            units |= UnitSet(1) << inst.tstar_unit(k);
    return units;
}

Rational ex_ante_mass(const InterimAllocation& q, const Instance& inst) {
    Rational total = 0;
    for (int k = 0; k < inst.tstar_size(); ++k) total += q[k] * inst.tstar_marginal(k);
    return total;
}

void require_mask_capacity(int size, const char* what) {
    if (size > 63)
        throw CapExceeded(std::string(what) + " too large for subset masks (" +
                          std::to_string(size) + " > 63)");
}

} // namespace interim
