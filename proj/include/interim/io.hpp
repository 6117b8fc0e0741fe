// Instance files and structured reports. Instances are JSON with rationals
// serialized as exact "p/q" strings; reports round-trip bit-identically
// (keys are emitted sorted and values canonically).
#pragma once

#include "interim/cardinal.hpp"
#include "interim/da.hpp"
#include "interim/instance.hpp"
#include "interim/polytopes.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace interim {

struct LoadedInstance {
    Instance instance;
    ExPostPolytope polytope;  // from the file, or the matching default
    std::optional<AllocationRule> allocation;
    std::optional<InterimAllocation> interim;
    std::optional<PriorityOrder> priority;
    std::optional<Objective> objective;
    std::optional<CardinalTypeSpace> cardinal;
    int max_states = 10000;
};

LoadedInstance parse_instance(const nlohmann::json& doc);
LoadedInstance load_instance(const std::string& path);

// Canonical JSON pieces used by reports and tests.
nlohmann::json rational_json(const Rational& value);
Rational rational_from_json(const nlohmann::json& value);

nlohmann::json allocation_json(const AllocationRule& q, const Instance& inst);
AllocationRule allocation_from_json(const nlohmann::json& doc, const Instance& inst);

nlohmann::json interim_json(const InterimAllocation& q, const Instance& inst);
InterimAllocation interim_from_json(const nlohmann::json& doc, const Instance& inst);

nlohmann::json weight_json(const WeightVector& lambda, const Instance& inst);
nlohmann::json subset_json(TSubset a, const Instance& inst);
nlohmann::json priority_json(const PriorityOrder& order, const Instance& inst);
PriorityOrder priority_from_json(const nlohmann::json& doc, const Instance& inst);

} // namespace interim
