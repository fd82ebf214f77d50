#pragma once

#include <string>

#include "sqlrl/sandbox.hpp"
#include "sqlrl/value.hpp"

namespace sqlrl {

enum class RemsMode { Recall, Jaccard };

struct RewardConfig {
    double r_err = -100.0;
    double r_syn = 1.0;
    double partial_scale = 100.0;
    double r_full = 1000.0;
    RemsMode rems_mode = RemsMode::Recall;

    void validate() const; // r_err < 0 < r_syn, r_full > partial_scale
    static RewardConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

enum class OutcomeClass { Error, ExecutedWrong, ExecutedPartial, ExecutedExact };

std::string outcome_class_name(OutcomeClass c);

struct RewardBreakdown {
    double syntactic = 0;
    double partial = 0;
    double full = 0;
    double total = 0;
    double rems = 0;
    OutcomeClass outcome_class = OutcomeClass::Error;

    nlohmann::json to_json() const;
};

// Normalized multiset overlap. Recall mode: |pred ⊓ gold| / |gold|,
// so a superset of gold scores 1. Gold must be non-empty.
double rems(const CanonicalAnswer& pred, const CanonicalAnswer& gold,
            RemsMode mode = RemsMode::Recall);

RewardBreakdown score(const std::variant<EngineError, CanonicalAnswer>& outcome,
                      const CanonicalAnswer& gold, const RewardConfig& cfg = {});

RewardBreakdown score(const ExecutionOutcome& outcome, const CanonicalAnswer& gold,
                      const RewardConfig& cfg = {});

} // namespace sqlrl
