#include "sqlrl/rewards.hpp"

namespace sqlrl {

void RewardConfig::validate() const {
    if (!(r_err < 0 && 0 < r_syn))
        throw ConfigError("reward config requires r_err < 0 < r_syn");
    if (!(r_full > partial_scale))
        throw ConfigError("reward config requires r_full > partial_scale");
}

RewardConfig RewardConfig::from_json(const nlohmann::json& j) {
    RewardConfig cfg;
    if (j.contains("r_err")) cfg.r_err = j.at("r_err").get<double>();
    if (j.contains("r_syn")) cfg.r_syn = j.at("r_syn").get<double>();
    if (j.contains("partial_scale")) cfg.partial_scale = j.at("partial_scale").get<double>();
    if (j.contains("r_full")) cfg.r_full = j.at("r_full").get<double>();
    if (j.contains("rems_mode")) {
        std::string m = j.at("rems_mode").get<std::string>();
        if (m == "recall") cfg.rems_mode = RemsMode::Recall;
        else if (m == "jaccard") cfg.rems_mode = RemsMode::Jaccard;
        else throw ConfigError("unknown rems_mode: " + m);
    }
    cfg.validate();
    return cfg;
}

nlohmann::json RewardConfig::to_json() const {
    return {{"r_err", r_err},
            {"r_syn", r_syn},
            {"partial_scale", partial_scale},
            {"r_full", r_full},
            {"rems_mode", rems_mode == RemsMode::Recall ? "recall" : "jaccard"}};
}

std::string outcome_class_name(OutcomeClass c) {
    switch (c) {
        case OutcomeClass::Error: return "error";
        case OutcomeClass::ExecutedWrong: return "executed_wrong";
        case OutcomeClass::ExecutedPartial: return "executed_partial";
        case OutcomeClass::ExecutedExact: return "executed_exact";
    }
    return "error";
}

nlohmann::json RewardBreakdown::to_json() const {
    return {{"syntactic", syntactic}, {"partial", partial},
            {"full", full},           {"total", total},
            {"rems", rems},           {"outcome_class", outcome_class_name(outcome_class)}};
}

double rems(const CanonicalAnswer& pred, const CanonicalAnswer& gold, RemsMode mode) {
    if (gold.empty()) throw ConfigError("rems: gold answer must be non-empty");
    size_t overlap = pred.intersection_size(gold);
    if (mode == RemsMode::Jaccard) {
        size_t uni = pred.size() + gold.size() - overlap;
        return uni == 0 ? 0.0 : static_cast<double>(overlap) / static_cast<double>(uni);
    }
    return static_cast<double>(overlap) / static_cast<double>(gold.size());
}

RewardBreakdown score(const std::variant<EngineError, CanonicalAnswer>& outcome,
                      const CanonicalAnswer& gold, const RewardConfig& cfg) {
    if (gold.empty()) throw ConfigError("score: gold answer must be non-empty");
    RewardBreakdown b;
    if (std::holds_alternative<EngineError>(outcome)) {
        b.syntactic = cfg.r_err;
        b.total = cfg.r_err;
        b.outcome_class = OutcomeClass::Error;
        return b;
    }
    const auto& pred = std::get<CanonicalAnswer>(outcome);
    b.syntactic = cfg.r_syn;
    b.rems = rems(pred, gold, cfg.rems_mode);
    if (pred == gold) {
        b.partial = cfg.partial_scale * b.rems;
        b.full = cfg.r_full;
        b.outcome_class = OutcomeClass::ExecutedExact;
    } else if (b.rems > 0) {
        b.partial = cfg.partial_scale * b.rems;
        b.outcome_class = OutcomeClass::ExecutedPartial;
    } else {
        b.outcome_class = OutcomeClass::ExecutedWrong;
    }
    b.total = b.syntactic + b.partial + b.full;
    return b;
}

RewardBreakdown score(const ExecutionOutcome& outcome, const CanonicalAnswer& gold,
                      const RewardConfig& cfg) {
    return score(canonicalize(outcome), gold, cfg);
}

} // namespace sqlrl
