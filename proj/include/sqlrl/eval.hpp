#pragma once

#include <string>
#include <vector>

#include "sqlrl/policy.hpp"
#include "sqlrl/rewards.hpp"

namespace sqlrl {

enum class EmsMode { Exact, Containment };

struct QuestionRecord {
    std::string id;
    std::string predicted_sql;
    OutcomeClass outcome_class = OutcomeClass::Error;
    double rems = 0;
    bool exact = false;
    bool timeout = false;

    nlohmann::json to_json() const;
};

struct EvalResult {
    std::string split;
    std::string label; // checkpoint tag
    int n = 0;
    double ems = 0;        // percentage
    double rems = 0;       // percentage
    int error_count = 0;
    double error_rate = 0; // percentage
    std::map<std::string, double> ems_by_difficulty;
    std::map<std::string, double> rems_by_difficulty;
    std::vector<QuestionRecord> records;

    nlohmann::json to_json() const;
};

struct EvalOptions {
    EmsMode ems_mode = EmsMode::Exact;
    int n_threads = 1; // >1 uses the OpenMP path
    RemsMode rems_mode = RemsMode::Recall;
};

// Greedy-decodes one completion per question and aggregates EMS/REMS/error
// rate. Serial reference implementation.
EvalResult evaluate_serial(const PolicyParams& params,
                           const std::vector<QuestionInstance>& questions,
                           const std::string& data_dir, const EvalOptions& opts = {});

// OpenMP variant; aggregation is order-independent, so results match the
// serial reference exactly.
EvalResult evaluate(const PolicyParams& params, const std::vector<QuestionInstance>& questions,
                    const std::string& data_dir, const EvalOptions& opts = {});

std::string compare_text(const std::vector<EvalResult>& results);
std::string compare_csv(const std::vector<EvalResult>& results);

} // namespace sqlrl
