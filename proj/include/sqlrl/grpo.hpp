#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sqlrl/eval.hpp"
#include "sqlrl/policy.hpp"
#include "sqlrl/rewards.hpp"

namespace sqlrl {

struct GroupStats {
    std::vector<double> rewards;
    double mean = 0;
    double stddev = 0; // population
    std::vector<double> advantages;
};

// A_i = (r_i - mu) / (sigma + 1e-8); all zero when the group is constant
GroupStats compute_advantages(const std::vector<double>& rewards);

struct TrainConfig {
    int k = 2;
    double beta = 0.04;
    double learning_rate = 0.5; // raw-logit scale; 1e-5 mirrors the LLM setting
    int batch_size = 2;
    int epochs = 1;
    DecodeMode decode = DecodeMode::Sample;
    uint64_t seed = 0;
    int eval_every = 10;
    std::string kl_mode = "exact"; // or "sampled"
    RewardConfig reward;

    void validate() const;
    nlohmann::json to_json() const;
    static TrainConfig from_json(const nlohmann::json& j);
};

// score-function estimator of the group objective:
// (1/k) sum_i A_i * dlogprob(y_i) - beta * dKL(params || ref)
Grad objective_grad(const std::vector<std::pair<Completion, double>>& group,
                    const PolicyParams& params, const ReferencePolicy& ref, double beta);

struct TrainState {
    int step = 0;
    PolicyParams params;
    ReferencePolicy ref;
    Rng rng{0};
    int best_step = -1;
    double best_dev_ems = -1;
    double running_reward_sum = 0;
    int64_t running_reward_count = 0;

    nlohmann::json to_json() const;
    static TrainState from_json(const nlohmann::json& j);
};

struct TrainResult {
    TrainState state;
    PolicyParams best_params;
    double initial_dev_ems = 0;
    double initial_dev_error_rate = 0;
    double best_dev_error_rate = 0;
};

// One (or more) passes over the train split: sample a group per prompt,
// execute, score, normalize advantages, ascend the Eq-style objective.
// Writes train_log.jsonl, policy_<step>.json checkpoints, and state.json
// under out_dir. Deterministic per seed.
TrainResult train(const TrainConfig& config, const std::string& data_dir,
                  const std::string& out_dir);

// resume from out_dir/state.json; continues the identical trajectory
TrainResult train_resume(const TrainConfig& config, const std::string& data_dir,
                         const std::string& out_dir);

} // namespace sqlrl
