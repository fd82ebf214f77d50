#include "sqlrl/grpo.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

namespace sqlrl {

GroupStats compute_advantages(const std::vector<double>& rewards) {
    if (rewards.size() < 2)
        throw ConfigError("compute_advantages: group size must be >= 2");
    GroupStats g;
    g.rewards = rewards;
    double sum = 0;
    for (double r : rewards) sum += r;
    g.mean = sum / rewards.size();
    double var = 0;
    for (double r : rewards) var += (r - g.mean) * (r - g.mean);
    g.stddev = std::sqrt(var / rewards.size());
    bool constant = true;
    for (double r : rewards)
        if (r != rewards[0]) constant = false;
    g.advantages.resize(rewards.size(), 0.0);
    if (!constant)
        for (size_t i = 0; i < rewards.size(); ++i)
            g.advantages[i] = (rewards[i] - g.mean) / (g.stddev + 1e-8);
    return g;
}

void TrainConfig::validate() const {
    if (k < 2) throw ConfigError("train config: k must be >= 2");
    if (beta < 0) throw ConfigError("train config: beta must be >= 0");
    if (learning_rate <= 0) throw ConfigError("train config: learning_rate must be > 0");
    if (batch_size < 1) throw ConfigError("train config: batch_size must be >= 1");
    if (epochs < 1) throw ConfigError("train config: epochs must be >= 1");
    if (eval_every < 1) throw ConfigError("train config: eval_every must be >= 1");
    if (kl_mode != "exact" && kl_mode != "sampled")
        throw ConfigError("train config: kl_mode must be exact or sampled");
    reward.validate();
}

nlohmann::json TrainConfig::to_json() const {
    return {{"k", k},
            {"beta", beta},
            {"learning_rate", learning_rate},
            {"batch_size", batch_size},
            {"epochs", epochs},
            {"decode", decode_mode_name(decode)},
            {"seed", seed},
            {"eval_every", eval_every},
            {"kl_mode", kl_mode},
            {"reward", reward.to_json()}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
    TrainConfig c;
    if (j.contains("k")) c.k = j.at("k").get<int>();
    if (j.contains("beta")) c.beta = j.at("beta").get<double>();
    if (j.contains("learning_rate")) c.learning_rate = j.at("learning_rate").get<double>();
    if (j.contains("batch_size")) c.batch_size = j.at("batch_size").get<int>();
    if (j.contains("epochs")) c.epochs = j.at("epochs").get<int>();
    if (j.contains("decode")) c.decode = decode_mode_from_name(j.at("decode").get<std::string>());
    if (j.contains("seed")) c.seed = j.at("seed").get<uint64_t>();
    if (j.contains("eval_every")) c.eval_every = j.at("eval_every").get<int>();
    if (j.contains("kl_mode")) c.kl_mode = j.at("kl_mode").get<std::string>();
    if (j.contains("reward")) c.reward = RewardConfig::from_json(j.at("reward"));
    c.validate();
    return c;
}

Grad objective_grad(const std::vector<std::pair<Completion, double>>& group,
                    const PolicyParams& params, const ReferencePolicy& ref, double beta) {
    Grad g = zero_like(params.logits);
    for (const auto& [completion, advantage] : group)
        axpy(advantage / static_cast<double>(group.size()), logprob_grad(params, completion), g);
    if (beta != 0) axpy(-beta, kl_grad(params, ref), g);
    return g;
}

nlohmann::json TrainState::to_json() const {
    return {{"step", step},
            {"params", params.to_json()},
            {"ref", ref.params.to_json()},
            {"rng_state", rng.state},
            {"best_step", best_step},
            {"best_dev_ems", best_dev_ems},
            {"running_reward_sum", running_reward_sum},
            {"running_reward_count", running_reward_count}};
}

TrainState TrainState::from_json(const nlohmann::json& j) {
    TrainState s;
    s.step = j.at("step").get<int>();
    s.params = PolicyParams::from_json(j.at("params"));
    s.ref = ReferencePolicy{PolicyParams::from_json(j.at("ref"))};
    s.rng.state = j.at("rng_state").get<uint64_t>();
    s.best_step = j.at("best_step").get<int>();
    s.best_dev_ems = j.at("best_dev_ems").get<double>();
    s.running_reward_sum = j.at("running_reward_sum").get<double>();
    s.running_reward_count = j.at("running_reward_count").get<int64_t>();
    return s;
}

namespace {

void save_checkpoint(const std::string& out_dir, int step, const PolicyParams& params,
                     uint64_t rng_state) {
    nlohmann::json j = params.to_json();
    j["rng_state"] = rng_state;
    std::ofstream f(out_dir + "/policy_" + std::to_string(step) + ".json", std::ios::binary);
    f << j.dump(2) << "\n";
}

struct DbCache {
    std::string data_dir;
    std::map<std::string, DatabaseInstance> dbs;

    const DatabaseInstance& get(const std::string& id) {
        auto it = dbs.find(id);
        if (it == dbs.end()) it = dbs.emplace(id, load_corpus_database(data_dir, id)).first;
        return it->second;
    }
};

TrainResult run_training(const TrainConfig& config, const std::string& data_dir,
                         const std::string& out_dir, TrainState state, bool fresh) {
    config.validate();
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    auto train_split = load_split(data_dir, "train");
    auto dev_split = load_split(data_dir, "dev");
    if (train_split.empty()) throw LoadError("empty train split");
    DbCache cache{data_dir, {}};

    int steps_per_epoch =
        (static_cast<int>(train_split.size()) + config.batch_size - 1) / config.batch_size;
    int total_steps = steps_per_epoch * config.epochs;

    std::ofstream log(out_dir + "/train_log.jsonl",
                      fresh ? std::ios::binary : (std::ios::binary | std::ios::app));

    EvalOptions dev_opts;
    auto dev_eval = [&](const PolicyParams& p) {
        return evaluate_serial(p, dev_split, data_dir, dev_opts);
    };

    TrainResult result;
    EvalResult initial;
    if (fresh) {
        initial = dev_eval(state.params);
        state.best_step = 0;
        state.best_dev_ems = initial.ems;
        save_checkpoint(out_dir, 0, state.params, state.rng.state);
        result.initial_dev_ems = initial.ems;
        result.initial_dev_error_rate = initial.error_rate;
    }

    while (state.step < total_steps) {
        int step = state.step;
        Grad grad = zero_like(state.params.logits);
        nlohmann::json prompts = nlohmann::json::array();
        nlohmann::json breakdowns = nlohmann::json::array();
        nlohmann::json advantages_log = nlohmann::json::array();

        int batch_count = 0;
        for (int b = 0; b < config.batch_size; ++b) {
            size_t qi = (static_cast<size_t>(step) * config.batch_size + b) % train_split.size();
            const QuestionInstance& q = train_split[qi];
            const DatabaseInstance& db = cache.get(q.db_id);

            auto group = sample_group(state.params, q, config.k, state.rng, config.decode);
            std::vector<double> rewards;
            nlohmann::json group_breakdowns = nlohmann::json::array();
            for (const auto& c : group) {
                RewardBreakdown rb = score(execute(db, c.sql), q.gold_answer, config.reward);
                rewards.push_back(rb.total);
                state.running_reward_sum += rb.total;
                state.running_reward_count += 1;
                group_breakdowns.push_back(rb.to_json());
            }
            GroupStats gs = compute_advantages(rewards);

            for (size_t i = 0; i < group.size(); ++i) {
                axpy(gs.advantages[i] / (config.k * config.batch_size),
                     logprob_grad(state.params, group[i]), grad);
                if (config.beta != 0 && config.kl_mode == "sampled") {
                    // score-function estimator of -beta * grad KL
                    double lp0 = 0;
                    for (const auto& [ni, ch] : group[i].trace)
                        lp0 += std::log(state.ref.params.node_probs(ni)[ch]);
                    axpy(-config.beta * (group[i].logprob - lp0) /
                             (config.k * config.batch_size),
                         logprob_grad(state.params, group[i]), grad);
                }
            }
            prompts.push_back(q.id);
            breakdowns.push_back(group_breakdowns);
            advantages_log.push_back(gs.advantages);
            ++batch_count;
        }
        (void)batch_count;
        if (config.beta != 0 && config.kl_mode == "exact")
            axpy(-config.beta, kl_grad(state.params, state.ref), grad);

        double gnorm = l2_norm(grad);
        if (!std::isfinite(gnorm))
            throw std::runtime_error("non-finite gradient at step " + std::to_string(step));
        axpy(config.learning_rate, grad, state.params.logits);
        state.step = step + 1;

        double kl = kl_divergence(state.params, state.ref);
        nlohmann::ordered_json rec;
        rec["step"] = state.step;
        rec["prompts"] = prompts;
        rec["rewards"] = breakdowns;
        rec["advantages"] = advantages_log;
        rec["kl"] = kl;
        rec["grad_norm"] = gnorm;

        bool eval_now = state.step % config.eval_every == 0 || state.step == total_steps;
        if (eval_now) {
            EvalResult dev = dev_eval(state.params);
            rec["dev_ems"] = dev.ems;
            rec["dev_error_rate"] = dev.error_rate;
            if (dev.ems > state.best_dev_ems) {
                state.best_dev_ems = dev.ems;
                state.best_step = state.step;
            }
            save_checkpoint(out_dir, state.step, state.params, state.rng.state);
            std::ofstream sf(out_dir + "/state.json", std::ios::binary);
            sf << state.to_json().dump(2) << "\n";
        }
        log << rec.dump() << "\n";
    }

    {
        std::ofstream sf(out_dir + "/state.json", std::ios::binary);
        sf << state.to_json().dump(2) << "\n";
    }

    // reload the best checkpoint for the caller
    std::ifstream bf(out_dir + "/policy_" + std::to_string(state.best_step) + ".json");
    if (!bf) throw LoadError("missing best checkpoint for step " + std::to_string(state.best_step));
    nlohmann::json bj = nlohmann::json::parse(bf);
    result.best_params = PolicyParams::from_json(bj);
    EvalResult best_dev = dev_eval(result.best_params);
    result.best_dev_error_rate = best_dev.error_rate;
    result.state = std::move(state);
    return result;
}

} // namespace

TrainResult train(const TrainConfig& config, const std::string& data_dir,
                  const std::string& out_dir) {
    TrainState state;
    state.params = PolicyParams::uniform(NodeRegistry::standard());
    state.ref = ReferencePolicy::snapshot(state.params);
    state.rng = Rng(config.seed);
    return run_training(config, data_dir, out_dir, std::move(state), true);
}

TrainResult train_resume(const TrainConfig& config, const std::string& data_dir,
                         const std::string& out_dir) {
    std::ifstream sf(out_dir + "/state.json");
    if (!sf) throw LoadError("no state.json in " + out_dir);
    TrainState state = TrainState::from_json(nlohmann::json::parse(sf));
    TrainResult r = run_training(config, data_dir, out_dir, std::move(state), false);
    return r;
}

} // namespace sqlrl
