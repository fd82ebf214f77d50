#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "sqlrl/grpo.hpp"

using namespace sqlrl;
namespace fs = std::filesystem;

namespace {

nlohmann::json load_config_file(const std::string& path) {
    if (path.empty()) return nlohmann::json::object();
    std::ifstream f(path);
    if (!f) throw LoadError("cannot open config file: " + path);
    return nlohmann::json::parse(f);
}

uint64_t resolve_seed(const CLI::Option* seed_opt, uint64_t flag_value,
                      const nlohmann::json& cfg) {
    if (seed_opt->count() > 0) return flag_value;
    if (cfg.contains("seed")) return cfg.at("seed").get<uint64_t>();
    if (const char* env = std::getenv("RUN_SEED")) return std::stoull(env);
    return flag_value;
}

void write_run_config(const std::string& out_dir, const nlohmann::json& cfg) {
    fs::create_directories(out_dir);
    std::ofstream f(out_dir + "/config.json", std::ios::binary);
    f << cfg.dump(2) << "\n";
}

int cmd_gen_data(const std::string& config_path, uint64_t seed, const CLI::Option* seed_opt,
                 const std::string& out, bool paper_scale, bool with_oracle, int n_databases,
                 const CLI::Option* ndb_opt, int athletes_per_db, const CLI::Option* apd_opt) {
    nlohmann::json cfg = load_config_file(config_path);
    CorpusConfig c;
    c.seed = resolve_seed(seed_opt, seed, cfg);
    c.out_dir = out;
    c.with_oracle = with_oracle;
    if (paper_scale) {
        c.sizes = SplitSizes::paper_scale();
        c.n_databases = 32;
        c.athletes_per_db = 24;
    }
    if (ndb_opt->count() > 0) c.n_databases = n_databases;
    if (apd_opt->count() > 0) c.athletes_per_db = athletes_per_db;

    CorpusManifest m = build_corpus(c);
    write_run_config(out, {{"command", "gen-data"},
                           {"seed", c.seed},
                           {"paper_scale", paper_scale},
                           {"with_oracle", with_oracle},
                           {"n_databases", c.n_databases},
                           {"athletes_per_db", c.athletes_per_db}});
    std::cout << "train=" << m.sizes.train << " dev=" << m.sizes.dev
              << " test_original=" << m.sizes.test_original
              << " test_counterfactual=" << m.sizes.test_counterfactual
              << " test_easy=" << m.sizes.test_easy << " test_medium=" << m.sizes.test_medium
              << " test_hard=" << m.sizes.test_hard << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"execution-grounded RL for text-to-SQL at desk scale"};
    app.require_subcommand(1);

    std::string config_path;

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "generate the synthetic corpus");
    uint64_t g_seed = 7;
    std::string g_out = "data";
    bool g_paper = false, g_oracle = false;
    int g_ndb = 8, g_apd = 12;
    auto* g_seed_opt = gen->add_option("--seed", g_seed, "corpus seed");
    gen->add_option("--out", g_out, "output directory");
    gen->add_flag("--paper-scale", g_paper, "use the full-scale split sizes");
    gen->add_flag("--with-oracle", g_oracle, "include gold SQL in split files");
    auto* g_ndb_opt = gen->add_option("--n-databases", g_ndb, "number of databases");
    auto* g_apd_opt = gen->add_option("--athletes-per-db", g_apd, "athletes per database");
    gen->add_option("--config", config_path, "JSON config file");

    // train
    auto* tr = app.add_subcommand("train", "run GRPO training");
    std::string t_data = "data", t_out = "run";
    uint64_t t_seed = 0;
    int t_k = 2, t_batch = 2, t_epochs = 1, t_eval_every = 10;
    double t_beta = 0.04, t_lr = 0.5;
    std::string t_decode = "sample", t_kl_mode = "exact";
    bool t_resume = false;
    tr->add_option("--data", t_data, "corpus directory");
    tr->add_option("--out", t_out, "run directory");
    auto* t_seed_opt = tr->add_option("--seed", t_seed, "training seed");
    auto* t_k_opt = tr->add_option("--k", t_k, "group size");
    auto* t_beta_opt = tr->add_option("--beta", t_beta, "KL coefficient");
    auto* t_lr_opt = tr->add_option("--lr", t_lr, "learning rate");
    auto* t_batch_opt = tr->add_option("--batch-size", t_batch, "prompts per step");
    auto* t_epochs_opt = tr->add_option("--epochs", t_epochs, "passes over train split");
    auto* t_ee_opt = tr->add_option("--eval-every", t_eval_every, "steps between dev evals");
    auto* t_decode_opt = tr->add_option("--decode", t_decode, "sample | topk");
    auto* t_klm_opt = tr->add_option("--kl-mode", t_kl_mode, "exact | sampled");
    tr->add_flag("--resume", t_resume, "resume from the run directory's state");
    tr->add_option("--config", config_path, "JSON config file");

    // eval
    auto* ev = app.add_subcommand("eval", "evaluate a checkpoint on a split");
    std::string e_data = "data", e_ckpt, e_split = "dev", e_out = "run", e_label = "ckpt";
    std::string e_ems_mode = "exact";
    int e_threads = 1;
    bool e_oracle_policy = false;
    ev->add_option("--data", e_data, "corpus directory");
    ev->add_option("--checkpoint", e_ckpt, "policy checkpoint json");
    ev->add_flag("--oracle-policy", e_oracle_policy,
                 "evaluate the withheld gold SQL instead of a checkpoint");
    ev->add_option("--split", e_split, "split name");
    ev->add_option("--out", e_out, "output directory");
    ev->add_option("--label", e_label, "label used in output file names");
    ev->add_option("--ems-mode", e_ems_mode, "exact | containment");
    ev->add_option("--threads", e_threads, "worker threads");

    // score
    auto* sc = app.add_subcommand("score", "score one SQL string against a gold answer");
    std::string s_db, s_sql, s_gold;
    sc->add_option("--db", s_db, "database dump path")->required();
    sc->add_option("--sql", s_sql, "SQL text")->required();
    sc->add_option("--gold", s_gold, "gold answer as a JSON array")->required();
    sc->add_option("--config", config_path, "JSON config file (reward keys)");

    // report
    auto* rp = app.add_subcommand("report", "combine eval results into tables");
    std::vector<std::string> r_inputs;
    std::string r_out = "run";
    rp->add_option("--input", r_inputs, "eval result json files")->required();
    rp->add_option("--out", r_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed())
            return cmd_gen_data(config_path, g_seed, g_seed_opt, g_out, g_paper, g_oracle,
                                g_ndb, g_ndb_opt, g_apd, g_apd_opt);

        if (tr->parsed()) {
            nlohmann::json cfg = load_config_file(config_path);
            TrainConfig c = cfg.is_object() && !cfg.empty() ? TrainConfig::from_json(cfg)
                                                           : TrainConfig{};
            c.seed = resolve_seed(t_seed_opt, t_seed, cfg);
            if (t_k_opt->count()) c.k = t_k;
            if (t_beta_opt->count()) c.beta = t_beta;
            if (t_lr_opt->count()) c.learning_rate = t_lr;
            if (t_batch_opt->count()) c.batch_size = t_batch;
            if (t_epochs_opt->count()) c.epochs = t_epochs;
            if (t_ee_opt->count()) c.eval_every = t_eval_every;
            if (t_decode_opt->count()) c.decode = decode_mode_from_name(t_decode);
            if (t_klm_opt->count()) c.kl_mode = t_kl_mode;
            c.validate();
            write_run_config(t_out, c.to_json());
            TrainResult r = t_resume ? train_resume(c, t_data, t_out) : train(c, t_data, t_out);
            std::cout << "steps=" << r.state.step << " best_step=" << r.state.best_step
                      << " best_dev_ems=" << r.state.best_dev_ems << "\n";
            return 0;
        }

        if (ev->parsed()) {
            auto questions = load_split(e_data, e_split, e_oracle_policy);
            EvalResult res;
            if (e_oracle_policy) {
                // replay gold SQL through the sandbox; upper-bound reference
                res.n = static_cast<int>(questions.size());
                std::map<std::string, DatabaseInstance> dbs;
                int exact = 0;
                double rems_sum = 0;
                for (const auto& q : questions) {
                    auto it = dbs.find(q.db_id);
                    if (it == dbs.end())
                        it = dbs.emplace(q.db_id, load_corpus_database(e_data, q.db_id)).first;
                    auto canon = canonicalize(execute(it->second, q.gold_sql));
                    QuestionRecord rec;
                    rec.id = q.id;
                    rec.predicted_sql = q.gold_sql;
                    if (std::holds_alternative<EngineError>(canon)) {
                        rec.outcome_class = OutcomeClass::Error;
                        res.error_count += 1;
                    } else {
                        const auto& pred = std::get<CanonicalAnswer>(canon);
                        rec.rems = rems(pred, q.gold_answer);
                        rec.exact = pred == q.gold_answer;
                        rec.outcome_class = rec.exact ? OutcomeClass::ExecutedExact
                                                      : OutcomeClass::ExecutedPartial;
                        if (rec.exact) ++exact;
                        rems_sum += rec.rems;
                    }
                    res.records.push_back(rec);
                }
                res.ems = res.n ? 100.0 * exact / res.n : 0;
                res.rems = res.n ? 100.0 * rems_sum / res.n : 0;
                res.error_rate = res.n ? 100.0 * res.error_count / res.n : 0;
            } else {
                if (e_ckpt.empty()) throw LoadError("eval requires --checkpoint or --oracle-policy");
                std::ifstream f(e_ckpt);
                if (!f) throw LoadError("missing checkpoint: " + e_ckpt);
                PolicyParams params = PolicyParams::from_json(nlohmann::json::parse(f));
                EvalOptions opts;
                opts.ems_mode = e_ems_mode == "containment" ? EmsMode::Containment
                               : e_ems_mode == "exact"      ? EmsMode::Exact
                                                            : throw ConfigError(
                                                                  "unknown ems mode: " + e_ems_mode);
                opts.n_threads = e_threads;
                res = evaluate(params, questions, e_data, opts);
            }
            res.split = e_split;
            res.label = e_label;
            fs::create_directories(e_out);
            std::string path = e_out + "/eval_" + e_split + "_" + e_label + ".json";
            std::ofstream of(path, std::ios::binary);
            of << res.to_json().dump(2) << "\n";
            std::cout << compare_text({res});
            return 0;
        }

        if (sc->parsed()) {
            if (!fs::exists(s_db)) throw LoadError("missing database dump: " + s_db);
            DatabaseInstance db = DatabaseInstance::load(s_db);
            CanonicalAnswer gold = CanonicalAnswer::from_json(nlohmann::json::parse(s_gold));
            nlohmann::json cfg = load_config_file(config_path);
            RewardConfig rc = cfg.contains("reward") ? RewardConfig::from_json(cfg.at("reward"))
                                                     : RewardConfig{};
            RewardBreakdown b = score(execute(db, s_sql), gold, rc);
            std::cout << b.to_json().dump(2) << "\n";
            return 0;
        }

        if (rp->parsed()) {
            std::vector<EvalResult> results;
            for (const auto& path : r_inputs) {
                std::ifstream f(path);
                if (!f) throw LoadError("missing eval result: " + path);
                nlohmann::json j = nlohmann::json::parse(f);
                EvalResult r;
                r.split = j.at("split").get<std::string>();
                r.label = j.at("label").get<std::string>();
                r.n = j.at("n").get<int>();
                r.ems = j.at("ems").get<double>();
                r.rems = j.at("rems").get<double>();
                r.error_count = j.at("error_count").get<int>();
                r.error_rate = j.at("error_rate").get<double>();
                results.push_back(std::move(r));
            }
            fs::create_directories(r_out);
            std::ofstream csv(r_out + "/report.csv", std::ios::binary);
            csv << compare_csv(results);
            std::ofstream txt(r_out + "/report.txt", std::ios::binary);
            txt << compare_text(results);
            std::cout << compare_text(results);
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const LoadError& e) {
        std::cerr << "missing artifact: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
    return 2;
}
