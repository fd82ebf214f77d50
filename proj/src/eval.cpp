#include "sqlrl/eval.hpp"

#include <omp.h>

#include <map>
#include <sstream>

namespace sqlrl {

nlohmann::json QuestionRecord::to_json() const {
    return {{"id", id},
            {"predicted_sql", predicted_sql},
            {"outcome_class", outcome_class_name(outcome_class)},
            {"rems", rems},
            {"exact", exact},
            {"timeout", timeout}};
}

nlohmann::json EvalResult::to_json() const {
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& r : records) recs.push_back(r.to_json());
    return {{"split", split},
            {"label", label},
            {"n", n},
            {"ems", ems},
            {"rems", rems},
            {"error_count", error_count},
            {"error_rate", error_rate},
            {"ems_by_difficulty", ems_by_difficulty},
            {"rems_by_difficulty", rems_by_difficulty},
            {"records", recs}};
}

namespace {

// per-question scoring shared by the serial and parallel paths
QuestionRecord score_question(const PolicyParams& params, const QuestionInstance& q,
                              const DatabaseInstance& db, const EvalOptions& opts) {
    QuestionRecord rec;
    rec.id = q.id;
    Completion c = greedy_completion(params, q);
    rec.predicted_sql = c.sql;
    ExecutionOutcome outcome = execute(db, c.sql);
    auto canon = canonicalize(outcome);
    if (auto* err = std::get_if<EngineError>(&canon)) {
        rec.outcome_class = OutcomeClass::Error;
        rec.timeout = err->timeout;
        return rec;
    }
    const auto& pred = std::get<CanonicalAnswer>(canon);
    rec.rems = rems(pred, q.gold_answer, opts.rems_mode);
    rec.exact = opts.ems_mode == EmsMode::Exact ? pred == q.gold_answer
                                                : pred.contains(q.gold_answer);
    if (pred == q.gold_answer) rec.outcome_class = OutcomeClass::ExecutedExact;
    else if (rec.rems > 0) rec.outcome_class = OutcomeClass::ExecutedPartial;
    else rec.outcome_class = OutcomeClass::ExecutedWrong;
    return rec;
}

EvalResult aggregate(const PolicyParams&, const std::vector<QuestionInstance>& questions,
                     std::vector<QuestionRecord> records) {
    EvalResult res;
    res.n = static_cast<int>(questions.size());
    std::map<std::string, int> n_by_tier, exact_by_tier;
    std::map<std::string, double> rems_by_tier;
    int exact_total = 0;
    double rems_total = 0;
    for (size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        std::string tier = difficulty_name(questions[i].difficulty);
        n_by_tier[tier] += 1;
        if (rec.outcome_class == OutcomeClass::Error) res.error_count += 1;
        if (rec.exact) {
            exact_total += 1;
            exact_by_tier[tier] += 1;
        }
        rems_total += rec.rems;
        rems_by_tier[tier] += rec.rems;
    }
    if (res.n > 0) {
        res.ems = 100.0 * exact_total / res.n;
        res.rems = 100.0 * rems_total / res.n;
        res.error_rate = 100.0 * res.error_count / res.n;
    }
    for (const auto& [tier, cnt] : n_by_tier) {
        res.ems_by_difficulty[tier] = 100.0 * exact_by_tier[tier] / cnt;
        res.rems_by_difficulty[tier] = 100.0 * rems_by_tier[tier] / cnt;
    }
    res.records = std::move(records);
    return res;
}

} // namespace

EvalResult evaluate_serial(const PolicyParams& params,
                           const std::vector<QuestionInstance>& questions,
                           const std::string& data_dir, const EvalOptions& opts) {
    std::map<std::string, DatabaseInstance> dbs;
    std::vector<QuestionRecord> records(questions.size());
    for (size_t i = 0; i < questions.size(); ++i) {
        const auto& q = questions[i];
        auto it = dbs.find(q.db_id);
        if (it == dbs.end())
            it = dbs.emplace(q.db_id, load_corpus_database(data_dir, q.db_id)).first;
        records[i] = score_question(params, q, it->second, opts);
    }
    return aggregate(params, questions, std::move(records));
}

EvalResult evaluate(const PolicyParams& params, const std::vector<QuestionInstance>& questions,
                    const std::string& data_dir, const EvalOptions& opts) {
    if (opts.n_threads <= 1) return evaluate_serial(params, questions, data_dir, opts);
    std::vector<QuestionRecord> records(questions.size());
    int n = static_cast<int>(questions.size());
#pragma omp parallel num_threads(opts.n_threads)
    {
        // engine connections are worker-confined, so each thread keeps its own
        std::map<std::string, DatabaseInstance> dbs;
#pragma omp for schedule(dynamic, 4)
        for (int i = 0; i < n; ++i) {
            const auto& q = questions[i];
            auto it = dbs.find(q.db_id);
            if (it == dbs.end())
                it = dbs.emplace(q.db_id, load_corpus_database(data_dir, q.db_id)).first;
            records[i] = score_question(params, q, it->second, opts);
        }
    }
    return aggregate(params, questions, std::move(records));
}

static std::string fmt(double v) {
    nlohmann::json j = v;
    return j.dump();
}

std::string compare_csv(const std::vector<EvalResult>& results) {
    std::string out = "label,split,n,rems,ems,error_count,error_rate\n";
    for (const auto& r : results)
        out += r.label + "," + r.split + "," + std::to_string(r.n) + "," + fmt(r.rems) + "," +
               fmt(r.ems) + "," + std::to_string(r.error_count) + "," + fmt(r.error_rate) + "\n";
    return out;
}

std::string compare_text(const std::vector<EvalResult>& results) {
    std::ostringstream os;
    auto line = [&](const std::string& a, const std::string& b, const std::string& c,
                    const std::string& d, const std::string& e, const std::string& f) {
        os << a;
        for (size_t i = a.size(); i < 24; ++i) os << ' ';
        os << b;
        for (size_t i = b.size(); i < 22; ++i) os << ' ';
        os << c;
        for (size_t i = c.size(); i < 8; ++i) os << ' ';
        os << d;
        for (size_t i = d.size(); i < 10; ++i) os << ' ';
        os << e;
        for (size_t i = e.size(); i < 10; ++i) os << ' ';
        os << f << "\n";
    };
    line("label", "split", "n", "REMS", "EMS", "#Error");
    char buf[32];
    for (const auto& r : results) {
        std::snprintf(buf, sizeof buf, "%.2f", r.rems);
        std::string rems_s = buf;
        std::snprintf(buf, sizeof buf, "%.2f", r.ems);
        std::string ems_s = buf;
        line(r.label, r.split, std::to_string(r.n), rems_s, ems_s,
             std::to_string(r.error_count));
    }
    if (results.size() == 2) {
        std::snprintf(buf, sizeof buf, "%+.2f", results[1].rems - results[0].rems);
        std::string drems = buf;
        std::snprintf(buf, sizeof buf, "%+.2f", results[1].ems - results[0].ems);
        std::string dems = buf;
        line("delta", "", "", drems, dems,
             std::to_string(results[1].error_count - results[0].error_count));
    }
    return os.str();
}

} // namespace sqlrl
