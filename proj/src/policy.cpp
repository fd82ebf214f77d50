#include "sqlrl/policy.hpp"

#include <algorithm>
#include <cmath>

namespace sqlrl {

// ---------------------------------------------------------------------------
// registry

NodeRegistry::NodeRegistry(std::vector<DecisionNode> nodes) : nodes_(std::move(nodes)) {
    for (size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].choices.empty())
            throw ConfigError("decision node with empty choice set: " + nodes_[i].node_id);
        by_family_[nodes_[i].family].push_back(i);
        by_id_[nodes_[i].node_id] = i;
    }
}

int NodeRegistry::node_index(const std::string& node_id) const {
    auto it = by_id_.find(node_id);
    return it == by_id_.end() ? -1 : static_cast<int>(it->second);
}

const std::vector<size_t>& NodeRegistry::family_nodes(const std::string& family) const {
    auto it = by_family_.find(family);
    if (it == by_family_.end())
        throw ConfigError("no decision nodes registered for family: " + family);
    return it->second;
}

std::shared_ptr<const NodeRegistry> NodeRegistry::standard() {
    static std::shared_ptr<const NodeRegistry> reg = [] {
        std::vector<DecisionNode> nodes;
        // every family leads with an erroring or wrong option so the
        // uniform policy's greedy decode starts badly
        auto sketch = [&](const std::string& family, std::vector<std::string> choices) {
            nodes.push_back({family + "/sketch", family, std::move(choices)});
        };
        sketch("count_medals", {"invalid_column", "wrong_year_filter", "correct", "cities_instead"});
        sketch("list_cities", {"invalid_column", "gold_only", "correct", "with_duplicates"});
        sketch("count_medal_type", {"invalid_column", "ignore_type", "correct", "types_instead"});
        sketch("medals_in_year", {"invalid_column", "after_year", "correct", "all_years"});
        sketch("cities_after_year", {"invalid_column", "before_year", "correct", "all_cities"});
        sketch("span_years", {"invalid_column", "max_only", "correct", "years_list"});
        nodes.push_back({"span_years/tournament_filter", "span_years",
                         {"international_only", "all_tournaments"}});
        sketch("count_between", {"invalid_column", "lower_bound_only", "correct", "all_medals"});
        sketch("count_level", {"invalid_column", "ignore_level", "correct", "levels_instead"});
        sketch("avg_medals_per_year", {"invalid_column", "total_count", "correct", "avg_year"});
        sketch("medals_in_twenties", {"invalid_column", "all_medals", "correct", "years_list"});
        nodes.push_back({"medals_in_twenties/year_strategy", "medals_in_twenties",
                         {"hardcoded_2010_2020", "birth_year_window"}});
        sketch("top_city", {"invalid_column", "tournament_name", "correct", "all_cities"});
        nodes.push_back({"top_city/order", "top_city", {"ascending", "descending"}});
        sketch("busier_athletes", {"invalid_column", "all_athletes", "correct", "ties_included"});
        return std::make_shared<const NodeRegistry>(std::move(nodes));
    }();
    return reg;
}

nlohmann::json NodeRegistry::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& n : nodes_)
        arr.push_back({{"node_id", n.node_id}, {"family", n.family}, {"choices", n.choices}});
    return arr;
}

std::shared_ptr<const NodeRegistry> NodeRegistry::from_json(const nlohmann::json& j) {
    std::vector<DecisionNode> nodes;
    for (const auto& e : j)
        nodes.push_back({e.at("node_id").get<std::string>(), e.at("family").get<std::string>(),
                         e.at("choices").get<std::vector<std::string>>()});
    return std::make_shared<const NodeRegistry>(std::move(nodes));
}

// ---------------------------------------------------------------------------
// parameter and gradient helpers

Grad zero_like(const Grad& shape) {
    Grad g(shape.size());
    for (size_t i = 0; i < shape.size(); ++i) g[i].assign(shape[i].size(), 0.0);
    return g;
}

void axpy(double a, const Grad& x, Grad& y) {
    for (size_t i = 0; i < x.size(); ++i)
        for (size_t k = 0; k < x[i].size(); ++k) y[i][k] += a * x[i][k];
}

double l2_norm(const Grad& g) {
    double s = 0;
    for (const auto& row : g)
        for (double v : row) s += v * v;
    return std::sqrt(s);
}

double l2_distance(const Grad& a, const Grad& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t k = 0; k < a[i].size(); ++k) {
            double d = a[i][k] - b[i][k];
            s += d * d;
        }
    return std::sqrt(s);
}

std::vector<double> softmax(const std::vector<double>& logits) {
    double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double sum = 0;
    for (size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - mx);
        sum += p[i];
    }
    for (auto& v : p) v /= sum;
    return p;
}

PolicyParams PolicyParams::uniform(std::shared_ptr<const NodeRegistry> reg) {
    PolicyParams p;
    p.registry = std::move(reg);
    p.logits.resize(p.registry->size());
    for (size_t i = 0; i < p.registry->size(); ++i)
        p.logits[i].assign(p.registry->node(i).choices.size(), 0.0);
    return p;
}

std::vector<double> PolicyParams::node_probs(size_t node_index) const {
    return softmax(logits[node_index]);
}

nlohmann::json PolicyParams::to_json() const {
    return {{"version", version}, {"registry", registry->to_json()}, {"logits", logits}};
}

PolicyParams PolicyParams::from_json(const nlohmann::json& j) {
    PolicyParams p;
    p.version = j.at("version").get<std::string>();
    p.registry = NodeRegistry::from_json(j.at("registry"));
    p.logits = j.at("logits").get<std::vector<std::vector<double>>>();
    if (p.logits.size() != p.registry->size()) throw ConfigError("checkpoint logits shape mismatch");
    for (size_t i = 0; i < p.logits.size(); ++i)
        if (p.logits[i].size() != p.registry->node(i).choices.size())
            throw ConfigError("checkpoint logits arity mismatch at node " +
                              p.registry->node(i).node_id);
    return p;
}

std::string decode_mode_name(DecodeMode m) {
    switch (m) {
        case DecodeMode::Sample: return "sample";
        case DecodeMode::TopK: return "topk";
        case DecodeMode::Greedy: return "greedy";
    }
    return "sample";
}

DecodeMode decode_mode_from_name(const std::string& s) {
    if (s == "sample") return DecodeMode::Sample;
    if (s == "topk") return DecodeMode::TopK;
    if (s == "greedy") return DecodeMode::Greedy;
    throw ConfigError("unknown decode mode: " + s);
}

// ---------------------------------------------------------------------------
// SQL rendering

static const char* kChain =
    "FROM medal m "
    "JOIN format f ON m.format_id = f.format_id "
    "JOIN tournament t ON f.tournament_id = t.tournament_id "
    "JOIN athlete a ON t.athlete_id = a.athlete_id";

static std::string render_family(const std::string& family,
                                 const std::map<std::string, int>& choice_by_role,
                                 const std::map<std::string, std::string>& slots) {
    auto slot = [&](const char* name) {
        auto it = slots.find(name);
        if (it == slots.end()) throw ConfigError("render: missing slot " + std::string(name));
        return it->second;
    };
    int sk = choice_by_role.at("sketch");
    std::string chain = kChain;
    std::string where_name = " WHERE a.name = '" + slot("athlete") + "'";

    if (family == "count_medals") {
        switch (sk) {
            case 0: return "SELECT m.medal_count " + chain + where_name;
            case 1: return "SELECT COUNT(*) " + chain + where_name + " AND m.year = 1975";
            case 2: return "SELECT COUNT(*) " + chain + where_name;
            default: return "SELECT m.city " + chain + where_name;
        }
    }
    if (family == "list_cities") {
        switch (sk) {
            case 0: return "SELECT m.town " + chain + where_name;
            case 1: return "SELECT DISTINCT m.city " + chain + where_name + " AND m.medal_type = 'gold'";
            case 2: return "SELECT DISTINCT m.city " + chain + where_name;
            default: return "SELECT m.city " + chain + where_name;
        }
    }
    if (family == "count_medal_type") {
        switch (sk) {
            case 0: return "SELECT COUNT(*) " + chain + where_name + " AND m.type = '" + slot("medal_type") + "'";
            case 1: return "SELECT COUNT(*) " + chain + where_name;
            case 2: return "SELECT COUNT(*) " + chain + where_name + " AND m.medal_type = '" + slot("medal_type") + "'";
            default: return "SELECT m.medal_type " + chain + where_name;
        }
    }
    if (family == "medals_in_year") {
        switch (sk) {
            case 0: return "SELECT COUNT(*) " + chain + where_name + " AND m.yr = " + slot("year");
            case 1: return "SELECT COUNT(*) " + chain + where_name + " AND m.year > " + slot("year");
            case 2: return "SELECT COUNT(*) " + chain + where_name + " AND m.year = " + slot("year");
            default: return "SELECT COUNT(*) " + chain + where_name;
        }
    }
    if (family == "cities_after_year") {
        switch (sk) {
            case 0: return "SELECT DISTINCT m.town " + chain + where_name + " AND m.year > " + slot("year");
            case 1: return "SELECT DISTINCT m.city " + chain + where_name + " AND m.year < " + slot("year");
            case 2: return "SELECT DISTINCT m.city " + chain + where_name + " AND m.year > " + slot("year");
            default: return "SELECT DISTINCT m.city " + chain + where_name;
        }
    }
    if (family == "span_years") {
        switch (sk) {
            case 0: return "SELECT MAX(m.years) - MIN(m.years) " + chain + where_name;
            case 1: return "SELECT MAX(m.year) " + chain + where_name;
            case 2: {
                std::string filter = choice_by_role.at("tournament_filter") == 0
                                         ? " AND t.name = 'International'"
                                         : "";
                return "SELECT MAX(m.year) - MIN(m.year) " + chain + where_name + filter;
            }
            default: return "SELECT m.year " + chain + where_name;
        }
    }
    if (family == "count_between") {
        switch (sk) {
            case 0: return "SELECT COUNT(*) " + chain + where_name + " AND m.date >= " + slot("year") + " AND m.date <= " + slot("year2");
            case 1: return "SELECT COUNT(*) " + chain + where_name + " AND m.year >= " + slot("year");
            case 2: return "SELECT COUNT(*) " + chain + where_name + " AND m.year >= " + slot("year") + " AND m.year <= " + slot("year2");
            default: return "SELECT COUNT(*) " + chain + where_name;
        }
    }
    if (family == "count_level") {
        switch (sk) {
            case 0: return "SELECT COUNT(*) " + chain + where_name + " AND t.tier = '" + slot("level") + "'";
            case 1: return "SELECT COUNT(*) " + chain + where_name;
            case 2: return "SELECT COUNT(*) " + chain + where_name + " AND t.level = '" + slot("level") + "'";
            default: return "SELECT t.level " + chain + where_name;
        }
    }
    if (family == "avg_medals_per_year") {
        switch (sk) {
            case 0: return "SELECT AVG(m.medal_count) " + chain + where_name;
            case 1: return "SELECT COUNT(*) " + chain + where_name;
            case 2: return "SELECT AVG(cnt) FROM (SELECT m.year, COUNT(*) AS cnt " + chain + where_name + " GROUP BY m.year) AS sub";
            default: return "SELECT AVG(m.year) " + chain + where_name;
        }
    }
    if (family == "medals_in_twenties") {
        std::string pjoin = " JOIN personalinformation p ON a.athlete_id = p.athlete_id";
        switch (sk) {
            case 0: return "SELECT COUNT(m.medal_id) " + chain + pjoin + where_name + " AND m.year >= (p.dob + 20) AND m.year <= (p.dob + 29)";
            case 1: return "SELECT COUNT(m.medal_id) " + chain + where_name;
            case 2:
                if (choice_by_role.at("year_strategy") == 0)
                    return "SELECT COUNT(m.medal_id) " + chain + where_name + " AND m.year >= 2010 AND m.year <= 2020";
                return "SELECT COUNT(m.medal_id) " + chain + pjoin + where_name + " AND m.year >= (p.birth_year + 20) AND m.year <= (p.birth_year + 29)";
            default: return "SELECT m.year " + chain + where_name;
        }
    }
    if (family == "top_city") {
        switch (sk) {
            case 0: return "SELECT m.city " + chain + where_name + " GROUP BY m.city ORDER BY medal_count DESC LIMIT 1";
            case 1: return "SELECT t.name " + chain + where_name + " LIMIT 1";
            case 2: {
                std::string dir = choice_by_role.at("order") == 0 ? "ASC" : "DESC";
                return "SELECT m.city " + chain + where_name + " GROUP BY m.city ORDER BY COUNT(*) " + dir + ", m.city ASC LIMIT 1";
            }
            default: return "SELECT m.city " + chain + where_name;
        }
    }
    if (family == "busier_athletes") {
        std::string per_athlete =
            "(SELECT t.athlete_id AS aid, COUNT(*) AS cnt FROM medal m "
            "JOIN format f ON m.format_id = f.format_id "
            "JOIN tournament t ON f.tournament_id = t.tournament_id "
            "GROUP BY t.athlete_id) AS sub";
        std::string own_count =
            "(SELECT COUNT(*) FROM medal m2 "
            "JOIN format f2 ON m2.format_id = f2.format_id "
            "JOIN tournament t2 ON f2.tournament_id = t2.tournament_id "
            "JOIN athlete a2 ON t2.athlete_id = a2.athlete_id "
            "WHERE a2.name = '" + slot("athlete") + "')";
        switch (sk) {
            case 0: return "SELECT COUNT(*) FROM " + per_athlete + " WHERE sub.medal_count > " + own_count;
            case 1: return "SELECT COUNT(*) FROM athlete";
            case 2: return "SELECT COUNT(*) FROM " + per_athlete + " WHERE sub.cnt > " + own_count;
            default: return "SELECT COUNT(*) FROM " + per_athlete + " WHERE sub.cnt >= " + own_count;
        }
    }
    throw ConfigError("render: unknown family " + family);
}

static std::map<std::string, std::string> question_slots(const QuestionInstance& question) {
    if (!question.slot_assignment.empty()) return question.slot_assignment;
    const QuestionTemplate* tmpl = find_template(question.template_id);
    if (!tmpl) throw ConfigError("unknown template: " + question.template_id);
    auto slots = extract_slots(tmpl->nlq_pattern, question.nlq);
    if (!slots) throw ConfigError("question text does not match template " + tmpl->id);
    return *slots;
}

static std::string node_role(const DecisionNode& n) {
    return n.node_id.substr(n.node_id.find('/') + 1);
}

std::string render_sql(const PolicyParams& params,
                       const std::vector<std::pair<size_t, int>>& trace,
                       const QuestionInstance& question) {
    const auto& family_nodes = params.registry->family_nodes(question.template_id);
    std::map<std::string, int> choice_by_role;
    for (const auto& [ni, choice] : trace)
        choice_by_role[node_role(params.registry->node(ni))] = choice;
    if (choice_by_role.size() != family_nodes.size())
        throw ConfigError("render: incomplete trace for family " + question.template_id);
    return render_family(question.template_id, choice_by_role, question_slots(question));
}

Completion complete_from_choices(const PolicyParams& params, const QuestionInstance& question,
                                 const std::vector<int>& choices) {
    const auto& family_nodes = params.registry->family_nodes(question.template_id);
    if (choices.size() != family_nodes.size())
        throw ConfigError("choice vector arity mismatch for family " + question.template_id);
    Completion c;
    for (size_t i = 0; i < family_nodes.size(); ++i) {
        size_t ni = family_nodes[i];
        int ch = choices[i];
        auto probs = params.node_probs(ni);
        c.trace.emplace_back(ni, ch);
        c.logprob += std::log(probs[ch]);
    }
    c.sql = render_sql(params, c.trace, question);
    return c;
}

static int sample_categorical(const std::vector<double>& probs, Rng& rng) {
    double u = rng.next_double();
    double acc = 0;
    for (size_t i = 0; i + 1 < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size() - 1);
}

std::vector<Completion> sample_group(const PolicyParams& params,
                                     const QuestionInstance& question, int k, Rng& rng,
                                     DecodeMode mode) {
    if (k < 2) throw ConfigError("sample_group requires k >= 2");
    const auto& family_nodes = params.registry->family_nodes(question.template_id);
    std::vector<Completion> out;

    if (mode == DecodeMode::TopK) {
        // enumerate all traces of this family; action spaces are tiny
        std::vector<std::vector<int>> all{{}};
        for (size_t ni : family_nodes) {
            std::vector<std::vector<int>> next;
            int arity = static_cast<int>(params.registry->node(ni).choices.size());
            for (const auto& prefix : all)
                for (int c = 0; c < arity; ++c) {
                    auto ext = prefix;
                    ext.push_back(c);
                    next.push_back(std::move(ext));
                }
            all = std::move(next);
        }
        std::vector<Completion> ranked;
        for (const auto& choices : all)
            ranked.push_back(complete_from_choices(params, question, choices));
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const Completion& a, const Completion& b) {
                             return a.logprob > b.logprob;
                         });
        for (int i = 0; i < k; ++i) out.push_back(ranked[i % ranked.size()]);
        return out;
    }
    if (mode == DecodeMode::Greedy) {
        Completion g = greedy_completion(params, question);
        for (int i = 0; i < k; ++i) out.push_back(g);
        return out;
    }
    for (int i = 0; i < k; ++i) {
        std::vector<int> choices;
        for (size_t ni : family_nodes)
            choices.push_back(sample_categorical(params.node_probs(ni), rng));
        out.push_back(complete_from_choices(params, question, choices));
    }
    return out;
}

Completion greedy_completion(const PolicyParams& params, const QuestionInstance& question) {
    const auto& family_nodes = params.registry->family_nodes(question.template_id);
    std::vector<int> choices;
    for (size_t ni : family_nodes) {
        const auto& lg = params.logits[ni];
        int best = 0;
        for (size_t c = 1; c < lg.size(); ++c)
            if (lg[c] > lg[best]) best = static_cast<int>(c);
        choices.push_back(best);
    }
    return complete_from_choices(params, question, choices);
}

Grad logprob_grad(const PolicyParams& params, const Completion& completion) {
    Grad g = zero_like(params.logits);
    for (const auto& [ni, choice] : completion.trace) {
        if (ni >= params.logits.size() ||
            choice >= static_cast<int>(params.logits[ni].size()))
            throw ConfigError("trace does not match parameter shape");
        auto probs = params.node_probs(ni);
        for (size_t c = 0; c < probs.size(); ++c) g[ni][c] = -probs[c];
        g[ni][choice] += 1.0;
    }
    return g;
}

double kl_divergence(const PolicyParams& params, const ReferencePolicy& ref) {
    if (params.logits.size() != ref.params.logits.size())
        throw ConfigError("kl: node structure mismatch");
    double kl = 0;
    for (size_t ni = 0; ni < params.logits.size(); ++ni) {
        auto p = params.node_probs(ni);
        auto q = ref.params.node_probs(ni);
        if (p.size() != q.size()) throw ConfigError("kl: node arity mismatch");
        for (size_t c = 0; c < p.size(); ++c)
            kl += p[c] * (std::log(p[c]) - std::log(q[c]));
    }
    return kl;
}

Grad kl_grad(const PolicyParams& params, const ReferencePolicy& ref) {
    if (params.logits.size() != ref.params.logits.size())
        throw ConfigError("kl: node structure mismatch");
    Grad g = zero_like(params.logits);
    for (size_t ni = 0; ni < params.logits.size(); ++ni) {
        auto p = params.node_probs(ni);
        auto q = ref.params.node_probs(ni);
        double node_kl = 0;
        for (size_t c = 0; c < p.size(); ++c)
            node_kl += p[c] * (std::log(p[c]) - std::log(q[c]));
        for (size_t c = 0; c < p.size(); ++c)
            g[ni][c] = p[c] * ((std::log(p[c]) - std::log(q[c])) - node_kl);
    }
    return g;
}

} // namespace sqlrl
