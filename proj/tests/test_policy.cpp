#include <doctest.h>

#include <cmath>

#include "sqlrl/policy.hpp"

using namespace sqlrl;

namespace {

std::shared_ptr<const NodeRegistry> toy_registry(std::vector<int> arities) {
    std::vector<DecisionNode> nodes;
    for (size_t i = 0; i < arities.size(); ++i) {
        std::vector<std::string> choices;
        for (int c = 0; c < arities[i]; ++c) choices.push_back("opt" + std::to_string(c));
        nodes.push_back({"toy/n" + std::to_string(i), "toy", std::move(choices)});
    }
    return std::make_shared<const NodeRegistry>(std::move(nodes));
}

PolicyParams random_params(std::shared_ptr<const NodeRegistry> reg, Rng& rng) {
    PolicyParams p = PolicyParams::uniform(std::move(reg));
    for (auto& row : p.logits)
        for (auto& v : row) v = rng.next_double() * 4.0 - 2.0;
    return p;
}

// recompute a completion's logprob from its trace only
double logprob_of(const PolicyParams& p, const std::vector<std::pair<size_t, int>>& trace) {
    double lp = 0;
    for (const auto& [ni, ch] : trace) lp += std::log(p.node_probs(ni)[ch]);
    return lp;
}

Completion trace_completion(std::vector<std::pair<size_t, int>> trace) {
    Completion c;
    c.trace = std::move(trace);
    return c;
}

QuestionInstance sample_question(const std::string& template_id, const DatabaseInstance& db,
                                 uint64_t seed) {
    Rng rng(seed);
    auto q = instantiate_question(*find_template(template_id), db, rng);
    REQUIRE(q.has_value());
    return *q;
}

} // namespace

TEST_CASE("node probabilities normalize") {
    Rng rng(1);
    auto p = random_params(toy_registry({4, 3, 2}), rng);
    for (size_t ni = 0; ni < p.logits.size(); ++ni) {
        auto probs = p.node_probs(ni);
        double sum = 0;
        for (double v : probs) {
            CHECK(v > 0);
            CHECK(v < 1);
            sum += v;
        }
        CHECK(std::fabs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("softmax is shift invariant") {
    Rng rng(2);
    auto p = random_params(toy_registry({5}), rng);
    auto before = p.node_probs(0);
    for (auto& v : p.logits[0]) v += 7.25;
    auto after = p.node_probs(0);
    for (size_t i = 0; i < before.size(); ++i)
        CHECK(after[i] == doctest::Approx(before[i]).epsilon(1e-12));
}

TEST_CASE("sampling is deterministic per seed and matches logprob recomputation") {
    auto db = generate_database(5, 8, "d");
    auto q = sample_question("count_medals", db, 4);
    auto params = PolicyParams::uniform(NodeRegistry::standard());

    Rng r1(42), r2(42);
    auto g1 = sample_group(params, q, 4, r1);
    auto g2 = sample_group(params, q, 4, r2);
    REQUIRE(g1.size() == 4);
    for (size_t i = 0; i < g1.size(); ++i) {
        CHECK(g1[i].sql == g2[i].sql);
        CHECK(g1[i].trace == g2[i].trace);
        CHECK(g1[i].logprob == doctest::Approx(logprob_of(params, g1[i].trace)).epsilon(1e-12));
        // trace re-renders to the same bytes
        CHECK(render_sql(params, g1[i].trace, q) == g1[i].sql);
    }
    CHECK_THROWS_AS(sample_group(params, q, 1, r1), ConfigError);
}

TEST_CASE("uniform logits give uniform choice frequencies") {
    auto db = generate_database(5, 8, "d");
    auto q = sample_question("count_medals", db, 4); // single node, 4 choices
    auto params = PolicyParams::uniform(NodeRegistry::standard());
    Rng rng(7);
    std::vector<int> counts(4, 0);
    const int n = 10000;
    auto group = sample_group(params, q, n, rng);
    for (const auto& c : group) counts[c.trace[0].second] += 1;
    // binomial 3 sigma around n/4
    double sigma = std::sqrt(n * 0.25 * 0.75);
    for (int c : counts) CHECK(std::fabs(c - n / 4.0) <= 3 * sigma);
}

TEST_CASE("logprob gradient: symmetric two-choice node") {
    auto p = PolicyParams::uniform(toy_registry({2}));
    auto g = logprob_grad(p, trace_completion({{0, 0}}));
    CHECK(g[0][0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(g[0][1] == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("logprob gradient rows sum to zero") {
    Rng rng(3);
    auto p = random_params(toy_registry({4, 3, 5}), rng);
    auto g = logprob_grad(p, trace_completion({{0, 2}, {1, 0}, {2, 4}}));
    for (const auto& row : g) {
        double s = 0;
        for (double v : row) s += v;
        CHECK(std::fabs(s) <= 1e-12);
    }
}

TEST_CASE("logprob gradient matches finite differences") {
    Rng rng(11);
    const double h = 1e-5;
    for (int trial = 0; trial < 20; ++trial) {
        auto reg = toy_registry({static_cast<int>(rng.next_int(2, 6)),
                                 static_cast<int>(rng.next_int(2, 6)),
                                 static_cast<int>(rng.next_int(2, 6))});
        auto p = random_params(reg, rng);
        std::vector<std::pair<size_t, int>> trace;
        for (size_t ni = 0; ni < 3; ++ni)
            trace.emplace_back(ni, static_cast<int>(rng.next_below(p.logits[ni].size())));
        auto analytic = logprob_grad(p, trace_completion(trace));
        for (size_t ni = 0; ni < p.logits.size(); ++ni)
            for (size_t c = 0; c < p.logits[ni].size(); ++c) {
                auto plus = p, minus = p;
                plus.logits[ni][c] += h;
                minus.logits[ni][c] -= h;
                double fd = (logprob_of(plus, trace) - logprob_of(minus, trace)) / (2 * h);
                double denom = std::max(1e-8, std::fabs(fd));
                CHECK(std::fabs(analytic[ni][c] - fd) / denom <= 1e-4);
            }
    }
}

TEST_CASE("kl is zero at the reference and nonnegative elsewhere") {
    Rng rng(17);
    auto reg = toy_registry({3, 4, 2});
    auto p = random_params(reg, rng);
    auto ref = ReferencePolicy::snapshot(p);
    CHECK(kl_divergence(p, ref) == 0.0);
    for (int trial = 0; trial < 1000; ++trial) {
        auto a = random_params(reg, rng);
        auto b = ReferencePolicy::snapshot(random_params(reg, rng));
        CHECK(kl_divergence(a, b) >= 0.0);
    }
}

TEST_CASE("factorized kl equals exhaustive trace enumeration on a 3-node grammar") {
    Rng rng(23);
    auto reg = toy_registry({3, 2, 4});
    auto p = random_params(reg, rng);
    auto q = ReferencePolicy::snapshot(random_params(reg, rng));

    double enumerated = 0;
    auto pp0 = p.node_probs(0), pp1 = p.node_probs(1), pp2 = p.node_probs(2);
    auto qp0 = q.params.node_probs(0), qp1 = q.params.node_probs(1), qp2 = q.params.node_probs(2);
    for (size_t a = 0; a < pp0.size(); ++a)
        for (size_t b = 0; b < pp1.size(); ++b)
            for (size_t c = 0; c < pp2.size(); ++c) {
                double pj = pp0[a] * pp1[b] * pp2[c];
                double qj = qp0[a] * qp1[b] * qp2[c];
                enumerated += pj * std::log(pj / qj);
            }
    CHECK(std::fabs(kl_divergence(p, q) - enumerated) <= 1e-10);
}

TEST_CASE("kl gradient matches finite differences") {
    Rng rng(29);
    const double h = 1e-5;
    for (int trial = 0; trial < 20; ++trial) {
        auto reg = toy_registry({3, 4});
        auto p = random_params(reg, rng);
        auto ref = ReferencePolicy::snapshot(random_params(reg, rng));
        auto analytic = kl_grad(p, ref);
        for (size_t ni = 0; ni < p.logits.size(); ++ni)
            for (size_t c = 0; c < p.logits[ni].size(); ++c) {
                auto plus = p, minus = p;
                plus.logits[ni][c] += h;
                minus.logits[ni][c] -= h;
                double fd = (kl_divergence(plus, ref) - kl_divergence(minus, ref)) / (2 * h);
                double denom = std::max(1e-6, std::fabs(fd));
                CHECK(std::fabs(analytic[ni][c] - fd) / denom <= 1e-4);
            }
    }
}

TEST_CASE("render covers correct, erroring, and reward-hacking sketches") {
    auto db = generate_database(5, 8, "d");
    auto params = PolicyParams::uniform(NodeRegistry::standard());

    SUBCASE("span sketch follows the expected shape") {
        auto q = sample_question("span_years", db, 4);
        auto c = complete_from_choices(params, q, {2, 1});
        CHECK(c.sql.find("MAX(m.year) - MIN(m.year)") != std::string::npos);
        CHECK(c.sql.find(q.slot_assignment.at("athlete")) != std::string::npos);
        auto out = canonicalize(execute(db, c.sql));
        CHECK(std::get<CanonicalAnswer>(out) == q.gold_answer);
    }
    SUBCASE("invalid column sketch reaches the engine and fails there") {
        auto q = sample_question("avg_medals_per_year", db, 4);
        auto c = complete_from_choices(params, q, {0});
        auto out = execute(db, c.sql);
        auto& err = std::get<EngineError>(out);
        CHECK(err.message.find("medal_count") != std::string::npos);
    }
    SUBCASE("every family renders an executing correct trace") {
        for (const auto& tmpl : template_registry()) {
            auto q = sample_question(tmpl.id, db, 9);
            const auto& fam = params.registry->family_nodes(tmpl.id);
            std::vector<int> correct(fam.size(), 1);
            correct[0] = 2; // sketch node first; aux nodes pick their second option
            auto c = complete_from_choices(params, q, correct);
            auto out = canonicalize(execute(db, c.sql));
            REQUIRE_MESSAGE(std::holds_alternative<CanonicalAnswer>(out), tmpl.id);
            CHECK_MESSAGE(std::get<CanonicalAnswer>(out) == q.gold_answer, tmpl.id);
        }
    }
    SUBCASE("rendering is deterministic") {
        auto q = sample_question("top_city", db, 4);
        auto a = complete_from_choices(params, q, {3, 0});
        auto b = complete_from_choices(params, q, {3, 0});
        CHECK(a.sql == b.sql);
    }
    SUBCASE("incomplete trace is a render error") {
        auto q = sample_question("top_city", db, 4);
        CHECK_THROWS_AS(complete_from_choices(params, q, {2}), ConfigError);
    }
}

TEST_CASE("slots are recovered from the question text when absent") {
    auto db = generate_database(5, 8, "d");
    auto q = sample_question("medals_in_year", db, 4);
    QuestionInstance stripped = q;
    stripped.slot_assignment.clear();
    stripped.gold_sql.clear();
    auto params = PolicyParams::uniform(NodeRegistry::standard());
    auto a = complete_from_choices(params, q, {2});
    auto b = complete_from_choices(params, stripped, {2});
    CHECK(a.sql == b.sql);
}

TEST_CASE("greedy decoding breaks ties toward the lowest index") {
    auto db = generate_database(5, 8, "d");
    auto q = sample_question("count_medals", db, 4);
    auto params = PolicyParams::uniform(NodeRegistry::standard());
    auto g = greedy_completion(params, q);
    CHECK(g.trace[0].second == 0);
    size_t node = params.registry->family_nodes("count_medals")[0];
    params.logits[node][2] = 1.0;
    CHECK(greedy_completion(params, q).trace[0].second == 2);
}

TEST_CASE("topk decoding returns the most probable traces in order") {
    auto db = generate_database(5, 8, "d");
    auto q = sample_question("top_city", db, 4);
    auto params = PolicyParams::uniform(NodeRegistry::standard());
    auto fam = params.registry->family_nodes("top_city");
    params.logits[fam[0]] = {0.0, 0.1, 2.0, 0.2};
    params.logits[fam[1]] = {0.0, 1.0};
    Rng rng(1);
    auto top = sample_group(params, q, 3, rng, DecodeMode::TopK);
    REQUIRE(top.size() == 3);
    CHECK(top[0].trace[0].second == 2);
    CHECK(top[0].trace[1].second == 1);
    CHECK(top[0].logprob >= top[1].logprob);
    CHECK(top[1].logprob >= top[2].logprob);
}

TEST_CASE("checkpoint round trip is lossless") {
    Rng rng(31);
    auto p = random_params(toy_registry({3, 2}), rng);
    p.version = "v1";
    auto j = p.to_json();
    auto back = PolicyParams::from_json(nlohmann::json::parse(j.dump()));
    CHECK(back.version == p.version);
    CHECK(back.logits == p.logits);
    CHECK(back.registry->size() == p.registry->size());

    auto bad = j;
    bad["logits"][0] = std::vector<double>{0.0};
    CHECK_THROWS_AS(PolicyParams::from_json(bad), ConfigError);
}

TEST_CASE("unregistered family is a configuration error") {
    auto params = PolicyParams::uniform(toy_registry({2}));
    QuestionInstance q;
    q.template_id = "count_medals";
    Rng rng(1);
    CHECK_THROWS_AS(sample_group(params, q, 2, rng), ConfigError);
}
