#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sqlrl/rng.hpp"
#include "sqlrl/sandbox.hpp"

namespace sqlrl {

enum class Difficulty { Easy, Medium, Hard };

std::string difficulty_name(Difficulty d);
Difficulty difficulty_from_name(const std::string& s);

struct QuestionTemplate {
    std::string id;
    Difficulty difficulty;
    std::string nlq_pattern;      // literal text with {slot} placeholders
    std::string gold_sql_pattern; // same placeholders
    std::vector<std::string> slots;
};

// the fixed inventory; ids double as policy family keys
const std::vector<QuestionTemplate>& template_registry();
const QuestionTemplate* find_template(const std::string& id);

std::string fill_slots(const std::string& pattern,
                       const std::map<std::string, std::string>& assignment);

// inverse of fill_slots for a known pattern; nullopt when the text
// does not match the pattern's literal segments
std::optional<std::map<std::string, std::string>> extract_slots(
    const std::string& pattern, const std::string& text);

struct QuestionInstance {
    std::string id;
    std::string nlq;
    Difficulty difficulty = Difficulty::Easy;
    std::string db_id;
    CanonicalAnswer gold_answer;
    std::string gold_sql; // empty unless loaded with oracle access
    std::string template_id;
    std::map<std::string, std::string> slot_assignment;
};

// the 5-table athlete schema with the medal→format→tournament→athlete
// and personalinformation→athlete foreign-key chains
SchemaDescription generate_schema();

DatabaseInstance generate_database(uint64_t seed, int n_athletes, const std::string& db_id);

// random subset of medal rows gets year shifts and/or medal type swaps;
// integrity and the age-at-medal bounds are preserved
DatabaseInstance perturb_counterfactual(const DatabaseInstance& db, uint64_t seed,
                                        const std::string& new_id);

// instantiates template slots against db contents and computes the gold
// denotation by execution; nullopt when slots cannot be satisfied
std::optional<QuestionInstance> instantiate_question(const QuestionTemplate& tmpl,
                                                     const DatabaseInstance& db, Rng& rng);

struct SplitSizes {
    int train = 300;
    int dev = 60;
    int test_original = 100;
    int test_counterfactual = 100;
    int test_easy = 60;
    int test_medium = 60;
    int test_hard = 60;

    static SplitSizes paper_scale() { return {2961, 282, 578, 699, 732, 507, 719}; }
};

inline const std::vector<std::string> kSplitNames = {
    "train", "dev", "test_original", "test_counterfactual",
    "test_easy", "test_medium", "test_hard"};

struct CorpusConfig {
    uint64_t seed = 7;
    SplitSizes sizes;
    bool with_oracle = false;
    int n_databases = 8;
    int athletes_per_db = 12;
    std::string out_dir;
};

struct CorpusManifest {
    uint64_t seed = 0;
    SplitSizes sizes;
    std::map<std::string, int> template_census;                  // template id -> count
    std::map<std::string, std::map<std::string, int>> difficulty; // split -> tier -> count

    nlohmann::json to_json() const;
    static CorpusManifest from_json(const nlohmann::json& j);
};

CorpusManifest build_corpus(const CorpusConfig& config);

// reads <dir>/<split>.jsonl; gold_sql is stripped unless with_oracle
std::vector<QuestionInstance> load_split(const std::string& dir, const std::string& split,
                                         bool with_oracle = false);

// loads db_<id>.sql from <dir>/db
DatabaseInstance load_corpus_database(const std::string& dir, const std::string& db_id);

} // namespace sqlrl
