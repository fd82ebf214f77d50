#include "sqlrl/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace sqlrl {

namespace fs = std::filesystem;

std::string difficulty_name(Difficulty d) {
    switch (d) {
        case Difficulty::Easy: return "easy";
        case Difficulty::Medium: return "medium";
        case Difficulty::Hard: return "hard";
    }
    return "easy";
}

Difficulty difficulty_from_name(const std::string& s) {
    if (s == "easy") return Difficulty::Easy;
    if (s == "medium") return Difficulty::Medium;
    if (s == "hard") return Difficulty::Hard;
    throw ConfigError("unknown difficulty: " + s);
}

// shared join chain from medal up to athlete
static const char* kChain =
    "FROM medal m "
    "JOIN format f ON m.format_id = f.format_id "
    "JOIN tournament t ON f.tournament_id = t.tournament_id "
    "JOIN athlete a ON t.athlete_id = a.athlete_id";

const std::vector<QuestionTemplate>& template_registry() {
    static const std::vector<QuestionTemplate> reg = [] {
        std::vector<QuestionTemplate> v;
        auto chain = std::string(kChain);
        v.push_back({"count_medals", Difficulty::Easy,
                     "How many medals did {athlete} win?",
                     "SELECT COUNT(*) " + chain + " WHERE a.name = '{athlete}'",
                     {"athlete"}});
        v.push_back({"list_cities", Difficulty::Easy,
                     "List all the distinct cities where {athlete} won medals.",
                     "SELECT DISTINCT m.city " + chain + " WHERE a.name = '{athlete}'",
                     {"athlete"}});
        v.push_back({"count_medal_type", Difficulty::Easy,
                     "How many {medal_type} medals did {athlete} win?",
                     "SELECT COUNT(*) " + chain +
                         " WHERE a.name = '{athlete}' AND m.medal_type = '{medal_type}'",
                     {"athlete", "medal_type"}});
        v.push_back({"medals_in_year", Difficulty::Easy,
                     "How many medals did {athlete} win in the year {year}?",
                     "SELECT COUNT(*) " + chain +
                         " WHERE a.name = '{athlete}' AND m.year = {year}",
                     {"athlete", "year"}});
        v.push_back({"cities_after_year", Difficulty::Medium,
                     "List all the distinct cities where {athlete} won medals in tournaments "
                     "held after the year {year}.",
                     "SELECT DISTINCT m.city " + chain +
                         " WHERE a.name = '{athlete}' AND m.year > {year}",
                     {"athlete", "year"}});
        v.push_back({"span_years", Difficulty::Medium,
                     "How many years passed between {athlete}'s first and most recent medal?",
                     "SELECT MAX(m.year) - MIN(m.year) " + chain + " WHERE a.name = '{athlete}'",
                     {"athlete"}});
        v.push_back({"count_between", Difficulty::Medium,
                     "How many medals did {athlete} win between {year} and {year2}?",
                     "SELECT COUNT(*) " + chain +
                         " WHERE a.name = '{athlete}' AND m.year >= {year} AND m.year <= {year2}",
                     {"athlete", "year", "year2"}});
        v.push_back({"count_level", Difficulty::Medium,
                     "How many medals did {athlete} win at {level} level tournaments?",
                     "SELECT COUNT(*) " + chain +
                         " WHERE a.name = '{athlete}' AND t.level = '{level}'",
                     {"athlete", "level"}});
        v.push_back({"avg_medals_per_year", Difficulty::Hard,
                     "What is the average number of medals won by {athlete} in one year?",
                     "SELECT AVG(cnt) FROM (SELECT m.year, COUNT(*) AS cnt " + chain +
                         " WHERE a.name = '{athlete}' GROUP BY m.year) AS sub",
                     {"athlete"}});
        v.push_back({"medals_in_twenties", Difficulty::Hard,
                     "How many medals did {athlete} win in their twenties?",
                     "SELECT COUNT(m.medal_id) " + chain +
                         " JOIN personalinformation p ON a.athlete_id = p.athlete_id"
                         " WHERE a.name = '{athlete}' AND m.year >= (p.birth_year + 20)"
                         " AND m.year <= (p.birth_year + 29)",
                     {"athlete"}});
        v.push_back({"top_city", Difficulty::Hard,
                     "In which city did {athlete} win the most medals?",
                     "SELECT m.city " + chain +
                         " WHERE a.name = '{athlete}' GROUP BY m.city"
                         " ORDER BY COUNT(*) DESC, m.city ASC LIMIT 1",
                     {"athlete"}});
        v.push_back({"busier_athletes", Difficulty::Hard,
                     "How many athletes won more medals than {athlete}?",
                     "SELECT COUNT(*) FROM (SELECT t.athlete_id AS aid, COUNT(*) AS cnt "
                     "FROM medal m JOIN format f ON m.format_id = f.format_id "
                     "JOIN tournament t ON f.tournament_id = t.tournament_id "
                     "GROUP BY t.athlete_id) AS sub WHERE sub.cnt > "
                     "(SELECT COUNT(*) FROM medal m2 "
                     "JOIN format f2 ON m2.format_id = f2.format_id "
                     "JOIN tournament t2 ON f2.tournament_id = t2.tournament_id "
                     "JOIN athlete a2 ON t2.athlete_id = a2.athlete_id "
                     "WHERE a2.name = '{athlete}')",
                     {"athlete"}});
        return v;
    }();
    return reg;
}

const QuestionTemplate* find_template(const std::string& id) {
    for (const auto& t : template_registry())
        if (t.id == id) return &t;
    return nullptr;
}

std::string fill_slots(const std::string& pattern,
                       const std::map<std::string, std::string>& assignment) {
    std::string out;
    size_t i = 0;
    while (i < pattern.size()) {
        if (pattern[i] == '{') {
            size_t close = pattern.find('}', i);
            if (close == std::string::npos) throw ConfigError("unbalanced slot in pattern");
            std::string slot = pattern.substr(i + 1, close - i - 1);
            auto it = assignment.find(slot);
            if (it == assignment.end()) throw ConfigError("missing slot value: " + slot);
            out += it->second;
            i = close + 1;
        } else {
            out += pattern[i++];
        }
    }
    return out;
}

std::optional<std::map<std::string, std::string>> extract_slots(const std::string& pattern,
                                                                const std::string& text) {
    std::map<std::string, std::string> out;
    size_t pi = 0, ti = 0;
    while (pi < pattern.size()) {
        if (pattern[pi] == '{') {
            size_t close = pattern.find('}', pi);
            std::string slot = pattern.substr(pi + 1, close - pi - 1);
            pi = close + 1;
            // find the next literal segment to delimit the slot value
            size_t lit_end = pattern.find('{', pi);
            std::string lit = pattern.substr(pi, lit_end == std::string::npos
                                                     ? std::string::npos
                                                     : lit_end - pi);
            size_t val_end;
            if (lit.empty()) {
                val_end = text.size();
            } else {
                val_end = text.find(lit, ti);
                if (val_end == std::string::npos) return std::nullopt;
            }
            out[slot] = text.substr(ti, val_end - ti);
            ti = val_end;
        } else {
            if (ti >= text.size() || text[ti] != pattern[pi]) return std::nullopt;
            ++pi;
            ++ti;
        }
    }
    if (ti != text.size()) return std::nullopt;
    return out;
}

// ---------------------------------------------------------------------------
// schema and database generation

SchemaDescription generate_schema() {
    SchemaDescription s;
    s.tables = {
        {"athlete",
         {{"athlete_id", ColumnType::Integer}, {"name", ColumnType::Text}}},
        {"personalinformation",
         {{"athlete_id", ColumnType::Integer},
          {"birth_year", ColumnType::Integer},
          {"birth_city", ColumnType::Text},
          {"height_cm", ColumnType::Integer}}},
        {"tournament",
         {{"tournament_id", ColumnType::Integer},
          {"athlete_id", ColumnType::Integer},
          {"name", ColumnType::Text},
          {"level", ColumnType::Text}}},
        {"format",
         {{"format_id", ColumnType::Integer},
          {"tournament_id", ColumnType::Integer},
          {"name", ColumnType::Text}}},
        {"medal",
         {{"medal_id", ColumnType::Integer},
          {"format_id", ColumnType::Integer},
          {"year", ColumnType::Integer},
          {"city", ColumnType::Text},
          {"medal_type", ColumnType::Text}}},
    };
    s.foreign_keys = {
        {"personalinformation", "athlete_id", "athlete", "athlete_id"},
        {"tournament", "athlete_id", "athlete", "athlete_id"},
        {"format", "tournament_id", "tournament", "tournament_id"},
        {"medal", "format_id", "format", "format_id"},
    };
    s.validate();
    return s;
}

namespace {

const std::vector<std::string> kFirstNames = {
    "Simon",  "Valeria", "Aron",   "Takaharu", "Charlotte", "Shevon", "Elena",
    "Marcus", "Ingrid",  "Mateo",  "Sofia",    "Henrik",    "Amara",  "Dmitri",
    "Yuki",   "Priya",   "Oscar",  "Linnea",   "Rafael",    "Mei"};

const std::vector<std::string> kLastNames = {
    "Fairweather", "Kumizaki", "Szilagyi", "Furukawa",  "Dujardin", "Lai",
    "Petrova",     "Lindqvist", "Okafor",  "Fernandez", "Novak",    "Johansson",
    "Haddad",      "Volkov",    "Tanaka",  "Sharma",    "Brandt",   "Eriksen",
    "Moreau",      "Silva",     "Kovacs",  "Nilsen",    "Duarte",   "Weiss"};

const std::vector<std::string> kCities = {
    "Milan",  "Cairo",  "Basel",  "Antalya", "Krakow", "London", "Paris", "Tokyo",
    "Sydney", "Athens", "Berlin", "Madrid",  "Oslo",   "Vienna", "Prague", "Lisbon"};

const std::vector<std::string> kTournamentNames = {
    "Olympic Games", "World Championships", "Continental Cup", "National Trials",
    "Grand Prix",    "Masters",             "Invitational",    "Summer Open"};

const std::vector<std::string> kLevels = {"International", "Continental", "National"};
const std::vector<std::string> kFormats = {"Individual", "Team", "Mixed"};
const std::vector<std::string> kMedalTypes = {"gold", "silver", "bronze"};

int64_t year_lo(int64_t birth_year) { return std::max<int64_t>(1980, birth_year + 15); }
int64_t year_hi(int64_t birth_year) { return std::min<int64_t>(2024, birth_year + 45); }

} // namespace

DatabaseInstance generate_database(uint64_t seed, int n_athletes, const std::string& db_id) {
    if (n_athletes < 1) throw ConfigError("n_athletes must be >= 1");
    Rng rng(seed);
    SchemaDescription schema = generate_schema();
    TableRows rows;

    std::set<std::pair<size_t, size_t>> used_names;
    int64_t next_tournament = 1, next_format = 1, next_medal = 1;

    for (int64_t aid = 1; aid <= n_athletes; ++aid) {
        size_t fi, li;
        do {
            fi = rng.next_below(kFirstNames.size());
            li = rng.next_below(kLastNames.size());
        } while (!used_names.insert({fi, li}).second);
        std::string name = kFirstNames[fi] + " " + kLastNames[li];
        rows["athlete"].push_back({Value{aid}, Value{name}});

        int64_t birth_year = rng.next_int(1950, 2000);
        rows["personalinformation"].push_back(
            {Value{aid}, Value{birth_year},
             Value{kCities[rng.next_below(kCities.size())]}, Value{rng.next_int(150, 205)}});

        int64_t lo = year_lo(birth_year), hi = year_hi(birth_year);
        int n_tournaments = static_cast<int>(rng.next_int(1, 3));
        for (int ti = 0; ti < n_tournaments; ++ti) {
            int64_t tid = next_tournament++;
            rows["tournament"].push_back(
                {Value{tid}, Value{aid},
                 Value{kTournamentNames[rng.next_below(kTournamentNames.size())]},
                 Value{kLevels[rng.next_below(kLevels.size())]}});
            int n_formats = static_cast<int>(rng.next_int(1, 2));
            for (int fj = 0; fj < n_formats; ++fj) {
                int64_t fid = next_format++;
                rows["format"].push_back(
                    {Value{fid}, Value{tid}, Value{kFormats[rng.next_below(kFormats.size())]}});
                int n_medals = static_cast<int>(rng.next_int(1, 3));
                for (int mi = 0; mi < n_medals; ++mi) {
                    rows["medal"].push_back(
                        {Value{next_medal++}, Value{fid}, Value{rng.next_int(lo, hi)},
                         Value{kCities[rng.next_below(kCities.size())]},
                         Value{kMedalTypes[rng.next_below(kMedalTypes.size())]}});
                }
            }
        }
    }
    return DatabaseInstance(db_id, std::move(schema), std::move(rows));
}

DatabaseInstance perturb_counterfactual(const DatabaseInstance& db, uint64_t seed,
                                        const std::string& new_id) {
    Rng rng(seed);
    TableRows rows = db.rows();

    // medal -> athlete birth_year via format -> tournament -> athlete
    std::map<int64_t, int64_t> format_to_tournament, tournament_to_athlete, athlete_birth;
    for (const auto& r : rows["format"])
        format_to_tournament[std::get<int64_t>(r[0])] = std::get<int64_t>(r[1]);
    for (const auto& r : rows["tournament"])
        tournament_to_athlete[std::get<int64_t>(r[0])] = std::get<int64_t>(r[1]);
    for (const auto& r : rows["personalinformation"])
        athlete_birth[std::get<int64_t>(r[0])] = std::get<int64_t>(r[1]);

    auto perturb_row = [&](std::vector<Value>& medal, bool force) -> bool {
        int64_t fid = std::get<int64_t>(medal[1]);
        int64_t by = athlete_birth[tournament_to_athlete[format_to_tournament[fid]]];
        int action = force ? 2 : static_cast<int>(rng.next_below(3));
        bool changed = false;
        if (action == 0 || action == 2) {
            int64_t lo = year_lo(by), hi = year_hi(by);
            int64_t year = std::get<int64_t>(medal[2]);
            int64_t delta = rng.next_int(1, 5) * (rng.next_below(2) ? 1 : -1);
            int64_t shifted = std::clamp(year + delta, lo, hi);
            if (shifted != year) {
                medal[2] = Value{shifted};
                changed = true;
            }
        }
        if (action == 1 || action == 2) {
            const std::string& cur = std::get<std::string>(medal[4]);
            std::vector<std::string> others;
            for (const auto& t : kMedalTypes)
                if (t != cur) others.push_back(t);
            medal[4] = Value{others[rng.next_below(others.size())]};
            changed = true;
        }
        return changed;
    };

    int n_changed = 0;
    for (auto& medal : rows["medal"])
        if (rng.next_double() < 0.30 && perturb_row(medal, false)) ++n_changed;
    if (n_changed == 0 && !rows["medal"].empty()) perturb_row(rows["medal"][0], true);

    return DatabaseInstance(new_id, db.schema(), std::move(rows));
}

// ---------------------------------------------------------------------------
// question instantiation

namespace {

struct AthleteView {
    std::string name;
    std::vector<int64_t> medal_years;
    std::vector<std::string> medal_types;
    std::vector<std::string> levels;
};

std::vector<AthleteView> index_athletes(const DatabaseInstance& db) {
    const auto& rows = db.rows();
    std::map<int64_t, AthleteView> by_id;
    for (const auto& r : rows.at("athlete"))
        by_id[std::get<int64_t>(r[0])].name = std::get<std::string>(r[1]);
    std::map<int64_t, int64_t> t2a, f2t;
    for (const auto& r : rows.at("tournament")) {
        int64_t tid = std::get<int64_t>(r[0]), aid = std::get<int64_t>(r[1]);
        t2a[tid] = aid;
        by_id[aid].levels.push_back(std::get<std::string>(r[3]));
    }
    for (const auto& r : rows.at("format"))
        f2t[std::get<int64_t>(r[0])] = std::get<int64_t>(r[1]);
    for (const auto& r : rows.at("medal")) {
        int64_t aid = t2a[f2t[std::get<int64_t>(r[1])]];
        by_id[aid].medal_years.push_back(std::get<int64_t>(r[2]));
        by_id[aid].medal_types.push_back(std::get<std::string>(r[4]));
    }
    std::vector<AthleteView> out;
    for (auto& [id, v] : by_id)
        if (!v.medal_years.empty()) out.push_back(std::move(v));
    return out;
}

} // namespace

std::optional<QuestionInstance> instantiate_question(const QuestionTemplate& tmpl,
                                                     const DatabaseInstance& db, Rng& rng) {
    auto athletes = index_athletes(db);
    if (athletes.empty()) return std::nullopt;
    const AthleteView& a = athletes[rng.next_below(athletes.size())];
    int64_t min_year = *std::min_element(a.medal_years.begin(), a.medal_years.end());
    int64_t max_year = *std::max_element(a.medal_years.begin(), a.medal_years.end());

    std::map<std::string, std::string> slots;
    slots["athlete"] = a.name;
    if (tmpl.id == "count_medal_type") {
        slots["medal_type"] = a.medal_types[rng.next_below(a.medal_types.size())];
    } else if (tmpl.id == "medals_in_year") {
        slots["year"] = std::to_string(a.medal_years[rng.next_below(a.medal_years.size())]);
    } else if (tmpl.id == "cities_after_year") {
        slots["year"] = std::to_string(rng.next_int(min_year - 2, max_year - 1));
    } else if (tmpl.id == "count_between") {
        int64_t y1 = rng.next_int(min_year - 1, max_year);
        int64_t y2 = rng.next_int(y1, max_year + 1);
        slots["year"] = std::to_string(y1);
        slots["year2"] = std::to_string(y2);
    } else if (tmpl.id == "count_level") {
        slots["level"] = a.levels[rng.next_below(a.levels.size())];
    }

    QuestionInstance q;
    q.nlq = fill_slots(tmpl.nlq_pattern, slots);
    q.difficulty = tmpl.difficulty;
    q.db_id = db.id();
    q.gold_sql = fill_slots(tmpl.gold_sql_pattern, slots);
    q.template_id = tmpl.id;
    q.slot_assignment = slots;

    auto result = canonicalize(execute(db, q.gold_sql));
    if (std::holds_alternative<EngineError>(result)) return std::nullopt;
    q.gold_answer = std::get<CanonicalAnswer>(result);
    if (q.gold_answer.empty()) return std::nullopt;
    return q;
}

// ---------------------------------------------------------------------------
// corpus build

nlohmann::json CorpusManifest::to_json() const {
    nlohmann::json j;
    j["seed"] = seed;
    j["sizes"] = {{"train", sizes.train},
                  {"dev", sizes.dev},
                  {"test_original", sizes.test_original},
                  {"test_counterfactual", sizes.test_counterfactual},
                  {"test_easy", sizes.test_easy},
                  {"test_medium", sizes.test_medium},
                  {"test_hard", sizes.test_hard}};
    j["template_census"] = template_census;
    j["difficulty"] = difficulty;
    return j;
}

CorpusManifest CorpusManifest::from_json(const nlohmann::json& j) {
    CorpusManifest m;
    m.seed = j.at("seed").get<uint64_t>();
    const auto& s = j.at("sizes");
    m.sizes = {s.at("train"),     s.at("dev"),         s.at("test_original"),
               s.at("test_counterfactual"), s.at("test_easy"), s.at("test_medium"),
               s.at("test_hard")};
    m.template_census = j.at("template_census").get<std::map<std::string, int>>();
    m.difficulty =
        j.at("difficulty").get<std::map<std::string, std::map<std::string, int>>>();
    return m;
}

static nlohmann::ordered_json question_to_json(const QuestionInstance& q, bool with_oracle) {
    nlohmann::ordered_json j;
    j["id"] = q.id;
    j["nlq"] = q.nlq;
    j["difficulty"] = difficulty_name(q.difficulty);
    j["db_id"] = q.db_id;
    j["gold_answer"] = q.gold_answer.to_json();
    j["template_id"] = q.template_id;
    if (with_oracle) j["gold_sql"] = q.gold_sql;
    return j;
}

CorpusManifest build_corpus(const CorpusConfig& config) {
    if (config.out_dir.empty()) throw ConfigError("corpus out_dir not set");
    fs::create_directories(config.out_dir + "/db");

    Rng rng(config.seed);

    std::vector<DatabaseInstance> originals, counterfactuals;
    for (int i = 0; i < config.n_databases; ++i) {
        std::string id = "d" + std::to_string(i);
        originals.push_back(
            generate_database(Rng::mix(config.seed, i), config.athletes_per_db, id));
        counterfactuals.push_back(perturb_counterfactual(
            originals.back(), Rng::mix(config.seed, 1000 + i), id + "_cf"));
    }
    for (const auto& db : originals) db.save(config.out_dir + "/db");
    for (const auto& db : counterfactuals) db.save(config.out_dir + "/db");

    std::vector<std::vector<const QuestionTemplate*>> by_tier(3);
    for (const auto& t : template_registry())
        by_tier[static_cast<int>(t.difficulty)].push_back(&t);

    CorpusManifest manifest;
    manifest.seed = config.seed;
    manifest.sizes = config.sizes;

    // (nlq, db_id) -> split; the same question text on the same database
    // must never leak across splits
    std::map<std::string, std::string> seen;

    auto gen_split = [&](const std::string& split, int n,
                         std::optional<Difficulty> fixed_tier, bool use_cf) {
        auto& pool = use_cf ? counterfactuals : originals;
        std::vector<QuestionInstance> out;
        std::vector<int> tier_cursor(3, 0);
        for (int qi = 0; qi < n; ++qi) {
            int tier = fixed_tier ? static_cast<int>(*fixed_tier) : qi % 3;
            bool placed = false;
            for (int tshift = 0; tshift < static_cast<int>(by_tier[tier].size()) && !placed;
                 ++tshift) {
                const QuestionTemplate* tmpl =
                    by_tier[tier][(tier_cursor[tier] + tshift) % by_tier[tier].size()];
                for (int attempt = 0; attempt < 2000 && !placed; ++attempt) {
                    const DatabaseInstance& db = pool[rng.next_below(pool.size())];
                    auto q = instantiate_question(*tmpl, db, rng);
                    if (!q) continue;
                    std::string key = q->nlq + "\x1f" + q->db_id;
                    auto it = seen.find(key);
                    if (it != seen.end() && it->second != split) continue;
                    seen.emplace(key, split);
                    char buf[16];
                    std::snprintf(buf, sizeof buf, "%06d", qi);
                    q->id = split + "_" + buf;
                    manifest.template_census[tmpl->id] += 1;
                    manifest.difficulty[split][difficulty_name(tmpl->difficulty)] += 1;
                    out.push_back(std::move(*q));
                    placed = true;
                }
            }
            if (!placed)
                throw ConfigError("could not place question " + std::to_string(qi) +
                                  " in split " + split + "; enlarge the database pool");
            tier_cursor[tier] = (tier_cursor[tier] + 1) % by_tier[tier].size();
        }
        std::ofstream f(config.out_dir + "/" + split + ".jsonl", std::ios::binary);
        for (const auto& q : out)
            f << question_to_json(q, config.with_oracle).dump() << "\n";
    };

    gen_split("train", config.sizes.train, std::nullopt, false);
    gen_split("dev", config.sizes.dev, std::nullopt, false);
    gen_split("test_original", config.sizes.test_original, std::nullopt, false);
    gen_split("test_counterfactual", config.sizes.test_counterfactual, std::nullopt, true);
    gen_split("test_easy", config.sizes.test_easy, Difficulty::Easy, false);
    gen_split("test_medium", config.sizes.test_medium, Difficulty::Medium, false);
    gen_split("test_hard", config.sizes.test_hard, Difficulty::Hard, false);

    std::ofstream mf(config.out_dir + "/manifest.json", std::ios::binary);
    mf << manifest.to_json().dump(2) << "\n";
    return manifest;
}

std::vector<QuestionInstance> load_split(const std::string& dir, const std::string& split,
                                         bool with_oracle) {
    std::ifstream f(dir + "/" + split + ".jsonl", std::ios::binary);
    if (!f) throw LoadError("missing split file: " + dir + "/" + split + ".jsonl");
    std::vector<QuestionInstance> out;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line);
        QuestionInstance q;
        q.id = j.at("id").get<std::string>();
        q.nlq = j.at("nlq").get<std::string>();
        q.difficulty = difficulty_from_name(j.at("difficulty").get<std::string>());
        q.db_id = j.at("db_id").get<std::string>();
        q.gold_answer = CanonicalAnswer::from_json(j.at("gold_answer"));
        q.template_id = j.at("template_id").get<std::string>();
        if (with_oracle && j.contains("gold_sql"))
            q.gold_sql = j.at("gold_sql").get<std::string>();
        out.push_back(std::move(q));
    }
    return out;
}

DatabaseInstance load_corpus_database(const std::string& dir, const std::string& db_id) {
    return DatabaseInstance::load(dir + "/db/db_" + db_id + ".sql");
}

} // namespace sqlrl
