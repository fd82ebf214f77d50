#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "sqlrl/corpus.hpp"
#include "sqlrl/sandbox.hpp"

using namespace sqlrl;

namespace {

// small hand-populated athlete database used across the fixture suite
DatabaseInstance make_fixture() {
    TableRows rows;
    rows["athlete"] = {{Value{int64_t{1}}, Value{std::string{"Alice Strong"}}},
                       {Value{int64_t{2}}, Value{std::string{"Bob Swift"}}}};
    rows["personalinformation"] = {
        {Value{int64_t{1}}, Value{int64_t{1970}}, Value{std::string{"Oslo"}}, Value{int64_t{180}}},
        {Value{int64_t{2}}, Value{int64_t{1985}}, Value{std::string{"Cairo"}}, Value{int64_t{175}}}};
    rows["tournament"] = {
        {Value{int64_t{1}}, Value{int64_t{1}}, Value{std::string{"Summer Open"}},
         Value{std::string{"International"}}},
        {Value{int64_t{2}}, Value{int64_t{2}}, Value{std::string{"Masters"}},
         Value{std::string{"National"}}}};
    rows["format"] = {{Value{int64_t{1}}, Value{int64_t{1}}, Value{std::string{"Individual"}}},
                      {Value{int64_t{2}}, Value{int64_t{2}}, Value{std::string{"Team"}}}};
    rows["medal"] = {
        {Value{int64_t{1}}, Value{int64_t{1}}, Value{int64_t{1991}},
         Value{std::string{"Milan"}}, Value{std::string{"gold"}}},
        {Value{int64_t{2}}, Value{int64_t{1}}, Value{int64_t{2000}},
         Value{std::string{"Cairo"}}, Value{std::string{"silver"}}},
        {Value{int64_t{3}}, Value{int64_t{2}}, Value{int64_t{2005}},
         Value{std::string{"Milan"}}, Value{std::string{"gold"}}}};
    return DatabaseInstance("fixture", generate_schema(), std::move(rows));
}

CanonicalAnswer canon_of(const DatabaseInstance& db, const std::string& sql) {
    auto r = canonicalize(execute(db, sql));
    REQUIRE(std::holds_alternative<CanonicalAnswer>(r));
    return std::get<CanonicalAnswer>(r);
}

} // namespace

TEST_CASE("load athlete dump round trip") {
    auto db = make_fixture();
    std::string dir = std::filesystem::temp_directory_path() / "sqlrl_sandbox_t1";
    std::filesystem::create_directories(dir);
    db.save(dir);

    for (const std::string ext : {".sql", ".sqlite"}) {
        auto loaded = DatabaseInstance::load(dir + "/db_fixture" + ext);
        CHECK(loaded.id() == "fixture");
        std::vector<std::string> names;
        for (const auto& t : loaded.schema().tables) names.push_back(t.name);
        std::sort(names.begin(), names.end());
        CHECK(names == std::vector<std::string>{"athlete", "format", "medal",
                                                "personalinformation", "tournament"});
        CHECK(loaded.to_sql_dump() == db.to_sql_dump());
    }
}

TEST_CASE("empty dump loads with zero rows") {
    DatabaseInstance db("empty", generate_schema(), {});
    std::string dir = std::filesystem::temp_directory_path() / "sqlrl_sandbox_t2";
    std::filesystem::create_directories(dir);
    db.save(dir);
    auto loaded = DatabaseInstance::load(dir + "/db_empty.sql");
    for (const auto& [table, rows] : loaded.rows()) CHECK(rows.empty());
}

TEST_CASE("dangling foreign key rejected") {
    auto rows = make_fixture().rows();
    rows["medal"].push_back({Value{int64_t{4}}, Value{int64_t{99}}, Value{int64_t{2001}},
                             Value{std::string{"Oslo"}}, Value{std::string{"bronze"}}});
    CHECK_THROWS_AS(DatabaseInstance("bad", generate_schema(), std::move(rows)),
                    IntegrityError);
}

TEST_CASE("type and arity mismatches rejected") {
    auto rows = make_fixture().rows();
    SUBCASE("arity") {
        rows["athlete"].push_back({Value{int64_t{3}}});
        CHECK_THROWS_AS(DatabaseInstance("bad", generate_schema(), std::move(rows)),
                        IntegrityError);
    }
    SUBCASE("type") {
        rows["athlete"].push_back({Value{std::string{"three"}}, Value{std::string{"X"}}});
        CHECK_THROWS_AS(DatabaseInstance("bad", generate_schema(), std::move(rows)),
                        IntegrityError);
    }
}

TEST_CASE("execute constant query") {
    auto db = make_fixture();
    auto out = execute(db, "SELECT 1");
    auto& rs = std::get<ResultSet>(out);
    REQUIRE(rs.rows.size() == 1);
    CHECK(std::get<int64_t>(rs.rows[0][0]) == 1);
}

TEST_CASE("unknown column error mentions the column") {
    auto db = make_fixture();
    auto out = execute(db, "SELECT m.medal_count FROM medal m");
    auto& err = std::get<EngineError>(out);
    CHECK(err.message.find("medal_count") != std::string::npos);
}

TEST_CASE("write and DDL statements rejected before execution") {
    auto db = make_fixture();
    std::string before = db.to_sql_dump();
    for (const std::string sql :
         {"INSERT INTO athlete VALUES (9, 'Eve')", "DELETE FROM medal", "DROP TABLE medal",
          "UPDATE athlete SET name = 'x'", "CREATE TABLE t (x INTEGER)", ""}) {
        auto out = execute(db, sql);
        CHECK(std::holds_alternative<EngineError>(out));
    }
    CHECK(execute(db, "SELECT 1; DELETE FROM medal").index() == 0); // multi-statement
    CHECK(db.to_sql_dump() == before);
}

TEST_CASE("timeout yields tagged engine error and leaves db intact") {
    auto db = make_fixture();
    std::string before = db.to_sql_dump();
    auto out = execute(db,
                       "WITH RECURSIVE c(x) AS (SELECT 1 UNION ALL SELECT x+1 FROM c) "
                       "SELECT COUNT(*) FROM c",
                       std::chrono::milliseconds(50));
    auto& err = std::get<EngineError>(out);
    CHECK(err.timeout);
    CHECK(err.message.find("timeout") != std::string::npos);
    CHECK(db.to_sql_dump() == before);
}

TEST_CASE("execute never mutates, including across erroring calls") {
    auto db = make_fixture();
    std::string before = db.to_sql_dump();
    execute(db, "SELECT * FROM medal");
    execute(db, "SELECT nope FROM medal");
    execute(db, "DELETE FROM athlete");
    CHECK(db.to_sql_dump() == before);
}

TEST_CASE("canonicalize flattens, trims, and unifies numerics") {
    ResultSet rs;
    rs.rows = {{Value{std::string{"  Milan "}}}, {Value{std::string{"Cairo"}}}};
    auto c = std::get<CanonicalAnswer>(canonicalize(ExecutionOutcome{rs}));
    CHECK(c == CanonicalAnswer::from_values({Value{std::string{"Milan"}},
                                             Value{std::string{"Cairo"}}}));

    ResultSet nums;
    nums.rows = {{Value{3.0}, Value{int64_t{3}}}};
    auto cn = std::get<CanonicalAnswer>(canonicalize(ExecutionOutcome{nums}));
    CHECK(cn == CanonicalAnswer::from_values({Value{int64_t{3}}, Value{int64_t{3}}}));
}

TEST_CASE("canonicalize empty result set") {
    auto c = std::get<CanonicalAnswer>(canonicalize(ExecutionOutcome{ResultSet{}}));
    CHECK(c.empty());
}

TEST_CASE("real equality under relative tolerance") {
    ResultSet rs;
    rs.rows = {{Value{1.3333333}}};
    auto c = std::get<CanonicalAnswer>(canonicalize(ExecutionOutcome{rs}));
    CHECK(c == CanonicalAnswer::from_values({Value{4.0 / 3.0}}));
    CHECK_FALSE(c == CanonicalAnswer::from_values({Value{1.34}}));
}

TEST_CASE("canonicalize is idempotent") {
    ResultSet rs;
    rs.rows = {{Value{3.0}, Value{std::string{" x "}}}, {Value{std::monostate{}}}};
    auto once = std::get<CanonicalAnswer>(canonicalize(ExecutionOutcome{rs}));
    ResultSet again;
    for (const auto& v : once.values) again.rows.push_back({v});
    auto twice = std::get<CanonicalAnswer>(canonicalize(ExecutionOutcome{again}));
    CHECK(once == twice);
}

TEST_CASE("canonical answers are order-insensitive") {
    auto db = make_fixture();
    auto a = canon_of(db, "SELECT m.city FROM medal m ORDER BY m.year ASC");
    auto b = canon_of(db, "SELECT m.city FROM medal m ORDER BY m.year DESC");
    CHECK(a == b);
}

TEST_CASE("engine error passes through canonicalize") {
    auto r = canonicalize(ExecutionOutcome{EngineError{"boom"}});
    CHECK(std::get<EngineError>(r).message == "boom");
}

// Independent row-by-row oracle for the fixture suite: each expected value
// is computed directly from the fixture's in-memory rows, never through the
// engine.
TEST_CASE("fixture queries agree with brute-force row evaluation") {
    auto db = make_fixture();
    const auto& medal = db.rows().at("medal");
    const auto& fmt = db.rows().at("format");
    const auto& tour = db.rows().at("tournament");
    const auto& ath = db.rows().at("athlete");

    auto athlete_of_medal = [&](const std::vector<Value>& m) {
        int64_t fid = std::get<int64_t>(m[1]);
        for (const auto& f : fmt)
            if (std::get<int64_t>(f[0]) == fid) {
                int64_t tid = std::get<int64_t>(f[1]);
                for (const auto& t : tour)
                    if (std::get<int64_t>(t[0]) == tid) {
                        int64_t aid = std::get<int64_t>(t[1]);
                        for (const auto& a : ath)
                            if (std::get<int64_t>(a[0]) == aid)
                                return std::get<std::string>(a[1]);
                    }
            }
        return std::string{};
    };

    SUBCASE("count per athlete") {
        int64_t expected = 0;
        for (const auto& m : medal)
            if (athlete_of_medal(m) == "Alice Strong") ++expected;
        auto got = canon_of(db,
                            "SELECT COUNT(*) FROM medal m "
                            "JOIN format f ON m.format_id = f.format_id "
                            "JOIN tournament t ON f.tournament_id = t.tournament_id "
                            "JOIN athlete a ON t.athlete_id = a.athlete_id "
                            "WHERE a.name = 'Alice Strong'");
        CHECK(got == CanonicalAnswer::from_values({Value{expected}}));
    }
    SUBCASE("year span") {
        int64_t lo = 9999, hi = 0;
        for (const auto& m : medal)
            if (athlete_of_medal(m) == "Alice Strong") {
                lo = std::min(lo, std::get<int64_t>(m[2]));
                hi = std::max(hi, std::get<int64_t>(m[2]));
            }
        auto got = canon_of(db,
                            "SELECT MAX(m.year) - MIN(m.year) FROM medal m "
                            "JOIN format f ON m.format_id = f.format_id "
                            "JOIN tournament t ON f.tournament_id = t.tournament_id "
                            "JOIN athlete a ON t.athlete_id = a.athlete_id "
                            "WHERE a.name = 'Alice Strong'");
        CHECK(got == CanonicalAnswer::from_values({Value{hi - lo}}));
        CHECK(hi - lo == 9);
    }
    SUBCASE("distinct cities") {
        std::vector<Value> cities;
        for (const auto& m : medal) {
            Value c = m[3];
            bool seen = false;
            for (const auto& e : cities)
                if (value_equal(e, c)) seen = true;
            if (!seen) cities.push_back(c);
        }
        auto got = canon_of(db, "SELECT DISTINCT m.city FROM medal m");
        CHECK(got == CanonicalAnswer::from_values(std::move(cities)));
    }
    SUBCASE("average medals per year") {
        // group medal rows by year by hand
        std::map<int64_t, int64_t> per_year;
        for (const auto& m : medal)
            if (athlete_of_medal(m) == "Alice Strong") ++per_year[std::get<int64_t>(m[2])];
        double sum = 0;
        for (const auto& [y, c] : per_year) sum += static_cast<double>(c);
        double expected = sum / static_cast<double>(per_year.size());
        auto got = canon_of(db,
                            "SELECT AVG(cnt) FROM (SELECT m.year, COUNT(*) AS cnt FROM medal m "
                            "JOIN format f ON m.format_id = f.format_id "
                            "JOIN tournament t ON f.tournament_id = t.tournament_id "
                            "JOIN athlete a ON t.athlete_id = a.athlete_id "
                            "WHERE a.name = 'Alice Strong' GROUP BY m.year) AS sub");
        CHECK(got == CanonicalAnswer::from_values({Value{expected}}));
    }
}

TEST_CASE("malformed dump rejected") {
    std::string dir = std::filesystem::temp_directory_path() / "sqlrl_sandbox_t3";
    std::filesystem::create_directories(dir);
    std::ofstream(dir + "/db_bad.sql") << "GARBAGE STATEMENT;\n";
    CHECK_THROWS_AS(DatabaseInstance::load(dir + "/db_bad.sql"), LoadError);
    CHECK_THROWS_AS(DatabaseInstance::load(dir + "/db_missing.sql"), LoadError);
}
