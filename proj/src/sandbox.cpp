#include "sqlrl/sandbox.hpp"

#include <sqlite3.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace sqlrl {

std::string column_type_name(ColumnType t) {
    switch (t) {
        case ColumnType::Integer: return "INTEGER";
        case ColumnType::Real: return "REAL";
        case ColumnType::Text: return "TEXT";
    }
    return "TEXT";
}

ColumnType column_type_from_name(const std::string& s) {
    if (s == "INTEGER") return ColumnType::Integer;
    if (s == "REAL") return ColumnType::Real;
    if (s == "TEXT") return ColumnType::Text;
    throw LoadError("unknown column type: " + s);
}

int TableDef::column_index(const std::string& col) const {
    for (size_t i = 0; i < columns.size(); ++i)
        if (columns[i].name == col) return static_cast<int>(i);
    return -1;
}

const TableDef* SchemaDescription::find_table(const std::string& name) const {
    for (const auto& t : tables)
        if (t.name == name) return &t;
    return nullptr;
}

static bool valid_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!(std::islower(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::islower(static_cast<unsigned char>(c)) ||
              std::isdigit(static_cast<unsigned char>(c)) || c == '_'))
            return false;
    return true;
}

void SchemaDescription::validate() const {
    std::set<std::string> table_names;
    for (const auto& t : tables) {
        if (!valid_identifier(t.name))
            throw IntegrityError("invalid table name: " + t.name);
        if (!table_names.insert(t.name).second)
            throw IntegrityError("duplicate table name: " + t.name);
        std::set<std::string> col_names;
        for (const auto& c : t.columns) {
            if (!valid_identifier(c.name))
                throw IntegrityError("invalid column name: " + c.name);
            if (!col_names.insert(c.name).second)
                throw IntegrityError("duplicate column " + c.name + " in " + t.name);
        }
    }
    for (const auto& fk : foreign_keys) {
        const TableDef* child = find_table(fk.child_table);
        const TableDef* parent = find_table(fk.parent_table);
        if (!child || child->column_index(fk.child_column) < 0)
            throw IntegrityError("foreign key child missing: " + fk.child_table + "." +
                                 fk.child_column);
        if (!parent || parent->column_index(fk.parent_column) < 0)
            throw IntegrityError("foreign key parent missing: " + fk.parent_table + "." +
                                 fk.parent_column);
    }
}

// ---------------------------------------------------------------------------
// DatabaseInstance

DatabaseInstance::DatabaseInstance(std::string id, SchemaDescription schema, TableRows rows)
    : id_(std::move(id)), schema_(std::move(schema)), rows_(std::move(rows)) {
    schema_.validate();
    for (const auto& t : schema_.tables)
        rows_.try_emplace(t.name); // ensure every table has an entry
    check_integrity();
    open_and_populate();
}

DatabaseInstance::~DatabaseInstance() {
    if (db_) sqlite3_close(db_);
}

DatabaseInstance::DatabaseInstance(DatabaseInstance&& o) noexcept
    : id_(std::move(o.id_)), schema_(std::move(o.schema_)), rows_(std::move(o.rows_)),
      db_(o.db_) {
    o.db_ = nullptr;
}

DatabaseInstance& DatabaseInstance::operator=(DatabaseInstance&& o) noexcept {
    if (this != &o) {
        if (db_) sqlite3_close(db_);
        id_ = std::move(o.id_);
        schema_ = std::move(o.schema_);
        rows_ = std::move(o.rows_);
        db_ = o.db_;
        o.db_ = nullptr;
    }
    return *this;
}

DatabaseInstance DatabaseInstance::clone() const {
    return DatabaseInstance(id_, schema_, rows_);
}

void DatabaseInstance::check_integrity() const {
    for (const auto& t : schema_.tables) {
        auto it = rows_.find(t.name);
        if (it == rows_.end()) continue;
        for (const auto& row : it->second) {
            if (row.size() != t.columns.size())
                throw IntegrityError("arity mismatch in table " + t.name);
            for (size_t i = 0; i < row.size(); ++i) {
                const Value& v = row[i];
                if (is_null(v)) continue;
                switch (t.columns[i].type) {
                    case ColumnType::Integer:
                        if (!std::holds_alternative<int64_t>(v))
                            throw IntegrityError("type mismatch in " + t.name + "." +
                                                 t.columns[i].name);
                        break;
                    case ColumnType::Real:
                        if (!is_numeric(v))
                            throw IntegrityError("type mismatch in " + t.name + "." +
                                                 t.columns[i].name);
                        break;
                    case ColumnType::Text:
                        if (!std::holds_alternative<std::string>(v))
                            throw IntegrityError("type mismatch in " + t.name + "." +
                                                 t.columns[i].name);
                        break;
                }
            }
        }
    }
    for (const auto& fk : schema_.foreign_keys) {
        const TableDef* child = schema_.find_table(fk.child_table);
        const TableDef* parent = schema_.find_table(fk.parent_table);
        int ci = child->column_index(fk.child_column);
        int pi = parent->column_index(fk.parent_column);
        std::set<std::string> parent_vals;
        auto pit = rows_.find(fk.parent_table);
        if (pit != rows_.end())
            for (const auto& row : pit->second)
                parent_vals.insert(value_to_string(row[pi]));
        auto cit = rows_.find(fk.child_table);
        if (cit == rows_.end()) continue;
        for (const auto& row : cit->second) {
            if (is_null(row[ci])) continue;
            if (!parent_vals.count(value_to_string(row[ci])))
                throw IntegrityError("dangling foreign key " + fk.child_table + "." +
                                     fk.child_column + " = " + value_to_string(row[ci]));
        }
    }
}

static std::string sql_literal(const Value& v) {
    if (is_null(v)) return "NULL";
    if (auto* i = std::get_if<int64_t>(&v)) return std::to_string(*i);
    if (auto* d = std::get_if<double>(&v)) {
        std::ostringstream os;
        os.precision(17);
        os << *d;
        std::string s = os.str();
        if (s.find('.') == std::string::npos && s.find('e') == std::string::npos)
            s += ".0";
        return s;
    }
    std::string out = "'";
    for (char c : std::get<std::string>(v)) {
        if (c == '\'') out += "''";
        else out += c;
    }
    return out + "'";
}

static std::string create_table_sql(const TableDef& t, const SchemaDescription& schema) {
    std::string s = "CREATE TABLE " + t.name + " (";
    for (size_t i = 0; i < t.columns.size(); ++i) {
        if (i) s += ", ";
        s += t.columns[i].name + " " + column_type_name(t.columns[i].type);
    }
    for (const auto& fk : schema.foreign_keys) {
        if (fk.child_table != t.name) continue;
        s += ", FOREIGN KEY (" + fk.child_column + ") REFERENCES " + fk.parent_table +
             "(" + fk.parent_column + ")";
    }
    return s + ")";
}

std::string DatabaseInstance::to_sql_dump() const {
    std::string out;
    for (const auto& t : schema_.tables)
        out += create_table_sql(t, schema_) + ";\n";
    for (const auto& t : schema_.tables) {
        auto it = rows_.find(t.name);
        if (it == rows_.end()) continue;
        for (const auto& row : it->second) {
            out += "INSERT INTO " + t.name + " VALUES (";
            for (size_t i = 0; i < row.size(); ++i) {
                if (i) out += ", ";
                out += sql_literal(row[i]);
            }
            out += ");\n";
        }
    }
    return out;
}

void DatabaseInstance::open_and_populate() {
    if (sqlite3_open(":memory:", &db_) != SQLITE_OK)
        throw LoadError("cannot open in-memory database");
    char* err = nullptr;
    std::string dump = to_sql_dump();
    if (sqlite3_exec(db_, dump.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
        std::string msg = err ? err : "unknown";
        sqlite3_free(err);
        throw LoadError("populate failed: " + msg);
    }
}

void DatabaseInstance::save(const std::string& dir) const {
    std::string text_path = dir + "/db_" + id_ + ".sql";
    std::ofstream f(text_path, std::ios::binary);
    if (!f) throw LoadError("cannot write " + text_path);
    f << to_sql_dump();
    f.close();

    std::string native_path = dir + "/db_" + id_ + ".sqlite";
    std::remove(native_path.c_str());
    sqlite3* file_db = nullptr;
    if (sqlite3_open(native_path.c_str(), &file_db) != SQLITE_OK)
        throw LoadError("cannot create " + native_path);
    sqlite3_backup* bk = sqlite3_backup_init(file_db, "main", db_, "main");
    if (!bk || sqlite3_backup_step(bk, -1) != SQLITE_DONE) {
        if (bk) sqlite3_backup_finish(bk);
        sqlite3_close(file_db);
        throw LoadError("backup to " + native_path + " failed");
    }
    sqlite3_backup_finish(bk);
    sqlite3_close(file_db);
}

// --- restricted parser for our own dump format ---

namespace {

struct DumpParser {
    const std::string& text;
    size_t pos = 0;

    explicit DumpParser(const std::string& t) : text(t) {}

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= text.size();
    }
    bool try_keyword(const std::string& kw) {
        skip_ws();
        if (text.compare(pos, kw.size(), kw) == 0) {
            pos += kw.size();
            return true;
        }
        return false;
    }
    void expect(char c) {
        skip_ws();
        if (pos >= text.size() || text[pos] != c)
            throw LoadError(std::string("dump parse error: expected '") + c + "'");
        ++pos;
    }
    std::string identifier() {
        skip_ws();
        size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        if (pos == start) throw LoadError("dump parse error: expected identifier");
        return text.substr(start, pos - start);
    }
    Value literal() {
        skip_ws();
        if (pos >= text.size()) throw LoadError("dump parse error: expected literal");
        if (text[pos] == '\'') {
            ++pos;
            std::string s;
            while (pos < text.size()) {
                if (text[pos] == '\'') {
                    if (pos + 1 < text.size() && text[pos + 1] == '\'') {
                        s += '\'';
                        pos += 2;
                    } else {
                        ++pos;
                        return Value{s};
                    }
                } else {
                    s += text[pos++];
                }
            }
            throw LoadError("dump parse error: unterminated string");
        }
        if (text.compare(pos, 4, "NULL") == 0) {
            pos += 4;
            return Value{std::monostate{}};
        }
        size_t start = pos;
        bool is_real = false;
        while (pos < text.size() &&
               (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '-' ||
                text[pos] == '+' || text[pos] == '.' || text[pos] == 'e' || text[pos] == 'E')) {
            if (text[pos] == '.' || text[pos] == 'e' || text[pos] == 'E') is_real = true;
            ++pos;
        }
        if (pos == start) throw LoadError("dump parse error: bad literal");
        std::string num = text.substr(start, pos - start);
        if (is_real) return Value{std::stod(num)};
        return Value{static_cast<int64_t>(std::stoll(num))};
    }
};

} // namespace

static void parse_dump(const std::string& text, SchemaDescription& schema, TableRows& rows) {
    DumpParser p(text);
    while (!p.done()) {
        if (p.try_keyword("CREATE TABLE")) {
            TableDef t;
            t.name = p.identifier();
            p.expect('(');
            for (;;) {
                if (p.try_keyword("FOREIGN KEY")) {
                    ForeignKey fk;
                    p.expect('(');
                    fk.child_column = p.identifier();
                    p.expect(')');
                    if (!p.try_keyword("REFERENCES"))
                        throw LoadError("dump parse error: expected REFERENCES");
                    fk.parent_table = p.identifier();
                    p.expect('(');
                    fk.parent_column = p.identifier();
                    p.expect(')');
                    fk.child_table = t.name;
                    schema.foreign_keys.push_back(fk);
                } else {
                    Column c;
                    c.name = p.identifier();
                    c.type = column_type_from_name(p.identifier());
                    t.columns.push_back(c);
                }
                p.skip_ws();
                if (p.try_keyword(",")) continue;
                p.expect(')');
                break;
            }
            p.expect(';');
            schema.tables.push_back(std::move(t));
        } else if (p.try_keyword("INSERT INTO")) {
            std::string table = p.identifier();
            if (!p.try_keyword("VALUES"))
                throw LoadError("dump parse error: expected VALUES");
            p.expect('(');
            std::vector<Value> row;
            for (;;) {
                row.push_back(p.literal());
                if (p.try_keyword(",")) continue;
                p.expect(')');
                break;
            }
            p.expect(';');
            rows[table].push_back(std::move(row));
        } else {
            throw LoadError("dump parse error: unrecognized statement");
        }
    }
}

static bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

static std::string id_from_path(const std::string& path) {
    size_t slash = path.find_last_of('/');
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    size_t dot = base.find_last_of('.');
    if (dot != std::string::npos) base = base.substr(0, dot);
    if (base.rfind("db_", 0) == 0) base = base.substr(3);
    return base;
}

DatabaseInstance DatabaseInstance::load(const std::string& path) {
    SchemaDescription schema;
    TableRows rows;
    if (ends_with(path, ".sql")) {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw LoadError("cannot open " + path);
        std::ostringstream buf;
        buf << f.rdbuf();
        parse_dump(buf.str(), schema, rows);
    } else if (ends_with(path, ".sqlite")) {
        sqlite3* db = nullptr;
        if (sqlite3_open_v2(path.c_str(), &db, SQLITE_OPEN_READONLY, nullptr) != SQLITE_OK)
            throw LoadError("cannot open " + path);
        // table DDL is stored verbatim; reuse the dump parser on it
        sqlite3_stmt* st = nullptr;
        sqlite3_prepare_v2(db,
                           "SELECT sql FROM sqlite_master WHERE type='table' ORDER BY rowid",
                           -1, &st, nullptr);
        std::string ddl;
        while (sqlite3_step(st) == SQLITE_ROW)
            ddl += reinterpret_cast<const char*>(sqlite3_column_text(st, 0)) + std::string(";\n");
        sqlite3_finalize(st);
        try {
            parse_dump(ddl, schema, rows);
            for (const auto& t : schema.tables) {
                std::string q = "SELECT * FROM " + t.name;
                sqlite3_stmt* rs = nullptr;
                if (sqlite3_prepare_v2(db, q.c_str(), -1, &rs, nullptr) != SQLITE_OK)
                    throw LoadError("cannot read table " + t.name);
                while (sqlite3_step(rs) == SQLITE_ROW) {
                    std::vector<Value> row;
                    int n = sqlite3_column_count(rs);
                    for (int i = 0; i < n; ++i) {
                        switch (sqlite3_column_type(rs, i)) {
                            case SQLITE_INTEGER:
                                row.emplace_back(static_cast<int64_t>(sqlite3_column_int64(rs, i)));
                                break;
                            case SQLITE_FLOAT:
                                row.emplace_back(sqlite3_column_double(rs, i));
                                break;
                            case SQLITE_NULL:
                                row.emplace_back(std::monostate{});
                                break;
                            default:
                                row.emplace_back(std::string(
                                    reinterpret_cast<const char*>(sqlite3_column_text(rs, i))));
                        }
                    }
                    rows[t.name].push_back(std::move(row));
                }
                sqlite3_finalize(rs);
            }
        } catch (...) {
            sqlite3_close(db);
            throw;
        }
        sqlite3_close(db);
    } else {
        throw LoadError("unsupported dump extension: " + path);
    }
    return DatabaseInstance(id_from_path(path), std::move(schema), std::move(rows));
}

// ---------------------------------------------------------------------------
// execute / canonicalize

static std::string first_keyword(const std::string& sql) {
    size_t i = 0;
    while (i < sql.size() && std::isspace(static_cast<unsigned char>(sql[i]))) ++i;
    size_t start = i;
    while (i < sql.size() && std::isalpha(static_cast<unsigned char>(sql[i]))) ++i;
    std::string kw = sql.substr(start, i - start);
    std::transform(kw.begin(), kw.end(), kw.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    return kw;
}

namespace {
struct Deadline {
    std::chrono::steady_clock::time_point at;
};
int progress_check(void* ctx) {
    auto* d = static_cast<Deadline*>(ctx);
    return std::chrono::steady_clock::now() >= d->at ? 1 : 0;
}
} // namespace

ExecutionOutcome execute(const DatabaseInstance& db, const std::string& sql,
                         std::chrono::milliseconds timeout) {
    std::string kw = first_keyword(sql);
    if (kw != "SELECT" && kw != "WITH")
        return EngineError{"only read statements are permitted, got: " +
                           (kw.empty() ? std::string("<empty>") : kw)};

    sqlite3* conn = db.connection();
    sqlite3_stmt* st = nullptr;
    const char* tail = nullptr;
    if (sqlite3_prepare_v2(conn, sql.c_str(), -1, &st, &tail) != SQLITE_OK) {
        std::string msg = sqlite3_errmsg(conn);
        if (st) sqlite3_finalize(st);
        return EngineError{msg};
    }
    for (const char* t = tail; t && *t; ++t) {
        if (!std::isspace(static_cast<unsigned char>(*t)) && *t != ';') {
            sqlite3_finalize(st);
            return EngineError{"multiple statements are not permitted"};
        }
    }
    if (!sqlite3_stmt_readonly(st)) {
        sqlite3_finalize(st);
        return EngineError{"statement is not read-only"};
    }

    Deadline deadline{std::chrono::steady_clock::now() + timeout};
    sqlite3_progress_handler(conn, 500, progress_check, &deadline);

    ResultSet result;
    int rc;
    while ((rc = sqlite3_step(st)) == SQLITE_ROW) {
        std::vector<Value> row;
        int n = sqlite3_column_count(st);
        for (int i = 0; i < n; ++i) {
            switch (sqlite3_column_type(st, i)) {
                case SQLITE_INTEGER:
                    row.emplace_back(static_cast<int64_t>(sqlite3_column_int64(st, i)));
                    break;
                case SQLITE_FLOAT:
                    row.emplace_back(sqlite3_column_double(st, i));
                    break;
                case SQLITE_NULL:
                    row.emplace_back(std::monostate{});
                    break;
                default:
                    row.emplace_back(
                        std::string(reinterpret_cast<const char*>(sqlite3_column_text(st, i))));
            }
        }
        result.rows.push_back(std::move(row));
    }
    sqlite3_progress_handler(conn, 0, nullptr, nullptr);

    if (rc != SQLITE_DONE) {
        std::string msg = sqlite3_errmsg(conn);
        sqlite3_finalize(st);
        if (rc == SQLITE_INTERRUPT || msg == "interrupted")
            return EngineError{"timeout after " + std::to_string(timeout.count()) + " ms", true};
        return EngineError{msg};
    }
    sqlite3_finalize(st);
    return result;
}

static std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

static Value canonical_scalar(const Value& v) {
    if (auto* d = std::get_if<double>(&v)) {
        double r = *d;
        if (std::isfinite(r) && r == std::floor(r) && std::fabs(r) < 9.0e15)
            return Value{static_cast<int64_t>(r)};
        return v;
    }
    if (auto* s = std::get_if<std::string>(&v)) return Value{trim(*s)};
    return v;
}

std::variant<EngineError, CanonicalAnswer> canonicalize(const ExecutionOutcome& outcome) {
    if (auto* err = std::get_if<EngineError>(&outcome)) return *err;
    const auto& rs = std::get<ResultSet>(outcome);
    std::vector<Value> vals;
    for (const auto& row : rs.rows)
        for (const auto& v : row) vals.push_back(canonical_scalar(v));
    return CanonicalAnswer::from_values(std::move(vals));
}

} // namespace sqlrl
