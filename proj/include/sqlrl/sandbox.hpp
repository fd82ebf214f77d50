#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "sqlrl/value.hpp"

struct sqlite3;

namespace sqlrl {

struct LoadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IntegrityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ColumnType { Integer, Real, Text };

std::string column_type_name(ColumnType t);
ColumnType column_type_from_name(const std::string& s);

struct Column {
    std::string name;
    ColumnType type;
};

struct TableDef {
    std::string name;
    std::vector<Column> columns;
    int column_index(const std::string& col) const; // -1 if absent
};

struct ForeignKey {
    std::string child_table, child_column;
    std::string parent_table, parent_column;
};

struct SchemaDescription {
    std::vector<TableDef> tables;
    std::vector<ForeignKey> foreign_keys;

    const TableDef* find_table(const std::string& name) const;
    void validate() const; // name rules, unique names, FK targets exist
};

struct EngineError {
    std::string message;
    bool timeout = false;
};

struct ResultSet {
    std::vector<std::vector<Value>> rows;
};

using ExecutionOutcome = std::variant<EngineError, ResultSet>;

using TableRows = std::map<std::string, std::vector<std::vector<Value>>>;

// A populated database plus a private in-memory engine connection.
// One instance is confined to one worker; clone() for another thread.
class DatabaseInstance {
  public:
    DatabaseInstance(std::string id, SchemaDescription schema, TableRows rows);
    ~DatabaseInstance();
    DatabaseInstance(DatabaseInstance&&) noexcept;
    DatabaseInstance& operator=(DatabaseInstance&&) noexcept;
    DatabaseInstance(const DatabaseInstance&) = delete;
    DatabaseInstance& operator=(const DatabaseInstance&) = delete;

    const std::string& id() const { return id_; }
    const SchemaDescription& schema() const { return schema_; }
    const TableRows& rows() const { return rows_; }

    DatabaseInstance clone() const;

    // throws IntegrityError on arity/type mismatch or dangling foreign key
    void check_integrity() const;

    // portable text dump: CREATE TABLE + INSERT statements
    std::string to_sql_dump() const;

    // writes db_<id>.sqlite (engine native) and db_<id>.sql under dir
    void save(const std::string& dir) const;

    // accepts either the .sql text dump or the native .sqlite file
    static DatabaseInstance load(const std::string& path);

    sqlite3* connection() const { return db_; }

  private:
    std::string id_;
    SchemaDescription schema_;
    TableRows rows_;
    sqlite3* db_ = nullptr;

    void open_and_populate();
};

constexpr std::chrono::milliseconds kDefaultQueryTimeout{2000};

// Read-only execution; write/DDL statements are rejected before running.
// The database is never mutated, including on errors and timeouts.
ExecutionOutcome execute(const DatabaseInstance& db, const std::string& sql,
                         std::chrono::milliseconds timeout = kDefaultQueryTimeout);

// Flattens a result set row-major into a multiset of canonical scalars;
// integer-valued reals become integers, text is trimmed. Errors pass through.
std::variant<EngineError, CanonicalAnswer> canonicalize(const ExecutionOutcome& outcome);

} // namespace sqlrl
