#include <sqlite3.h>

#include "formalgrade/service.hpp"

namespace formalgrade {

struct Store::Impl {
  sqlite3* db = nullptr;
  std::recursive_mutex mu;
  int depth = 0;  // nested transaction() calls join the outer one

  void exec(const char* sql) {
    char* err = nullptr;
    if (sqlite3_exec(db, sql, nullptr, nullptr, &err) != SQLITE_OK) {
      const std::string msg = err ? err : "unknown error";
      sqlite3_free(err);
      throw ServiceError(500, "store-error", msg);
    }
  }
};

namespace {

// Minimal prepared-statement guard.
class Query {
public:
  Query(sqlite3* db, const char* sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql, -1, &s_, nullptr) != SQLITE_OK)
      throw ServiceError(500, "store-error", sqlite3_errmsg(db));
  }
  ~Query() { sqlite3_finalize(s_); }
  Query& bind(int i, const std::string& v) {
    sqlite3_bind_text(s_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT);
    return *this;
  }
  bool step() {
    const int rc = sqlite3_step(s_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    throw ServiceError(500, "store-error", sqlite3_errmsg(db_));
  }
  std::string column(int i) {
    const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(s_, i));
    return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(s_, i))) : std::string();
  }

private:
  sqlite3* db_;
  sqlite3_stmt* s_ = nullptr;
};

}  // namespace

Store::Store(const std::string& path) : impl_(std::make_unique<Impl>()) {
  const int flags = SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX;
  if (sqlite3_open_v2(path.c_str(), &impl_->db, flags, nullptr) != SQLITE_OK) {
    const std::string msg = impl_->db ? sqlite3_errmsg(impl_->db) : "out of memory";
    sqlite3_close(impl_->db);
    throw ServiceError(500, "store-error", "cannot open store '" + path + "': " + msg);
  }
  try {
    impl_->exec("CREATE TABLE IF NOT EXISTS kv (space TEXT NOT NULL, key TEXT NOT NULL, value TEXT NOT NULL, "
                "PRIMARY KEY (space, key)) WITHOUT ROWID");
  } catch (...) {
    sqlite3_close(impl_->db);
    throw;
  }
}

Store::~Store() { sqlite3_close(impl_->db); }

std::optional<std::string> Store::get(const std::string& space, const std::string& key) {
  std::lock_guard lock(impl_->mu);
  Query s(impl_->db, "SELECT value FROM kv WHERE space = ?1 AND key = ?2");
  s.bind(1, space).bind(2, key);
  if (!s.step()) return std::nullopt;
  return s.column(0);
}

void Store::put(const std::string& space, const std::string& key, const std::string& value) {
  std::lock_guard lock(impl_->mu);
  Query s(impl_->db, "INSERT OR REPLACE INTO kv (space, key, value) VALUES (?1, ?2, ?3)");
  s.bind(1, space).bind(2, key).bind(3, value);
  s.step();
}

void Store::erase(const std::string& space, const std::string& key) {
  std::lock_guard lock(impl_->mu);
  Query s(impl_->db, "DELETE FROM kv WHERE space = ?1 AND key = ?2");
  s.bind(1, space).bind(2, key);
  s.step();
}

std::vector<std::pair<std::string, std::string>> Store::scan(const std::string& space, const std::string& prefix) {
  std::lock_guard lock(impl_->mu);
  // prefix match by range so no LIKE escaping is needed
  Query s(impl_->db, "SELECT key, value FROM kv WHERE space = ?1 AND key >= ?2 AND key < ?3 ORDER BY key");
  s.bind(1, space).bind(2, prefix).bind(3, prefix + "\xff");
  std::vector<std::pair<std::string, std::string>> out;
  while (s.step()) out.emplace_back(s.column(0), s.column(1));
  return out;
}

std::int64_t Store::next_id(const std::string& counter) {
  std::lock_guard lock(impl_->mu);
  std::int64_t id = 1;
  transaction([&] {
    if (auto v = get("meta", counter)) id = std::stoll(*v) + 1;
    put("meta", counter, std::to_string(id));
  });
  return id;
}

void Store::transaction(const std::function<void()>& body) {
  std::lock_guard lock(impl_->mu);
  if (impl_->depth > 0) {
    body();
    return;
  }
  impl_->exec("BEGIN IMMEDIATE");
  ++impl_->depth;
  try {
    body();
  } catch (...) {
    --impl_->depth;
    impl_->exec("ROLLBACK");
    throw;
  }
  --impl_->depth;
  impl_->exec("COMMIT");
}

}  // namespace formalgrade
