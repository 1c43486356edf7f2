#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "formalgrade/documents.hpp"

namespace formalgrade {

// Errors carrying an HTTP status next to the stable code.
class ServiceError : public Error {
public:
  ServiceError(int status, const std::string& code, const std::string& what) : Error(code, what), status_(status) {}
  int status() const noexcept { return status_; }

private:
  int status_;
};

// Embedded key-value store on SQLite, one keyspace per record type. All
// writes go through one connection under a mutex; single writer.
class Store {
public:
  // ":memory:" gives a private in-memory store. Throws ServiceError(500,
  // "store-error") when the file cannot be opened.
  explicit Store(const std::string& path);
  ~Store();
  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  std::optional<std::string> get(const std::string& space, const std::string& key);
  void put(const std::string& space, const std::string& key, const std::string& value);
  void erase(const std::string& space, const std::string& key);
  // Keys in `space` starting with `prefix`, in key order.
  std::vector<std::pair<std::string, std::string>> scan(const std::string& space, const std::string& prefix = "");
  // Atomically increments a counter in the meta keyspace.
  std::int64_t next_id(const std::string& counter);

  // Runs `body` inside one transaction; rolls back if it throws.
  void transaction(const std::function<void()>& body);

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

enum class Role { Teacher, Student };
std::string to_string(Role r);

struct Caller {
  std::string user;
  Role role = Role::Student;
};

// Tokens are "user:role:hex(HMAC-SHA256(secret, user:role))".
std::string issue_token(const std::string& secret, const Caller& who);
// Throws ServiceError(401) on a malformed or forged token.
Caller verify_token(const std::string& secret, const std::string& token);

// The course and attempt lifecycle. Every method takes and returns JSON
// documents; HttpServer is a thin routing layer over it.
class Service {
public:
  using Now = std::function<std::int64_t()>;  // epoch seconds

  explicit Service(Store& store, Now now = {});

  doc::Json create_course(const Caller& c, const doc::Json& body);
  doc::Json enroll(const Caller& c, const std::string& course_id, const doc::Json& body);
  doc::Json add_problem(const Caller& c, const std::string& course_id, const doc::Json& body);
  doc::Json pose(const Caller& c, const std::string& problem_id, const doc::Json& body);
  doc::Json list_posed(const Caller& c);
  doc::Json submit_attempt(const Caller& c, const std::string& posed_id, const doc::Json& body);
  doc::Json attempts(const Caller& c, const std::string& posed_id);
  doc::Json game(const Caller& c, const std::string& posed_id, const doc::Json& move);
  std::string grades_csv(const Caller& c, const std::string& course_id);
  doc::Json generate(const Caller& c, const doc::Json& body);
  // Runs a TM or PDA on one input for the attempt editors.
  doc::Json simulate(const Caller& c, const doc::Json& body);

private:
  struct Posed;
  Posed load_posed(const std::string& id);
  doc::Json load_course(const std::string& id);
  void require_enrolled(const Caller& c, const std::string& course_id);
  void require_teacher_of(const Caller& c, const std::string& course_id);
  void require_window(const Posed& p);
  int counted_attempts(const std::string& posed_id, const std::string& student);
  doc::Json record_attempt(const Caller& c, const Posed& p, const doc::Json& attempt_doc, const Attempt& a);
  std::mutex& lock_for(const std::string& posed_id, const std::string& student);

  Store& store_;
  Now now_;
  std::mutex locks_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> locks_;
};

struct ServerConfig {
  std::string addr = "127.0.0.1";
  int port = 8080;
  std::string store_path = "formalgrade.db";
  std::string token_secret = "change-me";
};

// Reads the config document, then applies FG_ADDR, FG_STORE_PATH and
// FG_TOKEN_SECRET from the environment.
ServerConfig load_server_config(const doc::Json& j);

class HttpServer {
public:
  HttpServer(Service& service, std::string token_secret);
  ~HttpServer();
  // Binds without serving; false when the address is taken.
  bool bind(const std::string& addr, int port);
  int bind_any(const std::string& addr);  // ephemeral port, or -1
  void listen();                          // blocks until stop()
  void stop();
  void wait_until_ready();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace formalgrade
