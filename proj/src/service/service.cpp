#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <set>

#include "formalgrade/apg.hpp"
#include "formalgrade/service.hpp"

namespace formalgrade {

using doc::Json;

std::string to_string(Role r) { return r == Role::Teacher ? "teacher" : "student"; }

namespace {

ServiceError forbidden(const std::string& what) { return ServiceError(403, "forbidden", what); }
ServiceError not_found(const std::string& what) { return ServiceError(404, "not-found", what); }
ServiceError bad_request(const std::string& what) { return ServiceError(422, "invalid-document", what); }

std::string hmac_hex(const std::string& secret, const std::string& msg) {
  unsigned char mac[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  HMAC(EVP_sha256(), secret.data(), static_cast<int>(secret.size()), reinterpret_cast<const unsigned char*>(msg.data()),
       msg.size(), mac, &len);
  std::string hex;
  char buf[3];
  for (unsigned int k = 0; k < len; ++k) {
    std::snprintf(buf, sizeof buf, "%02x", mac[k]);
    hex += buf;
  }
  return hex;
}

bool valid_user(const std::string& u) {
  if (u.empty() || u.size() > 64) return false;
  return std::all_of(u.begin(), u.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == '@';
  });
}

std::string padded(std::int64_t id) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%012lld", static_cast<long long>(id));
  return buf;
}

template <class T>
T field_or(const Json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw bad_request(std::string("field '") + key + "' has the wrong type");
  }
}

bool contains(const Json& array, const std::string& v) {
  return std::find(array.begin(), array.end(), Json(v)) != array.end();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string issue_token(const std::string& secret, const Caller& who) {
  if (!valid_user(who.user)) throw ServiceError(422, "invalid-document", "user ids are 1-64 of [A-Za-z0-9_.@-]");
  const std::string msg = who.user + ":" + to_string(who.role);
  return msg + ":" + hmac_hex(secret, msg);
}

Caller verify_token(const std::string& secret, const std::string& token) {
  const auto a = token.find(':');
  const auto b = a == std::string::npos ? a : token.find(':', a + 1);
  if (b == std::string::npos) throw ServiceError(401, "unauthorized", "malformed token");
  Caller c;
  c.user = token.substr(0, a);
  const std::string role = token.substr(a + 1, b - a - 1);
  if (role == "teacher") c.role = Role::Teacher;
  else if (role == "student") c.role = Role::Student;
  else throw ServiceError(401, "unauthorized", "malformed token");
  const std::string expect = hmac_hex(secret, token.substr(0, b));
  const std::string got = token.substr(b + 1);
  if (!valid_user(c.user) || got.size() != expect.size() || CRYPTO_memcmp(got.data(), expect.data(), got.size()) != 0)
    throw ServiceError(401, "unauthorized", "token signature does not match");
  return c;
}

// ---------------------------------------------------------------------------

struct Service::Posed {
  std::string id, problem_id, course_id;
  int max_points = 10;
  std::optional<int> max_attempts;  // nullopt = unlimited
  std::int64_t start = 0;
  std::optional<std::int64_t> end;
  std::int64_t seq = 0;  // posing order

  Json to_json() const {
    Json j = {{"id", id},       {"problem", problem_id}, {"course", course_id}, {"max_points", max_points},
              {"start", start}, {"seq", seq},            {"max_attempts", nullptr}, {"end", nullptr}};
    if (max_attempts) j["max_attempts"] = *max_attempts;
    if (end) j["end"] = *end;
    return j;
  }
  static Posed from_json(const Json& j) {
    Posed p;
    p.id = j.at("id");
    p.problem_id = j.at("problem");
    p.course_id = j.at("course");
    p.max_points = j.at("max_points");
    p.start = j.at("start");
    p.seq = j.at("seq");
    if (!j.at("max_attempts").is_null()) p.max_attempts = j.at("max_attempts").get<int>();
    if (!j.at("end").is_null()) p.end = j.at("end").get<std::int64_t>();
    return p;
  }
};

Service::Service(Store& store, Now now) : store_(store), now_(std::move(now)) {
  if (!now_)
    now_ = [] {
      return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
          .count();
    };
}

Json Service::load_course(const std::string& id) {
  const auto v = store_.get("courses", id);
  if (!v) throw not_found("no course '" + id + "'");
  return Json::parse(*v);
}

Service::Posed Service::load_posed(const std::string& id) {
  const auto v = store_.get("posed", id);
  if (!v) throw not_found("no posed problem '" + id + "'");
  return Posed::from_json(Json::parse(*v));
}

void Service::require_teacher_of(const Caller& c, const std::string& course_id) {
  const Json course = load_course(course_id);
  if (c.role != Role::Teacher || !contains(course.at("teachers"), c.user))
    throw forbidden("only teachers of course '" + course_id + "' may do this");
}

void Service::require_enrolled(const Caller& c, const std::string& course_id) {
  const Json course = load_course(course_id);
  if (c.role != Role::Student || !contains(course.at("students"), c.user))
    throw ServiceError(403, "not-enrolled", "not enrolled in course '" + course_id + "'");
}

void Service::require_window(const Posed& p) {
  const std::int64_t t = now_();
  if (t < p.start || (p.end && t > *p.end))
    throw ServiceError(410, "window-closed", "problem '" + p.id + "' does not accept attempts at this time");
}

std::mutex& Service::lock_for(const std::string& posed_id, const std::string& student) {
  std::lock_guard g(locks_mutex_);
  auto& m = locks_[posed_id + "/" + student];
  if (!m) m = std::make_unique<std::mutex>();
  return *m;
}

int Service::counted_attempts(const std::string& posed_id, const std::string& student) {
  int n = 0;
  for (const auto& [k, v] : store_.scan("attempts", posed_id + "/" + student + "/"))
    if (Json::parse(v).at("counted").get<bool>()) ++n;
  return n;
}

Json Service::create_course(const Caller& c, const Json& body) {
  if (c.role != Role::Teacher) throw forbidden("only teachers may create courses");
  Json teachers = Json::array({c.user});
  for (const std::string& t : field_or<std::vector<std::string>>(body, "teachers", {}))
    if (!contains(teachers, t)) teachers.push_back(t);
  const std::string id = "c" + std::to_string(store_.next_id("course"));
  const Json course = {{"id", id},
                       {"title", field_or<std::string>(body, "title", "")},
                       {"teachers", teachers},
                       {"password", field_or<std::string>(body, "enrollment_password", "")},
                       {"students", Json::array()}};
  store_.put("courses", id, course.dump());
  Json out = course;
  out.erase("password");
  return out;
}

Json Service::enroll(const Caller& c, const std::string& course_id, const Json& body) {
  if (c.role != Role::Student) throw forbidden("only students enroll");
  Json out;
  store_.transaction([&] {
    Json course = load_course(course_id);
    if (field_or<std::string>(body, "password", "") != course.at("password").get<std::string>())
      throw forbidden("wrong enrollment password");
    if (!contains(course.at("students"), c.user)) {
      course["students"].push_back(c.user);
      store_.put("courses", course_id, course.dump());
    }
    out = {{"course", course_id}, {"student", c.user}, {"enrolled", true}};
  });
  return out;
}

Json Service::add_problem(const Caller& c, const std::string& course_id, const Json& body) {
  require_teacher_of(c, course_id);
  const Problem p = doc::problem_from_json(body);
  const std::vector<std::string> warnings = validate_problem(p);
  const std::string id = "p" + std::to_string(store_.next_id("problem"));
  store_.put("problems", id, Json{{"id", id}, {"course", course_id}, {"problem", doc::to_json(p)}}.dump());
  return {{"id", id}, {"course", course_id}, {"warnings", warnings}};
}

Json Service::pose(const Caller& c, const std::string& problem_id, const Json& body) {
  const auto stored = store_.get("problems", problem_id);
  if (!stored) throw not_found("no problem '" + problem_id + "'");
  const Json pj = Json::parse(*stored);
  Posed p;
  p.problem_id = problem_id;
  p.course_id = pj.at("course");
  require_teacher_of(c, p.course_id);
  p.max_points = field_or<int>(body, "max_points", pj.at("problem").at("max_points").get<int>());
  if (p.max_points < 1) throw ServiceError(422, "invalid-payload", "max_points must be positive");
  if (body.contains("max_attempts") && !body.at("max_attempts").is_null()) {
    p.max_attempts = field_or<int>(body, "max_attempts", 0);
    if (*p.max_attempts < 1) throw ServiceError(422, "invalid-payload", "max_attempts must be positive or null");
  }
  p.start = field_or<std::int64_t>(body, "start", now_());
  if (body.contains("end") && !body.at("end").is_null()) p.end = field_or<std::int64_t>(body, "end", 0);
  if (p.end && *p.end < p.start) throw ServiceError(422, "invalid-payload", "end lies before start");
  p.seq = store_.next_id("posed");
  p.id = "q" + std::to_string(p.seq);
  store_.put("posed", p.id, p.to_json().dump());
  return p.to_json();
}

Json Service::list_posed(const Caller& c) {
  Json out = Json::array();
  std::vector<Posed> all;
  for (const auto& [k, v] : store_.scan("posed")) all.push_back(Posed::from_json(Json::parse(v)));
  std::sort(all.begin(), all.end(), [](const Posed& a, const Posed& b) { return a.seq < b.seq; });
  std::map<std::string, Json> courses;
  for (const Posed& p : all) {
    if (!courses.count(p.course_id)) courses[p.course_id] = load_course(p.course_id);
    const Json& course = courses[p.course_id];
    const bool teacher = c.role == Role::Teacher && contains(course.at("teachers"), c.user);
    const bool student = c.role == Role::Student && contains(course.at("students"), c.user);
    if (!teacher && !student) continue;
    Problem prob = doc::problem_from_json(Json::parse(*store_.get("problems", p.problem_id)).at("problem"));
    prob.max_points = p.max_points;
    Json j = p.to_json();
    j["problem"] = doc::to_json(prob, teacher ? doc::Audience::Teacher : doc::Audience::Student);
    j["problem_id"] = p.problem_id;
    if (student) {
      int used = 0;
      std::optional<int> best;
      for (const auto& [k, v] : store_.scan("attempts", p.id + "/" + c.user + "/")) {
        const Json r = Json::parse(v);
        if (!r.at("counted").get<bool>()) continue;
        ++used;
        const int pts = r.at("report").at("points");
        best = best ? std::max(*best, pts) : pts;
      }
      j["attempts_used"] = used;
      j["attempts_remaining"] = p.max_attempts ? Json(std::max(0, *p.max_attempts - used)) : Json(nullptr);
      j["best"] = best ? Json(*best) : Json(nullptr);
    }
    out.push_back(j);
  }
  return out;
}

Json Service::record_attempt(const Caller& c, const Posed& p, const Json& attempt_doc, const Attempt& a) {
  Problem prob = doc::problem_from_json(Json::parse(*store_.get("problems", p.problem_id)).at("problem"));
  prob.max_points = p.max_points;
  GradeReport report;
  try {
    report = grade(prob, a);
  } catch (const BudgetTooSmall& e) {
    throw ServiceError(503, e.code(), e.what());
  } catch (const Error& e) {
    throw ServiceError(422, e.code(), e.what());
  }
  const std::int64_t id = store_.next_id("attempt");
  const Json record = {{"id", "a" + std::to_string(id)},
                       {"posed", p.id},
                       {"student", c.user},
                       {"attempt", attempt_doc},
                       {"report", doc::to_json(report)},
                       {"timestamp", now_()},
                       {"counted", !report.not_counted}};
  store_.put("attempts", p.id + "/" + c.user + "/" + padded(id), record.dump());
  const int used = counted_attempts(p.id, c.user);
  return {{"attempt", record.at("id")},
          {"counted", record.at("counted")},
          {"attempts_used", used},
          {"attempts_remaining", p.max_attempts ? Json(std::max(0, *p.max_attempts - used)) : Json(nullptr)},
          {"report", record.at("report")}};
}

Json Service::submit_attempt(const Caller& c, const std::string& posed_id, const Json& body) {
  const Posed p = load_posed(posed_id);
  require_enrolled(c, p.course_id);
  require_window(p);
  const Json pj = Json::parse(*store_.get("problems", p.problem_id));
  const ProblemKind kind = problem_kind_from_string(pj.at("problem").at("kind").get<std::string>());
  Attempt a;
  try {
    a = doc::attempt_from_json(kind, body);
  } catch (const Error& e) {
    throw ServiceError(422, e.code(), e.what());
  }
  std::lock_guard g(lock_for(posed_id, c.user));
  if (p.max_attempts && counted_attempts(posed_id, c.user) >= *p.max_attempts)
    throw ServiceError(409, "attempts-exhausted", "all " + std::to_string(*p.max_attempts) + " attempts are used");
  return record_attempt(c, p, body, a);
}

Json Service::attempts(const Caller& c, const std::string& posed_id) {
  const Posed p = load_posed(posed_id);
  std::string prefix = posed_id + "/";
  if (c.role == Role::Teacher) {
    require_teacher_of(c, p.course_id);
  } else {
    require_enrolled(c, p.course_id);
    prefix += c.user + "/";
  }
  Json out = Json::array();
  for (const auto& [k, v] : store_.scan("attempts", prefix)) out.push_back(Json::parse(v));
  return out;
}

Json Service::game(const Caller& c, const std::string& posed_id, const Json& move_doc) {
  const Posed p = load_posed(posed_id);
  require_enrolled(c, p.course_id);
  require_window(p);
  const Problem prob = doc::problem_from_json(Json::parse(*store_.get("problems", p.problem_id)).at("problem"));
  if (prob.kind != ProblemKind::PumpingGame)
    throw ServiceError(422, "invalid-attempt", "problem '" + posed_id + "' is not a pumping game");
  const auto& payload = std::get<PumpingPayload>(prob.payload);
  GameMove move;
  try {
    move = doc::game_move_from_json(move_doc);
  } catch (const Error& e) {
    throw ServiceError(422, e.code(), e.what());
  }

  std::lock_guard g(lock_for(posed_id, c.user));
  const std::string key = posed_id + "/" + c.user;
  Json session = Json::object({{"moves", Json::array()}});
  if (auto v = store_.get("games", key)) session = Json::parse(*v);
  std::vector<GameMove> moves;
  for (const Json& m : session.at("moves")) moves.push_back(doc::game_move_from_json(m));
  if (moves.empty() && p.max_attempts && counted_attempts(posed_id, c.user) >= *p.max_attempts)
    throw ServiceError(409, "attempts-exhausted", "all " + std::to_string(*p.max_attempts) + " attempts are used");

  GameState next;
  try {
    next = pumping_game_step(payload, replay_game(payload, moves), move);
  } catch (const Error& e) {
    throw ServiceError(422, e.code(), e.what());
  }
  moves.push_back(move);
  session["moves"].push_back(doc::to_json(move));
  Json out = {{"state", doc::to_json(next)}};
  if (next.winner == Winner::Undecided) {
    store_.put("games", key, session.dump());
    return out;
  }
  // game over: the moves become a counted attempt and the session resets
  out["submission"] = record_attempt(c, p, session, GameAttempt{moves});
  store_.erase("games", key);
  return out;
}

std::string Service::grades_csv(const Caller& c, const std::string& course_id) {
  require_teacher_of(c, course_id);
  const Json course = load_course(course_id);
  std::vector<std::string> students = course.at("students").get<std::vector<std::string>>();
  std::sort(students.begin(), students.end());
  std::vector<Posed> posed;
  for (const auto& [k, v] : store_.scan("posed")) {
    Posed p = Posed::from_json(Json::parse(v));
    if (p.course_id == course_id) posed.push_back(std::move(p));
  }
  std::sort(posed.begin(), posed.end(), [](const Posed& a, const Posed& b) { return a.seq < b.seq; });

  std::string csv = "student";
  for (const Posed& p : posed) csv += "," + csv_field(p.id);
  csv += ",total\n";
  for (const std::string& s : students) {
    csv += csv_field(s);
    int total = 0;
    for (const Posed& p : posed) {
      std::optional<int> best;
      for (const auto& [k, v] : store_.scan("attempts", p.id + "/" + s + "/")) {
        const Json r = Json::parse(v);
        if (!r.at("counted").get<bool>()) continue;
        const int pts = r.at("report").at("points");
        best = best ? std::max(*best, pts) : pts;
      }
      csv += ",";
      if (best) {
        csv += std::to_string(*best);
        total += *best;
      }
    }
    csv += "," + std::to_string(total) + "\n";
  }
  return csv;
}

Json Service::generate(const Caller& c, const Json& body) {
  if (c.role != Role::Teacher) throw forbidden("only teachers may generate problems");
  GenerationRequest req;
  try {
    req.kind = problem_kind_from_string(field_or<std::string>(body, "kind", ""));
  } catch (const Error& e) {
    throw ServiceError(422, e.code(), e.what());
  }
  req.d_min = field_or<int>(body, "min", 1);
  req.d_max = field_or<int>(body, "max", 10);
  req.seed = field_or<std::uint64_t>(body, "seed", 0);
  GenerationStats st;
  Problem p;
  try {
    p = formalgrade::generate(req, &st);
  } catch (const Error& e) {
    throw ServiceError(422, e.code(), e.what());
  }
  return {{"problem", doc::to_json(p)},
          {"stats", {{"candidates", st.candidates}, {"usable", st.usable}, {"in_band", st.in_band}, {"chosen", st.chosen}}}};
}

Json Service::simulate(const Caller&, const Json& body) {
  try {
    if (body.contains("tm")) {
      const MultiTapeTm tm = doc::tm_from_json(body.at("tm"));
      const Valuation input = field_or<Valuation>(body, "input", {});
      const TmTrace t = trace_tm(tm, input, field_or<std::uint64_t>(body, "step_cap", kTmStepCap));
      Json steps = Json::array();
      for (const TmSnapshot& s : t.steps) steps.push_back({{"state", s.state}, {"tapes", s.tapes}, {"heads", s.heads}});
      return {{"steps", steps}, {"status", to_string(t.result.status)}, {"output", t.result.output}};
    }
    if (body.contains("pda")) {
      const Pda pda = doc::pda_from_json(body.at("pda"));
      const PdaRun r = pda_trace(pda, field_or<std::string>(body, "word", ""),
                                 field_or<std::size_t>(body, "step_cap", kGradingPdaStepCap));
      Json steps = Json::array();
      for (const PdaConfiguration& s : r.steps)
        steps.push_back({{"state", s.state}, {"remaining", s.remaining}, {"stack", s.stack}});
      return {{"steps", steps}, {"via", r.via}, {"verdict", to_string(r.verdict)}};
    }
  } catch (const ServiceError&) {
    throw;
  } catch (const Error& e) {
    throw ServiceError(422, e.code(), e.what());
  }
  throw bad_request("expected a 'tm' or 'pda' field");
}

}  // namespace formalgrade
