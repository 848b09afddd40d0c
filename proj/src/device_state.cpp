#include "droidcall/device_state.hpp"

#include <set>

#include "droidcall/value.hpp"

namespace droidcall {

std::string_view to_string(StateField field) {
  switch (field) {
    case StateField::Alarms: return "alarms";
    case StateField::Timers: return "timers";
    case StateField::Calendar: return "calendar";
    case StateField::Contacts: return "contacts";
    case StateField::CallLog: return "call_log";
    case StateField::SmsOutbox: return "sms_outbox";
    case StateField::EmailOutbox: return "email_outbox";
    case StateField::SearchHistory: return "search_history";
    case StateField::OpenScreen: return "open_screen";
    case StateField::CameraSession: return "camera_session";
    case StateField::Media: return "media";
  }
  return "unknown";
}

std::vector<StateField> changed_fields(const DeviceState& a, const DeviceState& b) {
  std::vector<StateField> out;
  auto check = [&](StateField f, bool same) {
    if (!same) out.push_back(f);
  };
  check(StateField::Alarms, a.alarms == b.alarms);
  check(StateField::Timers, a.timers == b.timers);
  check(StateField::Calendar, a.calendar == b.calendar);
  check(StateField::Contacts, a.contacts == b.contacts);
  check(StateField::CallLog, a.call_log == b.call_log);
  check(StateField::SmsOutbox, a.sms_outbox == b.sms_outbox);
  check(StateField::EmailOutbox, a.email_outbox == b.email_outbox);
  check(StateField::SearchHistory, a.search_history == b.search_history);
  check(StateField::OpenScreen, a.open_screen == b.open_screen);
  check(StateField::CameraSession, a.camera_session == b.camera_session);
  check(StateField::Media, a.media == b.media);
  return out;
}

namespace {

json opt(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

json to_snapshot_json(const DeviceState& s) {
  json j = json::object();
  j["alarms"] = json::array();
  for (const auto& a : s.alarms)
    j["alarms"].push_back({{"hour", a.hour}, {"minute", a.minute}, {"message", opt(a.message)}, {"days", a.days}});
  j["timers"] = json::array();
  for (const auto& t : s.timers)
    j["timers"].push_back({{"duration_seconds", t.duration_seconds}, {"label", opt(t.label)}});
  j["calendar"] = json::array();
  for (const auto& e : s.calendar)
    j["calendar"].push_back({{"title", e.title},
                             {"begin", e.begin},
                             {"end", e.end},
                             {"location", opt(e.location)},
                             {"description", opt(e.description)},
                             {"all_day", e.all_day},
                             {"attendees", e.attendees}});
  j["contacts"] = json::array();
  for (const auto& c : s.contacts)
    j["contacts"].push_back({{"name", c.name},
                             {"phone", opt(c.phone)},
                             {"email", opt(c.email)},
                             {"company", opt(c.company)},
                             {"uri", c.uri}});
  j["call_log"] = s.call_log;
  j["sms_outbox"] = json::array();
  for (const auto& m : s.sms_outbox)
    j["sms_outbox"].push_back({{"phone_number", m.phone_number},
                               {"message", m.message},
                               {"subject", opt(m.subject)},
                               {"attachments", m.attachments}});
  j["email_outbox"] = json::array();
  for (const auto& m : s.email_outbox)
    j["email_outbox"].push_back({{"to", m.to},
                                 {"subject", m.subject},
                                 {"body", opt(m.body)},
                                 {"cc", m.cc},
                                 {"bcc", m.bcc},
                                 {"attachments", m.attachments}});
  j["search_history"] = json::array();
  for (const auto& e : s.search_history) j["search_history"].push_back({{"query", e.query}, {"engine", e.engine}});
  j["open_screen"] = opt(s.open_screen);
  j["camera_session"] = opt(s.camera_session);
  j["media"] = json::array();
  for (const auto& m : s.media) j["media"].push_back({{"mode", m.mode}, {"uri", m.uri}});
  return j;
}

// Strict reader: every object must carry exactly the expected keys.
class Reader {
 public:
  explicit Reader(std::string where) : where_(std::move(where)) {}

  [[noreturn]] void fail(const std::string& what) const { throw CorruptSnapshot(where_ + ": " + what); }

  const json& object(const json& j, std::initializer_list<const char*> keys) const {
    if (!j.is_object()) fail("expected an object");
    if (j.size() != keys.size()) fail("unexpected number of keys");
    for (const char* k : keys) {
      if (!j.contains(k)) fail(std::string("missing key ") + k);
    }
    return j;
  }

  std::string str(const json& j, const char* key) const {
    const auto& v = j.at(key);
    if (!v.is_string()) fail(std::string(key) + " must be a string");
    return v.get<std::string>();
  }

  std::optional<std::string> opt_str(const json& j, const char* key) const {
    const auto& v = j.at(key);
    if (v.is_null()) return std::nullopt;
    if (!v.is_string()) fail(std::string(key) + " must be a string or null");
    return v.get<std::string>();
  }

  std::int64_t integer(const json& j, const char* key) const {
    const auto& v = j.at(key);
    if (!v.is_number_integer()) fail(std::string(key) + " must be an integer");
    return v.get<std::int64_t>();
  }

  bool boolean(const json& j, const char* key) const {
    const auto& v = j.at(key);
    if (!v.is_boolean()) fail(std::string(key) + " must be a boolean");
    return v.get<bool>();
  }

  std::vector<std::string> strings(const json& j, const char* key) const {
    const auto& v = j.at(key);
    if (!v.is_array()) fail(std::string(key) + " must be a list");
    std::vector<std::string> out;
    for (const auto& e : v) {
      if (!e.is_string()) fail(std::string(key) + " must hold strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  const json& array(const json& j, const char* key) const {
    const auto& v = j.at(key);
    if (!v.is_array()) fail(std::string(key) + " must be a list");
    return v;
  }

 private:
  std::string where_;
};

}  // namespace

std::string snapshot(const DeviceState& state) { return to_snapshot_json(state).dump(); }

DeviceState restore(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw CorruptSnapshot("snapshot is not valid JSON");
  Reader r("snapshot");
  r.object(j, {"alarms", "timers", "calendar", "contacts", "call_log", "sms_outbox", "email_outbox",
               "search_history", "open_screen", "camera_session", "media"});
  DeviceState s;
  for (const auto& a : r.array(j, "alarms")) {
    r.object(a, {"hour", "minute", "message", "days"});
    Alarm alarm{static_cast<int>(r.integer(a, "hour")), static_cast<int>(r.integer(a, "minute")),
                r.opt_str(a, "message"), r.strings(a, "days")};
    if (alarm.hour < 0 || alarm.hour > 23 || alarm.minute < 0 || alarm.minute > 59) r.fail("alarm time out of range");
    s.alarms.push_back(std::move(alarm));
  }
  for (const auto& t : r.array(j, "timers")) {
    r.object(t, {"duration_seconds", "label"});
    Timer timer{r.integer(t, "duration_seconds"), r.opt_str(t, "label")};
    if (timer.duration_seconds <= 0) r.fail("timer duration must be positive");
    s.timers.push_back(std::move(timer));
  }
  for (const auto& e : r.array(j, "calendar")) {
    r.object(e, {"title", "begin", "end", "location", "description", "all_day", "attendees"});
    s.calendar.push_back({r.str(e, "title"), r.str(e, "begin"), r.str(e, "end"), r.opt_str(e, "location"),
                          r.opt_str(e, "description"), r.boolean(e, "all_day"), r.strings(e, "attendees")});
  }
  for (const auto& c : r.array(j, "contacts")) {
    r.object(c, {"name", "phone", "email", "company", "uri"});
    s.contacts.push_back(
        {r.str(c, "name"), r.opt_str(c, "phone"), r.opt_str(c, "email"), r.opt_str(c, "company"), r.str(c, "uri")});
  }
  s.call_log = r.strings(j, "call_log");
  for (const auto& m : r.array(j, "sms_outbox")) {
    r.object(m, {"phone_number", "message", "subject", "attachments"});
    s.sms_outbox.push_back(
        {r.str(m, "phone_number"), r.str(m, "message"), r.opt_str(m, "subject"), r.strings(m, "attachments")});
  }
  for (const auto& m : r.array(j, "email_outbox")) {
    r.object(m, {"to", "subject", "body", "cc", "bcc", "attachments"});
    s.email_outbox.push_back({r.strings(m, "to"), r.str(m, "subject"), r.opt_str(m, "body"), r.strings(m, "cc"),
                              r.strings(m, "bcc"), r.strings(m, "attachments")});
  }
  for (const auto& e : r.array(j, "search_history")) {
    r.object(e, {"query", "engine"});
    s.search_history.push_back({r.str(e, "query"), r.str(e, "engine")});
  }
  s.open_screen = r.opt_str(j, "open_screen");
  s.camera_session = r.opt_str(j, "camera_session");
  for (const auto& m : r.array(j, "media")) {
    r.object(m, {"mode", "uri"});
    s.media.push_back({r.str(m, "mode"), r.str(m, "uri")});
  }
  return s;
}

}  // namespace droidcall
