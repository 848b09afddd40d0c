#include "droidcall/dispatch.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>

namespace droidcall {

std::string_view to_string(DispatchErrc kind) {
  switch (kind) {
    case DispatchErrc::HandlerError: return "HandlerError";
    case DispatchErrc::UnknownFunction: return "UnknownFunction";
    case DispatchErrc::UnresolvedRef: return "UnresolvedRef";
  }
  return "DispatchError";
}

namespace {

[[noreturn]] void handler_fail(const std::string& msg) { throw DispatchError(DispatchErrc::HandlerError, msg); }

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Typed access to a call's literal arguments.
class Args {
 public:
  Args(const FunctionCall& call, std::initializer_list<const char*> allowed) : call_(call) {
    for (const auto& [k, v] : call.arguments) {
      bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; });
      if (!known) handler_fail(call.name + " does not take '" + k + "'");
    }
  }

  const ArgValue* find(const char* key) const {
    auto it = call_.arguments.find(key);
    return it == call_.arguments.end() ? nullptr : &it->second;
  }

  std::string str(const char* key) const {
    auto v = opt_str(key);
    if (!v) handler_fail(call_.name + " needs '" + key + "'");
    return *v;
  }

  std::optional<std::string> opt_str(const char* key) const {
    const ArgValue* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) handler_fail(call_.name + "." + key + " must be a string");
    return v->as_string();
  }

  std::int64_t integer(const char* key) const {
    const ArgValue* v = find(key);
    if (!v) handler_fail(call_.name + " needs '" + key + "'");
    if (!v->is_int()) handler_fail(call_.name + "." + key + " must be an integer");
    return v->as_int();
  }

  bool boolean(const char* key, bool fallback) const {
    const ArgValue* v = find(key);
    if (!v) return fallback;
    if (!v->is_bool()) handler_fail(call_.name + "." + key + " must be a boolean");
    return v->as_bool();
  }

  std::vector<std::string> strings(const char* key) const {
    const ArgValue* v = find(key);
    if (!v) return {};
    if (!v->is_list()) handler_fail(call_.name + "." + key + " must be a list of strings");
    std::vector<std::string> out;
    for (const auto& e : v->as_list()) {
      if (!e.is_string()) handler_fail(call_.name + "." + key + " must be a list of strings");
      out.push_back(e.as_string());
    }
    return out;
  }

 private:
  const FunctionCall& call_;
};

std::string non_empty(std::string s, const std::string& what) {
  if (s.find_first_not_of(" \t\r\n") == std::string::npos) handler_fail(what + " must not be empty");
  return s;
}

std::string checked_phone(std::string number) {
  non_empty(number, "phone number");
  for (char c : number) {
    if (!std::isdigit(static_cast<unsigned char>(c)) && !std::strchr("+*#-() ", c))
      handler_fail("'" + number + "' is not a phone number");
  }
  if (std::none_of(number.begin(), number.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    handler_fail("'" + number + "' is not a phone number");
  return number;
}

std::string checked_email(std::string address) {
  auto at = address.find('@');
  if (at == std::string::npos || at == 0 || at + 1 >= address.size() || address.find(' ') != std::string::npos)
    handler_fail("'" + address + "' is not an email address");
  return address;
}

struct ParsedTime {
  std::chrono::sys_seconds at;
  bool date_only = false;
};

// "YYYY-MM-DD", "YYYY-MM-DDTHH:MM" or "YYYY-MM-DDTHH:MM:SS" (a space may replace T).
ParsedTime parse_time(const std::string& text) {
  using namespace std::chrono;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char sep = 0;
  int consumed = 0;
  ParsedTime out;
  if (std::sscanf(text.c_str(), "%4d-%2d-%2d%n", &y, &mo, &d, &consumed) == 3 &&
      consumed == static_cast<int>(text.size()) && text.size() == 10) {
    out.date_only = true;
  } else if (std::sscanf(text.c_str(), "%4d-%2d-%2d%c%2d:%2d:%2d%n", &y, &mo, &d, &sep, &h, &mi, &s, &consumed) == 7 &&
             consumed == static_cast<int>(text.size()) && text.size() == 19 && (sep == 'T' || sep == ' ')) {
  } else if (std::sscanf(text.c_str(), "%4d-%2d-%2d%c%2d:%2d%n", &y, &mo, &d, &sep, &h, &mi, &consumed) == 6 &&
             consumed == static_cast<int>(text.size()) && text.size() == 16 && (sep == 'T' || sep == ' ')) {
    s = 0;
  } else {
    handler_fail("'" + text + "' is not an ISO 8601 date or date-time");
  }
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 59)
    handler_fail("'" + text + "' is not a valid time");
  out.at = sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
  return out;
}

std::string format_time(std::chrono::sys_seconds t, bool date_only) {
  using namespace std::chrono;
  auto days_part = floor<days>(t);
  year_month_day ymd{days_part};
  hh_mm_ss hms{t - days_part};
  char buf[32];
  if (date_only) {
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  } else {
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
  }
  return buf;
}

const Contact* find_contact_by_name(const DeviceState& s, const std::string& name) {
  for (const auto& c : s.contacts) {
    if (lower(c.name) == lower(name)) return &c;
  }
  return nullptr;
}

std::string contact_field(const Contact& c, const std::string& key) {
  std::string k = lower(key);
  std::optional<std::string> v;
  if (k == "phone" || k == "phone_number") v = c.phone;
  else if (k == "email") v = c.email;
  else if (k == "uri" || k == "contact_uri") v = c.uri;
  else if (k == "name") v = c.name;
  else if (k == "company") v = c.company;
  else handler_fail("unknown contact field '" + key + "'");
  if (!v) handler_fail("contact '" + c.name + "' has no " + k);
  return *v;
}

using HandlerFn = std::function<std::optional<ArgValue>(const FunctionCall&, DeviceState&)>;

struct Handler {
  std::set<StateField> fields;
  HandlerFn fn;
};

Handler settings_screen(std::string screen) {
  return {{StateField::OpenScreen}, [screen](const FunctionCall& call, DeviceState& s) -> std::optional<ArgValue> {
            Args args(call, {});
            s.open_screen = screen;
            return std::nullopt;
          }};
}

Handler capture(std::string mode, std::string uri_prefix) {
  return {{StateField::CameraSession, StateField::Media},
          [mode, uri_prefix](const FunctionCall& call, DeviceState& s) -> std::optional<ArgValue> {
            Args args(call, {});
            s.camera_session = mode;
            std::string uri = uri_prefix + std::to_string(s.media.size() + 1);
            s.media.push_back({mode, uri});
            return ArgValue(uri);
          }};
}

const std::map<std::string, Handler, std::less<>>& handlers() {
  static const std::map<std::string, Handler, std::less<>> table = [] {
    std::map<std::string, Handler, std::less<>> t;
    t["ACTION_SET_ALARM"] = {{StateField::Alarms}, [](const FunctionCall& call, DeviceState& s) -> std::optional<ArgValue> {
      Args a(call, {"EXTRA_HOUR", "EXTRA_MINUTE", "EXTRA_MESSAGE", "EXTRA_DAYS"});
      auto hour = a.integer("EXTRA_HOUR");
      auto minute = a.integer("EXTRA_MINUTE");
      if (hour < 0 || hour > 23) handler_fail("EXTRA_HOUR " + std::to_string(hour) + " is outside 0-23");
      if (minute < 0 || minute > 59) handler_fail("EXTRA_MINUTE " + std::to_string(minute) + " is outside 0-59");
      static const std::set<std::string> weekdays = {"monday", "tuesday", "wednesday", "thursday",
                                                     "friday", "saturday", "sunday"};
      auto days = a.strings("EXTRA_DAYS");
      for (const auto& d : days) {
        if (!weekdays.count(lower(d))) handler_fail("'" + d + "' is not a day of the week");
      }
      s.alarms.push_back({static_cast<int>(hour), static_cast<int>(minute), a.opt_str("EXTRA_MESSAGE"), days});
      return std::nullopt;
    }};
    t["ACTION_SET_TIMER"] = {{StateField::Timers}, [](const FunctionCall& call, DeviceState& s) -> std::optional<ArgValue> {
      Args a(call, {"duration", "EXTRA_MESSAGE"});
      auto seconds = parse_duration(a.str("duration"));
      if (seconds < 1 || seconds > 86400) handler_fail("timer length must be between 1 second and 24 hours");
      s.timers.push_back({seconds, a.opt_str("EXTRA_MESSAGE")});
      return std::nullopt;
    }};
    t["ACTION_SHOW_ALARMS"] = settings_screen("alarms");
    t["ACTION_INSERT_EVENT"] = {{StateField::Calendar}, [](const FunctionCall& call, DeviceState& s) -> std::optional<ArgValue> {
      Args a(call, {"TITLE", "EXTRA_EVENT_BEGIN_TIME", "EXTRA_EVENT_END_TIME", "DESCRIPTION", "EVENT_LOCATION",
                    "EXTRA_EVENT_ALL_DAY", "EXTRA_EMAIL"});
      CalendarEvent e;
      e.title = non_empty(a.str("TITLE"), "TITLE");
      e.all_day = a.boolean("EXTRA_EVENT_ALL_DAY", false);
      auto begin = parse_time(a.str("EXTRA_EVENT_BEGIN_TIME"));
      bool date_only = begin.date_only;
      std::chrono::sys_seconds end_at;
      if (auto end_text = a.opt_str("EXTRA_EVENT_END_TIME")) {
        auto end = parse_time(*end_text);
        if (end.date_only != date_only) handler_fail("begin and end must both be dates or both be date-times");
        end_at = end.at;
      } else {
        end_at = begin.at + (date_only || e.all_day ? std::chrono::seconds(86400) : std::chrono::seconds(3600));
      }
      if (end_at < begin.at) handler_fail("the event ends before it begins");
      e.begin = format_time(begin.at, date_only);
      e.end = format_time(end_at, date_only);
      e.location = a.opt_str("EVENT_LOCATION");
      e.description = a.opt_str("DESCRIPTION");
      for (auto& addr : a.strings("EXTRA_EMAIL")) e.attendees.push_back(checked_email(addr));
      s.calendar.push_back(std::move(e));
      return std::nullopt;
    }};
    t["ACTION_INSERT_CONTACT"] = {{StateField::Contacts}, [](const FunctionCall& call, DeviceState& s) -> std::optional<ArgValue> {
      Args a(call, {"NAME", "PHONE", "EMAIL", "COMPANY"});
      Contact c;
      c.name = non_empty(a.str("NAME"), "NAME");
      if (auto p = a.opt_str("PHONE")) c.phone = checked_phone(*p);
      if (auto e = a.opt_str("EMAIL")) c.email = checked_email(*e);
      c.company = a.opt_str("COMPANY");
      c.uri = "content://contacts/people/" + std::to_string(s.contacts.size() + 1);
      s.contacts.push_back(c);
      return ArgValue(c.uri);
    }};
    t["get_contact_info"] = {{}, [](const FunctionCall& call, DeviceState& s) -> std::optional<ArgValue> {
      Args a(call, {"name", "key"});
      auto name = a.str("name");
      const Contact* c = find_contact_by_name(s, name);
      if (!c) handler_fail("no contact named '" + name + "'");
      return ArgValue(contact_field(*c, a.str("key")));
    }};
    t["get_contact_info_from_uri"] = {{}, [](const FunctionCall& call, DeviceState& s) -> std::optional<ArgValue> {
      Args a(call, {"contact_uri", "key"});
      auto uri = a.str("contact_uri");
      for (const auto& c : s.contacts) {
        if (c.uri == uri) return ArgValue(contact_field(c, a.str("key")));
      }
      handler_fail("no contact with uri '" + uri + "'");
    }};
    t["ACTION_VIEW_CONTACT"] = {{StateField::OpenScreen}, [](const FunctionCall& call, DeviceState& s) -> std::optional<ArgValue> {
      Args a(call, {"contact_uri"});
      auto uri = a.str("contact_uri");
      bool known = std::any_of(s.contacts.begin(), s.contacts.end(), [&](const Contact& c) { return c.uri == uri; });
      if (!known) handler_fail("no contact with uri '" + uri + "'");
      s.open_screen = "contact:" + uri;
      return std::nullopt;
    }};
    t["dial"] = {{StateField::CallLog}, [](const FunctionCall& call, DeviceState& s) -> std::optional<ArgValue> {
      Args a(call, {"phone_number"});
      s.call_log.push_back(checked_phone(a.str("phone_number")));
      return std::nullopt;
    }};
    t["web_search"] = {{StateField::SearchHistory}, [](const FunctionCall& call, DeviceState& s) -> std::optional<ArgValue> {
      Args a(call, {"query", "engine"});
      s.search_history.push_back({non_empty(a.str("query"), "query"), a.opt_str("engine").value_or("google")});
      return std::nullopt;
    }};
    t["search_location"] = {{StateField::SearchHistory}, [](const FunctionCall& call, DeviceState& s) -> std::optional<ArgValue> {
      Args a(call, {"query"});
      s.search_history.push_back({non_empty(a.str("query"), "query"), "maps"});
      return std::nullopt;
    }};
    t["ACTION_IMAGE_CAPTURE"] = capture("photo", "content://media/external/images/media/");
    t["ACTION_VIDEO_CAPTURE"] = capture("video", "content://media/external/video/media/");
    for (const char* screen : {"ACTION_WIFI_SETTINGS", "ACTION_BLUETOOTH_SETTINGS", "ACTION_AIRPLANE_MODE_SETTINGS",
                               "ACTION_LOCATION_SOURCE_SETTINGS", "ACTION_DISPLAY_SETTINGS", "ACTION_SOUND_SETTINGS",
                               "ACTION_NFC_SETTINGS", "ACTION_DATE_SETTINGS", "ACTION_BATTERY_SAVER_SETTINGS"}) {
      std::string name(screen);
      t[name] = settings_screen(name.substr(std::string("ACTION_").size()));
    }
    t["send_message"] = {{StateField::SmsOutbox}, [](const FunctionCall& call, DeviceState& s) -> std::optional<ArgValue> {
      Args a(call, {"phone_number", "message", "subject", "attachments"});
      s.sms_outbox.push_back({checked_phone(a.str("phone_number")), a.str("message"), a.opt_str("subject"),
                              a.strings("attachments")});
      return std::nullopt;
    }};
    t["send_email"] = {{StateField::EmailOutbox}, [](const FunctionCall& call, DeviceState& s) -> std::optional<ArgValue> {
      Args a(call, {"to", "subject", "body", "cc", "bcc", "attachments"});
      EmailMessage m;
      for (auto& addr : a.strings("to")) m.to.push_back(checked_email(addr));
      if (m.to.empty()) handler_fail("send_email needs at least one recipient");
      m.subject = a.str("subject");
      m.body = a.opt_str("body");
      for (auto& addr : a.strings("cc")) m.cc.push_back(checked_email(addr));
      for (auto& addr : a.strings("bcc")) m.bcc.push_back(checked_email(addr));
      m.attachments = a.strings("attachments");
      s.email_outbox.push_back(std::move(m));
      return std::nullopt;
    }};
    return t;
  }();
  return table;
}

const Handler& handler_for(std::string_view function) {
  const auto& table = handlers();
  auto it = table.find(function);
  if (it == table.end())
    throw DispatchError(DispatchErrc::UnknownFunction, "no handler for '" + std::string(function) + "'");
  return it->second;
}

}  // namespace

std::vector<std::string> handler_names() {
  std::vector<std::string> out;
  for (const auto& [name, h] : handlers()) out.push_back(name);
  return out;
}

const std::set<StateField>& handler_fields(std::string_view function) { return handler_for(function).fields; }

DispatchOutcome dispatch(const FunctionCall& call, const DeviceState& state) {
  const Handler& h = handler_for(call.name);
  for (const auto& [k, v] : call.arguments) {
    if (v.contains_ref())
      throw DispatchError(DispatchErrc::UnresolvedRef, call.name + "." + k + " still holds a reference");
  }
  DispatchOutcome out{IntentResult{call.id, call.name, true, "", std::nullopt}, state};
  out.result.value = h.fn(call, out.state);
  return out;
}

ExecutionResult execute_plan(const CallPlan& plan, const DeviceState& state) {
  check_references(plan);
  auto order = topo_order(plan);
  ExecutionResult out{{}, state};
  std::vector<std::optional<ArgValue>> values(plan.size());
  for (std::size_t id : order) {
    FunctionCall call = plan.calls[id];
    for (auto& [k, v] : call.arguments) {
      v = v.map_refs([&](Ref r) -> ArgValue {
        if (!values[r.id])
          throw DispatchError(DispatchErrc::UnresolvedRef,
                              "call " + std::to_string(id) + " uses the result of call " + std::to_string(r.id) +
                                  ", which returned no value");
        return *values[r.id];
      });
    }
    try {
      auto step = dispatch(call, out.state);
      values[id] = step.result.value;
      out.results.push_back(std::move(step.result));
      out.state = std::move(step.state);
    } catch (const DispatchError& e) {
      if (e.kind() == DispatchErrc::UnresolvedRef) throw;
      out.results.push_back(IntentResult{id, call.name, false, e.what(), std::nullopt});
      break;
    }
  }
  return out;
}

ordered_json intent_result_to_json(const IntentResult& r) {
  ordered_json j;
  j["call_id"] = r.call_id;
  j["function"] = r.function;
  j["outcome"] = r.ok ? "ok" : "error";
  if (!r.ok) j["error"] = r.error;
  if (r.value) j["value"] = to_json(*r.value);
  return j;
}

std::int64_t parse_duration(std::string_view text) {
  auto fail = [&]() -> std::int64_t { handler_fail("cannot read '" + std::string(text) + "' as a duration"); };
  static const std::map<std::string, double, std::less<>> units = {
      {"s", 1},        {"sec", 1},     {"secs", 1},     {"second", 1},  {"seconds", 1},
      {"m", 60},       {"min", 60},    {"mins", 60},    {"minute", 60}, {"minutes", 60},
      {"h", 3600},     {"hr", 3600},   {"hrs", 3600},   {"hour", 3600}, {"hours", 3600},
  };
  std::string s = lower(text);
  std::size_t i = 0;
  auto skip_space = [&] {
    while (i < s.size() && (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == ',')) ++i;
  };
  double total = 0.0;
  int pairs = 0;
  skip_space();
  while (i < s.size()) {
    if (pairs > 0 && s.compare(i, 4, "and ") == 0) {
      i += 4;
      skip_space();
    }
    double amount = 0.0;
    if (s.compare(i, 3, "an ") == 0) {
      amount = 1.0;
      i += 3;
    } else if (s.compare(i, 2, "a ") == 0) {
      amount = 1.0;
      i += 2;
    } else {
      std::size_t start = i;
      while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) ++i;
      if (i == start) return fail();
      std::string num = s.substr(start, i - start);
      if (std::count(num.begin(), num.end(), '.') > 1 || num == ".") return fail();
      amount = std::stod(num);
    }
    while (i < s.size() && s[i] == ' ') ++i;
    std::size_t ustart = i;
    while (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) ++i;
    auto it = units.find(std::string_view(s).substr(ustart, i - ustart));
    if (it == units.end()) return fail();
    total += amount * it->second;
    ++pairs;
    skip_space();
  }
  if (pairs == 0 || total > 1e12) return fail();
  return static_cast<std::int64_t>(std::llround(total));
}

}  // namespace droidcall
