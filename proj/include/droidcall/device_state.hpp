#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "droidcall/errors.hpp"

namespace droidcall {

struct Alarm {
  int hour = 0;
  int minute = 0;
  std::optional<std::string> message;
  std::vector<std::string> days;

  friend bool operator==(const Alarm&, const Alarm&) = default;
};

struct Timer {
  std::int64_t duration_seconds = 0;
  std::optional<std::string> label;

  friend bool operator==(const Timer&, const Timer&) = default;
};

struct CalendarEvent {
  std::string title;
  std::string begin;  // ISO 8601
  std::string end;
  std::optional<std::string> location;
  std::optional<std::string> description;
  bool all_day = false;
  std::vector<std::string> attendees;

  friend bool operator==(const CalendarEvent&, const CalendarEvent&) = default;
};

struct Contact {
  std::string name;
  std::optional<std::string> phone;
  std::optional<std::string> email;
  std::optional<std::string> company;
  std::string uri;

  friend bool operator==(const Contact&, const Contact&) = default;
};

struct SmsMessage {
  std::string phone_number;
  std::string message;
  std::optional<std::string> subject;
  std::vector<std::string> attachments;

  friend bool operator==(const SmsMessage&, const SmsMessage&) = default;
};

struct EmailMessage {
  std::vector<std::string> to;
  std::string subject;
  std::optional<std::string> body;
  std::vector<std::string> cc;
  std::vector<std::string> bcc;
  std::vector<std::string> attachments;

  friend bool operator==(const EmailMessage&, const EmailMessage&) = default;
};

struct SearchEntry {
  std::string query;
  std::string engine;  // "maps" for location searches

  friend bool operator==(const SearchEntry&, const SearchEntry&) = default;
};

struct MediaItem {
  std::string mode;  // "photo" or "video"
  std::string uri;

  friend bool operator==(const MediaItem&, const MediaItem&) = default;
};

struct DeviceState {
  std::vector<Alarm> alarms;
  std::vector<Timer> timers;
  std::vector<CalendarEvent> calendar;
  std::vector<Contact> contacts;
  std::vector<std::string> call_log;
  std::vector<SmsMessage> sms_outbox;
  std::vector<EmailMessage> email_outbox;
  std::vector<SearchEntry> search_history;
  std::optional<std::string> open_screen;
  std::optional<std::string> camera_session;  // "photo" or "video"
  std::vector<MediaItem> media;

  friend bool operator==(const DeviceState&, const DeviceState&) = default;
};

// Top-level DeviceState members, used to declare what a handler may change.
enum class StateField {
  Alarms,
  Timers,
  Calendar,
  Contacts,
  CallLog,
  SmsOutbox,
  EmailOutbox,
  SearchHistory,
  OpenScreen,
  CameraSession,
  Media,
};

inline constexpr StateField kAllStateFields[] = {
    StateField::Alarms,     StateField::Timers,       StateField::Calendar,      StateField::Contacts,
    StateField::CallLog,    StateField::SmsOutbox,    StateField::EmailOutbox,   StateField::SearchHistory,
    StateField::OpenScreen, StateField::CameraSession, StateField::Media,
};

std::string_view to_string(StateField field);

// Fields whose values differ between the two states.
std::vector<StateField> changed_fields(const DeviceState& before, const DeviceState& after);

class CorruptSnapshot : public Error {
 public:
  using Error::Error;
};

// Canonical JSON: keys sorted, no insignificant whitespace.
std::string snapshot(const DeviceState& state);
DeviceState restore(std::string_view text);

}  // namespace droidcall
