#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "droidcall/errors.hpp"
#include "droidcall/value.hpp"

namespace droidcall {

enum class BackendErrc { BackendUnavailable, RetriesExhausted, MissingScript, EmptyPrompt, InvalidConfig };

std::string_view to_string(BackendErrc kind);

class BackendError : public KindError<BackendErrc> {
 public:
  using KindError::KindError;
};

struct ChatPrompt {
  std::string system;
  std::string user;
};

// system + "\n\n" + user, or just user when there is no system text.
std::string flatten_prompt(const ChatPrompt& prompt);

std::uint64_t fnv1a64(std::string_view bytes);

// 16 lowercase hex digits of fnv1a64(flatten_prompt(prompt)).
std::string prompt_digest(const ChatPrompt& prompt);
std::string prompt_digest(std::string_view flattened);

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;

  // Returns the raw assistant text. Must be callable from several threads.
  virtual std::string complete(const ChatPrompt& prompt) = 0;
};

// Replays responses keyed by prompt digest. Lookup order: the digest entry,
// the responder, then a "*" catch-all entry.
class MockBackend : public LlmBackend {
 public:
  // Consulted when the digest has no scripted entry; nullopt means no answer.
  using Responder = std::function<std::optional<std::string>(const ChatPrompt&)>;

  explicit MockBackend(std::map<std::string, std::string> script = {}, Responder responder = nullptr);

  // Parses a {"<digest>": "<response>"} document.
  static std::map<std::string, std::string> parse_script(std::string_view json_text);

  void add(std::string digest, std::string response);
  std::string complete(const ChatPrompt& prompt) override;

  std::size_t call_count() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::string> script_;
  Responder responder_;
  std::size_t calls_ = 0;
};

struct LlmBackendConfig {
  enum class Kind { Mock, Http };

  Kind backend = Kind::Mock;
  std::optional<std::string> endpoint;
  std::string model_name = "gpt-4-turbo";
  double temperature = 0.0;
  int max_retries = 3;
  int timeout_seconds = 120;
  std::optional<std::string> script_path;  // mock only

  // Throws BackendError(InvalidConfig).
  void validate() const;
};

// OpenAI-compatible chat-completions client. `endpoint` is the full URL, e.g.
// http://127.0.0.1:8000/v1/chat/completions.
class HttpBackend : public LlmBackend {
 public:
  HttpBackend(LlmBackendConfig config, std::string api_key);
  std::string complete(const ChatPrompt& prompt) override;

 private:
  LlmBackendConfig config_;
  std::string api_key_;
  std::string base_;
  std::string path_;
};

// Builds the configured backend. The mock reads `script_path` when set; the
// http backend reads DROIDCALL_API_KEY.
std::unique_ptr<LlmBackend> make_backend(const LlmBackendConfig& config);

std::string llm_complete(std::string_view prompt, LlmBackend& backend);

}  // namespace droidcall
