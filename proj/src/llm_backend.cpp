#include "droidcall/llm_backend.hpp"

#include <cstdio>
#include <cstdlib>

#include "droidcall/io.hpp"
#include "httplib.h"

namespace droidcall {

std::string_view to_string(BackendErrc kind) {
  switch (kind) {
    case BackendErrc::BackendUnavailable: return "BackendUnavailable";
    case BackendErrc::RetriesExhausted: return "RetriesExhausted";
    case BackendErrc::MissingScript: return "MissingScript";
    case BackendErrc::EmptyPrompt: return "EmptyPrompt";
    case BackendErrc::InvalidConfig: return "InvalidConfig";
  }
  return "BackendError";
}

std::string flatten_prompt(const ChatPrompt& prompt) {
  if (prompt.system.empty()) return prompt.user;
  return prompt.system + "\n\n" + prompt.user;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string prompt_digest(std::string_view flattened) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(flattened)));
  return buf;
}

std::string prompt_digest(const ChatPrompt& prompt) { return prompt_digest(flatten_prompt(prompt)); }

MockBackend::MockBackend(std::map<std::string, std::string> script, Responder responder)
    : script_(std::move(script)), responder_(std::move(responder)) {}

std::map<std::string, std::string> MockBackend::parse_script(std::string_view json_text) {
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw BackendError(BackendErrc::InvalidConfig, "mock script must be a JSON object of digest -> response");
  std::map<std::string, std::string> out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_string())
      throw BackendError(BackendErrc::InvalidConfig, "mock response for " + it.key() + " is not a string");
    out.emplace(it.key(), it.value().get<std::string>());
  }
  return out;
}

void MockBackend::add(std::string digest, std::string response) {
  std::lock_guard lock(mu_);
  script_[std::move(digest)] = std::move(response);
}

std::string MockBackend::complete(const ChatPrompt& prompt) {
  std::string flat = flatten_prompt(prompt);
  if (flat.empty()) throw BackendError(BackendErrc::EmptyPrompt, "prompt is empty");
  std::string digest = prompt_digest(flat);
  Responder responder;
  {
    std::lock_guard lock(mu_);
    ++calls_;
    if (auto it = script_.find(digest); it != script_.end()) return it->second;
    responder = responder_;
  }
  if (responder) {
    if (auto r = responder(prompt)) return *r;
  }
  {
    std::lock_guard lock(mu_);
    if (auto it = script_.find("*"); it != script_.end()) return it->second;
  }
  throw BackendError(BackendErrc::MissingScript, "no scripted response for digest " + digest);
}

std::size_t MockBackend::call_count() const {
  std::lock_guard lock(mu_);
  return calls_;
}

void LlmBackendConfig::validate() const {
  if (max_retries < 0) throw BackendError(BackendErrc::InvalidConfig, "max_retries must be >= 0");
  if (backend == Kind::Http && (!endpoint || endpoint->empty()))
    throw BackendError(BackendErrc::InvalidConfig, "the http backend needs an endpoint");
  if (timeout_seconds <= 0) throw BackendError(BackendErrc::InvalidConfig, "timeout_seconds must be positive");
}

HttpBackend::HttpBackend(LlmBackendConfig config, std::string api_key)
    : config_(std::move(config)), api_key_(std::move(api_key)) {
  config_.validate();
  const std::string& url = *config_.endpoint;
  auto scheme = url.find("://");
  if (scheme == std::string::npos) throw BackendError(BackendErrc::InvalidConfig, "endpoint must be a URL: " + url);
  auto slash = url.find('/', scheme + 3);
  base_ = url.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : url.substr(slash);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (url.compare(0, 8, "https://") == 0)
    throw BackendError(BackendErrc::InvalidConfig, "this build has no TLS support");
#endif
}

std::string HttpBackend::complete(const ChatPrompt& prompt) {
  if (prompt.user.empty() && prompt.system.empty())
    throw BackendError(BackendErrc::EmptyPrompt, "prompt is empty");
  ordered_json body;
  body["model"] = config_.model_name;
  body["temperature"] = config_.temperature;
  body["messages"] = ordered_json::array();
  if (!prompt.system.empty()) body["messages"].push_back({{"role", "system"}, {"content", prompt.system}});
  body["messages"].push_back({{"role", "user"}, {"content", prompt.user}});
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    httplib::Client client(base_);
    client.set_connection_timeout(config_.timeout_seconds);
    client.set_read_timeout(config_.timeout_seconds);
    auto res = client.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status < 200 || res->status >= 300)
      throw BackendError(BackendErrc::BackendUnavailable,
                         "HTTP " + std::to_string(res->status) + " from " + base_ + path_);
    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded()) throw BackendError(BackendErrc::BackendUnavailable, "response body is not JSON");
    try {
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
      throw BackendError(BackendErrc::BackendUnavailable, "response has no choices[0].message.content");
    }
  }
  throw BackendError(BackendErrc::RetriesExhausted,
                     std::to_string(config_.max_retries + 1) + " attempts failed: " + last_error);
}

std::unique_ptr<LlmBackend> make_backend(const LlmBackendConfig& config) {
  config.validate();
  if (config.backend == LlmBackendConfig::Kind::Http) {
    const char* key = std::getenv("DROIDCALL_API_KEY");
    return std::make_unique<HttpBackend>(config, key ? key : "");
  }
  std::map<std::string, std::string> script;
  if (config.script_path) script = MockBackend::parse_script(read_text_file(*config.script_path));
  return std::make_unique<MockBackend>(std::move(script));
}

std::string llm_complete(std::string_view prompt, LlmBackend& backend) {
  if (prompt.empty()) throw BackendError(BackendErrc::EmptyPrompt, "prompt is empty");
  return backend.complete(ChatPrompt{"", std::string(prompt)});
}

}  // namespace droidcall
