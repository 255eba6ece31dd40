// Chat-completion transport: OpenAI-compatible HTTP backend, a
// content-addressed response cache, retries and a deterministic mock.

#ifndef TGG_LLM_CLIENT_H_
#define TGG_LLM_CLIENT_H_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tgg/graph.h"
#include "tgg/prompt.h"

namespace tgg {

struct GenerationParams {
  std::string model = "gpt-4";
  double temperature = 0;
  int max_tokens = 2048;
  std::vector<std::string> stop = {std::string(kEndMarker)};

  nlohmann::json ToJson() const;
  static GenerationParams FromJson(const nlohmann::json& j);
};

struct ChatRequest {
  std::vector<Message> messages;
  GenerationParams params;

  // Canonical serialization of (model, params, messages).
  std::string CanonicalJson() const;
  // SHA-256 of CanonicalJson().
  std::string Key() const;
};

struct ChatResponse {
  std::string text;
  nlohmann::json usage = nlohmann::json::object();
};

// A failed HTTP exchange. status is 0 for connection-level failures.
class HttpStatusError : public Error {
 public:
  HttpStatusError(int status, std::string body);
  int status() const { return status_; }
  const std::string& body() const { return body_; }

 private:
  int status_;
  std::string body_;
};

// Terminal client failure: non-transient status or exhausted retries.
class LlmError : public Error {
 public:
  LlmError(const std::string& what, int status, std::string request_hash);
  int status() const { return status_; }
  const std::string& request_hash() const { return request_hash_; }

 private:
  int status_;
  std::string request_hash_;
};

// 429, 5xx and connection failures.
bool IsTransientStatus(int status);

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  // Throws HttpStatusError on transport or status failure.
  virtual ChatResponse Complete(const ChatRequest& request) = 0;
};

inline constexpr std::string_view kDefaultApiKeyEnv = "OPENAI_API_KEY";

struct HttpBackendOptions {
  // e.g. "https://api.openai.com/v1" or "http://localhost:8000/v1".
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key_env = std::string(kDefaultApiKeyEnv);
  std::chrono::seconds timeout{180};
};

// POSTs to <base_url>/chat/completions.
class HttpBackend : public ChatBackend {
 public:
  explicit HttpBackend(HttpBackendOptions options);
  ChatResponse Complete(const ChatRequest& request) override;

 private:
  HttpBackendOptions options_;
  std::string scheme_host_port_;
  std::string path_prefix_;
};

struct CacheEntry {
  std::string key;
  std::string completion;
  std::string model;
  std::string created;  // UTC, ISO 8601
  nlohmann::json usage = nlohmann::json::object();
  nlohmann::json request;
};

// Directory of <key>.json files. Readers share, writers serialize; files
// are written to a temporary name and renamed into place.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  std::optional<CacheEntry> Get(const std::string& key) const;
  void Put(const CacheEntry& entry);
  bool Contains(const std::string& key) const;
  std::filesystem::path PathFor(const std::string& key) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  mutable std::shared_mutex mu_;
};

struct RetryPolicy {
  int max_attempts = 6;
  std::chrono::milliseconds initial_delay{1000};
  double multiplier = 2.0;
  std::chrono::milliseconds max_delay{60000};
};

struct ClientOptions {
  RetryPolicy retry;
  int max_in_flight = 4;
  // Serve from cache only; a miss is an LlmError with status 0.
  bool cache_only = false;
  // On a cache hit, also query the backend and record any divergence.
  bool verify_cached = false;
  // Injected for tests.
  std::function<void(std::chrono::milliseconds)> sleep;
};

struct ClientStats {
  std::uint64_t cache_hits = 0;
  std::uint64_t network_calls = 0;
  std::uint64_t retries = 0;
  std::vector<std::string> divergent_keys;
};

class LlmClient {
 public:
  // backend may be null for a cache-only client.
  LlmClient(std::shared_ptr<ChatBackend> backend,
            std::shared_ptr<ResponseCache> cache, ClientOptions options = {});

  std::string Complete(const std::vector<Message>& messages,
                       const GenerationParams& params);
  std::string Complete(const PromptBundle& bundle, const GenerationParams& params) {
    return Complete(bundle.messages, params);
  }

  ClientStats stats() const;
  ResponseCache* cache() const { return cache_.get(); }

 private:
  ChatResponse CallWithRetries(const ChatRequest& request, const std::string& key);

  std::shared_ptr<ChatBackend> backend_;
  std::shared_ptr<ResponseCache> cache_;
  ClientOptions options_;
  std::counting_semaphore<> in_flight_;
  mutable std::mutex stats_mu_;
  ClientStats stats_;
};

enum class MockPolicy { kGold, kRandomChain, kRefusal, kScripted };
std::string_view MockPolicyName(MockPolicy p);
MockPolicy ParseMockPolicy(std::string_view s);

inline constexpr std::string_view kMockRefusal =
    "I'm sorry, but I can't help with that request.";

// Answers prompts built by promptkit without a network:
//  - inference prompts: gold relations (plus a narrative for NoT), a chain
//    over the query's method order, a refusal, or a scripted completion;
//  - meta prompts: a narrative walking the demo's gold graph;
//  - judge prompts: a "yes" verdict counting every link as correct.
// Scenarios are found by title and event descriptions.
class MockBackend : public ChatBackend {
 public:
  MockBackend(MockPolicy policy, std::vector<Scenario> registry);

  // Scripted completions, by request key or by scenario id.
  void Script(const std::string& key_or_scenario, std::string completion);

  ChatResponse Complete(const ChatRequest& request) override;

  std::uint64_t calls() const { return calls_.load(); }

 private:
  const Scenario* Find(const std::string& title,
                       const std::vector<std::string>& descriptions) const;

  MockPolicy policy_;
  std::vector<Scenario> registry_;
  std::map<std::string, std::string> scripts_;
  std::atomic<std::uint64_t> calls_{0};
};

// The query class of a rendered prompt: its title and (label, description)
// methods in presentation order, plus which stubs it carries.
struct QueryView {
  std::string title;
  std::vector<std::pair<std::string, std::string>> methods;
  bool wants_narrative = false;
  bool has_relations = false;
};

// Reads the last class in text. Throws Error when there is none.
QueryView ReadLastClass(const std::string& text);

}  // namespace tgg

#endif  // TGG_LLM_CLIENT_H_
