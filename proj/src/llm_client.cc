#include "tgg/llm_client.h"

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "tgg/seeding.h"

namespace tgg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json MessagesJson(const std::vector<Message>& messages) {
  json out = json::array();
  for (const auto& m : messages) out.push_back({{"role", m.role}, {"content", m.content}});
  return out;
}

std::string UtcNow() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void DefaultSleep(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

}  // namespace

json GenerationParams::ToJson() const {
  return {{"model", model},
          {"temperature", temperature},
          {"max_tokens", max_tokens},
          {"stop", stop}};
}

GenerationParams GenerationParams::FromJson(const json& j) {
  GenerationParams p;
  p.model = j.value("model", p.model);
  p.temperature = j.value("temperature", p.temperature);
  p.max_tokens = j.value("max_tokens", p.max_tokens);
  if (j.contains("stop")) p.stop = j.at("stop").get<std::vector<std::string>>();
  return p;
}

std::string ChatRequest::CanonicalJson() const {
  // nlohmann::json objects keep keys sorted, so dump() is canonical.
  return json{{"params", params.ToJson()}, {"messages", MessagesJson(messages)}}.dump();
}

std::string ChatRequest::Key() const { return Sha256Hex(CanonicalJson()); }

HttpStatusError::HttpStatusError(int status, std::string body)
    : Error("HTTP " + std::to_string(status) + ": " + body.substr(0, 300)),
      status_(status),
      body_(std::move(body)) {}

LlmError::LlmError(const std::string& what, int status, std::string request_hash)
    : Error(what + " (status " + std::to_string(status) + ", request " +
            request_hash + ")"),
      status_(status),
      request_hash_(std::move(request_hash)) {}

bool IsTransientStatus(int status) {
  return status == 0 || status == 408 || status == 429 ||
         (status >= 500 && status <= 599);
}

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {
  std::string url = options_.base_url;
  while (!url.empty() && url.back() == '/') url.pop_back();
  auto scheme = url.find("://");
  if (scheme == std::string::npos) throw Error("base URL needs a scheme: " + url);
  auto path = url.find('/', scheme + 3);
  scheme_host_port_ = url.substr(0, path);
  path_prefix_ = path == std::string::npos ? "" : url.substr(path);
}

ChatResponse HttpBackend::Complete(const ChatRequest& request) {
  httplib::Client client(scheme_host_port_);
  const auto secs = options_.timeout.count();
  client.set_connection_timeout(secs, 0);
  client.set_read_timeout(secs, 0);
  client.set_write_timeout(secs, 0);
  httplib::Headers headers;
  if (const char* key = std::getenv(options_.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  json body = request.params.ToJson();
  body["messages"] = MessagesJson(request.messages);
  auto res = client.Post(path_prefix_ + "/chat/completions", headers, body.dump(),
                         "application/json");
  if (!res) throw HttpStatusError(0, httplib::to_string(res.error()));
  if (res->status == 400 && res->body.find("content_filter") != std::string::npos) {
    // Filtered prompts are returned as refusal text, to be scored invalid.
    ChatResponse out;
    auto j = json::parse(res->body, nullptr, false);
    out.text = !j.is_discarded() && j.contains("error")
                   ? j["error"].value("message", res->body)
                   : res->body;
    return out;
  }
  if (res->status != 200) throw HttpStatusError(res->status, res->body);
  auto j = json::parse(res->body, nullptr, false);
  if (j.is_discarded() || !j.contains("choices") || j["choices"].empty()) {
    throw HttpStatusError(502, "malformed completion body: " + res->body);
  }
  ChatResponse out;
  const json& message = j["choices"][0]["message"];
  if (message.contains("content") && message["content"].is_string()) {
    out.text = message["content"].get<std::string>();
  }
  if (j.contains("usage")) out.usage = j["usage"];
  return out;
}

ResponseCache::ResponseCache(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
}

fs::path ResponseCache::PathFor(const std::string& key) const {
  return dir_ / (key + ".json");
}

bool ResponseCache::Contains(const std::string& key) const {
  std::shared_lock lock(mu_);
  return fs::exists(PathFor(key));
}

std::optional<CacheEntry> ResponseCache::Get(const std::string& key) const {
  std::shared_lock lock(mu_);
  std::ifstream in(PathFor(key), std::ios::binary);
  if (!in) return std::nullopt;
  json j = json::parse(in);
  CacheEntry e;
  e.key = j.at("key").get<std::string>();
  e.completion = j.at("completion").get<std::string>();
  e.model = j.value("model", "");
  e.created = j.value("created", "");
  e.usage = j.value("usage", json::object());
  e.request = j.value("request", json());
  return e;
}

void ResponseCache::Put(const CacheEntry& entry) {
  std::unique_lock lock(mu_);
  const fs::path path = PathFor(entry.key);
  if (fs::exists(path)) return;
  json j = {{"key", entry.key},
            {"completion", entry.completion},
            {"model", entry.model},
            {"created", entry.created},
            {"usage", entry.usage},
            {"request", entry.request}};
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write " + tmp.string());
    out << j.dump(2) << "\n";
  }
  fs::rename(tmp, path);
}

LlmClient::LlmClient(std::shared_ptr<ChatBackend> backend,
                     std::shared_ptr<ResponseCache> cache, ClientOptions options)
    : backend_(std::move(backend)),
      cache_(std::move(cache)),
      options_(std::move(options)),
      in_flight_(std::max(1, options_.max_in_flight)) {
  if (!options_.sleep) options_.sleep = DefaultSleep;
}

ClientStats LlmClient::stats() const {
  std::lock_guard lock(stats_mu_);
  return stats_;
}

ChatResponse LlmClient::CallWithRetries(const ChatRequest& request,
                                        const std::string& key) {
  if (!backend_) throw LlmError("no backend configured", 0, key);
  auto delay = options_.retry.initial_delay;
  for (int attempt = 1;; ++attempt) {
    try {
      in_flight_.acquire();
      struct Release {
        std::counting_semaphore<>& s;
        ~Release() { s.release(); }
      } release{in_flight_};
      {
        std::lock_guard lock(stats_mu_);
        ++stats_.network_calls;
      }
      return backend_->Complete(request);
    } catch (const HttpStatusError& e) {
      if (!IsTransientStatus(e.status())) {
        throw LlmError("request failed: " + std::string(e.what()), e.status(), key);
      }
      if (attempt >= options_.retry.max_attempts) {
        throw LlmError("retries exhausted: " + std::string(e.what()), e.status(), key);
      }
    }
    {
      std::lock_guard lock(stats_mu_);
      ++stats_.retries;
    }
    options_.sleep(delay);
    delay = std::min(options_.retry.max_delay,
                     std::chrono::milliseconds(static_cast<long long>(
                         delay.count() * options_.retry.multiplier)));
  }
}

std::string LlmClient::Complete(const std::vector<Message>& messages,
                                const GenerationParams& params) {
  if (messages.empty()) throw Error("empty message list");
  ChatRequest request{messages, params};
  const std::string key = request.Key();
  if (cache_) {
    if (auto hit = cache_->Get(key)) {
      {
        std::lock_guard lock(stats_mu_);
        ++stats_.cache_hits;
      }
      if (options_.verify_cached && backend_ && !options_.cache_only) {
        ChatResponse fresh = CallWithRetries(request, key);
        if (fresh.text != hit->completion) {
          std::lock_guard lock(stats_mu_);
          stats_.divergent_keys.push_back(key);
        }
      }
      return hit->completion;
    }
  }
  if (options_.cache_only) throw LlmError("cache miss", 0, key);
  ChatResponse response = CallWithRetries(request, key);
  if (cache_) {
    CacheEntry entry;
    entry.key = key;
    entry.completion = response.text;
    entry.model = params.model;
    entry.created = UtcNow();
    entry.usage = response.usage;
    entry.request = json::parse(request.CanonicalJson());
    cache_->Put(entry);
  }
  return response.text;
}

}  // namespace tgg
