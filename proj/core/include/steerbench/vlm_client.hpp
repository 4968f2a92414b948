#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace steerbench {

// One chat-completion request. Images are raw encoded bytes; they travel
// base64-inlined and are identified by content hash in fixtures.
struct ChatRequest {
  std::string prompt;
  std::vector<std::string> images;
  std::string model_id;
  double temperature = 0.0;
  int max_tokens = 256;
};

std::string sha256_hex(const std::string& bytes);
std::string base64_encode(const std::string& bytes);

// Key-sorted JSON form of a request used for hashing and fixture storage.
// The prompt is normalized (CRLF to LF, trailing whitespace stripped) and
// images are replaced by their SHA-256 hex digests.
std::string canonical_request_json(const ChatRequest& request);

// SHA-256 hex digest of canonical_request_json.
std::string request_hash(const ChatRequest& request);

// Completes a request against some backend and returns the model text.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

struct EndpointConfig {
  std::string base_url;  // e.g. "http://localhost:8000"
  std::string api_key_env = "STEERBENCH_VLM_API_KEY";
  double timeout_s = 60.0;
};

// OpenAI-compatible chat-completions endpoint. The credential is read from
// the environment variable named in the config at request time; it is never
// stored. A missing credential raises ConfigError naming the variable.
class HttpTransport : public Transport {
 public:
  explicit HttpTransport(EndpointConfig config);
  std::string complete(const ChatRequest& request) override;

 private:
  EndpointConfig config_;
};

// Test transport replaying a queue of canned responses.
class ScriptedTransport : public Transport {
 public:
  void push_response(std::string text);
  std::string complete(const ChatRequest& request) override;
  int calls() const { return calls_; }
  const std::vector<ChatRequest>& requests() const { return requests_; }

 private:
  std::deque<std::string> responses_;
  std::vector<ChatRequest> requests_;
  int calls_ = 0;
};

// Transport that must never be reached; completes by throwing.
class NullTransport : public Transport {
 public:
  std::string complete(const ChatRequest& request) override;
};

// Directory of <request-hash>.fixture files pairing a canonical request with
// the recorded response. Writes are atomic and guarded by an advisory file
// lock so concurrent recorders cannot interleave.
class FixtureStore {
 public:
  explicit FixtureStore(std::string dir);

  const std::string& dir() const { return dir_; }
  std::string path_for(const std::string& hash) const;
  bool contains(const std::string& hash) const;

  // Returns the recorded response. Throws FixtureMissingError naming the
  // hash when absent, or Error when the file fails its integrity check.
  std::string load(const std::string& hash) const;

  void save(const std::string& hash, const std::string& canonical_request,
            const std::string& response);

 private:
  std::string dir_;
  mutable std::mutex mutex_;
};

enum class ClientMode { live, record, replay };

std::string to_string(ClientMode mode);
ClientMode client_mode_from_string(const std::string& s);

struct RetryPolicy {
  int max_attempts = 3;
  double initial_backoff_s = 1.0;  // doubles per retry
};

// Mode-aware client. replay never touches the transport: a request whose
// fixture is absent raises FixtureMissingError. record consults the store
// first and only queries the transport on a miss. live always queries.
// At most max_concurrency requests are in flight across threads.
class VlmClient {
 public:
  VlmClient(ClientMode mode, std::shared_ptr<Transport> transport,
            std::shared_ptr<FixtureStore> store, int max_concurrency = 4,
            RetryPolicy retry = RetryPolicy{},
            std::function<void(double)> sleep_fn = {});
  ~VlmClient();

  ClientMode mode() const { return mode_; }
  std::string complete(const ChatRequest& request);

 private:
  std::string call_with_retries(const ChatRequest& request);

  ClientMode mode_;
  std::shared_ptr<Transport> transport_;
  std::shared_ptr<FixtureStore> store_;
  RetryPolicy retry_;
  std::function<void(double)> sleep_fn_;
  struct Gate;
  std::unique_ptr<Gate> gate_;
};

}  // namespace steerbench
