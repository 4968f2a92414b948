#include "steerbench/vlm_client.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <semaphore>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "steerbench/errors.hpp"

namespace steerbench {

namespace {

constexpr const char* kFixtureMagic = "steerbench-fixture v1";

std::string normalize_prompt(const std::string& prompt) {
  std::string out;
  out.reserve(prompt.size());
  for (std::size_t i = 0; i < prompt.size(); ++i) {
    if (prompt[i] == '\r' && i + 1 < prompt.size() && prompt[i + 1] == '\n') {
      continue;  // CRLF collapses to LF
    }
    out += prompt[i];
  }
  while (!out.empty() &&
         (out.back() == '\n' || out.back() == '\r' || out.back() == ' ' ||
          out.back() == '\t')) {
    out.pop_back();
  }
  return out;
}

std::string iso_utc_now() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Reads "<label> <byte-count>\n<bytes>\n" from a fixture stream.
std::string read_sized_block(std::istream& in, const std::string& label,
                             const std::string& path) {
  std::string header;
  if (!std::getline(in, header)) {
    throw Error("fixture truncated before " + label + " block: " + path);
  }
  std::istringstream hs(header);
  std::string got_label;
  std::size_t count = 0;
  if (!(hs >> got_label >> count) || got_label != label) {
    throw Error("fixture has malformed " + label + " header: " + path);
  }
  std::string bytes(count, '\0');
  in.read(bytes.data(), static_cast<std::streamsize>(count));
  if (in.gcount() != static_cast<std::streamsize>(count)) {
    throw Error("fixture " + label + " block truncated: " + path);
  }
  if (in.get() != '\n') {
    throw Error("fixture " + label + " block missing terminator: " + path);
  }
  return bytes;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::string base64_encode(const std::string& bytes) {
  std::string out;
  out.resize(4 * ((bytes.size() + 2) / 3) + 1);
  int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                          reinterpret_cast<const unsigned char*>(bytes.data()),
                          static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string canonical_request_json(const ChatRequest& request) {
  nlohmann::json j;  // plain json keeps keys lexicographically sorted
  nlohmann::json images = nlohmann::json::array();
  for (const std::string& img : request.images) {
    images.push_back(sha256_hex(img));
  }
  j["images"] = images;
  j["max_tokens"] = request.max_tokens;
  j["model_id"] = request.model_id;
  j["prompt"] = normalize_prompt(request.prompt);
  j["temperature"] = request.temperature;
  return j.dump();
}

std::string request_hash(const ChatRequest& request) {
  return sha256_hex(canonical_request_json(request));
}

// ---------------------------------------------------------------------------
// Transports

HttpTransport::HttpTransport(EndpointConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) {
    throw ConfigError("endpoint base_url is empty");
  }
}

std::string HttpTransport::complete(const ChatRequest& request) {
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw ConfigError("environment variable " + config_.api_key_env +
                      " is not set (required for live endpoint access)");
  }
  if (request.model_id.empty()) {
    throw ConfigError("request model_id is empty; pass --model or set it in "
                      "the endpoint config");
  }

  nlohmann::json content = nlohmann::json::array();
  content.push_back({{"type", "text"}, {"text", request.prompt}});
  for (const std::string& img : request.images) {
    content.push_back(
        {{"type", "image_url"},
         {"image_url",
          {{"url", "data:image/x-portable-pixmap;base64," + base64_encode(img)}}}});
  }
  nlohmann::json body;
  body["model"] = request.model_id;
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;
  body["messages"] = nlohmann::json::array(
      {{{"role", "user"}, {"content", content}}});

  httplib::Client client(config_.base_url);
  client.set_connection_timeout(static_cast<time_t>(config_.timeout_s), 0);
  client.set_read_timeout(static_cast<time_t>(config_.timeout_s), 0);
  httplib::Headers headers{
      {"Authorization", std::string("Bearer ") + key},
  };
  auto res = client.Post("/v1/chat/completions", headers, body.dump(),
                         "application/json");
  if (!res) {
    throw TransportError("no response from " + config_.base_url + ": " +
                         httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    std::string snippet = res->body.substr(0, 200);
    throw EndpointError("endpoint returned HTTP " + std::to_string(res->status) +
                            ": " + snippet,
                        res->status);
  }
  try {
    nlohmann::json parsed = nlohmann::json::parse(res->body);
    return parsed.at("choices").at(0).at("message").at("content")
        .get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed endpoint response: ") + e.what());
  }
}

void ScriptedTransport::push_response(std::string text) {
  responses_.push_back(std::move(text));
}

std::string ScriptedTransport::complete(const ChatRequest& request) {
  ++calls_;
  requests_.push_back(request);
  if (responses_.empty()) {
    throw TransportError("scripted transport has no response queued");
  }
  std::string text = std::move(responses_.front());
  responses_.pop_front();
  return text;
}

std::string NullTransport::complete(const ChatRequest&) {
  throw TransportError("transport disabled: this code path must not reach "
                       "the network");
}

// ---------------------------------------------------------------------------
// Fixture store

FixtureStore::FixtureStore(std::string dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw ConfigError("cannot create fixture directory " + dir_);
}

std::string FixtureStore::path_for(const std::string& hash) const {
  return dir_ + "/" + hash + ".fixture";
}

bool FixtureStore::contains(const std::string& hash) const {
  std::lock_guard<std::mutex> lock(mutex_);
  return std::filesystem::exists(path_for(hash));
}

std::string FixtureStore::load(const std::string& hash) const {
  std::lock_guard<std::mutex> lock(mutex_);
  std::string path = path_for(hash);
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FixtureMissingError("no fixture for request hash " + hash +
                              " (expected " + path + ")");
  }
  std::string magic;
  std::getline(in, magic);
  if (magic != kFixtureMagic) {
    throw Error("not a fixture file (bad magic): " + path);
  }
  std::string recorded_at;
  std::getline(in, recorded_at);  // informational only
  std::string request = read_sized_block(in, "request", path);
  if (sha256_hex(request) != hash) {
    throw Error("fixture integrity check failed (request hash mismatch): " +
                path);
  }
  return read_sized_block(in, "response", path);
}

void FixtureStore::save(const std::string& hash,
                        const std::string& canonical_request,
                        const std::string& response) {
  if (sha256_hex(canonical_request) != hash) {
    throw InvalidArgumentError("fixture save: hash does not match request");
  }
  std::lock_guard<std::mutex> lock(mutex_);

  // Advisory lock keeps concurrent recorder processes from interleaving.
  std::string lock_path = dir_ + "/.lock";
  int lock_fd = ::open(lock_path.c_str(), O_CREAT | O_RDWR, 0644);
  if (lock_fd < 0) throw Error("cannot open fixture lock file " + lock_path);
  if (::flock(lock_fd, LOCK_EX) != 0) {
    ::close(lock_fd);
    throw Error("cannot lock fixture directory " + dir_);
  }

  std::string path = path_for(hash);
  bool ok = true;
  std::string failure;
  try {
    if (std::filesystem::exists(path)) {
      // Idempotent overwrite only; diverging content means a stale or
      // corrupt fixture the caller must resolve.
      std::ifstream in(path, std::ios::binary);
      std::string magic, recorded_at;
      std::getline(in, magic);
      std::getline(in, recorded_at);
      std::string old_request = read_sized_block(in, "request", path);
      std::string old_response = read_sized_block(in, "response", path);
      if (old_request != canonical_request || old_response != response) {
        throw Error("fixture write collision: " + path +
                    " already holds different content");
      }
    } else {
      std::string tmp = path + ".tmp";
      {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error("cannot write fixture " + tmp);
        out << kFixtureMagic << '\n';
        out << "recorded-at " << iso_utc_now() << '\n';
        out << "request " << canonical_request.size() << '\n'
            << canonical_request << '\n';
        out << "response " << response.size() << '\n' << response << '\n';
      }
      std::filesystem::rename(tmp, path);
    }
  } catch (const std::exception& e) {
    ok = false;
    failure = e.what();
  }
  ::flock(lock_fd, LOCK_UN);
  ::close(lock_fd);
  if (!ok) throw Error(failure);
}

// ---------------------------------------------------------------------------
// Client

std::string to_string(ClientMode mode) {
  switch (mode) {
    case ClientMode::live: return "live";
    case ClientMode::record: return "record";
    case ClientMode::replay: return "replay";
  }
  throw InvalidArgumentError("unknown ClientMode");
}

ClientMode client_mode_from_string(const std::string& s) {
  if (s == "live") return ClientMode::live;
  if (s == "record") return ClientMode::record;
  if (s == "replay") return ClientMode::replay;
  throw InvalidArgumentError("unknown client mode: " + s +
                             " (valid: live, record, replay)");
}

struct VlmClient::Gate {
  explicit Gate(int slots) : semaphore(slots) {}
  std::counting_semaphore<> semaphore;
};

VlmClient::VlmClient(ClientMode mode, std::shared_ptr<Transport> transport,
                     std::shared_ptr<FixtureStore> store, int max_concurrency,
                     RetryPolicy retry, std::function<void(double)> sleep_fn)
    : mode_(mode),
      transport_(std::move(transport)),
      store_(std::move(store)),
      retry_(retry),
      sleep_fn_(std::move(sleep_fn)) {
  if (max_concurrency < 1) {
    throw InvalidArgumentError("max_concurrency must be at least 1");
  }
  if (retry_.max_attempts < 1) {
    throw InvalidArgumentError("retry max_attempts must be at least 1");
  }
  if (mode_ != ClientMode::live && !store_) {
    throw ConfigError("record/replay modes need a fixture store");
  }
  if (mode_ != ClientMode::replay && !transport_) {
    throw ConfigError("live/record modes need a transport");
  }
  if (!sleep_fn_) {
    sleep_fn_ = [](double seconds) {
      std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
    };
  }
  gate_ = std::make_unique<Gate>(max_concurrency);
}

VlmClient::~VlmClient() = default;

std::string VlmClient::call_with_retries(const ChatRequest& request) {
  double backoff = retry_.initial_backoff_s;
  for (int attempt = 1;; ++attempt) {
    try {
      return transport_->complete(request);
    } catch (const ConfigError&) {
      throw;  // configuration problems never resolve by retrying
    } catch (const EndpointError& e) {
      bool retryable = e.status() >= 500 || e.status() == 429;
      if (!retryable || attempt >= retry_.max_attempts) throw;
    } catch (const TransportError&) {
      if (attempt >= retry_.max_attempts) throw;
    }
    sleep_fn_(backoff);
    backoff *= 2.0;
  }
}

std::string VlmClient::complete(const ChatRequest& request) {
  gate_->semaphore.acquire();
  struct Release {
    Gate* gate;
    ~Release() { gate->semaphore.release(); }
  } release{gate_.get()};

  std::string hash = request_hash(request);
  switch (mode_) {
    case ClientMode::replay:
      return store_->load(hash);
    case ClientMode::record: {
      if (store_->contains(hash)) {
        return store_->load(hash);
      }
      std::string response = call_with_retries(request);
      store_->save(hash, canonical_request_json(request), response);
      return response;
    }
    case ClientMode::live:
      return call_with_retries(request);
  }
  throw InvalidArgumentError("unknown ClientMode");
}

}  // namespace steerbench
