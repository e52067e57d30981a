#include "slotperturb/remote_provider.h"

#include <algorithm>

#include <httplib.h>
#include <json.hpp>

#include "slotperturb/errors.h"

namespace slotperturb {

struct RemoteProvider::Client {
  explicit Client(const std::string &url) : http(url) {}
  httplib::Client http;
};

RemoteProvider::RemoteProvider(std::string base_url, double timeout_seconds)
    : base_url_(std::move(base_url)) {
  if (base_url_.rfind("http://", 0) != 0 && base_url_.rfind("https://", 0) != 0) {
    throw ConfigError("provider URL must start with http:// : " + base_url_);
  }
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  client_ = std::make_unique<Client>(base_url_);
  if (!client_->http.is_valid()) {
    throw ConfigError("unsupported provider URL: " + base_url_);
  }
  auto secs = static_cast<time_t>(timeout_seconds);
  client_->http.set_connection_timeout(secs, 0);
  client_->http.set_read_timeout(secs, 0);
}

RemoteProvider::~RemoteProvider() = default;

std::string RemoteProvider::request_body(std::span<const std::string> tokens,
                                         std::size_t mask_index,
                                         std::size_t top_k) {
  nlohmann::json tok = nlohmann::json::array();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    tok.push_back(i == mask_index ? std::string(kMaskToken) : tokens[i]);
  }
  nlohmann::json body = {{"tokens", tok},
                         {"mask_index", mask_index},
                         {"top_k", std::clamp<std::size_t>(top_k, 1, kMaxRemoteTopK)}};
  return body.dump();
}

std::vector<Candidate> RemoteProvider::decode_response(const std::string &body,
                                                       std::size_t top_k) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error &e) {
    throw ProviderError(std::string("response is not JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("candidates") ||
      !doc["candidates"].is_array()) {
    throw ProviderError("response lacks a candidates array");
  }
  std::vector<Candidate> out;
  double previous = 1.0;
  for (const auto &item : doc["candidates"]) {
    if (!item.is_object() || !item.contains("token") || !item.contains("prob") ||
        !item["token"].is_string() || !item["prob"].is_number()) {
      throw ProviderError("malformed candidate entry: " + item.dump());
    }
    double p = item["prob"].get<double>();
    if (!(p > 0.0 && p <= 1.0)) {
      throw ProviderError("candidate probability out of (0,1]: " + item.dump());
    }
    if (p > previous) throw ProviderError("candidate probabilities not sorted");
    previous = p;
    out.push_back(Candidate{item["token"].get<std::string>(), p});
  }
  if (out.size() > std::clamp<std::size_t>(top_k, 1, kMaxRemoteTopK)) {
    throw ProviderError("service returned more than top_k candidates");
  }
  return out;
}

std::vector<Candidate> RemoteProvider::candidates(
    std::span<const std::string> tokens, std::size_t mask_index,
    std::size_t top_k) const {
  std::string body = request_body(tokens, mask_index, top_k);
  std::lock_guard<std::mutex> lock(mu_);
  auto res = client_->http.Post("/candidates", body, "application/json");
  if (!res) {
    throw ProviderError(describe() + ": request failed: " +
                        httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw ProviderError(describe() + ": HTTP " + std::to_string(res->status) +
                        ": " + res->body);
  }
  return decode_response(res->body, top_k);
}

ServiceHealth RemoteProvider::health() const {
  std::lock_guard<std::mutex> lock(mu_);
  auto res = client_->http.Get("/health");
  if (!res) {
    throw ProviderError(describe() + ": health check failed: " +
                        httplib::to_string(res.error()));
  }
  ServiceHealth h;
  try {
    auto doc = nlohmann::json::parse(res->body);
    h.model = doc.value("model", "");
    h.ready = res->status == 200 && doc.value("ready", false);
  } catch (const nlohmann::json::exception &e) {
    throw ProviderError(describe() + ": bad health response: " + e.what());
  }
  return h;
}

}  // namespace slotperturb
