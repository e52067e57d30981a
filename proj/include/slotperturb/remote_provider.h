#ifndef SLOTPERTURB_REMOTE_PROVIDER_H_
#define SLOTPERTURB_REMOTE_PROVIDER_H_

// HTTP client for a masked-LM candidate service.
//
// Wire contract (JSON over HTTP/1.1):
//   POST /candidates  {"tokens": [...], "mask_index": i, "top_k": k}
//     200 -> {"candidates": [{"token": "...", "prob": p}, ...], ...}
//     400 on invalid requests, 503 while the model loads.
//   GET /health -> {"model": "...", "ready": true|false}
//
// The request carries the tokens with tokens[mask_index] replaced by
// "[MASK]". 1 <= top_k <= 200.

#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "slotperturb/synonyms.h"

namespace slotperturb {

inline constexpr std::size_t kMaxRemoteTopK = 200;
inline constexpr const char *kMaskToken = "[MASK]";

struct ServiceHealth {
  std::string model;
  bool ready = false;
};

class RemoteProvider : public CandidateProvider {
 public:
  // base_url like "http://127.0.0.1:8765". Throws ConfigError when the URL
  // cannot be parsed.
  explicit RemoteProvider(std::string base_url, double timeout_seconds = 30.0);
  ~RemoteProvider() override;

  std::vector<Candidate> candidates(std::span<const std::string> tokens,
                                    std::size_t mask_index,
                                    std::size_t top_k) const override;
  bool thread_safe() const override { return false; }
  std::string describe() const override { return "remote:" + base_url_; }

  ServiceHealth health() const;

  // Builds the request body for a query; exposed for contract tests.
  static std::string request_body(std::span<const std::string> tokens,
                                  std::size_t mask_index, std::size_t top_k);
  // Validates and decodes a 200 response body. Throws ProviderError when the
  // response breaks the contract.
  static std::vector<Candidate> decode_response(const std::string &body,
                                                std::size_t top_k);

 private:
  struct Client;
  std::string base_url_;
  std::unique_ptr<Client> client_;
  mutable std::mutex mu_;
};

}  // namespace slotperturb

#endif  // SLOTPERTURB_REMOTE_PROVIDER_H_
