#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <thread>

#include "revadv/oracle.hpp"
#include "revadv/zoo.hpp"

namespace revadv {

std::string base64_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

/// Hosts the classify protocol for one model:
///   POST /classify  {"image": "<base64 PNG>", "top_k": <int>}
///   200  {"labels": [{"name": "<class index>", "prob": <float>}, ...]}
/// descending by probability. Malformed requests get 400.
class ClassifyServer {
  public:
    ClassifyServer(ModelSpec spec, Weights weights, int default_top_k = 0);
    ~ClassifyServer();

    /// Binds and serves on a background thread; returns once ready.
    void start(const std::string& host, int port);
    /// Serves on the calling thread until stop() (CLI path).
    void run(const std::string& host, int port);
    void stop();
    int port() const { return port_; }

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::thread thread_;
    int port_ = 0;
};

/// Client side of the protocol. Non-200 responses and transport failures
/// retry with backoff up to `retries`; malformed response JSON is fatal.
/// A semaphore caps concurrent in-flight requests.
class HttpOracle : public QueryOracle {
  public:
    explicit HttpOracle(const std::string& base_url, int top_k = 0, int retries = 3,
                        int backoff_ms = 50, int max_in_flight = 4);
    ~HttpOracle() override;
    Classification classify(const Tensor& image) override;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace revadv
