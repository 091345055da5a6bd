#include "revadv/wire.hpp"

#include <httplib.h>

#include <chrono>
#include <condition_variable>
#include <mutex>
#include <nlohmann/json.hpp>

#include "revadv/errors.hpp"
#include "revadv/image.hpp"
#include "revadv/imageio.hpp"

using nlohmann::json;

namespace revadv {

namespace {
constexpr char kB64Table[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    for (std::size_t i = 0; i < bytes.size(); i += 3) {
        std::uint32_t v = static_cast<std::uint32_t>(bytes[i]) << 16;
        const bool b1 = i + 1 < bytes.size(), b2 = i + 2 < bytes.size();
        if (b1) v |= static_cast<std::uint32_t>(bytes[i + 1]) << 8;
        if (b2) v |= bytes[i + 2];
        out.push_back(kB64Table[(v >> 18) & 0x3F]);
        out.push_back(kB64Table[(v >> 12) & 0x3F]);
        out.push_back(b1 ? kB64Table[(v >> 6) & 0x3F] : '=');
        out.push_back(b2 ? kB64Table[v & 0x3F] : '=');
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
    auto value_of = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    std::vector<std::uint8_t> out;
    int acc = 0, bits = 0;
    for (char c : text) {
        if (c == '=' || c == '\n' || c == '\r') continue;
        const int v = value_of(c);
        if (v < 0) throw FormatError("base64: invalid character");
        acc = (acc << 6) | v;
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xFF));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Server
// ---------------------------------------------------------------------------

struct ClassifyServer::Impl {
    ModelSpec spec;
    Weights weights;
    int default_top_k = 0;
    httplib::Server server;
};

ClassifyServer::ClassifyServer(ModelSpec spec, Weights weights, int default_top_k)
    : impl_(std::make_unique<Impl>()) {
    impl_->spec = spec;
    impl_->weights = std::move(weights);
    impl_->default_top_k = default_top_k;
    impl_->server.Post("/classify", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            const json body = json::parse(req.body);
            if (!body.contains("image")) {
                res.status = 400;
                res.set_content(R"({"error":"missing image field"})", "application/json");
                return;
            }
            const auto png = base64_decode(body["image"].get<std::string>());
            const ImageU8 img = decode_png(png);
            int top_k = impl_->default_top_k;
            if (body.contains("top_k")) top_k = body["top_k"].get<int>();
            const auto probs = predict(impl_->spec, impl_->weights, to_unit(img));
            const Classification cls = rank_probabilities(probs, top_k);
            json labels = json::array();
            for (const auto& lp : cls)
                labels.push_back({{"name", std::to_string(lp.label)},
                                  {"prob", static_cast<double>(lp.prob)}});
            res.set_content(json{{"labels", labels}}.dump(), "application/json");
        } catch (const std::exception& e) {
            res.status = 400;
            res.set_content(json{{"error", e.what()}}.dump(), "application/json");
        }
    });
    impl_->server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("ok", "text/plain");
    });
}

ClassifyServer::~ClassifyServer() { stop(); }

void ClassifyServer::start(const std::string& host, int port) {
    if (port == 0) {
        port_ = impl_->server.bind_to_any_port(host);
    } else {
        if (!impl_->server.bind_to_port(host, port))
            throw TransportError("serve: cannot bind " + host + ":" + std::to_string(port));
        port_ = port;
    }
    thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void ClassifyServer::run(const std::string& host, int port) {
    port_ = port;
    if (!impl_->server.listen(host, port))
        throw TransportError("serve: cannot listen on " + host + ":" + std::to_string(port));
}

void ClassifyServer::stop() {
    impl_->server.stop();
    if (thread_.joinable()) thread_.join();
}

// ---------------------------------------------------------------------------
// Client
// ---------------------------------------------------------------------------

struct HttpOracle::Impl {
    std::string host;
    int port = 0;
    int top_k;
    int retries;
    int backoff_ms;
    int max_in_flight;
    std::mutex mu;
    std::condition_variable cv;
    int in_flight = 0;
};

namespace {

void parse_base_url(const std::string& url, std::string& host, int& port) {
    std::string rest = url;
    const auto scheme = rest.find("://");
    if (scheme != std::string::npos) rest = rest.substr(scheme + 3);
    while (!rest.empty() && rest.back() == '/') rest.pop_back();
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos)
        throw FormatError("http oracle: expected host:port, got '" + url + "'");
    host = rest.substr(0, colon);
    try {
        port = std::stoi(rest.substr(colon + 1));
    } catch (const std::exception&) {
        throw FormatError("http oracle: bad port in '" + url + "'");
    }
}

}  // namespace

HttpOracle::HttpOracle(const std::string& base_url, int top_k, int retries, int backoff_ms,
                       int max_in_flight)
    : impl_(std::make_unique<Impl>()) {
    parse_base_url(base_url, impl_->host, impl_->port);
    impl_->top_k = top_k;
    impl_->retries = retries;
    impl_->backoff_ms = backoff_ms;
    impl_->max_in_flight = std::max(1, max_in_flight);
}

HttpOracle::~HttpOracle() = default;

Classification HttpOracle::classify(const Tensor& image) {
    {
        std::unique_lock lock(impl_->mu);
        impl_->cv.wait(lock, [&] { return impl_->in_flight < impl_->max_in_flight; });
        ++impl_->in_flight;
    }
    struct Release {
        Impl* impl;
        ~Release() {
            std::lock_guard lock(impl->mu);
            --impl->in_flight;
            impl->cv.notify_one();
        }
    } release{impl_.get()};

    const json body = {{"image", base64_encode(encode_png(to_u8(image)))},
                       {"top_k", impl_->top_k}};
    const std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 0; attempt <= impl_->retries; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(impl_->backoff_ms * attempt));
        httplib::Client client(impl_->host, impl_->port);
        client.set_connection_timeout(10);
        client.set_read_timeout(30);
        auto res = client.Post("/classify", payload, "application/json");
        if (!res) {
            last_error = "transport failure (" + httplib::to_string(res.error()) + ")";
            continue;
        }
        if (res->status != 200) {
            last_error = "status " + std::to_string(res->status);
            continue;  // non-200 is retryable
        }
        json parsed;
        try {
            parsed = json::parse(res->body);
        } catch (const std::exception& e) {
            throw FormatError(std::string("http oracle: malformed response JSON: ") + e.what());
        }
        if (!parsed.contains("labels") || !parsed["labels"].is_array())
            throw FormatError("http oracle: response missing labels array");
        Classification cls;
        for (const auto& item : parsed["labels"]) {
            if (!item.contains("name") || !item.contains("prob"))
                throw FormatError("http oracle: label entry missing name/prob");
            LabelProb lp;
            try {
                lp.label = std::stoi(item["name"].get<std::string>());
            } catch (const std::exception&) {
                throw FormatError("http oracle: non-numeric label name '" +
                                  item["name"].get<std::string>() + "'");
            }
            lp.prob = static_cast<float>(item["prob"].get<double>());
            cls.push_back(lp);
        }
        if (cls.empty()) throw FormatError("http oracle: empty label list");
        return cls;
    }
    throw TransportError("http oracle: " + last_error + " after " +
                         std::to_string(impl_->retries + 1) + " attempts");
}

}  // namespace revadv
