// Copyright 2026 The rtqe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Shared plumbing for the HTTP-backed clients: JSON over HTTP, retry with
// exponential backoff, and bounded-concurrency chunked execution.

#ifndef RTQE_HTTP_HPP
#define RTQE_HTTP_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "rtqe/error.hpp"

namespace rtqe {

/// "http://host:port/base" split into the client address and a path prefix.
struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string base_path;

  static Endpoint parse(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos || url.compare(0, scheme_end, "http") != 0)
      throw ConfigError("endpoint must start with http://, got '" + url + "'");
    const auto path_start = url.find('/', scheme_end + 3);
    Endpoint ep;
    if (path_start == std::string::npos) {
      ep.origin = url;
    } else {
      ep.origin = url.substr(0, path_start);
      ep.base_path = url.substr(path_start);
      while (!ep.base_path.empty() && ep.base_path.back() == '/') ep.base_path.pop_back();
    }
    if (ep.origin.size() <= scheme_end + 3)
      throw ConfigError("endpoint has no host: '" + url + "'");
    return ep;
  }

  std::string path(const std::string& p) const { return base_path + p; }
};

struct HttpOptions {
  std::chrono::milliseconds connect_timeout{5000};
  std::chrono::milliseconds read_timeout{60000};
};

namespace detail {

inline nlohmann::json decode_body(int status, const std::string& body) {
  auto parsed = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) throw TransportError(status, "malformed JSON response: " + body);
  return parsed;
}

inline void configure(httplib::Client& cli, const HttpOptions& opts) {
  cli.set_connection_timeout(opts.connect_timeout);
  cli.set_read_timeout(opts.read_timeout);
  cli.set_keep_alive(false);
}

}  // namespace detail

/// POSTs a JSON body and returns the decoded 200 response. Anything else is a
/// TransportError carrying the status (0 when no response arrived).
inline nlohmann::json post_json(const Endpoint& ep, const std::string& path,
                                const nlohmann::json& body, const HttpOptions& opts = {}) {
  httplib::Client cli(ep.origin);
  detail::configure(cli, opts);
  auto res = cli.Post(ep.path(path), body.dump(), "application/json");
  if (!res) throw TransportError(0, httplib::to_string(res.error()));
  if (res->status != 200) throw TransportError(res->status, res->body);
  return detail::decode_body(res->status, res->body);
}

inline nlohmann::json get_json(const Endpoint& ep, const std::string& path,
                               const HttpOptions& opts = {}) {
  httplib::Client cli(ep.origin);
  detail::configure(cli, opts);
  auto res = cli.Get(ep.path(path));
  if (!res) throw TransportError(0, httplib::to_string(res.error()));
  if (res->status != 200) throw TransportError(res->status, res->body);
  return detail::decode_body(res->status, res->body);
}

/// Exponential backoff: delay before retry k (0-based) is base * factor^k.
struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds base_delay{1000};
  double factor = 2.0;

  std::chrono::milliseconds delay_for(int retry) const {
    double ms = static_cast<double>(base_delay.count());
    for (int i = 0; i < retry; ++i) ms *= factor;
    return std::chrono::milliseconds(static_cast<long long>(ms));
  }

  /// Connection failures, timeouts, 408, 429 and 5xx are worth another try.
  static bool retryable(const TransportError& e) {
    const int s = e.status();
    return s == 0 || s == 408 || s == 429 || s >= 500;
  }
};

template <typename Fn>
auto with_retries(const RetryPolicy& policy, Fn&& fn,
                  const std::function<void(std::chrono::milliseconds)>& sleep = {})
    -> decltype(fn()) {
  for (int attempt = 0;; ++attempt) {
    try {
      return fn();
    } catch (const TransportError& e) {
      if (attempt >= policy.max_retries || !RetryPolicy::retryable(e)) throw;
      const auto delay = policy.delay_for(attempt);
      if (sleep) {
        sleep(delay);
      } else {
        std::this_thread::sleep_for(delay);
      }
    }
  }
}

/// Splits [0, n) into chunks of `chunk_size`, runs `fn(offset, count)` for each
/// with at most `max_in_flight` chunks concurrently, and concatenates the
/// returned vectors in chunk order. If chunks fail, the earliest failing
/// chunk's exception is rethrown after all workers finish.
template <typename R, typename Fn>
std::vector<R> run_chunked(std::size_t n, std::size_t chunk_size, std::size_t max_in_flight,
                           Fn&& fn) {
  if (chunk_size == 0) chunk_size = 1;
  const std::size_t chunks = (n + chunk_size - 1) / chunk_size;
  std::vector<std::vector<R>> results(chunks);
  std::vector<std::exception_ptr> errors(chunks);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t c = next++; c < chunks; c = next++) {
      const std::size_t offset = c * chunk_size;
      const std::size_t count = std::min(chunk_size, n - offset);
      try {
        results[c] = fn(offset, count);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };

  const std::size_t threads = std::min(std::max<std::size_t>(1, max_in_flight), chunks);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<R> out;
  out.reserve(n);
  for (auto& r : results) std::move(r.begin(), r.end(), std::back_inserter(out));
  return out;
}

}  // namespace rtqe

#endif  // RTQE_HTTP_HPP
