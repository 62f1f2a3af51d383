#pragma once

#include "chedra/linkage.hpp"
#include "chedra/net.hpp"
#include "chedra/tolerance.hpp"

#include <cstddef>
#include <functional>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>

namespace chedra {

struct HttpResponse {
  int status = 200;
  std::string body;
};

using QueryParams = std::map<std::string, std::string>;

// Immutable once created.
struct NetSession {
  std::string id;
  NetSpec spec;
  ConeNet net;
  std::vector<RangeInterval> linkage_range;
  std::vector<RangeInterval> net_range;
  Classification classification;
  std::optional<ParallelScales> scales;  // set for general P-net sessions
  std::optional<ConeNet> transferred;    // reference of the general P-net
  std::string master_id;
};

struct ServiceConfig {
  std::size_t max_sessions = 256;
  std::string cors_origin = "*";
  Tolerances tolerances;
};

// Request handlers of the design service, independent of the HTTP transport.
class DesignService {
 public:
  explicit DesignService(ServiceConfig config = {});

  HttpResponse create_net(const std::string& body, const QueryParams& query = {});
  HttpResponse get_net(const std::string& id, const QueryParams& query);
  HttpResponse get_frames(const std::string& id, const QueryParams& query);
  HttpResponse create_parallel(const std::string& id, const std::string& body);
  HttpResponse validate(const std::string& id, const QueryParams& query);

  std::size_t session_count() const;
  const ServiceConfig& config() const { return config_; }

 private:
  std::shared_ptr<const NetSession> find(const std::string& id);
  void insert(std::shared_ptr<const NetSession> session);

  ServiceConfig config_;
  mutable std::mutex mutex_;
  std::list<std::string> lru_;  // most recent first
  std::unordered_map<std::string,
                     std::pair<std::shared_ptr<const NetSession>, std::list<std::string>::iterator>>
      sessions_;
};

// HTTP transport for DesignService (cpp-httplib behind a pimpl).
class HttpServer {
 public:
  explicit HttpServer(DesignService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds host:port (port 0 picks a free port); returns the bound port or -1.
  int bind(const std::string& host, int port);
  // Blocks until stop() is called from another thread.
  bool listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace chedra
