#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "pkgm/service.hpp"

namespace pkgm {

// Length-prefixed binary protocol over a local (unix-domain) socket.
// Requests resolve names to ids; responses carry vectors and ids only,
// never tails from the triple store.

enum class QueryKind : uint8_t { triple = 0, relation = 1, bundle = 2, complete = 3 };
enum class QueryStatus : uint8_t { ok = 0, not_found = 1, protocol_error = 2, internal_error = 3 };

struct QueryRequest {
  QueryKind kind = QueryKind::triple;
  std::string entity;
  std::string relation;  // empty when absent
  uint32_t top_n = 0;    // 0 when absent
};

struct QueryResponse {
  QueryStatus status = QueryStatus::ok;
  uint64_t model_hash = 0;
  QueryKind kind = QueryKind::triple;
  // triple/relation: one vector; bundle: 2k vectors with key relations.
  std::vector<RelationId> key_relations;
  std::vector<std::vector<double>> vectors;
  // complete: ranked (entity, L1 distance)
  std::vector<std::pair<EntityId, double>> ranking;
  std::string error;  // non-ok statuses
};

std::vector<uint8_t> encode_request(const QueryRequest& req);
QueryRequest decode_request(const std::vector<uint8_t>& payload);
std::vector<uint8_t> encode_response(const QueryResponse& res);
QueryResponse decode_response(const std::vector<uint8_t>& payload);

// Everything a request needs, immutable once the server starts.
struct ServiceContext {
  ModelParams params;
  Vocab vocab;
  KeyRelationMap key_map;
  uint64_t config_hash = 0;

  QueryResponse handle(const QueryRequest& req) const;
};

// Accepts connections on a unix socket, one thread per client, each
// connection carrying any number of request/response frames.
class VectorServer {
 public:
  VectorServer(std::shared_ptr<const ServiceContext> ctx, std::string socket_path);
  ~VectorServer();

  void start();
  void stop();
  const std::string& socket_path() const { return socket_path_; }

 private:
  void accept_loop();

  std::shared_ptr<const ServiceContext> ctx_;
  std::string socket_path_;
  int listen_fd_ = -1;
  std::atomic<bool> running_{false};
  std::thread accept_thread_;
  std::vector<std::thread> client_threads_;
  std::mutex clients_mu_;
  std::vector<int> client_fds_;
};

// Blocking client for tests and the query CLI.
class VectorClient {
 public:
  explicit VectorClient(const std::string& socket_path);
  ~VectorClient();

  QueryResponse roundtrip(const QueryRequest& req);

 private:
  int fd_ = -1;
};

}  // namespace pkgm
