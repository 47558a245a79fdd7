#include "pkgm/server.hpp"

#include <poll.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cstring>
#include <filesystem>

namespace pkgm {

namespace {

constexpr uint32_t kMaxFrame = 1u << 20;  // 1 MiB

void put_u16(std::vector<uint8_t>& b, uint16_t v) {
  b.push_back(static_cast<uint8_t>(v));
  b.push_back(static_cast<uint8_t>(v >> 8));
}

void put_u32(std::vector<uint8_t>& b, uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<uint8_t>& b, uint64_t v) {
  for (int i = 0; i < 8; ++i) b.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<uint8_t>& b, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  put_u64(b, bits);
}

void put_str(std::vector<uint8_t>& b, const std::string& s) {
  if (s.size() > 0xffff) throw ProtocolError("string too long for frame");
  put_u16(b, static_cast<uint16_t>(s.size()));
  b.insert(b.end(), s.begin(), s.end());
}

struct Reader {
  const std::vector<uint8_t>& buf;
  size_t pos = 0;

  void need(size_t n) const {
    if (pos + n > buf.size()) throw ProtocolError("truncated frame");
  }
  uint8_t u8() {
    need(1);
    return buf[pos++];
  }
  uint16_t u16() {
    need(2);
    uint16_t v = static_cast<uint16_t>(buf[pos] | (buf[pos + 1] << 8));
    pos += 2;
    return v;
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(buf[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(buf[pos + i]) << (8 * i);
    pos += 8;
    return v;
  }
  double f64() {
    const uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }
  std::string str() {
    const uint16_t n = u16();
    need(n);
    std::string s(buf.begin() + static_cast<long>(pos),
                  buf.begin() + static_cast<long>(pos + n));
    pos += n;
    return s;
  }
  void done() const {
    if (pos != buf.size()) throw ProtocolError("trailing bytes in frame");
  }
};

bool read_exact(int fd, void* dst, size_t n) {
  auto* p = static_cast<uint8_t*>(dst);
  size_t got = 0;
  while (got < n) {
    const ssize_t r = ::read(fd, p + got, n - got);
    if (r <= 0) return false;
    got += static_cast<size_t>(r);
  }
  return true;
}

bool write_all(int fd, const void* src, size_t n) {
  const auto* p = static_cast<const uint8_t*>(src);
  size_t sent = 0;
  while (sent < n) {
    const ssize_t r = ::write(fd, p + sent, n - sent);
    if (r <= 0) return false;
    sent += static_cast<size_t>(r);
  }
  return true;
}

bool read_frame(int fd, std::vector<uint8_t>& payload) {
  uint8_t len_bytes[4];
  if (!read_exact(fd, len_bytes, 4)) return false;
  uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len |= static_cast<uint32_t>(len_bytes[i]) << (8 * i);
  if (len > kMaxFrame) return false;
  payload.resize(len);
  return len == 0 || read_exact(fd, payload.data(), len);
}

bool write_frame(int fd, const std::vector<uint8_t>& payload) {
  uint8_t len_bytes[4];
  const auto len = static_cast<uint32_t>(payload.size());
  for (int i = 0; i < 4; ++i) len_bytes[i] = static_cast<uint8_t>(len >> (8 * i));
  return write_all(fd, len_bytes, 4) &&
         (payload.empty() || write_all(fd, payload.data(), payload.size()));
}

void put_vectors(std::vector<uint8_t>& b,
                 const std::vector<std::vector<double>>& vs) {
  put_u32(b, static_cast<uint32_t>(vs.size()));
  put_u32(b, vs.empty() ? 0 : static_cast<uint32_t>(vs.front().size()));
  for (const auto& v : vs)
    for (double x : v) put_f64(b, x);
}

}  // namespace

std::vector<uint8_t> encode_request(const QueryRequest& req) {
  std::vector<uint8_t> b;
  b.push_back(static_cast<uint8_t>(req.kind));
  put_str(b, req.entity);
  put_str(b, req.relation);
  put_u32(b, req.top_n);
  return b;
}

QueryRequest decode_request(const std::vector<uint8_t>& payload) {
  Reader r{payload};
  QueryRequest req;
  const uint8_t kind = r.u8();
  if (kind > 3) throw ProtocolError("unknown query kind");
  req.kind = static_cast<QueryKind>(kind);
  req.entity = r.str();
  req.relation = r.str();
  req.top_n = r.u32();
  r.done();
  return req;
}

std::vector<uint8_t> encode_response(const QueryResponse& res) {
  std::vector<uint8_t> b;
  b.push_back(static_cast<uint8_t>(res.status));
  put_u64(b, res.model_hash);
  b.push_back(static_cast<uint8_t>(res.kind));
  if (res.status != QueryStatus::ok) {
    put_str(b, res.error);
    return b;
  }
  switch (res.kind) {
    case QueryKind::triple:
    case QueryKind::relation:
      put_vectors(b, res.vectors);
      break;
    case QueryKind::bundle:
      put_u32(b, static_cast<uint32_t>(res.key_relations.size()));
      for (RelationId rel : res.key_relations) put_u32(b, rel);
      put_vectors(b, res.vectors);
      break;
    case QueryKind::complete:
      put_u32(b, static_cast<uint32_t>(res.ranking.size()));
      for (const auto& [e, d] : res.ranking) {
        put_u32(b, e);
        put_f64(b, d);
      }
      break;
  }
  return b;
}

QueryResponse decode_response(const std::vector<uint8_t>& payload) {
  Reader r{payload};
  QueryResponse res;
  const uint8_t status = r.u8();
  if (status > 3) throw ProtocolError("unknown status");
  res.status = static_cast<QueryStatus>(status);
  res.model_hash = r.u64();
  const uint8_t kind = r.u8();
  if (kind > 3) throw ProtocolError("unknown query kind");
  res.kind = static_cast<QueryKind>(kind);
  if (res.status != QueryStatus::ok) {
    res.error = r.str();
    r.done();
    return res;
  }
  switch (res.kind) {
    case QueryKind::triple:
    case QueryKind::relation:
    case QueryKind::bundle: {
      if (res.kind == QueryKind::bundle) {
        const uint32_t k = r.u32();
        res.key_relations.resize(k);
        for (uint32_t i = 0; i < k; ++i) res.key_relations[i] = r.u32();
      }
      const uint32_t count = r.u32();
      const uint32_t dim = r.u32();
      res.vectors.assign(count, std::vector<double>(dim));
      for (auto& v : res.vectors)
        for (auto& x : v) x = r.f64();
      break;
    }
    case QueryKind::complete: {
      const uint32_t count = r.u32();
      res.ranking.resize(count);
      for (auto& [e, d] : res.ranking) {
        e = r.u32();
        d = r.f64();
      }
      break;
    }
  }
  r.done();
  return res;
}

QueryResponse ServiceContext::handle(const QueryRequest& req) const {
  QueryResponse res;
  res.kind = req.kind;
  res.model_hash = config_hash;

  const auto entity = vocab.find_entity(req.entity);
  if (!entity) {
    res.status = QueryStatus::not_found;
    res.error = "unknown entity: " + req.entity;
    return res;
  }

  auto need_relation = [&]() {
    const auto rel = vocab.find_relation(req.relation);
    if (!rel) {
      res.status = QueryStatus::not_found;
      res.error = "unknown relation: " + req.relation;
    }
    return rel;
  };

  try {
    switch (req.kind) {
      case QueryKind::triple: {
        const auto rel = need_relation();
        if (!rel) return res;
        res.vectors.push_back(serve_triple(params, *entity, *rel));
        break;
      }
      case QueryKind::relation: {
        const auto rel = need_relation();
        if (!rel) return res;
        res.vectors.push_back(serve_relation(params, *entity, *rel));
        break;
      }
      case QueryKind::bundle: {
        const ServiceBundle b = serve_bundle(params, key_map, vocab, *entity);
        res.key_relations = b.key_relations;
        res.vectors = b.triple_vectors;
        res.vectors.insert(res.vectors.end(), b.relation_vectors.begin(),
                           b.relation_vectors.end());
        break;
      }
      case QueryKind::complete: {
        const auto rel = need_relation();
        if (!rel) return res;
        const uint32_t n = req.top_n == 0 ? 10 : req.top_n;
        res.ranking = complete_tail(params, *entity, *rel, n);
        break;
      }
    }
  } catch (const LookupError& e) {
    res.status = QueryStatus::not_found;
    res.error = e.what();
  } catch (const Error& e) {
    res.status = QueryStatus::internal_error;
    res.error = e.what();
  }
  return res;
}

VectorServer::VectorServer(std::shared_ptr<const ServiceContext> ctx,
                           std::string socket_path)
    : ctx_(std::move(ctx)), socket_path_(std::move(socket_path)) {}

VectorServer::~VectorServer() { stop(); }

void VectorServer::start() {
  listen_fd_ = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw IoError("socket() failed");

  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  if (socket_path_.size() >= sizeof(addr.sun_path))
    throw IoError("socket path too long: " + socket_path_);
  std::strncpy(addr.sun_path, socket_path_.c_str(), sizeof(addr.sun_path) - 1);
  std::filesystem::remove(socket_path_);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
    throw IoError("bind() failed on " + socket_path_);
  if (::listen(listen_fd_, 64) != 0) throw IoError("listen() failed");

  running_ = true;
  accept_thread_ = std::thread([this] { accept_loop(); });
}

void VectorServer::accept_loop() {
  while (running_) {
    pollfd pfd{listen_fd_, POLLIN, 0};
    if (::poll(&pfd, 1, 100) <= 0) continue;
    const int client = ::accept(listen_fd_, nullptr, nullptr);
    if (client < 0) continue;
    size_t slot;
    {
      std::lock_guard<std::mutex> lock(clients_mu_);
      slot = client_fds_.size();
      client_fds_.push_back(client);
    }
    client_threads_.emplace_back([this, client, slot] {
      std::vector<uint8_t> payload;
      while (read_frame(client, payload)) {
        QueryResponse res;
        try {
          res = ctx_->handle(decode_request(payload));
        } catch (const ProtocolError& e) {
          res.status = QueryStatus::protocol_error;
          res.error = e.what();
          res.model_hash = ctx_->config_hash;
        }
        if (!write_frame(client, encode_response(res))) break;
      }
      std::lock_guard<std::mutex> lock(clients_mu_);
      ::close(client);
      client_fds_[slot] = -1;
    });
  }
}

void VectorServer::stop() {
  if (!running_.exchange(false)) return;
  if (accept_thread_.joinable()) accept_thread_.join();
  {
    // Kick connections that are mid-read so their threads can finish.
    std::lock_guard<std::mutex> lock(clients_mu_);
    for (int fd : client_fds_)
      if (fd >= 0) ::shutdown(fd, SHUT_RDWR);
  }
  for (auto& t : client_threads_)
    if (t.joinable()) t.join();
  client_threads_.clear();
  client_fds_.clear();
  ::close(listen_fd_);
  std::filesystem::remove(socket_path_);
}

VectorClient::VectorClient(const std::string& socket_path) {
  fd_ = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (fd_ < 0) throw IoError("socket() failed");
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  if (socket_path.size() >= sizeof(addr.sun_path))
    throw IoError("socket path too long: " + socket_path);
  std::strncpy(addr.sun_path, socket_path.c_str(), sizeof(addr.sun_path) - 1);
  if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw IoError("connect() failed on " + socket_path);
  }
}

VectorClient::~VectorClient() {
  if (fd_ >= 0) ::close(fd_);
}

QueryResponse VectorClient::roundtrip(const QueryRequest& req) {
  if (!write_frame(fd_, encode_request(req)))
    throw IoError("request write failed");
  std::vector<uint8_t> payload;
  if (!read_frame(fd_, payload)) throw IoError("response read failed");
  return decode_response(payload);
}

}  // namespace pkgm
