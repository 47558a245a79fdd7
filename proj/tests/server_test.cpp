#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cstring>
#include <filesystem>
#include <thread>

#include "pkgm/server.hpp"

using namespace pkgm;

namespace {

std::shared_ptr<const ServiceContext> make_context() {
  auto ctx = std::make_shared<ServiceContext>();
  const CategoryId cat = ctx->vocab.add_category("C");
  ctx->vocab.mark_item(ctx->vocab.add_entity("item0"), cat);
  ctx->vocab.mark_item(ctx->vocab.add_entity("item1"), cat);
  ctx->vocab.add_entity("plain");
  ctx->vocab.add_relation("brand");
  ctx->vocab.add_relation("color");
  ctx->key_map.k = 2;
  ctx->key_map.by_category = {{0, 1}};
  ctx->params = ModelParams::init(3, 2, 8, 42);
  ctx->config_hash = 0xFEEDBEEF;
  return ctx;
}

std::string unique_socket(const char* tag) {
  return (std::filesystem::temp_directory_path() /
          (std::string("pkgm_srv_") + tag + ".sock"))
      .string();
}

}  // namespace

TEST_CASE("request and response frames round-trip") {
  QueryRequest req;
  req.kind = QueryKind::complete;
  req.entity = "item0";
  req.relation = "brand";
  req.top_n = 7;
  const QueryRequest back = decode_request(encode_request(req));
  CHECK(back.kind == req.kind);
  CHECK(back.entity == req.entity);
  CHECK(back.relation == req.relation);
  CHECK(back.top_n == req.top_n);

  QueryResponse res;
  res.status = QueryStatus::ok;
  res.kind = QueryKind::bundle;
  res.model_hash = 0x1234;
  res.key_relations = {1, 0};
  res.vectors = {{1.5, -2.25}, {0.0, 3.5}, {4.0, 5.0}, {-1.0, 0.5}};
  const QueryResponse rback = decode_response(encode_response(res));
  CHECK(rback.status == res.status);
  CHECK(rback.model_hash == res.model_hash);
  CHECK(rback.key_relations == res.key_relations);
  CHECK(rback.vectors == res.vectors);
}

TEST_CASE("malformed payloads raise protocol errors") {
  CHECK_THROWS_AS(static_cast<void>(decode_request({0x09})), ProtocolError);
  CHECK_THROWS_AS(static_cast<void>(decode_request({})), ProtocolError);
  std::vector<uint8_t> trailing = encode_request({});
  trailing.push_back(0xFF);
  CHECK_THROWS_AS(static_cast<void>(decode_request(trailing)), ProtocolError);
}

TEST_CASE("handler answers bundles with 2k vectors and the config hash") {
  const auto ctx = make_context();
  QueryRequest req;
  req.kind = QueryKind::bundle;
  req.entity = "item0";
  const QueryResponse res = ctx->handle(req);
  REQUIRE(res.status == QueryStatus::ok);
  CHECK(res.model_hash == 0xFEEDBEEF);
  CHECK(res.key_relations.size() == 2);
  CHECK(res.vectors.size() == 4);  // 2k

  const ServiceBundle direct =
      serve_bundle(ctx->params, ctx->key_map, ctx->vocab, 0);
  CHECK(res.vectors[0] == direct.triple_vectors[0]);
  CHECK(res.vectors[2] == direct.relation_vectors[0]);
}

TEST_CASE("handler reports NOT_FOUND for unknown names") {
  const auto ctx = make_context();
  QueryRequest req;
  req.kind = QueryKind::triple;
  req.entity = "nope";
  req.relation = "brand";
  CHECK(ctx->handle(req).status == QueryStatus::not_found);

  req.entity = "item0";
  req.relation = "nope";
  CHECK(ctx->handle(req).status == QueryStatus::not_found);

  // Uncategorized entity on a bundle query.
  req.kind = QueryKind::bundle;
  req.entity = "plain";
  req.relation.clear();
  CHECK(ctx->handle(req).status == QueryStatus::not_found);
}

TEST_CASE("socket round-trips match in-process answers") {
  const auto ctx = make_context();
  VectorServer server(ctx, unique_socket("basic"));
  server.start();

  VectorClient client(server.socket_path());
  QueryRequest req;
  req.kind = QueryKind::relation;
  req.entity = "item1";
  req.relation = "color";
  const QueryResponse over_wire = client.roundtrip(req);
  const QueryResponse direct = ctx->handle(req);
  REQUIRE(over_wire.status == QueryStatus::ok);
  CHECK(over_wire.vectors == direct.vectors);
  CHECK(over_wire.model_hash == direct.model_hash);

  server.stop();
}

TEST_CASE("concurrent identical requests produce identical payloads") {
  const auto ctx = make_context();
  VectorServer server(ctx, unique_socket("conc"));
  server.start();

  QueryRequest req;
  req.kind = QueryKind::bundle;
  req.entity = "item0";

  constexpr int kClients = 8;
  std::vector<std::vector<uint8_t>> payloads(kClients);
  std::vector<std::thread> threads;
  for (int c = 0; c < kClients; ++c)
    threads.emplace_back([&, c] {
      VectorClient client(server.socket_path());
      for (int i = 0; i < 50; ++i) {
        const QueryResponse res = client.roundtrip(req);
        payloads[c] = encode_response(res);
      }
    });
  for (auto& t : threads) t.join();

  for (int c = 1; c < kClients; ++c) CHECK(payloads[c] == payloads[0]);
  server.stop();
}

TEST_CASE("server answers malformed frames with a protocol error") {
  const auto ctx = make_context();
  VectorServer server(ctx, unique_socket("bad"));
  server.start();

  // Hand-rolled connection sending a frame whose payload is one invalid
  // kind byte; the server must respond rather than drop the connection.
  const int fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
  REQUIRE(fd >= 0);
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  std::strncpy(addr.sun_path, server.socket_path().c_str(),
               sizeof(addr.sun_path) - 1);
  REQUIRE(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0);

  const uint8_t frame[5] = {1, 0, 0, 0, 0x09};
  REQUIRE(::write(fd, frame, sizeof(frame)) == sizeof(frame));

  uint8_t len_bytes[4];
  REQUIRE(::read(fd, len_bytes, 4) == 4);
  uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len |= static_cast<uint32_t>(len_bytes[i]) << (8 * i);
  std::vector<uint8_t> payload(len);
  size_t got = 0;
  while (got < len) {
    const ssize_t r = ::read(fd, payload.data() + got, len - got);
    REQUIRE(r > 0);
    got += static_cast<size_t>(r);
  }
  ::close(fd);
  CHECK(decode_response(payload).status == QueryStatus::protocol_error);

  // A valid request on a fresh connection still succeeds.
  VectorClient client(server.socket_path());
  QueryRequest probe;
  probe.kind = QueryKind::triple;
  probe.entity = "item0";
  probe.relation = "brand";
  CHECK(client.roundtrip(probe).status == QueryStatus::ok);
  server.stop();
}
