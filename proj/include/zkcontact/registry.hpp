#pragma once

#include <atomic>
#include <functional>
#include <mutex>
#include <shared_mutex>
#include <thread>

#include "zkcontact/protocol.hpp"

namespace zkcontact {

enum class PublishStatus : uint8_t { Accepted = 1, Duplicate = 2, Invalid = 3 };

struct PublishResult {
    PublishStatus status{};
    uint64_t seq = 0; // set iff Accepted

    bool accepted() const { return status == PublishStatus::Accepted; }
};

struct RegistryEntry {
    uint64_t seq = 0; // dense, starting at 1
    BundleKind kind{};
    Bytes body;
    Bytes h_index_key; // canonical bytes of the indexed digest
    int64_t received_at = 0;
};

struct QueryPage {
    std::vector<RegistryEntry> entries;
    uint64_t next_cursor = 0;
};

/// The public registry. Stores structurally valid bundles exactly once per
/// indexed digest, never inspects proofs or signatures (clients verify), and
/// survives crashes via an append-only checksummed log.
class Registry {
public:
    struct Options {
        std::string log_path;   // empty: in-memory only
        size_t page_limit = 1000;
        std::function<int64_t()> clock; // defaults to wall clock; sims inject epochs
    };

    Registry(); // in-memory, default options
    explicit Registry(Options opts); // throws RecoveryError on corrupt logs
    ~Registry();
    Registry(const Registry&) = delete;
    Registry& operator=(const Registry&) = delete;

    /// Parses just enough of the body to extract the digest key, refuses
    /// duplicates, and makes the entry durable before acknowledging.
    PublishResult publish(BundleKind kind, const Bytes& body);

    /// Entries with seq > cursor in order; limit 0 means the page limit.
    QueryPage query_since(uint64_t cursor, size_t limit = 0) const;

    size_t size() const;
    size_t duplicates_rejected() const;
    size_t invalid_rejected() const;

private:
    void recover();
    void append_durable(const RegistryEntry& entry);

    Options opts_;
    mutable std::shared_mutex mu_;
    std::vector<RegistryEntry> entries_;
    std::map<Bytes, uint64_t> index_; // digest bytes -> seq
    size_t duplicates_ = 0;
    size_t invalid_ = 0;
    int log_fd_ = -1;
};

/// Extracts the digest a bundle is indexed under without verifying anything.
/// Throws ParseError for structurally invalid bodies.
Bytes bundle_index_key(BundleKind kind, const Bytes& body);

class RegistryClient {
public:
    virtual ~RegistryClient() = default;
    virtual PublishResult publish(BundleKind kind, const Bytes& body) = 0;
    virtual QueryPage query_since(uint64_t cursor, size_t limit = 0) = 0;
};

/// Loopback client for simulations hosting the registry in-process.
class InprocRegistryClient : public RegistryClient {
public:
    explicit InprocRegistryClient(Registry& registry) : registry_(&registry) {}
    PublishResult publish(BundleKind kind, const Bytes& body) override {
        return registry_->publish(kind, body);
    }
    QueryPage query_since(uint64_t cursor, size_t limit = 0) override {
        return registry_->query_since(cursor, limit);
    }

private:
    Registry* registry_;
};

/// Framed TCP transport: requests PUBLISH(kind, body) and QUERY(cursor,
/// limit), one length-prefixed frame each way, big-endian integers.
class TcpRegistryClient : public RegistryClient {
public:
    TcpRegistryClient(const std::string& host, uint16_t port); // throws Error
    ~TcpRegistryClient();
    TcpRegistryClient(const TcpRegistryClient&) = delete;
    TcpRegistryClient& operator=(const TcpRegistryClient&) = delete;

    PublishResult publish(BundleKind kind, const Bytes& body) override;
    QueryPage query_since(uint64_t cursor, size_t limit = 0) override;

private:
    Bytes round_trip(const Bytes& request);

    std::mutex mu_;
    int fd_ = -1;
};

/// Thread-per-connection server over the framed transport.
class RegistryServer {
public:
    explicit RegistryServer(Registry& registry);
    ~RegistryServer();
    RegistryServer(const RegistryServer&) = delete;
    RegistryServer& operator=(const RegistryServer&) = delete;

    /// Binds 127.0.0.1:port (0 = ephemeral) and returns the bound port.
    uint16_t start(uint16_t port = 0);
    void stop();

private:
    void accept_loop();
    void serve(int fd);

    Registry* registry_;
    int listen_fd_ = -1;
    std::atomic<bool> stopping_{false};
    std::thread acceptor_;
    std::mutex workers_mu_;
    std::vector<std::thread> workers_;
};

} // namespace zkcontact
