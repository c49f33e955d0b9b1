#include "zkcontact/registry.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/stat.h>
#include <unistd.h>
#include <zlib.h>

#include <cerrno>
#include <cstring>
#include <ctime>

#include "zkcontact/bytes.hpp"

namespace zkcontact {

namespace {

constexpr size_t kMaxFrame = 64u << 20;

uint32_t payload_crc(std::span<const uint8_t> payload) {
    return static_cast<uint32_t>(
        crc32(crc32(0L, Z_NULL, 0), payload.data(), static_cast<uInt>(payload.size())));
}

Bytes encode_record(const RegistryEntry& e) {
    ByteWriter w;
    w.u64(e.seq);
    w.u8(static_cast<uint8_t>(e.kind));
    w.u64(static_cast<uint64_t>(e.received_at));
    w.bytes32(e.h_index_key);
    w.bytes32(e.body);
    return w.take();
}

RegistryEntry decode_record(const Bytes& payload) {
    ByteReader r(payload);
    RegistryEntry e;
    e.seq = r.u64();
    uint8_t kind = r.u8();
    if (kind != uint8_t(BundleKind::Contact) && kind != uint8_t(BundleKind::Transitive)) {
        throw ParseError("unknown bundle kind in log record");
    }
    e.kind = BundleKind(kind);
    e.received_at = static_cast<int64_t>(r.u64());
    e.h_index_key = r.bytes32();
    e.body = r.bytes32();
    r.expect_end();
    return e;
}

void write_all(int fd, std::span<const uint8_t> data) {
    size_t done = 0;
    while (done < data.size()) {
        ssize_t n = ::write(fd, data.data() + done, data.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw Error(std::string("log write failed: ") + std::strerror(errno));
        }
        done += static_cast<size_t>(n);
    }
}

} // namespace

Bytes bundle_index_key(BundleKind kind, const Bytes& body) {
    switch (kind) {
        case BundleKind::Contact:
            return parse_contact_bundle(body).h.to_bytes();
        case BundleKind::Transitive: {
            PcdMessage msg = parse_pcd_message(body);
            if (msg.z.empty()) throw ParseError("chain message carries no public digest");
            return msg.z.front().to_bytes();
        }
    }
    throw ParseError("unknown bundle kind");
}

Registry::Registry() : Registry(Options{}) {}

Registry::Registry(Options opts) : opts_(std::move(opts)) {
    if (!opts_.clock) {
        opts_.clock = [] { return static_cast<int64_t>(::time(nullptr)); };
    }
    if (opts_.page_limit == 0) throw Error("page limit must be positive");
    if (!opts_.log_path.empty()) recover();
}

Registry::~Registry() {
    if (log_fd_ >= 0) ::close(log_fd_);
}

void Registry::recover() {
    // Read whatever exists, keep the valid prefix, then reopen for append.
    Bytes data;
    {
        int fd = ::open(opts_.log_path.c_str(), O_RDONLY);
        if (fd >= 0) {
            uint8_t buf[65536];
            ssize_t n;
            while ((n = ::read(fd, buf, sizeof buf)) > 0) data.insert(data.end(), buf, buf + n);
            ::close(fd);
        }
    }

    size_t offset = 0;
    while (offset < data.size()) {
        size_t remaining = data.size() - offset;
        if (remaining < 8) break; // torn header at the tail
        ByteReader header(std::span<const uint8_t>(data).subspan(offset, 8));
        uint32_t len = header.u32();
        uint32_t crc = header.u32();
        if (remaining - 8 < len) break; // torn payload at the tail
        Bytes payload(data.begin() + offset + 8, data.begin() + offset + 8 + len);
        bool tail = (offset + 8 + len == data.size());
        if (payload_crc(payload) != crc) {
            // A corrupt tail is indistinguishable from a torn write and is
            // discarded; corruption before the tail is real damage.
            if (tail) break;
            throw RecoveryError("log record checksum mismatch", offset);
        }
        RegistryEntry entry;
        try {
            entry = decode_record(payload);
        } catch (const ParseError& e) {
            if (tail) break;
            throw RecoveryError(std::string("undecodable log record: ") + e.what(), offset);
        }
        if (entry.seq != entries_.size() + 1) {
            throw RecoveryError("log sequence gap", offset);
        }
        index_.emplace(entry.h_index_key, entry.seq);
        entries_.push_back(std::move(entry));
        offset += 8 + len;
    }

    log_fd_ = ::open(opts_.log_path.c_str(), O_WRONLY | O_CREAT, 0644);
    if (log_fd_ < 0) {
        throw Error("cannot open registry log: " + opts_.log_path);
    }
    // Drop any torn tail so future appends extend a clean prefix.
    if (::ftruncate(log_fd_, static_cast<off_t>(offset)) != 0 ||
        ::lseek(log_fd_, 0, SEEK_END) < 0) {
        throw Error("cannot truncate registry log: " + opts_.log_path);
    }
}

void Registry::append_durable(const RegistryEntry& entry) {
    if (log_fd_ < 0) return;
    Bytes payload = encode_record(entry);
    ByteWriter w;
    w.u32(static_cast<uint32_t>(payload.size()));
    w.u32(payload_crc(payload));
    w.raw(payload);
    write_all(log_fd_, w.data());
    if (::fsync(log_fd_) != 0) {
        throw Error(std::string("log fsync failed: ") + std::strerror(errno));
    }
}

PublishResult Registry::publish(BundleKind kind, const Bytes& body) {
    Bytes key;
    try {
        key = bundle_index_key(kind, body);
    } catch (const ParseError&) {
        std::unique_lock lock(mu_);
        ++invalid_;
        return {PublishStatus::Invalid, 0};
    }
    std::unique_lock lock(mu_);
    if (index_.contains(key)) {
        ++duplicates_;
        return {PublishStatus::Duplicate, 0};
    }
    RegistryEntry entry{entries_.size() + 1, kind, body, std::move(key), opts_.clock()};
    append_durable(entry); // durable before the ack and before visibility
    index_.emplace(entry.h_index_key, entry.seq);
    entries_.push_back(std::move(entry));
    return {PublishStatus::Accepted, entries_.back().seq};
}

QueryPage Registry::query_since(uint64_t cursor, size_t limit) const {
    if (limit == 0 || limit > opts_.page_limit) limit = opts_.page_limit;
    std::shared_lock lock(mu_);
    QueryPage page;
    page.next_cursor = cursor;
    for (size_t i = cursor; i < entries_.size() && page.entries.size() < limit; ++i) {
        page.entries.push_back(entries_[i]);
        page.next_cursor = entries_[i].seq;
    }
    return page;
}

size_t Registry::size() const {
    std::shared_lock lock(mu_);
    return entries_.size();
}

size_t Registry::duplicates_rejected() const {
    std::shared_lock lock(mu_);
    return duplicates_;
}

size_t Registry::invalid_rejected() const {
    std::shared_lock lock(mu_);
    return invalid_;
}

// ---------------------------------------------------------------------------
// Framed transport

namespace {

constexpr uint8_t kOpPublish = 1;
constexpr uint8_t kOpQuery = 2;
constexpr uint8_t kRespError = 0xff;

bool read_exact(int fd, uint8_t* buf, size_t n) {
    size_t done = 0;
    while (done < n) {
        ssize_t r = ::recv(fd, buf + done, n - done, 0);
        if (r == 0) return false;
        if (r < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        done += static_cast<size_t>(r);
    }
    return true;
}

bool read_frame(int fd, Bytes& out) {
    uint8_t header[4];
    if (!read_exact(fd, header, 4)) return false;
    uint32_t len = uint32_t(header[0]) << 24 | uint32_t(header[1]) << 16 |
                   uint32_t(header[2]) << 8 | header[3];
    if (len > kMaxFrame) return false;
    out.resize(len);
    return len == 0 || read_exact(fd, out.data(), len);
}

void write_frame(int fd, const Bytes& payload) {
    if (payload.size() > kMaxFrame) throw Error("frame too large");
    ByteWriter w;
    w.u32(static_cast<uint32_t>(payload.size()));
    w.raw(payload);
    const Bytes& data = w.data();
    size_t done = 0;
    while (done < data.size()) {
        ssize_t n = ::send(fd, data.data() + done, data.size() - done, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw Error(std::string("socket write failed: ") + std::strerror(errno));
        }
        done += static_cast<size_t>(n);
    }
}

void encode_entry(ByteWriter& w, const RegistryEntry& e) {
    w.u64(e.seq);
    w.u8(static_cast<uint8_t>(e.kind));
    w.u64(static_cast<uint64_t>(e.received_at));
    w.bytes32(e.h_index_key);
    w.bytes32(e.body);
}

RegistryEntry decode_entry(ByteReader& r) {
    RegistryEntry e;
    e.seq = r.u64();
    e.kind = BundleKind(r.u8());
    e.received_at = static_cast<int64_t>(r.u64());
    e.h_index_key = r.bytes32();
    e.body = r.bytes32();
    return e;
}

} // namespace

TcpRegistryClient::TcpRegistryClient(const std::string& host, uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw Error("cannot create socket");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd_);
        throw Error("bad registry address: " + host);
    }
    if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        ::close(fd_);
        throw Error("cannot connect to registry at " + host + ":" + std::to_string(port));
    }
}

TcpRegistryClient::~TcpRegistryClient() {
    if (fd_ >= 0) ::close(fd_);
}

Bytes TcpRegistryClient::round_trip(const Bytes& request) {
    std::lock_guard lock(mu_);
    write_frame(fd_, request);
    Bytes response;
    if (!read_frame(fd_, response)) throw Error("registry connection closed");
    if (!response.empty() && response[0] == kRespError) {
        ByteReader r(response);
        r.u8();
        throw Error("registry error: " + r.str16());
    }
    return response;
}

PublishResult TcpRegistryClient::publish(BundleKind kind, const Bytes& body) {
    ByteWriter w;
    w.u8(kOpPublish);
    w.u8(static_cast<uint8_t>(kind));
    w.bytes32(body);
    Bytes response = round_trip(w.take());
    ByteReader r(response);
    PublishResult result;
    result.status = PublishStatus(r.u8());
    result.seq = r.u64();
    r.expect_end();
    return result;
}

QueryPage TcpRegistryClient::query_since(uint64_t cursor, size_t limit) {
    ByteWriter w;
    w.u8(kOpQuery);
    w.u64(cursor);
    w.u32(static_cast<uint32_t>(limit));
    Bytes response = round_trip(w.take());
    ByteReader r(response);
    QueryPage page;
    uint32_t count = r.u32();
    page.entries.reserve(count);
    for (uint32_t i = 0; i < count; ++i) page.entries.push_back(decode_entry(r));
    page.next_cursor = r.u64();
    r.expect_end();
    return page;
}

RegistryServer::RegistryServer(Registry& registry) : registry_(&registry) {}

RegistryServer::~RegistryServer() { stop(); }

uint16_t RegistryServer::start(uint16_t port) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw Error("cannot create listen socket");
    int yes = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
        ::listen(listen_fd_, 64) != 0) {
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw Error("cannot bind registry port " + std::to_string(port));
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    acceptor_ = std::thread([this] { accept_loop(); });
    return ntohs(addr.sin_port);
}

void RegistryServer::stop() {
    if (listen_fd_ < 0) return;
    stopping_ = true;
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    listen_fd_ = -1;
    if (acceptor_.joinable()) acceptor_.join();
    std::lock_guard lock(workers_mu_);
    for (std::thread& t : workers_) {
        if (t.joinable()) t.join();
    }
    workers_.clear();
}

void RegistryServer::accept_loop() {
    while (!stopping_) {
        int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) {
            if (stopping_) break;
            if (errno == EINTR) continue;
            break;
        }
        std::lock_guard lock(workers_mu_);
        workers_.emplace_back([this, fd] { serve(fd); });
    }
}

void RegistryServer::serve(int fd) {
    Bytes request;
    while (!stopping_ && read_frame(fd, request)) {
        Bytes response;
        try {
            ByteReader r(request);
            uint8_t op = r.u8();
            if (op == kOpPublish) {
                uint8_t kind = r.u8();
                Bytes body = r.bytes32();
                r.expect_end();
                PublishResult result = registry_->publish(BundleKind(kind), body);
                ByteWriter w;
                w.u8(static_cast<uint8_t>(result.status));
                w.u64(result.seq);
                response = w.take();
            } else if (op == kOpQuery) {
                uint64_t cursor = r.u64();
                uint32_t limit = r.u32();
                r.expect_end();
                QueryPage page = registry_->query_since(cursor, limit);
                ByteWriter w;
                w.u32(static_cast<uint32_t>(page.entries.size()));
                for (const RegistryEntry& e : page.entries) encode_entry(w, e);
                w.u64(page.next_cursor);
                response = w.take();
            } else {
                throw ParseError("unknown registry operation");
            }
        } catch (const std::exception& e) {
            ByteWriter w;
            w.u8(kRespError);
            w.str16(e.what());
            response = w.take();
        }
        try {
            write_frame(fd, response);
        } catch (const Error&) {
            break;
        }
    }
    ::close(fd);
}

} // namespace zkcontact
