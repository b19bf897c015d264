#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "smart/protocol.hpp"

namespace smart {

// Deterministic in-process channel: messages emitted during a tick are
// buffered and handed over at the next tick boundary, executor-to-server
// traffic ordered by (sender robot id, emission order).
class InprocChannel {
public:
    explicit InprocChannel(int robot_count) : to_executor_(robot_count) {}

    void send_to_executor(int robot, Message msg) {
        to_executor_[robot].push_back(std::move(msg));
    }
    void send_to_server(Message msg) { to_server_.push_back(std::move(msg)); }

    // Take everything queued for one endpoint; called exactly once per
    // boundary per endpoint.
    std::vector<Message> collect_for_executor(int robot) {
        return std::exchange(to_executor_[robot], {});
    }
    std::vector<Message> collect_for_server() { return std::exchange(to_server_, {}); }

private:
    std::vector<std::vector<Message>> to_executor_;
    std::vector<Message> to_server_;
};

// Minimal blocking TCP wrappers for the newline-delimited JSON transport.
// Any transport failure (reset, short write, malformed line) throws; the
// run treats that as fatal.
class TcpConnection {
public:
    explicit TcpConnection(int fd) : fd_(fd) {}
    TcpConnection(const TcpConnection&) = delete;
    TcpConnection& operator=(const TcpConnection&) = delete;
    ~TcpConnection();

    static std::unique_ptr<TcpConnection> connect_to(const std::string& host, int port);

    void send_message(const Message& msg);
    // Nonblocking poll for complete lines; returns decoded messages.
    std::vector<Message> poll_messages();
    // Block up to timeout_ms for at least one message (0 = just poll).
    std::vector<Message> wait_messages(int timeout_ms);

    int fd() const { return fd_; }
    bool closed() const { return closed_; }

private:
    void fill_buffer(bool block, int timeout_ms);

    int fd_ = -1;
    bool closed_ = false;
    std::string buffer_;
};

class TcpListener {
public:
    explicit TcpListener(int port);
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;
    ~TcpListener();

    std::unique_ptr<TcpConnection> accept_connection();
    int port() const { return port_; }

private:
    int fd_ = -1;
    int port_ = 0;
};

}  // namespace smart
