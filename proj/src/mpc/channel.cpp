#include "privadome/mpc/channel.hpp"

#include <condition_variable>
#include <deque>
#include <mutex>
#include <string>

namespace privadome::mpc {
namespace {

struct Queue {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<Message> items;
  bool closed = false;
};

class MemoryChannel final : public Channel {
 public:
  MemoryChannel(std::shared_ptr<Queue> inbox, std::shared_ptr<Queue> outbox)
      : inbox_(std::move(inbox)), outbox_(std::move(outbox)) {}
  ~MemoryChannel() override { close(); }

  void send(MsgType type, std::span<const std::uint8_t> payload) override {
    std::lock_guard lock(outbox_->mu);
    if (outbox_->closed) throw ProtocolError("send on closed channel");
    outbox_->items.push_back({type, {payload.begin(), payload.end()}});
    outbox_->cv.notify_one();
  }

  Message recv() override {
    std::unique_lock lock(inbox_->mu);
    inbox_->cv.wait(lock, [&] { return !inbox_->items.empty() || inbox_->closed; });
    if (inbox_->items.empty()) throw ProtocolError("peer closed the channel");
    Message m = std::move(inbox_->items.front());
    inbox_->items.pop_front();
    return m;
  }

  void close() override {
    for (auto* q : {inbox_.get(), outbox_.get()}) {
      std::lock_guard lock(q->mu);
      q->closed = true;
      q->cv.notify_all();
    }
  }

 private:
  std::shared_ptr<Queue> inbox_;
  std::shared_ptr<Queue> outbox_;
};

}  // namespace

std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_memory_channel_pair() {
  auto to_citizen = std::make_shared<Queue>();
  auto to_authority = std::make_shared<Queue>();
  return {std::make_unique<MemoryChannel>(to_citizen, to_authority),
          std::make_unique<MemoryChannel>(to_authority, to_citizen)};
}

void Endpoint::send(MsgType type, std::span<const std::uint8_t> payload) {
  channel_.send(type, payload);
  transcript_.record(direction_from(role_), type, payload.size());
}

Message Endpoint::recv(MsgType expected) {
  Message m = channel_.recv();
  transcript_.record(direction_from(peer_of(role_)), m.type, m.payload.size());
  if (m.type == MsgType::Error) {
    throw ProtocolError("peer aborted: " + std::string(m.payload.begin(), m.payload.end()));
  }
  if (m.type != expected) {
    throw ProtocolError("expected " + std::string(to_string(expected)) + ", got " +
                        std::string(to_string(m.type)));
  }
  return m;
}

void Endpoint::send_error(std::string_view reason) noexcept {
  try {
    const std::span bytes(reinterpret_cast<const std::uint8_t*>(reason.data()), reason.size());
    send(MsgType::Error, bytes);
  } catch (...) {
  }
}

}  // namespace privadome::mpc
