#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace minuteman {

/// One message as observed by a subscriber. `enqueue_seq` counts from 1 per
/// (topic, key) and doubles as the idempotency key for consumers.
struct BusMessage {
  std::string topic;
  std::string key;
  std::string payload;
  std::uint64_t enqueue_seq = 0;
  unsigned delivery_attempt = 1;
};

class EventBus;

/// A consumer attached to a (topic, group) pair.
///
/// Each message is handed to exactly one consumer of the group at a time. A
/// key stays locked to the consumer holding its oldest unacknowledged message,
/// which is what keeps per-key order intact when the group has several
/// consumers. Destroying or crashing a subscription returns its unacknowledged
/// messages to the group for redelivery.
class Subscription {
 public:
  Subscription(const Subscription&) = delete;
  Subscription& operator=(const Subscription&) = delete;
  ~Subscription();

  /// Non-blocking. Returns nullopt when nothing is deliverable right now.
  std::optional<BusMessage> try_next();

  /// Blocks up to `timeout`; returns nullopt on timeout or bus shutdown.
  std::optional<BusMessage> next(std::chrono::milliseconds timeout);

  /// Releases the message (and its key) back to the broker.
  void ack(const BusMessage& message);

  /// Simulates a consumer failure: every unacknowledged message is requeued.
  void crash();

  const std::string& topic() const { return topic_; }
  const std::string& group() const { return group_; }

 private:
  friend class EventBus;
  Subscription(std::shared_ptr<EventBus> bus, std::string topic, std::string group,
               std::uint64_t consumer_id);

  std::shared_ptr<EventBus> bus_;
  std::string topic_;
  std::string group_;
  std::uint64_t consumer_id_;
};

/// In-process, topic-based broker with per-key FIFO, consumer groups,
/// at-least-once delivery and publisher backpressure.
class EventBus : public std::enable_shared_from_this<EventBus> {
 public:
  static constexpr std::size_t kDefaultCapacity = 1024;

  static std::shared_ptr<EventBus> create(std::size_t capacity_per_topic = kDefaultCapacity);

  /// Blocks while the topic is at capacity. Throws BusShutdownError once the
  /// bus is shut down and ValidationError for a malformed topic name.
  std::uint64_t publish(std::string_view topic, std::string_view key, std::string payload);

  /// Like publish() but returns nullopt instead of blocking when full.
  std::optional<std::uint64_t> try_publish(std::string_view topic, std::string_view key,
                                           std::string payload);

  std::unique_ptr<Subscription> subscribe(std::string_view topic, std::string_view group);

  /// Wakes every blocked publisher and consumer; later publishes fail.
  void shutdown();
  bool is_shut_down() const;

  /// Messages waiting or in flight for the busiest group of `topic`.
  std::size_t depth(std::string_view topic) const;

  /// True when no group of any topic holds pending or unacked messages.
  bool idle() const;

  std::size_t capacity() const { return capacity_; }

 private:
  friend class Subscription;

  struct Entry {
    std::uint64_t ordinal;  // topic-wide publish order
    BusMessage message;
  };

  struct Group {
    std::deque<Entry> pending;  // sorted by ordinal
    std::map<std::uint64_t, std::vector<Entry>> inflight;  // per consumer
    std::unordered_map<std::string, std::uint64_t> key_owner;
    std::size_t size() const;
  };

  struct Topic {
    std::uint64_t next_ordinal = 0;
    std::unordered_map<std::string, std::uint64_t> key_seq;
    std::deque<Entry> backlog;  // published while no group existed
    std::map<std::string, Group> groups;
    std::size_t depth() const;
  };

  explicit EventBus(std::size_t capacity);

  std::optional<std::uint64_t> publish_locked(std::unique_lock<std::mutex>& lock,
                                              std::string_view topic, std::string_view key,
                                              std::string& payload, bool wait);
  std::optional<BusMessage> take_locked(const std::string& topic, const std::string& group,
                                        std::uint64_t consumer);
  void requeue_locked(const std::string& topic, const std::string& group,
                      std::uint64_t consumer);
  void ack(const std::string& topic, const std::string& group, std::uint64_t consumer,
           const BusMessage& message);
  void release(const std::string& topic, const std::string& group, std::uint64_t consumer);
  std::optional<BusMessage> next(const std::string& topic, const std::string& group,
                                 std::uint64_t consumer, std::chrono::milliseconds timeout,
                                 bool wait);

  const std::size_t capacity_;
  mutable std::mutex mutex_;
  std::condition_variable space_available_;
  std::condition_variable message_available_;
  std::map<std::string, Topic, std::less<>> topics_;
  std::uint64_t next_consumer_id_ = 1;
  bool shut_down_ = false;
};

/// Consumer-side duplicate filter for at-least-once delivery. Relies on the
/// per-key FIFO guarantee: anything at or below the last seen sequence for a
/// key has already been handled.
class IdempotencyFilter {
 public:
  /// True when this message, or a later one of its key, was already marked.
  bool seen(const BusMessage& message) const;
  /// Records a message as handled. Call after its effects are in place so a
  /// crash before that point leads to reprocessing, not loss.
  void mark(const BusMessage& message);
  /// seen() and mark() in one step.
  bool first_delivery(const BusMessage& message);
  bool first_delivery(const std::string& key, std::uint64_t enqueue_seq);

 private:
  std::unordered_map<std::string, std::uint64_t> last_seen_;
};

}  // namespace minuteman
