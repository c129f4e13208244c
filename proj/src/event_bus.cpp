#include "minuteman/event_bus.hpp"

#include <algorithm>

#include "minuteman/errors.hpp"

namespace minuteman {

namespace {

bool valid_topic_name(std::string_view topic) {
  if (topic.empty()) return false;
  return std::all_of(topic.begin(), topic.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return u > 0x20 && u < 0x7f;
  });
}

}  // namespace

std::size_t EventBus::Group::size() const {
  std::size_t n = pending.size();
  for (const auto& [consumer, entries] : inflight) n += entries.size();
  return n;
}

std::size_t EventBus::Topic::depth() const {
  if (groups.empty()) return backlog.size();
  std::size_t deepest = 0;
  for (const auto& [name, group] : groups) deepest = std::max(deepest, group.size());
  return deepest;
}

std::shared_ptr<EventBus> EventBus::create(std::size_t capacity_per_topic) {
  return std::shared_ptr<EventBus>(new EventBus(capacity_per_topic));
}

EventBus::EventBus(std::size_t capacity) : capacity_(std::max<std::size_t>(capacity, 1)) {}

std::uint64_t EventBus::publish(std::string_view topic, std::string_view key,
                                std::string payload) {
  std::unique_lock lock(mutex_);
  return *publish_locked(lock, topic, key, payload, true);
}

std::optional<std::uint64_t> EventBus::try_publish(std::string_view topic, std::string_view key,
                                                   std::string payload) {
  std::unique_lock lock(mutex_);
  return publish_locked(lock, topic, key, payload, false);
}

std::optional<std::uint64_t> EventBus::publish_locked(std::unique_lock<std::mutex>& lock,
                                                      std::string_view topic_name,
                                                      std::string_view key,
                                                      std::string& payload, bool wait) {
  if (!valid_topic_name(topic_name)) {
    throw ValidationError("topic name must be non-empty printable ASCII");
  }
  if (shut_down_) throw BusShutdownError("event bus is shut down");

  auto it = topics_.find(topic_name);
  if (it == topics_.end()) it = topics_.emplace(std::string(topic_name), Topic{}).first;

  while (it->second.depth() >= capacity_) {
    if (!wait) return std::nullopt;
    space_available_.wait(lock);
    if (shut_down_) throw BusShutdownError("event bus is shut down");
  }

  Topic& topic = it->second;
  auto seq = ++topic.key_seq[std::string(key)];
  Entry entry{topic.next_ordinal++,
              BusMessage{std::string(topic_name), std::string(key), std::move(payload), seq, 1}};
  if (topic.groups.empty()) {
    topic.backlog.push_back(std::move(entry));
  } else {
    for (auto& [name, group] : topic.groups) group.pending.push_back(entry);
  }
  message_available_.notify_all();
  return seq;
}

std::unique_ptr<Subscription> EventBus::subscribe(std::string_view topic_name,
                                                  std::string_view group_name) {
  if (!valid_topic_name(topic_name)) {
    throw ValidationError("topic name must be non-empty printable ASCII");
  }
  std::lock_guard lock(mutex_);
  auto it = topics_.find(topic_name);
  if (it == topics_.end()) it = topics_.emplace(std::string(topic_name), Topic{}).first;
  Topic& topic = it->second;
  auto [group_it, inserted] = topic.groups.try_emplace(std::string(group_name));
  if (inserted && topic.groups.size() == 1) {
    group_it->second.pending = std::move(topic.backlog);
    topic.backlog.clear();
  }
  auto id = next_consumer_id_++;
  return std::unique_ptr<Subscription>(new Subscription(
      shared_from_this(), std::string(topic_name), std::string(group_name), id));
}

std::optional<BusMessage> EventBus::take_locked(const std::string& topic_name,
                                                const std::string& group_name,
                                                std::uint64_t consumer) {
  auto it = topics_.find(topic_name);
  if (it == topics_.end()) return std::nullopt;
  auto group_it = it->second.groups.find(group_name);
  if (group_it == it->second.groups.end()) return std::nullopt;
  Group& group = group_it->second;

  for (auto pos = group.pending.begin(); pos != group.pending.end(); ++pos) {
    if (group.key_owner.contains(pos->message.key)) continue;
    Entry entry = std::move(*pos);
    group.pending.erase(pos);
    group.key_owner.emplace(entry.message.key, consumer);
    BusMessage out = entry.message;
    group.inflight[consumer].push_back(std::move(entry));
    return out;
  }
  return std::nullopt;
}

std::optional<BusMessage> EventBus::next(const std::string& topic, const std::string& group,
                                         std::uint64_t consumer,
                                         std::chrono::milliseconds timeout, bool wait) {
  std::unique_lock lock(mutex_);
  auto deadline = std::chrono::steady_clock::now() + timeout;
  while (true) {
    if (auto message = take_locked(topic, group, consumer)) return message;
    if (!wait || shut_down_) return std::nullopt;
    if (message_available_.wait_until(lock, deadline) == std::cv_status::timeout) {
      return take_locked(topic, group, consumer);
    }
  }
}

void EventBus::ack(const std::string& topic_name, const std::string& group_name,
                   std::uint64_t consumer, const BusMessage& message) {
  std::lock_guard lock(mutex_);
  auto it = topics_.find(topic_name);
  if (it == topics_.end()) return;
  auto group_it = it->second.groups.find(group_name);
  if (group_it == it->second.groups.end()) return;
  Group& group = group_it->second;
  auto flight = group.inflight.find(consumer);
  if (flight == group.inflight.end()) return;
  auto& entries = flight->second;
  auto pos = std::find_if(entries.begin(), entries.end(), [&](const Entry& e) {
    return e.message.key == message.key && e.message.enqueue_seq == message.enqueue_seq;
  });
  if (pos == entries.end()) return;
  entries.erase(pos);
  if (entries.empty()) group.inflight.erase(flight);
  group.key_owner.erase(message.key);
  space_available_.notify_all();
  message_available_.notify_all();
}

void EventBus::requeue_locked(const std::string& topic_name, const std::string& group_name,
                              std::uint64_t consumer) {
  auto it = topics_.find(topic_name);
  if (it == topics_.end()) return;
  auto group_it = it->second.groups.find(group_name);
  if (group_it == it->second.groups.end()) return;
  Group& group = group_it->second;
  auto flight = group.inflight.find(consumer);
  if (flight == group.inflight.end()) return;
  for (auto& entry : flight->second) {
    group.key_owner.erase(entry.message.key);
    ++entry.message.delivery_attempt;
    auto pos = std::lower_bound(
        group.pending.begin(), group.pending.end(), entry.ordinal,
        [](const Entry& e, std::uint64_t ordinal) { return e.ordinal < ordinal; });
    group.pending.insert(pos, std::move(entry));
  }
  group.inflight.erase(flight);
  message_available_.notify_all();
}

void EventBus::release(const std::string& topic, const std::string& group,
                       std::uint64_t consumer) {
  std::lock_guard lock(mutex_);
  requeue_locked(topic, group, consumer);
}

void EventBus::shutdown() {
  std::lock_guard lock(mutex_);
  shut_down_ = true;
  space_available_.notify_all();
  message_available_.notify_all();
}

bool EventBus::is_shut_down() const {
  std::lock_guard lock(mutex_);
  return shut_down_;
}

std::size_t EventBus::depth(std::string_view topic) const {
  std::lock_guard lock(mutex_);
  auto it = topics_.find(topic);
  return it == topics_.end() ? 0 : it->second.depth();
}

bool EventBus::idle() const {
  std::lock_guard lock(mutex_);
  for (const auto& [name, topic] : topics_) {
    for (const auto& [group_name, group] : topic.groups) {
      if (group.size() != 0) return false;
    }
  }
  return true;
}

Subscription::Subscription(std::shared_ptr<EventBus> bus, std::string topic, std::string group,
                           std::uint64_t consumer_id)
    : bus_(std::move(bus)),
      topic_(std::move(topic)),
      group_(std::move(group)),
      consumer_id_(consumer_id) {}

Subscription::~Subscription() { bus_->release(topic_, group_, consumer_id_); }

std::optional<BusMessage> Subscription::try_next() {
  return bus_->next(topic_, group_, consumer_id_, std::chrono::milliseconds(0), false);
}

std::optional<BusMessage> Subscription::next(std::chrono::milliseconds timeout) {
  return bus_->next(topic_, group_, consumer_id_, timeout, true);
}

void Subscription::ack(const BusMessage& message) {
  bus_->ack(topic_, group_, consumer_id_, message);
}

void Subscription::crash() { bus_->release(topic_, group_, consumer_id_); }

namespace {

std::string filter_key(const BusMessage& message) {
  return message.topic + '\x1f' + message.key;
}

}  // namespace

bool IdempotencyFilter::seen(const BusMessage& message) const {
  auto it = last_seen_.find(filter_key(message));
  return it != last_seen_.end() && message.enqueue_seq <= it->second;
}

void IdempotencyFilter::mark(const BusMessage& message) {
  first_delivery(filter_key(message), message.enqueue_seq);
}

bool IdempotencyFilter::first_delivery(const BusMessage& message) {
  return first_delivery(filter_key(message), message.enqueue_seq);
}

bool IdempotencyFilter::first_delivery(const std::string& key, std::uint64_t enqueue_seq) {
  auto& last = last_seen_[key];
  if (enqueue_seq <= last) return false;
  last = enqueue_seq;
  return true;
}

}  // namespace minuteman
