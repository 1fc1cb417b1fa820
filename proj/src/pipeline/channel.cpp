#include "ued/pipeline/channel.hpp"

#include <chrono>
#include <stdexcept>

namespace ued::pipeline {

namespace {

Delivery guarded(const GenerationChannel::Job& job) {
  try {
    return job();
  } catch (const std::exception& e) {
    Delivery d;
    d.status = TicketStatus::Failed;
    d.error = e.what();
    return d;
  } catch (...) {
    Delivery d;
    d.status = TicketStatus::Failed;
    d.error = "unknown generator failure";
    return d;
  }
}

}  // namespace

std::string_view name(TicketStatus s) {
  switch (s) {
    case TicketStatus::InFlight: return "in_flight";
    case TicketStatus::Delivered: return "delivered";
    case TicketStatus::Failed: return "failed";
  }
  return "?";
}

AwaitDecision await_generation(bool delivered, int cycles_elapsed, int v) {
  if (delivered) return AwaitDecision::Proceed;
  return cycles_elapsed >= v - 1 ? AwaitDecision::Block : AwaitDecision::Proceed;
}

void GenerationChannel::submit(Job job, int issued_cycle) {
  if (issued_cycle_) throw std::logic_error("a generation ticket is already in flight");
  issued_cycle_ = issued_cycle;
  start([job = std::move(job)] { return guarded(job); });
}

Delivery GenerationChannel::take() {
  if (!issued_cycle_) throw std::logic_error("no generation ticket in flight");
  auto d = collect();
  issued_cycle_.reset();
  return d;
}

bool InlineChannel::ready(int cycles_elapsed) const {
  return in_flight() && cycles_elapsed >= latency_ + 1;
}

void InlineChannel::start(Job job) { result_ = job(); }

Delivery InlineChannel::collect() {
  auto d = std::move(*result_);
  result_.reset();
  return d;
}

ThreadChannel::~ThreadChannel() {
  if (future_.valid()) future_.wait();
}

bool ThreadChannel::ready(int) const {
  return future_.valid() && future_.wait_for(std::chrono::seconds(0)) == std::future_status::ready;
}

void ThreadChannel::start(Job job) { future_ = std::async(std::launch::async, std::move(job)); }

Delivery ThreadChannel::collect() { return future_.get(); }

}  // namespace ued::pipeline
