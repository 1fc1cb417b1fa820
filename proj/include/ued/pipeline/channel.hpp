#pragma once

#include <functional>
#include <future>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ued/generator/generate.hpp"

namespace ued::pipeline {

enum class TicketStatus { InFlight, Delivered, Failed };

std::string_view name(TicketStatus s);

/// Outcome of one generation request.
struct Delivery {
  TicketStatus status = TicketStatus::Failed;
  gen::BatchResult batch;
  std::string error;
};

enum class AwaitDecision { Proceed, Block };

/// A ticket issued at the end of cycle t feeds cycle t + v. Checked before that cycle,
/// `cycles_elapsed` is v - 1; training waits only when the result is still missing by then.
AwaitDecision await_generation(bool delivered, int cycles_elapsed, int v);

/// Carries at most one generation job from issue to delivery.
class GenerationChannel {
 public:
  using Job = std::function<Delivery()>;

  virtual ~GenerationChannel() = default;

  /// Throws std::logic_error while another ticket is in flight.
  void submit(Job job, int issued_cycle);
  bool in_flight() const { return issued_cycle_.has_value(); }
  std::optional<int> issued_cycle() const { return issued_cycle_; }

  /// Whether the result can be collected without waiting.
  virtual bool ready(int cycles_elapsed) const = 0;
  /// Waits for and returns the result, clearing the ticket. Job exceptions become Failed.
  Delivery take();

 protected:
  virtual void start(Job job) = 0;
  virtual Delivery collect() = 0;

 private:
  std::optional<int> issued_cycle_;
};

/// Runs the job at submit time and releases it after `latency_cycles` further cycles.
/// Deterministic stand-in for a slow generator.
class InlineChannel : public GenerationChannel {
 public:
  explicit InlineChannel(int latency_cycles = 0) : latency_(latency_cycles) {}
  bool ready(int cycles_elapsed) const override;

 protected:
  void start(Job job) override;
  Delivery collect() override;

 private:
  int latency_;
  std::optional<Delivery> result_;
};

/// Runs the job on a worker thread.
class ThreadChannel : public GenerationChannel {
 public:
  ~ThreadChannel() override;
  bool ready(int cycles_elapsed) const override;

 protected:
  void start(Job job) override;
  Delivery collect() override;

 private:
  std::future<Delivery> future_;
};

}  // namespace ued::pipeline
