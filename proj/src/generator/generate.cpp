#include "ued/generator/generate.hpp"

#include <cmath>
#include <future>

#include "ued/dsl/parser.hpp"
#include "ued/generator/mutation.hpp"
#include "ued/world/env.hpp"

namespace ued::gen {

namespace {

CandidateLevel reject(CandidateLevel c, std::string stage, std::string reason) {
  c.verdict = Verdict::Rejected;
  c.reject_stage = std::move(stage);
  c.reject_reason = std::move(reason);
  c.program.reset();
  return c;
}

CandidateLevel produce(const GenerationContext& ctx, Backend& backend, Rng rng, int rollout_steps) {
  CandidateLevel c;
  try {
    c.description = dream_description(ctx, backend, rng);
    c.program_text = dream_program(ctx, c.description, backend, rng);
  } catch (const BackendError& e) {
    return reject(std::move(c), "backend", e.what());
  }
  return compile_check(std::move(c), rollout_steps, rng);
}

int candidate_count(int m_target, double surplus_factor) {
  if (m_target < 1) throw std::invalid_argument("m_target must be >= 1");
  if (!(surplus_factor >= 1.0)) throw std::invalid_argument("surplus_factor must be >= 1");
  return static_cast<int>(std::ceil(m_target * surplus_factor - 1e-9));
}

BatchResult keep_first(std::vector<CandidateLevel> candidates, int m_target, const std::string& prefix) {
  BatchResult out;
  out.attempted = static_cast<int>(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto& c = candidates[i];
    if (c.verdict != Verdict::Valid) {
      ++out.rejected;
      continue;
    }
    if (static_cast<int>(out.valid.size()) >= m_target) continue;
    c.program->name = prefix + "_" + std::to_string(i);
    c.program_text = dsl::serialize(*c.program);
    c.program->source_text = c.program_text;
    out.valid.push_back(std::move(c));
  }
  return out;
}

}  // namespace

CandidateLevel compile_check(CandidateLevel c, int rollout_steps, Rng& rng) {
  if (c.verdict == Verdict::Rejected) return c;
  dsl::LevelProgram p;
  try {
    p = dsl::parse(c.program_text);
  } catch (const dsl::ParseError& e) {
    return reject(std::move(c), "parse", e.what());
  } catch (const dsl::ValidationError& e) {
    return reject(std::move(c), "validate", e.what());
  }
  world::WorldState s;
  try {
    s = world::reset(p, rng.next());
  } catch (const dsl::CompileError& e) {
    return reject(std::move(c), "compile", e.what());
  }
  try {
    for (int t = 0; t < rollout_steps; ++t) {
      const auto r = world::step(s, action_at(rng.below(kNumActions)));
      if (r.done) break;
    }
  } catch (const std::exception& e) {
    return reject(std::move(c), "rollout", e.what());
  }
  c.program = std::move(p);
  c.verdict = Verdict::Valid;
  return c;
}

BatchResult generate_batch(std::optional<archive::NodeId> parent, const archive::Archive& view,
                           int m_target, double surplus_factor, Backend& backend,
                           const BatchOptions& options, Rng& rng) {
  const int n = candidate_count(m_target, surplus_factor);

  Rng ctx_rng = rng.split();
  const auto ctx = build_context(view, parent, options.target_perf, options.context, ctx_rng);
  std::vector<Rng> rngs;
  rngs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) rngs.push_back(rng.split());

  std::vector<CandidateLevel> candidates;
  candidates.reserve(static_cast<std::size_t>(n));
  if (options.parallel) {
    std::vector<std::future<CandidateLevel>> jobs;
    for (int i = 0; i < n; ++i) {
      jobs.push_back(std::async(std::launch::async, produce, std::cref(ctx), std::ref(backend),
                                rngs[static_cast<std::size_t>(i)], options.rollout_steps));
    }
    for (auto& j : jobs) candidates.push_back(j.get());
  } else {
    for (int i = 0; i < n; ++i) {
      candidates.push_back(produce(ctx, backend, rngs[static_cast<std::size_t>(i)], options.rollout_steps));
    }
  }

  for (auto& c : candidates) c.parent = parent;
  return keep_first(std::move(candidates), m_target, options.name_prefix);
}

BatchResult random_mutation_batch(const archive::Archive& view, int m_target, double surplus_factor,
                                  const BatchOptions& options, Rng& rng) {
  const int n = candidate_count(m_target, surplus_factor);
  if (view.empty()) throw std::invalid_argument("random mutation needs a non-empty archive");
  const auto ids = view.ids();
  std::vector<CandidateLevel> candidates;
  candidates.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Rng r = rng.split();
    const auto parent = ids[r.below(ids.size())];
    const auto intent = static_cast<Intent>(r.below(4));
    CandidateLevel c;
    c.parent = parent;
    c.description = std::string("intent=") + std::string(name(intent)) + "\n";
    c.program_text = dsl::serialize(mutate(view.node(parent).program, intent, r));
    candidates.push_back(compile_check(std::move(c), options.rollout_steps, r));
  }
  return keep_first(std::move(candidates), m_target, options.name_prefix);
}

}  // namespace ued::gen
