#include "alphakit/gp.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace alphakit {

namespace {

// Every subtree slot in the tree with the depth of the node it holds
// (root at depth 1). The root slot is included.
void collect_slots(ExprNodePtr& slot, int depth, std::vector<std::pair<ExprNodePtr*, int>>& out) {
  out.emplace_back(&slot, depth);
  for (ExprNodePtr& child : slot->children) collect_slots(child, depth + 1, out);
}

std::pair<ExprNodePtr*, int> pick_slot(ExprNodePtr& root, Rng& rng) {
  std::vector<std::pair<ExprNodePtr*, int>> slots;
  collect_slots(root, 1, slots);
  std::uniform_int_distribution<std::size_t> pick(0, slots.size() - 1);
  return slots[pick(rng)];
}

// Replaces internal nodes sitting at the depth cap with random terminals so
// the whole tree fits within max_depth.
void truncate_to_depth(ExprNodePtr& slot, int depth, int max_depth, Rng& rng) {
  if (depth >= max_depth && !slot->is_leaf()) {
    slot = random_terminal(rng);
    return;
  }
  for (ExprNodePtr& child : slot->children) truncate_to_depth(child, depth + 1, max_depth, rng);
}

Op random_op_with_arity(int arity, Op exclude, Rng& rng) {
  std::vector<Op> pool;
  for (int i = 0; i < kNumOps; ++i) {
    const Op op = static_cast<Op>(i);
    if (op_arity(op) == arity && op != exclude) pool.push_back(op);
  }
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  return pool[pick(rng)];
}

struct ArchiveEntry {
  AlphaExpr expr;
  double train_fitness = 0.0;
  double val_fitness = 0.0;
};

}  // namespace

void GpConfig::validate() const {
  if (population < 2) throw ConfigError("population must be >= 2");
  if (generations < 1) throw ConfigError("generations must be >= 1");
  if (tournament < 1 || tournament > population) {
    throw ConfigError("tournament must be in [1, population]");
  }
  if (p_crossover < 0.0 || p_subtree_mutation < 0.0 || p_point_mutation < 0.0) {
    throw ConfigError("operator probabilities must be >= 0");
  }
  if (p_crossover + p_subtree_mutation + p_point_mutation > 1.0 + 1e-12) {
    throw ConfigError("operator probabilities must sum to <= 1");
  }
  if (max_depth < 1) throw ConfigError("max_depth must be >= 1");
  if (elitism < 0 || elitism > population) throw ConfigError("elitism must be in [0, population]");
  if (top_m < 1) throw ConfigError("top_m must be >= 1");
}

AlphaExpr gp_crossover(const AlphaExpr& base, const AlphaExpr& donor, int max_depth, Rng& rng) {
  ExprNodePtr root = base.root().clone();
  auto [slot, depth] = pick_slot(root, rng);
  (void)depth;

  ExprNodePtr donor_root = donor.root().clone();
  auto [donor_slot, donor_depth] = pick_slot(donor_root, rng);
  (void)donor_depth;

  *slot = std::move(*donor_slot);
  truncate_to_depth(root, 1, max_depth, rng);
  return AlphaExpr(std::move(root));
}

AlphaExpr gp_subtree_mutation(const AlphaExpr& base, int max_depth, Rng& rng) {
  ExprNodePtr root = base.root().clone();
  auto [slot, depth] = pick_slot(root, rng);
  const int budget = std::max(1, max_depth - depth + 1);
  AlphaExpr grown = random_expr(rng, budget);
  *slot = grown.root().clone();
  return AlphaExpr(std::move(root));
}

AlphaExpr gp_point_mutation(const AlphaExpr& base, Rng& rng) {
  ExprNodePtr root = base.root().clone();
  auto [slot, depth] = pick_slot(root, rng);
  (void)depth;
  ExprNode& node = **slot;

  if (node.is_leaf()) {
    *slot = random_terminal(rng);
    return AlphaExpr(std::move(root));
  }

  const Op next = random_op_with_arity(op_arity(node.op), node.op, rng);
  if (op_windowed(next)) {
    if (!op_windowed(node.op) || node.window < 1) {
      std::uniform_int_distribution<int> wdist(1, kRandomWindowMax);
      node.window = wdist(rng);
    }
  } else {
    node.window = 0;
  }
  node.op = next;
  return AlphaExpr(std::move(root));
}

GpResult run_gp(const GpConfig& cfg, const FitnessFn& fitness, Rng& rng) {
  cfg.validate();

  std::unordered_map<std::string, ArchiveEntry> archive;
  auto evaluate = [&](const AlphaExpr& expr) -> std::pair<std::string, const ArchiveEntry*> {
    std::string rpn = to_rpn_string(expr);
    auto it = archive.find(rpn);
    if (it == archive.end()) {
      const auto [train_fit, val_fit] = fitness(expr);
      ArchiveEntry entry;
      entry.expr = expr;
      entry.train_fitness = train_fit;
      entry.val_fitness = val_fit;
      it = archive.emplace(rpn, std::move(entry)).first;
    }
    return {std::move(rpn), &it->second};
  };

  struct Member {
    AlphaExpr expr;
    std::string rpn;
    double train_fitness = 0.0;
  };
  std::vector<Member> pop;
  pop.reserve(static_cast<std::size_t>(cfg.population));
  for (int i = 0; i < cfg.population; ++i) {
    AlphaExpr e = random_expr(rng, cfg.max_depth);
    auto [rpn, entry] = evaluate(e);
    pop.push_back({std::move(e), std::move(rpn), entry->train_fitness});
  }

  // Descending fitness with a stable textual tie-break keeps every run
  // reproducible regardless of hash order.
  auto by_fitness = [](const Member& a, const Member& b) {
    if (a.train_fitness != b.train_fitness) return a.train_fitness > b.train_fitness;
    return a.rpn < b.rpn;
  };

  auto tournament_winner = [&](const std::vector<Member>& members) -> const Member& {
    std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
    const Member* best = &members[pick(rng)];
    for (int i = 1; i < cfg.tournament; ++i) {
      const Member& candidate = members[pick(rng)];
      if (by_fitness(candidate, *best)) best = &candidate;
    }
    return *best;
  };

  GpResult result;
  std::sort(pop.begin(), pop.end(), by_fitness);
  result.best_train_by_gen.push_back(pop.front().train_fitness);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int gen = 1; gen <= cfg.generations; ++gen) {
    std::vector<Member> next;
    next.reserve(pop.size());
    for (int e = 0; e < cfg.elitism && e < static_cast<int>(pop.size()); ++e) {
      next.push_back({pop[static_cast<std::size_t>(e)].expr,
                      pop[static_cast<std::size_t>(e)].rpn,
                      pop[static_cast<std::size_t>(e)].train_fitness});
    }
    while (static_cast<int>(next.size()) < cfg.population) {
      const double r = unit(rng);
      AlphaExpr child;
      if (r < cfg.p_crossover) {
        const Member& a = tournament_winner(pop);
        const Member& b = tournament_winner(pop);
        child = gp_crossover(a.expr, b.expr, cfg.max_depth, rng);
      } else if (r < cfg.p_crossover + cfg.p_subtree_mutation) {
        child = gp_subtree_mutation(tournament_winner(pop).expr, cfg.max_depth, rng);
      } else if (r < cfg.p_crossover + cfg.p_subtree_mutation + cfg.p_point_mutation) {
        child = gp_point_mutation(tournament_winner(pop).expr, rng);
      } else {
        child = tournament_winner(pop).expr;
      }
      auto [rpn, entry] = evaluate(child);
      next.push_back({std::move(child), std::move(rpn), entry->train_fitness});
    }
    pop = std::move(next);
    std::sort(pop.begin(), pop.end(), by_fitness);
    result.best_train_by_gen.push_back(pop.front().train_fitness);
  }

  result.distinct_evaluated = static_cast<int>(archive.size());

  // Select from the final population, not from everything ever evaluated:
  // the product of a GP run is what survived evolution, and intermediate
  // expressions displaced by selection are not part of it.
  std::vector<std::pair<std::string, const ArchiveEntry*>> ranked;
  ranked.reserve(pop.size());
  {
    std::unordered_set<std::string> seen;
    for (const Member& m : pop) {
      if (seen.insert(m.rpn).second) ranked.emplace_back(m.rpn, &archive.at(m.rpn));
    }
  }
  if (static_cast<int>(ranked.size()) < cfg.top_m) {
    throw std::runtime_error("final population holds " + std::to_string(ranked.size()) +
                             " distinct expressions; need top_m = " + std::to_string(cfg.top_m) +
                             " (grow the population or generations)");
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second->val_fitness != b.second->val_fitness) {
      return a.second->val_fitness > b.second->val_fitness;
    }
    return a.first < b.first;
  });
  ranked.resize(static_cast<std::size_t>(cfg.top_m));
  for (const auto& [rpn, entry] : ranked) {
    result.selected.push_back(
        {entry->expr, rpn, entry->train_fitness, entry->val_fitness});
  }
  return result;
}

}  // namespace alphakit
