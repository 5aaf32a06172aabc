#include "alphakit/expr_eval.hpp"

#include "alphakit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace alphakit {

namespace {

double sanitize(double v) {
  if (std::isnan(v)) return 0.0;
  if (v > kValueClamp) return kValueClamp;
  if (v < -kValueClamp) return -kValueClamp;
  return v;
}

double apply_unary(Op op, double x) {
  switch (op) {
    case Op::neg: return -x;
    case Op::abs_val: return std::abs(x);
    case Op::signed_log1p: return std::copysign(std::log1p(std::abs(x)), x);
    default: throw std::logic_error("not a pointwise unary op");
  }
}

double apply_binary(Op op, double a, double b) {
  switch (op) {
    case Op::add: return a + b;
    case Op::sub: return a - b;
    case Op::mul: return a * b;
    case Op::safe_div: return std::abs(b) < kSafeDivFloor ? 0.0 : a / b;
    default: throw std::logic_error("not a binary op");
  }
}

// ---- vectorized stack machine ----

struct StackEntry {
  Mat values;
  int req = 0;  // days of history this subexpression needs
};

void sanitize_in_place(Mat& m) {
  m = m.unaryExpr([](double v) { return sanitize(v); });
}

// Ranks `values` over the asset subset tradable across each day's window
// [u - req, u], writing (rank-1)/(n-1) into the universe cells of `out`.
void cs_rank_columns(const Mat& values, int req, const Eigen::ArrayXXi& prefix, Mat& out) {
  const int n_assets = static_cast<int>(values.rows());
  const int n_days = static_cast<int>(values.cols());
  std::vector<int> universe;
  universe.reserve(static_cast<std::size_t>(n_assets));
  for (int u = req; u < n_days; ++u) {
    universe.clear();
    for (int a = 0; a < n_assets; ++a) {
      if (window_tradable(prefix, a, u - req, u)) universe.push_back(a);
    }
    if (universe.empty()) continue;
    if (universe.size() == 1) {
      out(universe[0], u) = 0.5;
      continue;
    }
    Vec vals(static_cast<Eigen::Index>(universe.size()));
    for (std::size_t i = 0; i < universe.size(); ++i) {
      vals[static_cast<Eigen::Index>(i)] = values(universe[i], u);
    }
    const Vec r01 = rank01(vals);
    for (std::size_t i = 0; i < universe.size(); ++i) {
      out(universe[i], u) = r01[static_cast<Eigen::Index>(i)];
    }
  }
}

StackEntry apply_op_stack(const Token& tok, std::vector<StackEntry>& stack,
                          const OhlcvPanel& panel, const Eigen::ArrayXXi& prefix) {
  const int na = panel.n_assets();
  const int nd = panel.n_days();
  const int arity = op_arity(tok.op);
  StackEntry rhs, lhs;
  rhs = std::move(stack.back());
  stack.pop_back();
  if (arity == 2) {
    lhs = std::move(stack.back());
    stack.pop_back();
  }

  StackEntry out;
  switch (tok.op) {
    case Op::neg:
    case Op::abs_val:
    case Op::signed_log1p:
      out.req = rhs.req;
      out.values = rhs.values.unaryExpr([&](double x) { return apply_unary(tok.op, x); });
      break;
    case Op::cs_rank:
      out.req = rhs.req;
      out.values = Mat::Zero(na, nd);
      cs_rank_columns(rhs.values, rhs.req, prefix, out.values);
      break;
    case Op::delay:
      out.req = rhs.req + tok.window;
      out.values = Mat::Zero(na, nd);
      if (out.req < nd) {
        out.values.middleCols(out.req, nd - out.req) =
            rhs.values.middleCols(out.req - tok.window, nd - out.req);
      }
      break;
    case Op::delta:
      out.req = rhs.req + tok.window;
      out.values = Mat::Zero(na, nd);
      if (out.req < nd) {
        out.values.middleCols(out.req, nd - out.req) =
            rhs.values.middleCols(out.req, nd - out.req) -
            rhs.values.middleCols(out.req - tok.window, nd - out.req);
      }
      break;
    case Op::ts_mean:
    case Op::ts_std:
    case Op::ts_max:
    case Op::ts_min: {
      const int d = tok.window;
      out.req = rhs.req + d - 1;
      out.values = Mat::Zero(na, nd);
      for (int t = out.req; t < nd; ++t) {
        auto block = rhs.values.middleCols(t - d + 1, d);
        switch (tok.op) {
          case Op::ts_mean:
            out.values.col(t) = block.rowwise().mean();
            break;
          case Op::ts_std: {
            const Vec m = block.rowwise().mean();
            const Vec var = ((block.colwise() - m).array().square().rowwise().sum() /
                             static_cast<double>(d))
                                .matrix();
            out.values.col(t) = var.array().max(0.0).sqrt().matrix();
            break;
          }
          case Op::ts_max:
            out.values.col(t) = block.rowwise().maxCoeff();
            break;
          default:
            out.values.col(t) = block.rowwise().minCoeff();
            break;
        }
      }
      break;
    }
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::safe_div:
      out.req = std::max(lhs.req, rhs.req);
      out.values = lhs.values.binaryExpr(
          rhs.values, [&](double a, double b) { return apply_binary(tok.op, a, b); });
      break;
  }
  sanitize_in_place(out.values);
  return out;
}

// ---- scalar reference evaluator ----

// Tie-averaged ranks 1..n, written without touching the production ranking code.
std::vector<double> reference_ranks(const std::vector<double>& vals) {
  const std::size_t n = vals.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && vals[order[j + 1]] == vals[order[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

// Node values for days [lo, hi], one column per day. Requires lo >= node_lookback(node).
Mat eval_range(const ExprNode& node, const OhlcvPanel& panel, const Eigen::ArrayXXi& prefix,
               int lo, int hi) {
  const int na = panel.n_assets();
  const int width = hi - lo + 1;
  Mat out = Mat::Zero(na, width);

  switch (node.kind) {
    case ExprNode::Kind::data: {
      const Mat& grid = panel.field(node.field);
      for (int a = 0; a < na; ++a) {
        for (int i = 0; i < width; ++i) out(a, i) = grid(a, lo + i);
      }
      return out;
    }
    case ExprNode::Kind::constant:
      out.setConstant(node.value);
      return out;
    case ExprNode::Kind::op:
      break;
  }

  switch (node.op) {
    case Op::neg:
    case Op::abs_val:
    case Op::signed_log1p: {
      const Mat child = eval_range(*node.children[0], panel, prefix, lo, hi);
      for (int a = 0; a < na; ++a) {
        for (int i = 0; i < width; ++i) out(a, i) = sanitize(apply_unary(node.op, child(a, i)));
      }
      return out;
    }
    case Op::cs_rank: {
      const Mat child = eval_range(*node.children[0], panel, prefix, lo, hi);
      const int child_req = node_lookback(*node.children[0]);
      for (int i = 0; i < width; ++i) {
        const int u = lo + i;
        std::vector<int> universe;
        for (int a = 0; a < na; ++a) {
          if (window_tradable(prefix, a, u - child_req, u)) universe.push_back(a);
        }
        if (universe.empty()) continue;
        if (universe.size() == 1) {
          out(universe[0], i) = 0.5;
          continue;
        }
        std::vector<double> vals(universe.size());
        for (std::size_t k = 0; k < universe.size(); ++k) vals[k] = child(universe[k], i);
        const std::vector<double> ranks = reference_ranks(vals);
        const double denom = static_cast<double>(universe.size() - 1);
        for (std::size_t k = 0; k < universe.size(); ++k) {
          out(universe[k], i) = sanitize((ranks[k] - 1.0) / denom);
        }
      }
      return out;
    }
    case Op::delay: {
      const Mat child = eval_range(*node.children[0], panel, prefix, lo - node.window, hi);
      for (int a = 0; a < na; ++a) {
        for (int i = 0; i < width; ++i) out(a, i) = sanitize(child(a, i));
      }
      return out;
    }
    case Op::delta: {
      const Mat child = eval_range(*node.children[0], panel, prefix, lo - node.window, hi);
      for (int a = 0; a < na; ++a) {
        for (int i = 0; i < width; ++i) {
          out(a, i) = sanitize(child(a, i + node.window) - child(a, i));
        }
      }
      return out;
    }
    case Op::ts_mean:
    case Op::ts_std:
    case Op::ts_max:
    case Op::ts_min: {
      const int d = node.window;
      const Mat child = eval_range(*node.children[0], panel, prefix, lo - d + 1, hi);
      for (int a = 0; a < na; ++a) {
        for (int i = 0; i < width; ++i) {
          // Window for day lo+i occupies child columns [i, i+d-1].
          double acc = 0.0;
          switch (node.op) {
            case Op::ts_mean: {
              for (int k = 0; k < d; ++k) acc += child(a, i + k);
              acc /= d;
              break;
            }
            case Op::ts_std: {
              double mean = 0.0;
              for (int k = 0; k < d; ++k) mean += child(a, i + k);
              mean /= d;
              for (int k = 0; k < d; ++k) {
                const double dev = child(a, i + k) - mean;
                acc += dev * dev;
              }
              acc = std::sqrt(std::max(acc / d, 0.0));
              break;
            }
            case Op::ts_max: {
              acc = child(a, i);
              for (int k = 1; k < d; ++k) acc = std::max(acc, child(a, i + k));
              break;
            }
            default: {
              acc = child(a, i);
              for (int k = 1; k < d; ++k) acc = std::min(acc, child(a, i + k));
              break;
            }
          }
          out(a, i) = sanitize(acc);
        }
      }
      return out;
    }
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::safe_div: {
      const Mat l = eval_range(*node.children[0], panel, prefix, lo, hi);
      const Mat r = eval_range(*node.children[1], panel, prefix, lo, hi);
      for (int a = 0; a < na; ++a) {
        for (int i = 0; i < width; ++i) {
          out(a, i) = sanitize(apply_binary(node.op, l(a, i), r(a, i)));
        }
      }
      return out;
    }
  }
  throw std::logic_error("unhandled op");
}

FeaturePanel masked_result(const Mat& raw, int req, const OhlcvPanel& panel,
                           const Eigen::ArrayXXi& prefix) {
  const int na = panel.n_assets();
  const int nd = panel.n_days();
  FeaturePanel fp;
  fp.values = Mat::Zero(na, nd);
  fp.valid = BoolGrid::Constant(na, nd, false);
  for (int t = req; t < nd; ++t) {
    for (int a = 0; a < na; ++a) {
      if (window_tradable(prefix, a, t - req, t)) {
        fp.valid(a, t) = true;
        fp.values(a, t) = raw(a, t);
      }
    }
  }
  return fp;
}

}  // namespace

FeaturePanel evaluate_panel(const AlphaExpr& expr, const OhlcvPanel& panel) {
  if (expr.empty()) throw std::invalid_argument("empty expression");
  const int na = panel.n_assets();
  const int nd = panel.n_days();
  const auto prefix = panel.untradable_prefix();
  const TokenStream tokens = to_rpn(expr);

  std::vector<StackEntry> stack;
  for (const Token& tok : tokens) {
    switch (tok.kind) {
      case Token::Kind::data: {
        StackEntry e;
        e.values = panel.field(tok.field);
        e.req = 0;
        stack.push_back(std::move(e));
        break;
      }
      case Token::Kind::constant: {
        StackEntry e;
        e.values = Mat::Constant(na, nd, tok.value);
        e.req = 0;
        stack.push_back(std::move(e));
        break;
      }
      case Token::Kind::op:
        stack.push_back(apply_op_stack(tok, stack, panel, prefix));
        break;
    }
  }
  if (stack.size() != 1) throw std::logic_error("stack imbalance after evaluation");
  return masked_result(stack.back().values, stack.back().req, panel, prefix);
}

FeaturePanel evaluate_panel_tree(const AlphaExpr& expr, const OhlcvPanel& panel) {
  if (expr.empty()) throw std::invalid_argument("empty expression");
  const int na = panel.n_assets();
  const int nd = panel.n_days();
  const int req = expr.lookback();
  const auto prefix = panel.untradable_prefix();
  Mat raw = Mat::Zero(na, nd);
  if (req < nd) {
    const Mat tail = eval_range(expr.root(), panel, prefix, req, nd - 1);
    raw.middleCols(req, nd - req) = tail;
  }
  return masked_result(raw, req, panel, prefix);
}

CrossSection evaluate(const AlphaExpr& expr, const OhlcvPanel& panel, int day) {
  if (expr.empty()) throw std::invalid_argument("empty expression");
  const int req = expr.lookback();
  if (day < req || day >= panel.n_days()) {
    throw std::invalid_argument("day " + std::to_string(day) +
                                " cannot cover lookback " + std::to_string(req));
  }
  const auto prefix = panel.untradable_prefix();
  const Mat col = eval_range(expr.root(), panel, prefix, day, day);
  CrossSection cs;
  cs.day = day;
  for (int a = 0; a < panel.n_assets(); ++a) {
    if (window_tradable(prefix, a, day - req, day)) cs.assets.push_back(a);
  }
  cs.values.resize(static_cast<Eigen::Index>(cs.assets.size()));
  for (std::size_t i = 0; i < cs.assets.size(); ++i) {
    cs.values[static_cast<Eigen::Index>(i)] = col(cs.assets[i], 0);
  }
  return cs;
}

}  // namespace alphakit
