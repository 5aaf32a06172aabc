#include "alphakit/expr.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace alphakit {

namespace {

struct OpInfo {
  Op op;
  std::string_view name;
  int arity;
  bool windowed;
};

constexpr std::array<OpInfo, kNumOps> kOpTable = {{
    {Op::neg, "neg", 1, false},
    {Op::abs_val, "abs", 1, false},
    {Op::signed_log1p, "signed_log1p", 1, false},
    {Op::cs_rank, "cs_rank", 1, false},
    {Op::delay, "delay", 1, true},
    {Op::delta, "delta", 1, true},
    {Op::ts_mean, "ts_mean", 1, true},
    {Op::ts_std, "ts_std", 1, true},
    {Op::ts_max, "ts_max", 1, true},
    {Op::ts_min, "ts_min", 1, true},
    {Op::add, "add", 2, false},
    {Op::sub, "sub", 2, false},
    {Op::mul, "mul", 2, false},
    {Op::safe_div, "safe_div", 2, false},
}};

const OpInfo& info(Op op) { return kOpTable[static_cast<int>(op)]; }

// Order-unity constants only: wider palettes mostly breed rescaled clones of
// existing expressions, which waste archive slots without changing rank ICs.
constexpr std::array<double, 6> kConstantPalette = {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};

}  // namespace

int op_arity(Op op) { return info(op).arity; }
bool op_windowed(Op op) { return info(op).windowed; }
std::string_view op_name(Op op) { return info(op).name; }

ExprNodePtr ExprNode::clone() const {
  auto node = std::make_unique<ExprNode>();
  node->kind = kind;
  node->field = field;
  node->value = value;
  node->op = op;
  node->window = window;
  node->children.reserve(children.size());
  for (const auto& c : children) node->children.push_back(c->clone());
  return node;
}

ExprNodePtr make_data(Field f) {
  auto node = std::make_unique<ExprNode>();
  node->kind = ExprNode::Kind::data;
  node->field = f;
  return node;
}

ExprNodePtr make_const(double v) {
  auto node = std::make_unique<ExprNode>();
  node->kind = ExprNode::Kind::constant;
  node->value = v;
  return node;
}

ExprNodePtr make_op(Op op, std::vector<ExprNodePtr> children, int window) {
  if (static_cast<int>(children.size()) != op_arity(op))
    throw std::runtime_error(std::string("make_op: wrong arity for ") + std::string(op_name(op)));
  if (op_windowed(op) && (window < 1 || window > kMaxWindow))
    throw std::runtime_error("make_op: window out of range for " + std::string(op_name(op)));
  auto node = std::make_unique<ExprNode>();
  node->kind = ExprNode::Kind::op;
  node->op = op;
  node->window = op_windowed(op) ? window : 0;
  node->children = std::move(children);
  return node;
}

int node_depth(const ExprNode& node) {
  int d = 0;
  for (const auto& c : node.children) d = std::max(d, node_depth(*c));
  return d + 1;
}

int node_size(const ExprNode& node) {
  int n = 1;
  for (const auto& c : node.children) n += node_size(*c);
  return n;
}

int node_lookback(const ExprNode& node) {
  if (node.is_leaf()) return 0;
  int child_max = 0;
  for (const auto& c : node.children) child_max = std::max(child_max, node_lookback(*c));
  switch (node.op) {
    case Op::delay:
    case Op::delta:
      return child_max + node.window;
    case Op::ts_mean:
    case Op::ts_std:
    case Op::ts_max:
    case Op::ts_min:
      return child_max + node.window - 1;
    default:
      return child_max;
  }
}

int AlphaExpr::depth() const { return root_ ? node_depth(*root_) : 0; }
int AlphaExpr::node_count() const { return root_ ? node_size(*root_) : 0; }
int AlphaExpr::lookback() const { return root_ ? node_lookback(*root_) : 0; }

bool Token::operator==(const Token& other) const {
  if (kind != other.kind) return false;
  switch (kind) {
    case Kind::data:
      return field == other.field;
    case Kind::constant:
      return value == other.value;
    case Kind::op:
      return op == other.op && window == other.window;
  }
  return false;
}

namespace {

Token token_from_word(const std::string& word) {
  Token tok;
  for (int f = 0; f < kNumFields; ++f) {
    if (word == kFieldNames[f]) {
      tok.kind = Token::Kind::data;
      tok.field = static_cast<Field>(f);
      return tok;
    }
  }
  for (const auto& oi : kOpTable) {
    if (oi.windowed) {
      const std::string prefix = std::string(oi.name) + "_";
      if (word.size() > prefix.size() && word.compare(0, prefix.size(), prefix) == 0) {
        int w = 0;
        const char* b = word.data() + prefix.size();
        const char* e = word.data() + word.size();
        auto res = std::from_chars(b, e, w);
        if (res.ec != std::errc() || res.ptr != e)
          throw std::runtime_error("bad window in token '" + word + "'");
        if (w < 1 || w > kMaxWindow)
          throw std::runtime_error("window out of range 1.." + std::to_string(kMaxWindow) +
                                   " in token '" + word + "'");
        tok.kind = Token::Kind::op;
        tok.op = oi.op;
        tok.window = w;
        return tok;
      }
    } else if (word == oi.name) {
      tok.kind = Token::Kind::op;
      tok.op = oi.op;
      return tok;
    }
  }
  double v = 0.0;
  const char* b = word.data();
  const char* e = word.data() + word.size();
  auto res = std::from_chars(b, e, v);
  if (res.ec == std::errc() && res.ptr == e) {
    tok.kind = Token::Kind::constant;
    tok.value = v;
    return tok;
  }
  throw std::runtime_error("unknown token '" + word + "'");
}

std::string token_text(const Token& tok) {
  switch (tok.kind) {
    case Token::Kind::data:
      return std::string(field_name(tok.field));
    case Token::Kind::constant:
      return format_double(tok.value);
    case Token::Kind::op:
      if (op_windowed(tok.op))
        return std::string(op_name(tok.op)) + "_" + std::to_string(tok.window);
      return std::string(op_name(tok.op));
  }
  return {};
}

}  // namespace

TokenStream tokenize(const std::string& text) {
  TokenStream tokens;
  std::istringstream in(text);
  std::string word;
  while (in >> word) tokens.push_back(token_from_word(word));
  return tokens;
}

std::string detokenize(const TokenStream& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += token_text(tokens[i]);
  }
  return out;
}

AlphaExpr parse_rpn(const TokenStream& tokens) {
  std::vector<ExprNodePtr> stack;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& tok = tokens[i];
    switch (tok.kind) {
      case Token::Kind::data:
        stack.push_back(make_data(tok.field));
        break;
      case Token::Kind::constant:
        stack.push_back(make_const(tok.value));
        break;
      case Token::Kind::op: {
        const int arity = op_arity(tok.op);
        if (static_cast<int>(stack.size()) < arity)
          throw std::runtime_error("arity underflow at token " + std::to_string(i + 1) + " (" +
                                   token_text(tok) + ")");
        std::vector<ExprNodePtr> children(arity);
        for (int c = arity - 1; c >= 0; --c) {
          children[c] = std::move(stack.back());
          stack.pop_back();
        }
        stack.push_back(make_op(tok.op, std::move(children), tok.window));
        break;
      }
    }
  }
  if (stack.empty()) throw std::runtime_error("empty token stream");
  if (stack.size() != 1)
    throw std::runtime_error("leftover stack items: " + std::to_string(stack.size()) +
                             " values remain after final token");
  return AlphaExpr(std::move(stack.back()));
}

AlphaExpr parse_rpn(const std::string& text) { return parse_rpn(tokenize(text)); }

namespace {

void postorder(const ExprNode& node, TokenStream& out) {
  for (const auto& c : node.children) postorder(*c, out);
  Token tok;
  switch (node.kind) {
    case ExprNode::Kind::data:
      tok.kind = Token::Kind::data;
      tok.field = node.field;
      break;
    case ExprNode::Kind::constant:
      tok.kind = Token::Kind::constant;
      tok.value = node.value;
      break;
    case ExprNode::Kind::op:
      tok.kind = Token::Kind::op;
      tok.op = node.op;
      tok.window = node.window;
      break;
  }
  out.push_back(tok);
}

}  // namespace

TokenStream to_rpn(const AlphaExpr& expr) {
  TokenStream out;
  if (!expr.empty()) postorder(expr.root(), out);
  return out;
}

std::string to_rpn_string(const AlphaExpr& expr) { return detokenize(to_rpn(expr)); }

bool structurally_equal(const AlphaExpr& a, const AlphaExpr& b) {
  return to_rpn(a) == to_rpn(b);
}

ExprNodePtr random_terminal(Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) < 0.8) {
    std::uniform_int_distribution<int> pick(0, kNumFields - 1);
    return make_data(static_cast<Field>(pick(rng)));
  }
  std::uniform_int_distribution<std::size_t> pick(0, kConstantPalette.size() - 1);
  return make_const(kConstantPalette[pick(rng)]);
}

namespace {

ExprNodePtr grow(Rng& rng, int depth_left) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (depth_left <= 1 || unit(rng) < 0.3) return random_terminal(rng);
  std::uniform_int_distribution<int> pick_op(0, kNumOps - 1);
  const Op op = static_cast<Op>(pick_op(rng));
  int window = 0;
  if (op_windowed(op)) {
    std::uniform_int_distribution<int> pick_w(1, kRandomWindowMax);
    window = pick_w(rng);
  }
  std::vector<ExprNodePtr> children;
  children.reserve(static_cast<std::size_t>(op_arity(op)));
  for (int c = 0; c < op_arity(op); ++c) children.push_back(grow(rng, depth_left - 1));
  return make_op(op, std::move(children), window);
}

}  // namespace

AlphaExpr random_expr(Rng& rng, int max_depth) {
  if (max_depth < 1) throw std::invalid_argument("random_expr: max_depth must be >= 1");
  return AlphaExpr(grow(rng, max_depth));
}

}  // namespace alphakit
