#pragma once

#include "alphakit/common.hpp"

#include <memory>
#include <vector>

namespace alphakit {

enum class Op : int {
  neg = 0,
  abs_val,
  signed_log1p,
  cs_rank,
  delay,
  delta,
  ts_mean,
  ts_std,
  ts_max,
  ts_min,
  add,
  sub,
  mul,
  safe_div,
};

inline constexpr int kNumOps = 14;
inline constexpr double kSafeDivFloor = 1e-12;  // |denominator| below this divides to 0
inline constexpr double kValueClamp = 1e150;    // operator outputs clamped into +-this
inline constexpr int kMaxWindow = 30;           // hard cap on time-window parameters
inline constexpr int kRandomWindowMax = 20;     // random_expr draws windows in 1..this

int op_arity(Op op);
bool op_windowed(Op op);
std::string_view op_name(Op op);

struct ExprNode;
using ExprNodePtr = std::unique_ptr<ExprNode>;

struct ExprNode {
  enum class Kind { data, constant, op };
  Kind kind = Kind::data;
  Field field = Field::close;  // kind == data
  double value = 0.0;          // kind == constant
  Op op = Op::neg;             // kind == op
  int window = 0;              // windowed ops only, 1..kMaxWindow
  std::vector<ExprNodePtr> children;

  ExprNodePtr clone() const;
  bool is_leaf() const { return kind != Kind::op; }
};

ExprNodePtr make_data(Field f);
ExprNodePtr make_const(double v);
ExprNodePtr make_op(Op op, std::vector<ExprNodePtr> children, int window = 0);

/// Tree depth counting a lone leaf as 1.
int node_depth(const ExprNode& node);
int node_size(const ExprNode& node);
/// Days of history a node needs before its evaluation day.
int node_lookback(const ExprNode& node);

/// Expression tree with value semantics (copies deep-clone).
class AlphaExpr {
 public:
  AlphaExpr() = default;
  explicit AlphaExpr(ExprNodePtr root) : root_(std::move(root)) {}
  AlphaExpr(const AlphaExpr& other) : root_(other.root_ ? other.root_->clone() : nullptr) {}
  AlphaExpr& operator=(const AlphaExpr& other) {
    if (this != &other) root_ = other.root_ ? other.root_->clone() : nullptr;
    return *this;
  }
  AlphaExpr(AlphaExpr&&) = default;
  AlphaExpr& operator=(AlphaExpr&&) = default;

  bool empty() const { return root_ == nullptr; }
  const ExprNode& root() const { return *root_; }
  ExprNode* mutable_root() { return root_.get(); }

  int depth() const;       // a lone leaf has depth 1
  int node_count() const;
  /// Days of history required before the evaluation day (accumulated over nested windows).
  int lookback() const;

 private:
  ExprNodePtr root_;
};

struct Token {
  enum class Kind { data, constant, op };
  Kind kind = Kind::data;
  Field field = Field::close;
  double value = 0.0;
  Op op = Op::neg;
  int window = 0;

  bool operator==(const Token& other) const;
};

using TokenStream = std::vector<Token>;

/// Splits whitespace-separated token text (`close delay_5 safe_div`, constants as
/// decimal literals). Throws std::runtime_error on unknown tokens or bad windows.
TokenStream tokenize(const std::string& text);
std::string detokenize(const TokenStream& tokens);

/// Stack-machine parse of a postfix token stream.
/// Throws std::runtime_error on arity underflow or leftover stack items.
AlphaExpr parse_rpn(const TokenStream& tokens);
AlphaExpr parse_rpn(const std::string& text);

/// Postorder serialization; parse_rpn(to_rpn(e)) is structurally e.
TokenStream to_rpn(const AlphaExpr& expr);
std::string to_rpn_string(const AlphaExpr& expr);

bool structurally_equal(const AlphaExpr& a, const AlphaExpr& b);

/// Grow-method random tree: terminal probability 0.3 until max_depth forces a leaf,
/// uniform operator choice, windows uniform in 1..kRandomWindowMax.
AlphaExpr random_expr(Rng& rng, int max_depth);

/// Random leaf node (data terminal or palette constant); used by GP mutation too.
ExprNodePtr random_terminal(Rng& rng);

}  // namespace alphakit
