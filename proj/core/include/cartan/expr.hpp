#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace cartan {

enum class Op : std::uint8_t {
  Const,
  Var,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  Pow,
  Sqrt,
  Exp,
  Log,
  Sin,
  Cos,
};

/// Raised when an expression is evaluated outside its domain (log of a
/// non-positive number, division by zero, ...). `subexpression` holds a
/// printable form of the offending node, truncated for large trees.
class DomainError : public std::runtime_error {
 public:
  DomainError(const std::string& what, std::string subexpression)
      : std::runtime_error(what + " in `" + subexpression + "`"),
        subexpression_(std::move(subexpression)) {}
  const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  std::string subexpression_;
};

constexpr bool is_binary(Op op) noexcept {
  return op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div ||
         op == Op::Pow;
}

struct Node {
  Op op = Op::Const;
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  int var = -1;
  double value = 0.0;
  std::uint64_t deps = 0;  // bit v set iff the subtree mentions variable v
};

class ExprPool;

/// Lightweight handle to a hash-consed node. Equality of handles from the
/// same pool is structural equality of the trees.
class Expr {
 public:
  Expr() = default;
  Expr(ExprPool* pool, std::uint32_t id) : pool_(pool), id_(id) {}

  bool valid() const noexcept { return pool_ != nullptr; }
  ExprPool* pool() const noexcept { return pool_; }
  std::uint32_t id() const noexcept { return id_; }
  const Node& node() const;

  bool is_constant() const;
  bool is_zero() const;
  bool is_one() const;
  bool depends_on(int var) const;

  friend bool operator==(const Expr& l, const Expr& r) noexcept {
    return l.pool_ == r.pool_ && l.id_ == r.id_;
  }

 private:
  ExprPool* pool_ = nullptr;
  std::uint32_t id_ = 0;
};

/// Append-only arena of expression nodes. Node construction and the
/// derivative cache are guarded by a mutex; reading existing nodes is
/// lock-free, so evaluation can run concurrently with construction.
class ExprPool {
 public:
  explicit ExprPool(int num_vars);
  ExprPool(const ExprPool&) = delete;
  ExprPool& operator=(const ExprPool&) = delete;

  int num_vars() const noexcept { return num_vars_; }
  std::size_t size() const noexcept {
    return size_.load(std::memory_order_acquire);
  }
  const Node& node(std::uint32_t id) const {
    return chunks_[id >> kChunkBits][id & kChunkMask];
  }

  Expr constant(double v);
  Expr variable(int var);
  Expr zero() { return constant(0.0); }
  Expr one() { return constant(1.0); }

  Expr add(Expr a, Expr b);
  Expr sub(Expr a, Expr b);
  Expr mul(Expr a, Expr b);
  Expr div(Expr a, Expr b);
  Expr neg(Expr a);
  Expr pow(Expr a, Expr b);
  Expr unary(Op op, Expr a);

  /// d e / d var, memoised per (node, var).
  Expr derive(Expr e, int var);

 private:
  static constexpr std::uint32_t kChunkBits = 12;
  static constexpr std::uint32_t kChunkMask = (1u << kChunkBits) - 1;
  static constexpr std::size_t kMaxChunks = 1u << 16;

  struct Key {
    Op op;
    std::uint32_t a, b;
    int var;
    std::uint64_t bits;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };

  Expr intern(const Node& n);
  Expr derive_uncached(Expr e, int var);

  int num_vars_;
  std::unique_ptr<std::unique_ptr<Node[]>[]> chunks_;
  std::atomic<std::size_t> size_{0};
  std::mutex mutex_;
  std::unordered_map<Key, std::uint32_t, KeyHash> intern_;
  std::unordered_map<std::uint64_t, std::uint32_t> derivs_;
};

Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);
Expr operator/(Expr a, Expr b);
Expr operator-(Expr a);
Expr operator+(Expr a, double b);
Expr operator+(double a, Expr b);
Expr operator-(Expr a, double b);
Expr operator-(double a, Expr b);
Expr operator*(Expr a, double b);
Expr operator*(double a, Expr b);
Expr operator/(Expr a, double b);
Expr operator/(double a, Expr b);
Expr& operator+=(Expr& a, Expr b);
Expr& operator-=(Expr& a, Expr b);

Expr pow(Expr a, Expr b);
Expr pow(Expr a, double b);
Expr sqrt(Expr a);
Expr exp(Expr a);
Expr log(Expr a);
Expr sin(Expr a);
Expr cos(Expr a);

/// Single-step partial derivative with respect to pool variable `var`.
Expr derive(Expr e, int var);

/// Infix rendering; output is cut at `max_chars` with a trailing "...".
std::string to_string(Expr e, std::size_t max_chars = 4096);

/// Number of distinct nodes reachable from `e`.
std::size_t dag_size(Expr e);

/// Memoising evaluator for one assignment of the pool variables. Values are
/// computed on demand and cached per node, so evaluating many roots that
/// share subtrees costs one pass over their union.
class PointEvaluator {
 public:
  PointEvaluator(const ExprPool& pool, std::vector<double> vars);

  double operator()(Expr e);
  const std::vector<double>& vars() const noexcept { return vars_; }

 private:
  double apply(const Node& n, std::uint32_t id);

  const ExprPool* pool_;
  std::vector<double> vars_;
  std::vector<double> values_;
  std::vector<std::uint8_t> done_;
  std::vector<std::uint32_t> stack_;
};

}  // namespace cartan
