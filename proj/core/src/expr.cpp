#include "cartan/expr.hpp"

#include <bit>
#include <cmath>
#include <sstream>

namespace cartan {

namespace {

bool same_pool(const Expr& a, const Expr& b) {
  return a.valid() && b.valid() && a.pool() == b.pool();
}

ExprPool& pool_of(const Expr& a, const Expr& b) {
  if (!same_pool(a, b)) {
    throw std::logic_error("expressions from different pools combined");
  }
  return *a.pool();
}

ExprPool& pool_of(const Expr& a) {
  if (!a.valid()) throw std::logic_error("invalid expression handle");
  return *a.pool();
}

bool integral(double v) { return std::floor(v) == v && std::abs(v) < 1e15; }

double int_pow(double base, long long e) {
  bool invert = e < 0;
  unsigned long long n = invert ? static_cast<unsigned long long>(-e)
                                : static_cast<unsigned long long>(e);
  double result = 1.0;
  double b = base;
  while (n) {
    if (n & 1u) result *= b;
    b *= b;
    n >>= 1u;
  }
  return invert ? 1.0 / result : result;
}

double eval_pow(double base, double e) {
  if (integral(e) && std::abs(e) <= 64) {
    return int_pow(base, static_cast<long long>(e));
  }
  return std::pow(base, e);
}

int precedence(Op op) {
  switch (op) {
    case Op::Add:
    case Op::Sub:
      return 1;
    case Op::Mul:
    case Op::Div:
      return 2;
    case Op::Neg:
      return 3;
    case Op::Pow:
      return 4;
    default:
      return 5;
  }
}

const char* func_name(Op op) {
  switch (op) {
    case Op::Sqrt:
      return "sqrt";
    case Op::Exp:
      return "exp";
    case Op::Log:
      return "log";
    case Op::Sin:
      return "sin";
    case Op::Cos:
      return "cos";
    default:
      return "?";
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Expr

const Node& Expr::node() const { return pool_->node(id_); }

bool Expr::is_constant() const { return node().op == Op::Const; }

bool Expr::is_zero() const {
  const Node& n = node();
  return n.op == Op::Const && n.value == 0.0;
}

bool Expr::is_one() const {
  const Node& n = node();
  return n.op == Op::Const && n.value == 1.0;
}

bool Expr::depends_on(int var) const {
  return (node().deps >> var) & 1u;
}

// ---------------------------------------------------------------------------
// ExprPool

std::size_t ExprPool::KeyHash::operator()(const Key& k) const noexcept {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  };
  mix(static_cast<std::uint64_t>(k.op));
  mix(k.a);
  mix(k.b);
  mix(static_cast<std::uint64_t>(k.var + 1));
  mix(k.bits);
  return static_cast<std::size_t>(h);
}

ExprPool::ExprPool(int num_vars) : num_vars_(num_vars) {
  if (num_vars <= 0 || num_vars > 64) {
    throw std::invalid_argument("expression pool supports 1..64 variables");
  }
  chunks_ = std::make_unique<std::unique_ptr<Node[]>[]>(kMaxChunks);
}

Expr ExprPool::intern(const Node& n) {
  Key key{n.op, n.a, n.b, n.var, std::bit_cast<std::uint64_t>(n.value)};
  std::lock_guard lock(mutex_);
  if (auto it = intern_.find(key); it != intern_.end()) {
    return Expr(this, it->second);
  }
  const std::size_t id = size_.load(std::memory_order_relaxed);
  const std::size_t chunk = id >> kChunkBits;
  if (chunk >= kMaxChunks) throw std::length_error("expression pool exhausted");
  if (!chunks_[chunk]) chunks_[chunk] = std::make_unique<Node[]>(kChunkMask + 1);
  chunks_[chunk][id & kChunkMask] = n;
  intern_.emplace(key, static_cast<std::uint32_t>(id));
  size_.store(id + 1, std::memory_order_release);
  return Expr(this, static_cast<std::uint32_t>(id));
}

Expr ExprPool::constant(double v) {
  if (v == 0.0) v = 0.0;  // fold -0 into +0
  Node n;
  n.op = Op::Const;
  n.value = v;
  return intern(n);
}

Expr ExprPool::variable(int var) {
  if (var < 0 || var >= num_vars_) {
    throw std::out_of_range("variable index out of range");
  }
  Node n;
  n.op = Op::Var;
  n.var = var;
  n.deps = std::uint64_t{1} << var;
  return intern(n);
}

namespace {
Node binary(Op op, const Expr& a, const Expr& b) {
  Node n;
  n.op = op;
  n.a = a.id();
  n.b = b.id();
  n.deps = a.node().deps | b.node().deps;
  return n;
}
}  // namespace

Expr ExprPool::add(Expr a, Expr b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.is_constant() && b.is_constant()) {
    return constant(a.node().value + b.node().value);
  }
  return intern(binary(Op::Add, a, b));
}

Expr ExprPool::sub(Expr a, Expr b) {
  if (b.is_zero()) return a;
  if (a == b) return zero();
  if (a.is_zero()) return neg(b);
  if (a.is_constant() && b.is_constant()) {
    return constant(a.node().value - b.node().value);
  }
  return intern(binary(Op::Sub, a, b));
}

Expr ExprPool::mul(Expr a, Expr b) {
  if (a.is_zero() || b.is_zero()) return zero();
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  if (a.is_constant() && b.is_constant()) {
    return constant(a.node().value * b.node().value);
  }
  if (a.is_constant() && a.node().value == -1.0) return neg(b);
  if (b.is_constant() && b.node().value == -1.0) return neg(a);
  return intern(binary(Op::Mul, a, b));
}

Expr ExprPool::div(Expr a, Expr b) {
  if (a.is_zero() && !b.is_zero()) return zero();
  if (b.is_one()) return a;
  if (a.is_constant() && b.is_constant() && b.node().value != 0.0) {
    return constant(a.node().value / b.node().value);
  }
  return intern(binary(Op::Div, a, b));
}

Expr ExprPool::neg(Expr a) {
  const Node& n = a.node();
  if (n.op == Op::Const) return constant(-n.value);
  if (n.op == Op::Neg) return Expr(this, n.a);
  Node out;
  out.op = Op::Neg;
  out.a = a.id();
  out.deps = n.deps;
  return intern(out);
}

Expr ExprPool::pow(Expr a, Expr b) {
  if (b.is_zero()) return one();
  if (b.is_one()) return a;
  if (a.is_constant() && b.is_constant()) {
    const double v = eval_pow(a.node().value, b.node().value);
    if (std::isfinite(v)) return constant(v);
  }
  if (!a.is_constant() && !b.is_constant()) {
    throw std::invalid_argument(
        "power with non-constant base and non-constant exponent");
  }
  return intern(binary(Op::Pow, a, b));
}

Expr ExprPool::unary(Op op, Expr a) {
  const Node& n = a.node();
  if (n.op == Op::Const) {
    double v = n.value;
    bool ok = true;
    switch (op) {
      case Op::Sqrt:
        ok = v >= 0.0;
        v = std::sqrt(v);
        break;
      case Op::Exp:
        v = std::exp(v);
        break;
      case Op::Log:
        ok = v > 0.0;
        v = std::log(v);
        break;
      case Op::Sin:
        v = std::sin(v);
        break;
      case Op::Cos:
        v = std::cos(v);
        break;
      default:
        throw std::logic_error("not a unary function");
    }
    if (ok && std::isfinite(v)) return constant(v);
  }
  Node out;
  out.op = op;
  out.a = a.id();
  out.deps = n.deps;
  return intern(out);
}

Expr ExprPool::derive(Expr e, int var) {
  if (!e.depends_on(var)) return zero();
  const std::uint64_t key = (static_cast<std::uint64_t>(e.id()) << 6) |
                            static_cast<std::uint64_t>(var);
  {
    std::lock_guard lock(mutex_);
    if (auto it = derivs_.find(key); it != derivs_.end()) {
      return Expr(this, it->second);
    }
  }
  Expr d = derive_uncached(e, var);
  std::lock_guard lock(mutex_);
  derivs_.emplace(key, d.id());
  return d;
}

Expr ExprPool::derive_uncached(Expr e, int var) {
  const Node n = e.node();
  Expr a(this, n.a);
  Expr b(this, n.b);
  switch (n.op) {
    case Op::Const:
      return zero();
    case Op::Var:
      return n.var == var ? one() : zero();
    case Op::Add:
      return add(derive(a, var), derive(b, var));
    case Op::Sub:
      return sub(derive(a, var), derive(b, var));
    case Op::Mul:
      return add(mul(derive(a, var), b), mul(a, derive(b, var)));
    case Op::Div: {
      Expr da = derive(a, var);
      Expr db = derive(b, var);
      return sub(div(da, b), div(mul(a, db), mul(b, b)));
    }
    case Op::Neg:
      return neg(derive(a, var));
    case Op::Pow: {
      if (b.is_constant()) {
        const double c = b.node().value;
        return mul(mul(constant(c), pow(a, constant(c - 1.0))), derive(a, var));
      }
      // constant base: a^v * log(a) * dv
      return mul(mul(e, unary(Op::Log, a)), derive(b, var));
    }
    case Op::Sqrt:
      return div(derive(a, var), mul(constant(2.0), e));
    case Op::Exp:
      return mul(e, derive(a, var));
    case Op::Log:
      return div(derive(a, var), a);
    case Op::Sin:
      return mul(unary(Op::Cos, a), derive(a, var));
    case Op::Cos:
      return neg(mul(unary(Op::Sin, a), derive(a, var)));
  }
  throw std::logic_error("unhandled op in derive");
}

// ---------------------------------------------------------------------------
// free functions

Expr operator+(Expr a, Expr b) { return pool_of(a, b).add(a, b); }
Expr operator-(Expr a, Expr b) { return pool_of(a, b).sub(a, b); }
Expr operator*(Expr a, Expr b) { return pool_of(a, b).mul(a, b); }
Expr operator/(Expr a, Expr b) { return pool_of(a, b).div(a, b); }
Expr operator-(Expr a) { return pool_of(a).neg(a); }
Expr operator+(Expr a, double b) { return a + pool_of(a).constant(b); }
Expr operator+(double a, Expr b) { return pool_of(b).constant(a) + b; }
Expr operator-(Expr a, double b) { return a - pool_of(a).constant(b); }
Expr operator-(double a, Expr b) { return pool_of(b).constant(a) - b; }
Expr operator*(Expr a, double b) { return a * pool_of(a).constant(b); }
Expr operator*(double a, Expr b) { return pool_of(b).constant(a) * b; }
Expr operator/(Expr a, double b) { return a / pool_of(a).constant(b); }
Expr operator/(double a, Expr b) { return pool_of(b).constant(a) / b; }
Expr& operator+=(Expr& a, Expr b) { return a = a + b; }
Expr& operator-=(Expr& a, Expr b) { return a = a - b; }

Expr pow(Expr a, Expr b) { return pool_of(a, b).pow(a, b); }
Expr pow(Expr a, double b) { return pool_of(a).pow(a, pool_of(a).constant(b)); }
Expr sqrt(Expr a) { return pool_of(a).unary(Op::Sqrt, a); }
Expr exp(Expr a) { return pool_of(a).unary(Op::Exp, a); }
Expr log(Expr a) { return pool_of(a).unary(Op::Log, a); }
Expr sin(Expr a) { return pool_of(a).unary(Op::Sin, a); }
Expr cos(Expr a) { return pool_of(a).unary(Op::Cos, a); }

Expr derive(Expr e, int var) { return pool_of(e).derive(e, var); }

namespace {

struct Printer {
  const ExprPool& pool;
  std::size_t limit;
  std::string out;
  bool truncated = false;

  void emit(const std::string& s) {
    if (truncated) return;
    if (out.size() + s.size() > limit) {
      out.append(s, 0, limit - std::min(limit, out.size()));
      truncated = true;
      return;
    }
    out += s;
  }

  void print(std::uint32_t id, int parent_prec, bool right_side) {
    if (truncated) return;
    const Node& n = pool.node(id);
    const int prec = precedence(n.op);
    const bool parens =
        prec < parent_prec || (prec == parent_prec && right_side &&
                               n.op != Op::Add && n.op != Op::Mul);
    switch (n.op) {
      case Op::Const: {
        std::ostringstream os;
        os.precision(17);
        os << n.value;
        const bool negative = n.value < 0.0;
        if (negative && parent_prec > 1) emit("(");
        emit(os.str());
        if (negative && parent_prec > 1) emit(")");
        return;
      }
      case Op::Var: {
        const int half = pool.num_vars() / 2;
        emit((n.var < half ? "x" : "p") +
             std::to_string(n.var % half + 1));
        return;
      }
      case Op::Neg:
        if (parens) emit("(");
        emit("-");
        print(n.a, prec + 1, false);
        if (parens) emit(")");
        return;
      case Op::Sqrt:
      case Op::Exp:
      case Op::Log:
      case Op::Sin:
      case Op::Cos:
        emit(func_name(n.op));
        emit("(");
        print(n.a, 0, false);
        emit(")");
        return;
      default:
        break;
    }
    const char* sym = n.op == Op::Add   ? " + "
                      : n.op == Op::Sub ? " - "
                      : n.op == Op::Mul ? "*"
                      : n.op == Op::Div ? "/"
                                        : "^";
    if (parens) emit("(");
    // "^" is right-associative, so the left operand needs the tighter bound.
    print(n.a, n.op == Op::Pow ? prec + 1 : prec, false);
    emit(sym);
    print(n.b, n.op == Op::Pow ? prec : prec, true);
    if (parens) emit(")");
  }
};

}  // namespace

std::string to_string(Expr e, std::size_t max_chars) {
  Printer p{*e.pool(), max_chars, {}};
  p.print(e.id(), 0, false);
  if (p.truncated) p.out += "...";
  return p.out;
}

std::size_t dag_size(Expr e) {
  const ExprPool& pool = *e.pool();
  std::vector<std::uint8_t> seen(pool.size(), 0);
  std::vector<std::uint32_t> stack{e.id()};
  std::size_t count = 0;
  while (!stack.empty()) {
    const std::uint32_t id = stack.back();
    stack.pop_back();
    if (seen[id]) continue;
    seen[id] = 1;
    ++count;
    const Node& n = pool.node(id);
    if (n.op == Op::Const || n.op == Op::Var) continue;
    stack.push_back(n.a);
    if (is_binary(n.op)) stack.push_back(n.b);
  }
  return count;
}

// ---------------------------------------------------------------------------
// PointEvaluator

PointEvaluator::PointEvaluator(const ExprPool& pool, std::vector<double> vars)
    : pool_(&pool), vars_(std::move(vars)) {
  if (static_cast<int>(vars_.size()) != pool.num_vars()) {
    throw std::invalid_argument("evaluation point has the wrong dimension");
  }
  values_.resize(pool.size());
  done_.resize(pool.size(), 0);
}

double PointEvaluator::apply(const Node& n, std::uint32_t id) {
  auto child = [this](std::uint32_t c) { return values_[c]; };
  auto fail = [this, id](const char* what) -> double {
    throw DomainError(what, to_string(Expr(const_cast<ExprPool*>(pool_), id),
                                      240));
  };
  switch (n.op) {
    case Op::Const:
      return n.value;
    case Op::Var:
      return vars_[static_cast<std::size_t>(n.var)];
    case Op::Add:
      return child(n.a) + child(n.b);
    case Op::Sub:
      return child(n.a) - child(n.b);
    case Op::Mul:
      return child(n.a) * child(n.b);
    case Op::Div: {
      const double d = child(n.b);
      if (d == 0.0) return fail("division by zero");
      return child(n.a) / d;
    }
    case Op::Neg:
      return -child(n.a);
    case Op::Pow: {
      const double base = child(n.a);
      const double e = child(n.b);
      if (base == 0.0 && e < 0.0) return fail("zero raised to negative power");
      if (base < 0.0 && !integral(e)) {
        return fail("negative base with non-integer exponent");
      }
      return eval_pow(base, e);
    }
    case Op::Sqrt: {
      const double v = child(n.a);
      if (v < 0.0) return fail("square root of negative number");
      return std::sqrt(v);
    }
    case Op::Exp:
      return std::exp(child(n.a));
    case Op::Log: {
      const double v = child(n.a);
      if (v <= 0.0) return fail("logarithm of non-positive number");
      return std::log(v);
    }
    case Op::Sin:
      return std::sin(child(n.a));
    case Op::Cos:
      return std::cos(child(n.a));
  }
  throw std::logic_error("unhandled op in evaluate");
}

double PointEvaluator::operator()(Expr e) {
  if (e.pool() != pool_) throw std::logic_error("expression from another pool");
  if (pool_->size() > values_.size()) {
    values_.resize(pool_->size());
    done_.resize(pool_->size(), 0);
  }
  const std::uint32_t root = e.id();
  if (done_[root]) return values_[root];
  stack_.clear();
  stack_.push_back(root);
  while (!stack_.empty()) {
    const std::uint32_t id = stack_.back();
    if (done_[id]) {
      stack_.pop_back();
      continue;
    }
    const Node& n = pool_->node(id);
    bool ready = true;
    if (n.op != Op::Const && n.op != Op::Var) {
      if (!done_[n.a]) {
        stack_.push_back(n.a);
        ready = false;
      }
      if (is_binary(n.op) && !done_[n.b]) {
        stack_.push_back(n.b);
        ready = false;
      }
    }
    if (!ready) continue;
    values_[id] = apply(n, id);
    done_[id] = 1;
    stack_.pop_back();
  }
  return values_[root];
}

}  // namespace cartan
