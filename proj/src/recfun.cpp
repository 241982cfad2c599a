#include "pcalc/recfun.hpp"

namespace pcalc::recfun {

namespace {

Fun make(Node n) { return std::make_shared<const Node>(std::move(n)); }

struct OutOfFuel {};

struct Evaluator {
  std::uint64_t fuel;
  std::uint64_t used = 0;

  void tick() {
    if (used >= fuel) throw OutOfFuel{};
    ++used;
  }

  Natural run(const Fun& f, const std::vector<Natural>& args) {
    tick();
    switch (f->kind) {
      case Kind::Zero:
        return 0;
      case Kind::Succ:
        return args.at(0) + 1;
      case Kind::Proj:
        return args.at(static_cast<std::size_t>(f->index - 1));
      case Kind::Comp: {
        std::vector<Natural> mid;
        mid.reserve(f->inners.size());
        for (const auto& g : f->inners) mid.push_back(run(g, args));
        return run(f->outer, mid);
      }
      case Kind::PrimRec: {
        std::vector<Natural> xs(args.begin(), args.end() - 1);
        const Natural& n = args.back();
        Natural acc = run(f->outer, xs);
        std::vector<Natural> gargs;
        for (Natural k = 0; k < n; ++k) {
          tick();
          gargs.clear();
          gargs.push_back(acc);
          gargs.insert(gargs.end(), xs.begin(), xs.end());
          gargs.push_back(k);
          acc = run(f->step, gargs);
        }
        return acc;
      }
      case Kind::Mu: {
        std::vector<Natural> fargs(args.begin(), args.end());
        fargs.push_back(0);
        for (Natural y = 0;; ++y) {
          tick();
          fargs.back() = y;
          if (run(f->outer, fargs) == 0) return y;
        }
      }
    }
    return 0;
  }
};

std::string where(const Fun& f) { return f->label.empty() ? show(f) : f->label; }

// True if f never returns zero on any input where it is defined.
bool never_zero(const Fun& f) {
  switch (f->kind) {
    case Kind::Succ:
      return true;
    case Kind::Comp:
      return never_zero(f->outer);
    case Kind::PrimRec:
      return never_zero(f->outer) && never_zero(f->step);
    default:
      return false;
  }
}

}  // namespace

Fun zero(int n) {
  Node node;
  node.kind = Kind::Zero;
  node.arity = n;
  return make(std::move(node));
}

Fun succ() {
  Node node;
  node.kind = Kind::Succ;
  node.arity = 1;
  return make(std::move(node));
}

Fun proj(int i, int n) {
  Node node;
  node.kind = Kind::Proj;
  node.index = i;
  node.arity = n;
  return make(std::move(node));
}

Fun comp(Fun outer, std::vector<Fun> inners) {
  Node node;
  node.kind = Kind::Comp;
  node.outer = std::move(outer);
  node.inners = std::move(inners);
  return make(std::move(node));
}

Fun primrec(Fun base, Fun step) {
  Node node;
  node.kind = Kind::PrimRec;
  node.outer = std::move(base);
  node.step = std::move(step);
  return make(std::move(node));
}

Fun mu(Fun body) {
  Node node;
  node.kind = Kind::Mu;
  node.outer = std::move(body);
  return make(std::move(node));
}

Fun labelled(Fun f, std::string label) {
  Node node = *f;
  node.label = std::move(label);
  return make(std::move(node));
}

int arity_check(const Fun& f) {
  switch (f->kind) {
    case Kind::Zero:
      if (f->arity < 0) throw ArityError("zero: negative arity");
      return f->arity;
    case Kind::Succ:
      return 1;
    case Kind::Proj:
      if (f->arity < 1 || f->index < 1 || f->index > f->arity) {
        throw ArityError("proj(" + std::to_string(f->index) + "," + std::to_string(f->arity) +
                         "): index out of range");
      }
      return f->arity;
    case Kind::Comp: {
      int k = arity_check(f->outer);
      if (static_cast<int>(f->inners.size()) != k) {
        throw ArityError(where(f) + ": outer function is " + std::to_string(k) + "-ary but " +
                         std::to_string(f->inners.size()) + " inner functions given");
      }
      if (f->inners.empty()) throw ArityError(where(f) + ": composition needs inner functions");
      int n = arity_check(f->inners.front());
      for (const auto& g : f->inners) {
        if (arity_check(g) != n) throw ArityError(where(f) + ": inner functions differ in arity");
      }
      return n;
    }
    case Kind::PrimRec: {
      int n = arity_check(f->outer);
      int m = arity_check(f->step);
      if (m != n + 2) {
        throw ArityError(where(f) + ": base is " + std::to_string(n) + "-ary so step must be " +
                         std::to_string(n + 2) + "-ary, got " + std::to_string(m));
      }
      return n + 1;
    }
    case Kind::Mu: {
      int n = arity_check(f->outer);
      if (n < 1) throw ArityError(where(f) + ": minimised function must take an argument");
      return n - 1;
    }
  }
  return 0;
}

EvalResult eval(const Fun& f, const std::vector<Natural>& args, std::uint64_t fuel) {
  int n = arity_check(f);
  if (static_cast<int>(args.size()) != n) {
    throw ArityError("function is " + std::to_string(n) + "-ary, applied to " +
                     std::to_string(args.size()) + " arguments");
  }
  Evaluator ev{fuel};
  EvalResult r;
  try {
    r.value = ev.run(f, args);
    r.status = EvalResult::Status::Defined;
  } catch (const OutOfFuel&) {
    r.status = EvalResult::Status::OutOfFuel;
  }
  r.steps = ev.used;
  return r;
}

std::optional<std::string> prove_undefined(const Fun& f, const std::vector<Natural>&) {
  if (f->kind == Kind::Mu && never_zero(f->outer)) {
    return "minimised body is successor-headed and never zero";
  }
  if (f->kind == Kind::Comp) {
    for (const auto& g : f->inners) {
      if (g->kind == Kind::Mu && never_zero(g->outer)) {
        return "inner minimisation never terminates";
      }
    }
  }
  return std::nullopt;
}

std::string show(const Fun& f) {
  if (!f->label.empty()) return f->label;
  switch (f->kind) {
    case Kind::Zero:
      return "zero(" + std::to_string(f->arity) + ")";
    case Kind::Succ:
      return "succ";
    case Kind::Proj:
      return "proj(" + std::to_string(f->index) + "," + std::to_string(f->arity) + ")";
    case Kind::Comp: {
      std::string s = "comp(" + show(f->outer);
      for (const auto& g : f->inners) s += ", " + show(g);
      return s + ")";
    }
    case Kind::PrimRec:
      return "primrec(" + show(f->outer) + ", " + show(f->step) + ")";
    case Kind::Mu:
      return "mu(" + show(f->outer) + ")";
  }
  return "?";
}

const std::map<std::string, Fun>& standard_library() {
  static const std::map<std::string, Fun> lib = [] {
    std::map<std::string, Fun> m;
    auto add = labelled(primrec(proj(1, 1), comp(succ(), {proj(1, 3)})), "add");
    auto mult = labelled(primrec(zero(1), comp(add, {proj(1, 3), proj(2, 3)})), "mult");
    auto pred = labelled(primrec(zero(0), proj(2, 2)), "pred");
    auto monus = labelled(primrec(proj(1, 1), comp(pred, {proj(1, 3)})), "monus");
    // mu y. (x - 2y) + (2y - x) = 0: halves even numbers, undefined on odd ones.
    auto twice = comp(add, {proj(2, 2), proj(2, 2)});
    auto gap = comp(add, {comp(monus, {proj(1, 2), twice}), comp(monus, {twice, proj(1, 2)})});
    auto even_half = labelled(mu(gap), "even_half");
    m["add"] = add;
    m["mult"] = mult;
    m["pred"] = pred;
    m["monus"] = monus;
    m["even_half"] = even_half;
    m["succ"] = labelled(succ(), "succ");
    return m;
  }();
  return lib;
}

}  // namespace pcalc::recfun
