#include "ccss/term.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <memory>
#include <mutex>
#include <unordered_set>

namespace ccss {

namespace detail {

struct TermNode {
  TermKind kind = TermKind::Nil;
  Action action;
  Name name;
  std::vector<Term> children;
  std::vector<Name> restriction;
  Relabelling relabelling;
  std::size_t hash = 0;
  std::size_t id = 0;
};

}  // namespace detail

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t computeHash(const detail::TermNode& n) {
  std::size_t h = static_cast<std::size_t>(n.kind) * 1000003u;
  h = mix(h, n.action.hash());
  h = mix(h, n.name.hash());
  for (Term c : n.children) h = mix(h, c.hash());
  for (Name r : n.restriction) h = mix(h, r.hash());
  h = mix(h, n.relabelling.hash());
  return h;
}

bool sameContent(const detail::TermNode& a, const detail::TermNode& b) {
  return a.kind == b.kind && a.action == b.action && a.name == b.name &&
         a.children == b.children && a.restriction == b.restriction &&
         a.relabelling == b.relabelling;
}

struct NodePtrHash {
  std::size_t operator()(const detail::TermNode* n) const { return n->hash; }
};
struct NodePtrEq {
  bool operator()(const detail::TermNode* a, const detail::TermNode* b) const {
    return sameContent(*a, *b);
  }
};

}  // namespace

struct TermFactory {
  static TermFactory& instance() {
    static TermFactory f;
    return f;
  }

  Term make(detail::TermNode node) {
    node.hash = computeHash(node);
    std::lock_guard lock(mutex_);
    if (auto it = table_.find(&node); it != table_.end()) return Term(*it);
    node.id = storage_.size();
    storage_.push_back(std::move(node));
    const detail::TermNode* stored = &storage_.back();
    table_.insert(stored);
    return Term(stored);
  }

  static Term wrap(const detail::TermNode* n) { return Term(n); }
  static const detail::TermNode* node(Term t) { return t.node_; }

  Term nilTerm() {
    static const Term n = make(detail::TermNode{});
    return n;
  }

 private:
  std::mutex mutex_;
  std::deque<detail::TermNode> storage_;
  std::unordered_set<const detail::TermNode*, NodePtrHash, NodePtrEq> table_;
};

Term::Term() : node_(TermFactory::node(TermFactory::instance().nilTerm())) {}

TermKind Term::kind() const { return node_->kind; }
const Action& Term::action() const { return node_->action; }
Term Term::body() const {
  assert(!node_->children.empty());
  return node_->children.front();
}
Term Term::left() const { return node_->children.at(0); }
Term Term::right() const { return node_->children.at(1); }
std::span<const Term> Term::children() const { return node_->children; }
Name Term::name() const { return node_->name; }
std::span<const Name> Term::restriction() const { return node_->restriction; }
bool Term::restricts(Name n) const {
  return std::binary_search(node_->restriction.begin(), node_->restriction.end(), n);
}
const Relabelling& Term::relabelling() const { return node_->relabelling; }
std::size_t Term::hash() const { return node_->hash; }
std::size_t Term::id() const { return node_->id; }

Term nil() { return Term(); }

Term prefix(Action a, Term body) {
  detail::TermNode n;
  n.kind = TermKind::Prefix;
  n.action = a;
  n.children = {body};
  return TermFactory::instance().make(std::move(n));
}

Term sum(std::vector<Term> branches) {
  std::vector<Term> flat;
  flat.reserve(branches.size());
  for (Term b : branches) {
    if (b.kind() == TermKind::Sum) {
      flat.insert(flat.end(), b.children().begin(), b.children().end());
    } else {
      flat.push_back(b);
    }
  }
  if (flat.empty()) return nil();
  if (flat.size() == 1) return flat.front();
  detail::TermNode n;
  n.kind = TermKind::Sum;
  n.children = std::move(flat);
  return TermFactory::instance().make(std::move(n));
}

Term par(Term left, Term right) {
  detail::TermNode n;
  n.kind = TermKind::Par;
  n.children = {left, right};
  return TermFactory::instance().make(std::move(n));
}

Term restrict(Term body, std::vector<Name> names) {
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  detail::TermNode n;
  n.kind = TermKind::Restrict;
  n.children = {body};
  n.restriction = std::move(names);
  return TermFactory::instance().make(std::move(n));
}

Term relabel(Term body, Relabelling f) {
  detail::TermNode n;
  n.kind = TermKind::Relabel;
  n.children = {body};
  n.relabelling = std::move(f);
  return TermFactory::instance().make(std::move(n));
}

Term ident(Name agent) {
  detail::TermNode n;
  n.kind = TermKind::Ident;
  n.name = agent;
  return TermFactory::instance().make(std::move(n));
}

Term signalling(Term body, Name signal) {
  detail::TermNode n;
  n.kind = TermKind::Signal;
  n.children = {body};
  n.name = signal;
  return TermFactory::instance().make(std::move(n));
}

Term parallel(std::span<const Term> components) {
  assert(!components.empty());
  Term acc = components.front();
  for (std::size_t i = 1; i < components.size(); ++i) acc = par(acc, components[i]);
  return acc;
}

bool hasStaticPar(Term t) {
  switch (t.kind()) {
    case TermKind::Par: return true;
    case TermKind::Restrict:
    case TermKind::Relabel:
    case TermKind::Signal: return hasStaticPar(t.body());
    default: return false;
  }
}

}  // namespace ccss
