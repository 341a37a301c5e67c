#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ccss/name.hpp"

namespace ccss {

enum class TermKind { Nil, Prefix, Sum, Par, Restrict, Relabel, Ident, Signal };

namespace detail {
struct TermNode;
}

/// Ground CCS^s process term. Terms are hash-consed: structurally equal terms
/// share one node, so equality and hashing are O(1) and terms are freely
/// shareable across threads.
///
/// Sums are flattened and never have fewer than two branches; an empty sum
/// is Nil and a singleton sum is its branch.
class Term {
 public:
  Term();  // Nil

  TermKind kind() const;
  bool isNil() const { return kind() == TermKind::Nil; }

  /// Prefix only.
  const Action& action() const;
  /// Prefix, Restrict, Relabel, Signal: the operand.
  Term body() const;
  /// Par only.
  Term left() const;
  Term right() const;
  /// Sum branches; Par yields {left, right}; unary operators yield {body}.
  std::span<const Term> children() const;
  /// Ident: the agent; Signal: the emitted signal.
  Name name() const;
  /// Restrict only; sorted and duplicate-free.
  std::span<const Name> restriction() const;
  bool restricts(Name n) const;
  /// Relabel only.
  const Relabelling& relabelling() const;

  std::size_t hash() const;
  /// Stable creation index; useful as a deterministic tie-breaker.
  std::size_t id() const;

  friend bool operator==(Term a, Term b) { return a.node_ == b.node_; }

 private:
  explicit Term(const detail::TermNode* n) : node_(n) {}
  friend struct TermFactory;
  const detail::TermNode* node_;
};

Term nil();
Term prefix(Action a, Term body);
Term sum(std::vector<Term> branches);
Term par(Term left, Term right);
Term restrict(Term body, std::vector<Name> names);
Term relabel(Term body, Relabelling f);
Term ident(Name agent);
Term signalling(Term body, Name signal);

/// Par-fold of a non-empty list, left-associated like the parser.
Term parallel(std::span<const Term> components);

/// True iff the term has a Par node reachable through Restrict, Relabel and
/// Signal operators only (static parallel structure, no unfolding).
bool hasStaticPar(Term t);

}  // namespace ccss

template <>
struct std::hash<ccss::Term> {
  std::size_t operator()(ccss::Term t) const noexcept { return t.hash(); }
};
