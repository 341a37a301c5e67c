#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ccss {

using Value = long;

namespace detail {
struct NameData;
}

/// Ground (fully instantiated) name: a base identifier plus integer
/// parameters, rendered as `base[p0]_p1_p2`. Names are interned, so copies
/// are pointer-sized and equality is pointer comparison.
class Name {
 public:
  Name() = default;
  explicit Name(std::string_view base, std::vector<Value> params = {});

  const std::string& base() const;
  const std::vector<Value>& params() const;
  /// Printable text, re-parseable by the `.ccss` parser.
  const std::string& str() const;
  bool valid() const { return data_ != nullptr; }
  std::size_t hash() const;

  friend bool operator==(Name a, Name b) { return a.data_ == b.data_; }
  friend std::strong_ordering operator<=>(Name a, Name b);

 private:
  const detail::NameData* data_ = nullptr;
};

/// Inverse of Name::str. Throws Error on malformed text.
Name parseGroundName(const std::string& text);

enum class ActionKind { Tau, Name, CoName, Signal };

/// Element of Act = S ⊎ H ⊎ {tau}. Signals have no complement.
struct Action {
  ActionKind kind = ActionKind::Tau;
  ccss::Name name;

  static Action tau() { return {}; }
  static Action handshake(ccss::Name n) { return {ActionKind::Name, n}; }
  static Action coname(ccss::Name n) { return {ActionKind::CoName, n}; }
  static Action signal(ccss::Name n) { return {ActionKind::Signal, n}; }

  bool isTau() const { return kind == ActionKind::Tau; }
  bool isHandshake() const { return kind == ActionKind::Name || kind == ActionKind::CoName; }
  bool isSignal() const { return kind == ActionKind::Signal; }
  /// Complement of a handshake action; tau and signals are returned unchanged.
  Action complement() const;
  /// "tau", "a", "'a"; signal reads print like names.
  std::string str() const;
  std::size_t hash() const;

  friend bool operator==(const Action& a, const Action& b) {
    return a.kind == b.kind && a.name == b.name;
  }
  friend std::strong_ordering operator<=>(const Action& a, const Action& b);
};

using SignalSet = std::set<Name>;
using ActionSet = std::set<Action>;

std::string toString(const SignalSet& signals);
std::string toString(const ActionSet& actions);

/// Finite relabelling: separate maps on handshake names and on signals,
/// identity elsewhere. Complements follow from mapping base names only.
class Relabelling {
 public:
  using Map = std::vector<std::pair<Name, Name>>;  // (from, to), sorted by from

  Relabelling() = default;
  Relabelling(Map handshake, Map signal);

  const Map& handshakeMap() const { return handshake_; }
  const Map& signalMap() const { return signal_; }

  Action apply(const Action& a) const;
  Name applyHandshake(Name n) const;
  Name applySignal(Name n) const;
  /// Preimage of an action under the relabelling (names not in the domain map to themselves
  /// unless they are also the image of some mapped name).
  std::vector<Action> preimage(const Action& a) const;
  std::size_t hash() const;

  friend bool operator==(const Relabelling&, const Relabelling&) = default;

 private:
  Map handshake_;
  Map signal_;
};

}  // namespace ccss

template <>
struct std::hash<ccss::Name> {
  std::size_t operator()(ccss::Name n) const noexcept { return n.hash(); }
};

template <>
struct std::hash<ccss::Action> {
  std::size_t operator()(const ccss::Action& a) const noexcept { return a.hash(); }
};
