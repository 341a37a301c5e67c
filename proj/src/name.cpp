#include "ccss/name.hpp"

#include <algorithm>
#include <memory>
#include <mutex>
#include <unordered_set>

#include "ccss/error.hpp"

namespace ccss {

namespace detail {

struct NameData {
  std::string base;
  std::vector<Value> params;
  std::string text;
  std::size_t hash = 0;
};

namespace {

std::size_t combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::string render(std::string_view base, const std::vector<Value>& params) {
  std::string out(base);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto v = std::to_string(params[i]);
    if (i == 0) {
      out += "[" + v + "]";
    } else if (params[i] < 0) {
      out += "_(" + v + ")";
    } else {
      out += "_" + v;
    }
  }
  return out;
}

class NameStore {
 public:
  const NameData* intern(std::string_view base, std::vector<Value> params) {
    std::size_t h = std::hash<std::string_view>{}(base);
    for (Value v : params) h = combine(h, std::hash<Value>{}(v));
    std::lock_guard lock(mutex_);
    auto& bucket = table_[h % kBuckets];
    for (const auto& d : bucket) {
      if (d->hash == h && d->base == base && d->params == params) return d.get();
    }
    auto d = std::make_unique<NameData>();
    d->base = std::string(base);
    d->text = render(base, params);
    d->params = std::move(params);
    d->hash = h;
    bucket.push_back(std::move(d));
    return bucket.back().get();
  }

 private:
  static constexpr std::size_t kBuckets = 1 << 14;
  std::mutex mutex_;
  std::vector<std::vector<std::unique_ptr<NameData>>> table_ =
      std::vector<std::vector<std::unique_ptr<NameData>>>(kBuckets);
};

NameStore& store() {
  static NameStore s;
  return s;
}

const std::string kEmpty;
const std::vector<Value> kNoParams;

}  // namespace
}  // namespace detail

Name::Name(std::string_view base, std::vector<Value> params)
    : data_(detail::store().intern(base, std::move(params))) {}

const std::string& Name::base() const { return data_ ? data_->base : detail::kEmpty; }
const std::vector<Value>& Name::params() const {
  return data_ ? data_->params : detail::kNoParams;
}
const std::string& Name::str() const { return data_ ? data_->text : detail::kEmpty; }
std::size_t Name::hash() const { return data_ ? data_->hash : 0; }

std::strong_ordering operator<=>(Name a, Name b) {
  if (a.data_ == b.data_) return std::strong_ordering::equal;
  if (!a.data_) return std::strong_ordering::less;
  if (!b.data_) return std::strong_ordering::greater;
  if (auto c = a.data_->base.compare(b.data_->base); c != 0) {
    return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  return a.data_->params <=> b.data_->params;
}

Action Action::complement() const {
  switch (kind) {
    case ActionKind::Name: return coname(name);
    case ActionKind::CoName: return handshake(name);
    default: return *this;
  }
}

std::string Action::str() const {
  switch (kind) {
    case ActionKind::Tau: return "tau";
    case ActionKind::CoName: return "'" + name.str();
    default: return name.str();
  }
}

std::size_t Action::hash() const {
  return detail::combine(static_cast<std::size_t>(kind), name.hash());
}

std::strong_ordering operator<=>(const Action& a, const Action& b) {
  if (auto c = a.name <=> b.name; c != 0) return c;
  return a.kind <=> b.kind;
}

std::string toString(const SignalSet& signals) {
  std::string out = "{";
  bool first = true;
  for (Name s : signals) {
    if (!first) out += ", ";
    out += s.str();
    first = false;
  }
  return out + "}";
}

std::string toString(const ActionSet& actions) {
  std::string out = "{";
  bool first = true;
  for (const auto& a : actions) {
    if (!first) out += ", ";
    out += a.str();
    first = false;
  }
  return out + "}";
}

namespace {

void normalize(Relabelling::Map& m) {
  std::sort(m.begin(), m.end());
  m.erase(std::unique(m.begin(), m.end(),
                      [](const auto& x, const auto& y) { return x.first == y.first; }),
          m.end());
}

Name lookup(const Relabelling::Map& m, Name n) {
  auto it = std::lower_bound(m.begin(), m.end(), n,
                             [](const auto& e, Name key) { return e.first < key; });
  if (it != m.end() && it->first == n) return it->second;
  return n;
}

}  // namespace

Relabelling::Relabelling(Map handshake, Map signal)
    : handshake_(std::move(handshake)), signal_(std::move(signal)) {
  normalize(handshake_);
  normalize(signal_);
}

Name Relabelling::applyHandshake(Name n) const { return lookup(handshake_, n); }
Name Relabelling::applySignal(Name n) const { return lookup(signal_, n); }

Action Relabelling::apply(const Action& a) const {
  switch (a.kind) {
    case ActionKind::Name: return Action::handshake(applyHandshake(a.name));
    case ActionKind::CoName: return Action::coname(applyHandshake(a.name));
    case ActionKind::Signal: return Action::signal(applySignal(a.name));
    default: return a;
  }
}

std::vector<Action> Relabelling::preimage(const Action& a) const {
  std::vector<Action> out;
  if (a.isTau()) return {a};
  const Map& m = a.isSignal() ? signal_ : handshake_;
  bool shadowed = false;
  for (const auto& [from, to] : m) {
    if (to == a.name) out.push_back(Action{a.kind, from});
    if (from == a.name) shadowed = true;
  }
  if (!shadowed) out.push_back(a);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t Relabelling::hash() const {
  std::size_t h = 17;
  for (const auto& [a, b] : handshake_) h = detail::combine(h, detail::combine(a.hash(), b.hash()));
  h = detail::combine(h, 0xabc);
  for (const auto& [a, b] : signal_) h = detail::combine(h, detail::combine(a.hash(), b.hash()));
  return h;
}

Name parseGroundName(const std::string& text) {
  auto bad = [&] { return Error("malformed name '" + text + "'"); };
  std::size_t lb = text.find('[');
  if (lb == std::string::npos) return Name(text);
  std::vector<Value> params;
  std::size_t rb = text.find(']', lb);
  if (rb == std::string::npos) throw bad();
  try {
    params.push_back(std::stol(text.substr(lb + 1, rb - lb - 1)));
    std::size_t i = rb + 1;
    while (i < text.size()) {
      if (text[i] != '_') throw bad();
      ++i;
      if (i < text.size() && text[i] == '(') {
        std::size_t close = text.find(')', i);
        if (close == std::string::npos) throw bad();
        params.push_back(std::stol(text.substr(i + 1, close - i - 1)));
        i = close + 1;
      } else {
        std::size_t j = i;
        while (j < text.size() && text[j] != '_') ++j;
        params.push_back(std::stol(text.substr(i, j - i)));
        i = j;
      }
    }
  } catch (const std::logic_error&) {
    throw bad();
  }
  return Name(text.substr(0, lb), std::move(params));
}


}  // namespace ccss
