#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "chemkd/smiles.hpp"

namespace chemkd {

std::string_view smiles_error_kind_name(SmilesErrorKind kind) {
  switch (kind) {
    case SmilesErrorKind::kEmpty: return "empty";
    case SmilesErrorKind::kSyntax: return "syntax";
    case SmilesErrorKind::kUnbalancedParenthesis: return "unbalanced parenthesis";
    case SmilesErrorKind::kUnmatchedRingClosure: return "unmatched ring closure";
    case SmilesErrorKind::kUnknownElement: return "unknown element";
    case SmilesErrorKind::kUnsupportedFeature: return "unsupported feature";
    case SmilesErrorKind::kDisconnected: return "disconnected";
    case SmilesErrorKind::kInvalidBond: return "invalid bond";
  }
  return "unknown";
}

SmilesError::SmilesError(SmilesErrorKind kind, std::size_t position, const std::string& detail)
    : DataError(std::string(smiles_error_kind_name(kind)) + " at position " +
                std::to_string(position) + ": " + detail),
      kind_(kind),
      position_(position) {}

namespace {

bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

struct RingOpening {
  std::uint32_t atom;
  std::optional<BondOrder> order;
  std::size_t position;
};

class SmilesParser {
 public:
  explicit SmilesParser(std::string_view text) : text_(text) {}

  MolecularGraph parse() {
    if (text_.empty()) fail(SmilesErrorKind::kEmpty, 0, "empty SMILES");
    while (pos_ < text_.size()) step();
    if (!branches_.empty()) {
      fail(SmilesErrorKind::kUnbalancedParenthesis, branches_.back().second, "unclosed '('");
    }
    if (!rings_.empty()) {
      const auto& [number, open] = *rings_.begin();
      fail(SmilesErrorKind::kUnmatchedRingClosure, open.position,
           "ring bond " + std::to_string(number) + " never closed");
    }
    if (pending_) fail(SmilesErrorKind::kSyntax, pending_pos_, "bond symbol without a following atom");
    if (atoms_.empty()) fail(SmilesErrorKind::kEmpty, 0, "no atoms");
    return MolecularGraph(std::move(atoms_), std::move(bonds_), std::string(text_));
  }

 private:
  [[noreturn]] void fail(SmilesErrorKind kind, std::size_t at, const std::string& detail) const {
    throw SmilesError(kind, at, detail);
  }

  void step() {
    const char c = text_[pos_];
    switch (c) {
      case '(':
        if (!prev_) fail(SmilesErrorKind::kSyntax, pos_, "branch before any atom");
        if (pending_) fail(SmilesErrorKind::kSyntax, pos_, "bond symbol before '('");
        branches_.emplace_back(*prev_, pos_);
        branch_has_atom_.push_back(false);
        ++pos_;
        return;
      case ')':
        if (branches_.empty()) fail(SmilesErrorKind::kUnbalancedParenthesis, pos_, "unmatched ')'");
        if (pending_) fail(SmilesErrorKind::kSyntax, pos_, "bond symbol before ')'");
        if (!branch_has_atom_.back()) fail(SmilesErrorKind::kSyntax, pos_, "empty branch");
        prev_ = branches_.back().first;
        branches_.pop_back();
        branch_has_atom_.pop_back();
        ++pos_;
        return;
      case '-': set_bond(BondOrder::kSingle); return;
      case '=': set_bond(BondOrder::kDouble); return;
      case '#': set_bond(BondOrder::kTriple); return;
      case ':': set_bond(BondOrder::kAromatic); return;
      case '/':
      case '\\':
        fail(SmilesErrorKind::kUnsupportedFeature, pos_, "directional (cis/trans) bonds");
      case '@':
        fail(SmilesErrorKind::kUnsupportedFeature, pos_, "chirality");
      case '$':
        fail(SmilesErrorKind::kUnsupportedFeature, pos_, "quadruple bonds");
      case '*':
        fail(SmilesErrorKind::kUnsupportedFeature, pos_, "wildcard atoms");
      case '.':
        fail(SmilesErrorKind::kDisconnected, pos_, "dot-disconnected components");
      case '%': {
        const std::size_t at = pos_;
        if (pos_ + 2 >= text_.size() || !is_digit(text_[pos_ + 1]) || !is_digit(text_[pos_ + 2])) {
          fail(SmilesErrorKind::kSyntax, at, "'%' needs two digits");
        }
        const int number = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
        pos_ += 3;
        ring_bond(number, at);
        return;
      }
      case '[':
        bracket_atom();
        return;
      default:
        break;
    }
    if (is_digit(c)) {
      ++pos_;
      ring_bond(c - '0', pos_ - 1);
      return;
    }
    if (is_upper(c) || is_lower(c)) {
      organic_atom();
      return;
    }
    fail(SmilesErrorKind::kSyntax, pos_, "unexpected character");
  }

  void set_bond(BondOrder order) {
    if (!prev_) fail(SmilesErrorKind::kSyntax, pos_, "bond symbol before any atom");
    if (pending_) fail(SmilesErrorKind::kSyntax, pos_, "two consecutive bond symbols");
    pending_ = order;
    pending_pos_ = pos_;
    ++pos_;
  }

  BondOrder implicit_order(std::uint32_t a, std::uint32_t b) const {
    return atoms_[a].aromatic && atoms_[b].aromatic ? BondOrder::kAromatic : BondOrder::kSingle;
  }

  void add_bond(std::uint32_t a, std::uint32_t b, BondOrder order, std::size_t at) {
    if (a == b) fail(SmilesErrorKind::kInvalidBond, at, "ring closure bonds an atom to itself");
    if (!bond_keys_.insert(std::minmax(a, b)).second) {
      fail(SmilesErrorKind::kInvalidBond, at, "duplicate bond between the same two atoms");
    }
    bonds_.push_back({a, b, order});
  }

  void add_atom(Atom atom, std::size_t at) {
    const auto index = static_cast<std::uint32_t>(atoms_.size());
    atoms_.push_back(atom);
    if (prev_) {
      const BondOrder order = pending_ ? *pending_ : implicit_order(*prev_, index);
      add_bond(*prev_, index, order, at);
    }
    pending_.reset();
    prev_ = index;
    if (!branch_has_atom_.empty()) branch_has_atom_.back() = true;
  }

  void ring_bond(int number, std::size_t at) {
    if (!prev_) fail(SmilesErrorKind::kSyntax, at, "ring bond before any atom");
    auto it = rings_.find(number);
    if (it == rings_.end()) {
      rings_.emplace(number, RingOpening{*prev_, pending_, at});
      pending_.reset();
      return;
    }
    const RingOpening open = it->second;
    rings_.erase(it);
    BondOrder order = implicit_order(open.atom, *prev_);
    if (open.order && pending_ && *open.order != *pending_) {
      fail(SmilesErrorKind::kInvalidBond, at, "conflicting bond symbols on a ring closure");
    }
    if (open.order) order = *open.order;
    if (pending_) order = *pending_;
    pending_.reset();
    add_bond(open.atom, *prev_, order, at);
  }

  void organic_atom() {
    const std::size_t at = pos_;
    const char c = text_[pos_];
    Atom atom;
    if (is_lower(c)) {
      static constexpr std::string_view kAromatic = "bcnops";
      if (kAromatic.find(c) == std::string_view::npos) {
        fail(SmilesErrorKind::kUnknownElement, at, std::string("'") + c + "' outside brackets");
      }
      const char upper = static_cast<char>(c - 'a' + 'A');
      atom.element = *atomic_number(std::string_view(&upper, 1));
      atom.aromatic = true;
      ++pos_;
    } else if (c == 'C' && pos_ + 1 < text_.size() && text_[pos_ + 1] == 'l') {
      atom.element = 17;
      pos_ += 2;
    } else if (c == 'B' && pos_ + 1 < text_.size() && text_[pos_ + 1] == 'r') {
      atom.element = 35;
      pos_ += 2;
    } else {
      static constexpr std::string_view kOrganic = "BCNOPSFI";
      if (kOrganic.find(c) == std::string_view::npos) {
        fail(SmilesErrorKind::kUnknownElement, at,
             std::string("'") + c + "' is not an organic-subset atom (use brackets)");
      }
      atom.element = *atomic_number(std::string_view(&c, 1));
      ++pos_;
    }
    add_atom(atom, at);
  }

  void bracket_atom() {
    const std::size_t at = pos_;
    ++pos_;  // '['
    auto peek = [&]() -> char { return pos_ < text_.size() ? text_[pos_] : '\0'; };

    if (is_digit(peek())) fail(SmilesErrorKind::kUnsupportedFeature, pos_, "isotopes");

    Atom atom;
    const char first = peek();
    if (is_upper(first)) {
      std::optional<std::uint8_t> z;
      if (pos_ + 1 < text_.size() && is_lower(text_[pos_ + 1])) {
        z = atomic_number(text_.substr(pos_, 2));
        if (z) pos_ += 2;
      }
      if (!z) {
        z = atomic_number(text_.substr(pos_, 1));
        if (!z) fail(SmilesErrorKind::kUnknownElement, pos_, "unknown element symbol");
        ++pos_;
      }
      if (*z == 1) fail(SmilesErrorKind::kUnsupportedFeature, at, "explicit hydrogen atoms");
      atom.element = *z;
    } else if (is_lower(first)) {
      if (text_.substr(pos_, 2) == "se" || text_.substr(pos_, 2) == "as") {
        atom.element = text_[pos_] == 's' ? 34 : 33;
        pos_ += 2;
      } else {
        static constexpr std::string_view kAromatic = "bcnops";
        if (kAromatic.find(first) == std::string_view::npos) {
          fail(SmilesErrorKind::kUnknownElement, pos_, "unknown aromatic symbol");
        }
        const char upper = static_cast<char>(first - 'a' + 'A');
        atom.element = *atomic_number(std::string_view(&upper, 1));
        ++pos_;
      }
      atom.aromatic = true;
    } else if (first == '*') {
      fail(SmilesErrorKind::kUnsupportedFeature, pos_, "wildcard atoms");
    } else {
      fail(SmilesErrorKind::kSyntax, pos_, "expected element symbol in bracket atom");
    }

    if (peek() == '@') fail(SmilesErrorKind::kUnsupportedFeature, pos_, "chirality");

    if (peek() == 'H') {
      ++pos_;
      while (is_digit(peek())) ++pos_;  // hydrogen count is parsed and discarded
    }

    if (peek() == '+' || peek() == '-') {
      const char sign = peek();
      int magnitude = 0;
      ++pos_;
      if (is_digit(peek())) {
        while (is_digit(peek())) {
          magnitude = magnitude * 10 + (peek() - '0');
          if (magnitude > 15) fail(SmilesErrorKind::kSyntax, pos_, "charge magnitude above 15");
          ++pos_;
        }
      } else {
        magnitude = 1;
        while (peek() == sign) {
          ++magnitude;
          if (magnitude > 15) fail(SmilesErrorKind::kSyntax, pos_, "charge magnitude above 15");
          ++pos_;
        }
      }
      atom.charge = static_cast<std::int8_t>(sign == '+' ? magnitude : -magnitude);
    }

    if (peek() == ':') fail(SmilesErrorKind::kUnsupportedFeature, pos_, "atom classes");
    if (peek() != ']') fail(SmilesErrorKind::kSyntax, pos_, "expected ']'");
    ++pos_;
    add_atom(atom, at);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::set<std::pair<std::uint32_t, std::uint32_t>> bond_keys_;
  std::optional<std::uint32_t> prev_;
  std::optional<BondOrder> pending_;
  std::size_t pending_pos_ = 0;
  std::vector<std::pair<std::uint32_t, std::size_t>> branches_;
  std::vector<bool> branch_has_atom_;
  std::map<int, RingOpening> rings_;
};

}  // namespace

MolecularGraph parse_smiles(std::string_view text) { return SmilesParser(text).parse(); }

}  // namespace chemkd
