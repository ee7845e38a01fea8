#include <algorithm>
#include <array>
#include <cstdint>
#include <queue>
#include <string>

#include "chemkd/error.hpp"
#include "chemkd/ged.hpp"

namespace chemkd {

namespace {

struct State {
  int f;
  int g;
  int depth;                  // atoms 0..depth-1 of g1 are decided
  std::uint32_t used;         // bitmask of g2 atoms already taken
  std::array<std::int8_t, 16> map;  // -1 = deleted
  bool complete;
};

struct StateOrder {
  bool operator()(const State& a, const State& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.complete != b.complete) return !a.complete;
    return a.depth < b.depth;
  }
};

class ExactSearch {
 public:
  ExactSearch(const MolecularGraph& g1, const MolecularGraph& g2) : g1_(g1), g2_(g2) {
    n1_ = static_cast<int>(g1.atom_count());
    n2_ = static_cast<int>(g2.atom_count());
    adj1_.assign(n1_ * n1_, 0);
    adj2_.assign(n2_ * n2_, 0);
    for (const Bond& b : g1.bonds()) adj1_[b.a * n1_ + b.b] = adj1_[b.b * n1_ + b.a] = static_cast<int>(b.order);
    for (const Bond& b : g2.bonds()) adj2_[b.a * n2_ + b.b] = adj2_[b.b * n2_ + b.a] = static_cast<int>(b.order);
  }

  int run() {
    std::priority_queue<State, std::vector<State>, StateOrder> open;
    State start{};
    start.map.fill(-1);
    start.f = heuristic(0, 0);
    open.push(start);
    while (!open.empty()) {
      const State s = open.top();
      open.pop();
      if (s.complete) return s.g;
      if (s.depth == n1_) {
        State done = s;
        done.g += insertion_cost(s.used);
        done.f = done.g;
        done.complete = true;
        open.push(done);
        continue;
      }
      for (int j = -1; j < n2_; ++j) {
        if (j >= 0 && (s.used >> j) & 1U) continue;
        State next = s;
        next.map[s.depth] = static_cast<std::int8_t>(j);
        next.depth = s.depth + 1;
        if (j >= 0) next.used |= 1U << j;
        next.g = s.g + step_cost(s, j);
        next.f = next.g + heuristic(next.depth, next.used);
        open.push(next);
      }
    }
    throw Error("internal error: exact GED search exhausted");
  }

 private:
  int step_cost(const State& s, int j) const {
    const int k = s.depth;
    int cost = 0;
    if (j < 0) {
      cost += 1;
    } else if (g1_.atoms()[k].element != g2_.atoms()[j].element) {
      cost += 1;
    }
    for (int p = 0; p < k; ++p) {
      const int e1 = adj1_[p * n1_ + k];
      const int jp = s.map[p];
      const int e2 = (j >= 0 && jp >= 0) ? adj2_[jp * n2_ + j] : 0;
      if (e1 && e2) {
        cost += e1 != e2 ? 1 : 0;
      } else if (e1 || e2) {
        cost += 1;
      }
    }
    return cost;
  }

  int insertion_cost(std::uint32_t used) const {
    int cost = 0;
    for (int j = 0; j < n2_; ++j) {
      if (!((used >> j) & 1U)) ++cost;
    }
    for (const Bond& b : g2_.bonds()) {
      if (!((used >> b.a) & 1U) || !((used >> b.b) & 1U)) ++cost;
    }
    return cost;
  }

  // Admissible: remaining atoms of g1 can only pair with unused atoms of g2,
  // and bonds touching them only with bonds touching unused atoms.
  int heuristic(int depth, std::uint32_t used) const {
    std::array<int, 119> labels1{};
    std::array<int, 119> labels2{};
    int r1 = 0;
    int r2 = 0;
    for (int i = depth; i < n1_; ++i, ++r1) ++labels1[g1_.atoms()[i].element];
    for (int j = 0; j < n2_; ++j) {
      if (!((used >> j) & 1U)) {
        ++labels2[g2_.atoms()[j].element];
        ++r2;
      }
    }
    int shared = 0;
    for (std::size_t l = 0; l < labels1.size(); ++l) shared += std::min(labels1[l], labels2[l]);
    const int node_bound = std::max(r1, r2) - shared;

    std::array<int, 5> orders1{};
    std::array<int, 5> orders2{};
    int e1 = 0;
    int e2 = 0;
    for (const Bond& b : g1_.bonds()) {
      if (static_cast<int>(b.a) >= depth || static_cast<int>(b.b) >= depth) {
        ++orders1[static_cast<int>(b.order)];
        ++e1;
      }
    }
    for (const Bond& b : g2_.bonds()) {
      if (!((used >> b.a) & 1U) || !((used >> b.b) & 1U)) {
        ++orders2[static_cast<int>(b.order)];
        ++e2;
      }
    }
    int shared_edges = 0;
    for (std::size_t l = 0; l < orders1.size(); ++l) shared_edges += std::min(orders1[l], orders2[l]);
    return node_bound + std::max(e1, e2) - shared_edges;
  }

  const MolecularGraph& g1_;
  const MolecularGraph& g2_;
  int n1_ = 0;
  int n2_ = 0;
  std::vector<int> adj1_;
  std::vector<int> adj2_;
};

}  // namespace

int exact_ged_tiny(const MolecularGraph& g1, const MolecularGraph& g2, std::size_t max_atoms) {
  const std::size_t limit = std::min<std::size_t>(max_atoms, 16);
  if (g1.atom_count() > limit || g2.atom_count() > limit) {
    throw InvalidArgument("graph too large for exact GED (" + std::to_string(std::max(g1.atom_count(), g2.atom_count())) +
                          " atoms, limit " + std::to_string(limit) + ")");
  }
  return ExactSearch(g1, g2).run();
}

}  // namespace chemkd
