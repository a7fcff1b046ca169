#include "rbmx/lifting.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>

namespace rbmx {
namespace {

template <class Cap>
struct FlowNet {
  struct Edge {
    std::size_t to, rev;
    Cap cap;
  };
  std::vector<std::vector<Edge>> adj;

  explicit FlowNet(std::size_t n) : adj(n) {}

  // Returns the position of the forward edge.
  std::pair<std::size_t, std::size_t> add(std::size_t u, std::size_t v, Cap c) {
    adj[u].push_back(Edge{v, adj[v].size(), c});
    adj[v].push_back(Edge{u, adj[u].size() - 1, Cap(0)});
    return {u, adj[u].size() - 1};
  }

  Cap maxflow(std::size_t s, std::size_t t) {
    Cap total(0);
    const std::size_t none = std::numeric_limits<std::size_t>::max();
    for (;;) {
      std::vector<std::pair<std::size_t, std::size_t>> via(adj.size(), {none, none});
      via[s] = {s, none};
      std::deque<std::size_t> queue{s};
      while (!queue.empty() && via[t].first == none) {
        auto u = queue.front();
        queue.pop_front();
        for (std::size_t e = 0; e < adj[u].size(); ++e) {
          const auto& ed = adj[u][e];
          if (ed.cap > 0 && via[ed.to].first == none) {
            via[ed.to] = {u, e};
            queue.push_back(ed.to);
          }
        }
      }
      if (via[t].first == none) return total;
      Cap push = adj[via[t].first][via[t].second].cap;
      for (auto v = t; v != s; v = via[v].first) push = std::min(push, Cap(adj[via[v].first][via[v].second].cap));
      for (auto v = t; v != s; v = via[v].first) {
        auto& ed = adj[via[v].first][via[v].second];
        ed.cap -= push;
        adj[v][ed.rev].cap += push;
      }
      total += push;
    }
  }
};

template <class Cap>
std::optional<Weighting> solve(const std::vector<Integer>& a, const std::vector<Integer>& b,
                               const std::vector<std::vector<std::size_t>>& allowed, const Integer& scale,
                               const std::function<Cap(const Integer&)>& conv) {
  const std::size_t n1 = a.size(), n2 = b.size();
  const std::size_t src = n1 + n2, snk = n1 + n2 + 1;
  FlowNet<Cap> net(n1 + n2 + 2);
  Integer need = 0;
  for (std::size_t i = 0; i < n1; ++i)
    if (a[i] > 0) {
      net.add(src, i, conv(a[i]));
      need += a[i];
    }
  for (std::size_t j = 0; j < n2; ++j)
    if (b[j] > 0) net.add(n1 + j, snk, conv(b[j]));
  std::vector<std::tuple<std::size_t, std::size_t, std::pair<std::size_t, std::size_t>>> mids;
  const Cap inf = conv(scale);
  for (std::size_t i = 0; i < n1; ++i) {
    if (a[i] == 0) continue;
    for (auto j : allowed[i])
      if (b[j] > 0) mids.emplace_back(i, j, net.add(i, n1 + j, inf));
  }
  Cap got = net.maxflow(src, snk);
  if (!(got == conv(need))) return std::nullopt;
  Weighting w;
  for (const auto& [i, j, pos] : mids) {
    Cap used = inf - net.adj[pos.first][pos.second].cap;
    if (used > 0) {
      Integer u;
      if constexpr (std::is_same_v<Cap, Integer>)
        u = used;
      else
        u = Integer(static_cast<long>(used));
      w.entries.push_back(WeightEntry{i, j, Rational(u, scale)});
      w.entries.back().w.canonicalize();
    }
  }
  return w;
}

}  // namespace

std::optional<Weighting> transport(const std::vector<Rational>& a, const std::vector<Rational>& b,
                                   const std::vector<std::vector<std::size_t>>& allowed) {
  Rational sa = 0, sb = 0;
  Integer scale = 1;
  for (const auto& x : a) {
    sa += x;
    mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), x.get_den_mpz_t());
  }
  for (const auto& x : b) {
    sb += x;
    mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), x.get_den_mpz_t());
  }
  if (sa != sb) return std::nullopt;
  auto scaled = [&](const std::vector<Rational>& v) {
    std::vector<Integer> out;
    for (const auto& x : v) {
      Rational y = x * scale;
      out.push_back(y.get_num());
    }
    return out;
  };
  auto ia = scaled(a), ib = scaled(b);
  Rational total = sa * scale;
  // The flow never exceeds the larger of `total` and `scale`; int64 when that fits with headroom.
  Integer bound = std::max(Integer(total.get_num()), scale);
  if (bound < Integer(1) << 61) {
    return solve<std::int64_t>(ia, ib, allowed, scale,
                               [](const Integer& x) { return static_cast<std::int64_t>(x.get_si()); });
  }
  return solve<Integer>(ia, ib, allowed, scale, [](const Integer& x) { return x; });
}

std::vector<std::vector<std::size_t>> admissible_pairs(const MixedSystem& s1, const MixedSystem& s2,
                                                       const StateRel& rho) {
  std::vector<std::vector<std::size_t>> allowed(s1.size());
  for (std::size_t i = 0; i < s1.size(); ++i)
    for (std::size_t j = 0; j < s2.size(); ++j) {
      const auto& r2 = s2.row(j);
      bool ok = std::all_of(s1.row(i).begin(), s1.row(i).end(), [&](const State& q1) {
        return std::any_of(r2.begin(), r2.end(), [&](const State& q2) { return rho(q1, q2); });
      });
      if (ok) allowed[i].push_back(j);
    }
  return allowed;
}

std::optional<Weighting> lift_check(const MixedSystem& s1, const MixedSystem& s2, const StateRel& rho) {
  return transport(s1.prob().weights(), s2.prob().weights(), admissible_pairs(s1, s2, rho));
}

std::optional<Weighting> lift_check(const MixedSystem& s1, const MixedSystem& s2, const StateRelation& rho) {
  return lift_check(s1, s2, [&](const State& a, const State& b) { return rho.count({a, b}) > 0; });
}

bool verify_weighting(const MixedSystem& s1, const MixedSystem& s2, const StateRel& rho, const Weighting& w) {
  std::vector<Rational> r1(s1.size()), r2(s2.size());
  for (const auto& e : w.entries) {
    if (e.i >= s1.size() || e.j >= s2.size() || e.w < 0) return false;
    if (e.w == 0) continue;
    for (const auto& q1 : s1.row(e.i)) {
      const auto& row = s2.row(e.j);
      if (std::none_of(row.begin(), row.end(), [&](const State& q2) { return rho(q1, q2); })) return false;
    }
    r1[e.i] += e.w;
    r2[e.j] += e.w;
  }
  return r1 == s1.prob().weights() && r2 == s2.prob().weights();
}

}  // namespace rbmx
