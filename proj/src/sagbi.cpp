#include "modinv/sagbi.hpp"

#include <functional>
#include <unordered_set>

namespace modinv {

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// true if a beats b: larger exponent on the latest generator first.
bool later_heavier(const std::uint16_t* a, const std::uint16_t* b, std::size_t k) {
  for (std::size_t i = k; i-- > 0;)
    if (a[i] != b[i]) return a[i] > b[i];
  return false;
}

}  // namespace

std::vector<TatPair> enumerate_tats(const std::vector<Monomial>& lms, std::uint32_t degree_bound) {
  const std::size_t n = lms.size();
  // blocks of generators linked through shared variables
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t v = 0; v < kMaxVars; ++v)
        if (lms[i][v] && lms[j][v]) {
          uf.unite(i, j);
          break;
        }
  std::map<std::size_t, std::vector<std::size_t>> blocks;
  for (std::size_t i = 0; i < n; ++i)
    if (lms[i].deg > 0) blocks[uf.find(i)].push_back(i);

  std::vector<TatPair> out;
  for (auto& [root, gens] : blocks) {
    const std::size_t k = gens.size();
    if (k < 2) continue;
    std::vector<std::uint16_t> store;  // k entries per vector
    std::unordered_map<Monomial, std::vector<std::uint32_t>, MonomialHash> fibres;
    std::vector<std::uint16_t> cur(k, 0);
    std::function<void(std::size_t, std::uint32_t, Monomial)> walk = [&](std::size_t i, std::uint32_t left,
                                                                         Monomial m) {
      if (i == k) {
        if (m.deg == 0) return;
        auto id = static_cast<std::uint32_t>(store.size() / k);
        store.insert(store.end(), cur.begin(), cur.end());
        fibres[m].push_back(id);
        return;
      }
      const Monomial& g = lms[gens[i]];
      for (std::uint32_t e = 0;; ++e) {
        cur[i] = static_cast<std::uint16_t>(e);
        walk(i + 1, left, m);
        if (g.deg > left) break;
        left -= g.deg;
        m = m * g;
      }
      cur[i] = 0;
    };
    walk(0, degree_bound, Monomial{});

    std::vector<std::pair<Monomial, std::vector<std::uint32_t>>> multi;
    for (auto& [m, ids] : fibres)
      if (ids.size() > 1) multi.emplace_back(m, ids);
    std::sort(multi.begin(), multi.end(),
              [](const auto& a, const auto& b) { return grevlex_less(a.first, b.first); });
    for (auto& [m, ids] : multi) {
      UnionFind c(ids.size());
      for (std::size_t g = 0; g < k; ++g) {
        std::size_t first = ids.size();
        for (std::size_t t = 0; t < ids.size(); ++t)
          if (store[ids[t] * k + g]) {
            if (first == ids.size())
              first = t;
            else
              c.unite(first, t);
          }
      }
      std::map<std::size_t, std::size_t> rep;  // component root -> member index
      for (std::size_t t = 0; t < ids.size(); ++t) {
        std::size_t root = c.find(t);
        auto it = rep.find(root);
        if (it == rep.end())
          rep.emplace(root, t);
        else if (later_heavier(&store[ids[t] * k], &store[ids[it->second] * k], k))
          it->second = t;
      }
      if (rep.size() < 2) continue;
      std::vector<std::size_t> reps;
      for (auto& [r, t] : rep) reps.push_back(t);
      std::sort(reps.begin(), reps.end(), [&](std::size_t a, std::size_t b) {
        return later_heavier(&store[ids[a] * k], &store[ids[b] * k], k);
      });
      auto expand = [&](std::size_t t) {
        Exponents e(n, 0);
        for (std::size_t g = 0; g < k; ++g) e[gens[g]] = store[ids[t] * k + g];
        return e;
      };
      Exponents hub = expand(reps[0]);
      for (std::size_t q = reps.size(); q-- > 1;) out.push_back({expand(reps[q]), hub, m.deg, m});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const TatPair& a, const TatPair& b) { return grevlex_less(a.lm, b.lm); });
  return out;
}

bool LeadFactorizer::search(std::size_t i, const Monomial& t, Exponents& a) {
  if (t.deg == 0) return true;
  if (i == 0) return false;
  const Monomial& g = lms_[i - 1];
  if (g.deg == 0) {
    a[i - 1] = 0;
    return search(i - 1, t, a);
  }
  std::uint32_t kmax = t.deg / g.deg;
  for (std::size_t v = 0; v < kMaxVars; ++v)
    if (g[v]) kmax = std::min(kmax, t[v] / g[v]);
  for (std::uint32_t k = kmax + 1; k-- > 0;) {
    a[i - 1] = k;
    if (search(i - 1, t / g.pow(k), a)) return true;
  }
  a[i - 1] = 0;
  return false;
}

std::optional<Exponents> LeadFactorizer::factor(const Monomial& m) {
  auto it = memo_.find(m);
  if (it != memo_.end()) return it->second;
  Exponents a(lms_.size(), 0);
  std::optional<Exponents> r;
  if (search(lms_.size(), m, a)) r = a;
  memo_.emplace(m, r);
  return r;
}

std::vector<std::uint64_t> lead_algebra_counts(const std::vector<Monomial>& lms, std::uint32_t max_degree) {
  std::vector<std::unordered_set<Monomial, MonomialHash>> S(max_degree + 1);
  S[0].insert(Monomial{});
  for (std::uint32_t d = 1; d <= max_degree; ++d)
    for (auto& g : lms) {
      if (g.deg == 0 || g.deg > d) continue;
      for (auto& m : S[d - g.deg]) S[d].insert(m * g);
    }
  std::vector<std::uint64_t> out;
  for (auto& s : S) out.push_back(s.size());
  return out;
}

}  // namespace modinv
