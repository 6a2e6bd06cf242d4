#include "fpp/unwrap_spatial.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>

#include "fpp/phase_decode.hpp"

namespace fpp {

Pixel select_seed(std::span<const Pixel> region) {
  if (region.empty()) throw std::invalid_argument("select_seed: empty region");
  std::vector<Pixel> ordered(region.begin(), region.end());
  std::sort(ordered.begin(), ordered.end(),
            [](const Pixel& a, const Pixel& b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
  return ordered[ordered.size() / 2];
}

namespace {

// Shared bookkeeping: effective mask, regions, orders, and the final
// Phi = phi + 2 pi k assembly.
struct UnwrapState {
  const FloatMap& phase;
  Mask active;
  RegionDecomposition regions;
  std::vector<std::vector<std::size_t>> members;
  OrderMap order;
  std::vector<Pixel> seeds;

  UnwrapState(const FloatMap& phi, const Mask& mask) : phase(phi) {
    if (!phi.same_shape(mask)) throw std::invalid_argument("unwrap: mask dimension mismatch");
    active = mask_and(mask, phi.validity());
    regions = connected_components_4(active);
    members = regions.members();
    order = OrderMap(phi.width(), phi.height(), 0);
  }

  bool in_region(int x, int y, std::int32_t id) const {
    return active.contains(x, y) && regions.region_id(x, y) == id;
  }

  std::vector<Pixel> region_pixels(std::size_t r) const {
    std::vector<Pixel> out;
    out.reserve(members[r].size());
    for (auto i : members[r]) out.push_back(active.pixel(i));
    return out;
  }

  // Order for p when unwrapped from its already-unwrapped neighbour q.
  std::int32_t order_from(std::size_t q, std::size_t p) const { return order[q] + order_step(phase[q], phase[p]); }

  UnwrapResult finish() && {
    FloatMap out(phase.width(), phase.height());
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (active[i]) {
        out[i] = phase[i] + kTwoPi * order[i];
      } else {
        out.invalidate(i);
      }
    }
    return {std::move(out), std::move(order), std::move(regions), std::move(seeds)};
  }
};

// up, left, right, down
constexpr int kNeighbourDx[4] = {0, -1, 1, 0};
constexpr int kNeighbourDy[4] = {-1, 0, 0, 1};

}  // namespace

UnwrapResult flood_fill_unwrap(const FloatMap& phase, const Mask& mask) {
  UnwrapState st(phase, mask);
  std::vector<std::uint8_t> visited(phase.size(), 0);
  std::vector<std::size_t> queue;
  queue.reserve(phase.size());

  for (std::size_t r = 0; r < st.members.size(); ++r) {
    const auto id = static_cast<std::int32_t>(r + 1);
    const Pixel seed = select_seed(st.region_pixels(r));
    st.seeds.push_back(seed);
    const std::size_t s = phase.index(seed.x, seed.y);
    visited[s] = 1;
    queue.clear();
    queue.push_back(s);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t q = queue[head];
      const auto [x, y] = phase.pixel(q);
      for (int n = 0; n < 4; ++n) {
        const int nx = x + kNeighbourDx[n];
        const int ny = y + kNeighbourDy[n];
        if (!st.in_region(nx, ny, id)) continue;
        const std::size_t p = phase.index(nx, ny);
        if (visited[p]) continue;
        visited[p] = 1;
        st.order[p] = st.order_from(q, p);
        queue.push_back(p);
      }
    }
  }
  return std::move(st).finish();
}

UnwrapResult modu_sort_unwrap(const FloatMap& phase, const FloatMap& quality, const Mask& mask) {
  if (!phase.same_shape(quality)) throw std::invalid_argument("modu_sort_unwrap: quality dimension mismatch");
  UnwrapState st(phase, mask);

  struct Entry {
    double quality;
    std::size_t index;
  };
  // Highest quality on top; equal quality pops the lower index first.
  auto lower_priority = [](const Entry& a, const Entry& b) {
    return a.quality != b.quality ? a.quality < b.quality : a.index > b.index;
  };
  std::vector<std::uint8_t> state(phase.size(), 0);  // 0 untouched, 1 queued, 2 unwrapped

  for (std::size_t r = 0; r < st.members.size(); ++r) {
    const auto id = static_cast<std::int32_t>(r + 1);
    std::size_t seed = st.members[r].front();
    for (auto i : st.members[r]) {
      if (quality[i] > quality[seed]) seed = i;
    }
    st.seeds.push_back(phase.pixel(seed));

    std::priority_queue<Entry, std::vector<Entry>, decltype(lower_priority)> frontier(lower_priority);
    auto settle = [&](std::size_t p) {
      state[p] = 2;
      const auto [x, y] = phase.pixel(p);
      for (int n = 0; n < 4; ++n) {
        const int nx = x + kNeighbourDx[n];
        const int ny = y + kNeighbourDy[n];
        if (!st.in_region(nx, ny, id)) continue;
        const std::size_t j = phase.index(nx, ny);
        if (state[j] == 0) {
          state[j] = 1;
          frontier.push({quality[j], j});
        }
      }
    };

    settle(seed);
    while (!frontier.empty()) {
      const std::size_t p = frontier.top().index;
      frontier.pop();
      const auto [x, y] = phase.pixel(p);
      std::size_t best = p;
      for (int n = 0; n < 4; ++n) {
        const int nx = x + kNeighbourDx[n];
        const int ny = y + kNeighbourDy[n];
        if (!st.in_region(nx, ny, id)) continue;
        const std::size_t j = phase.index(nx, ny);
        if (state[j] != 2) continue;
        if (best == p || quality[j] > quality[best] || (quality[j] == quality[best] && j < best)) best = j;
      }
      st.order[p] = st.order_from(best, p);
      settle(p);
    }
  }
  return std::move(st).finish();
}

FloatMap fspu_second_difference(const FloatMap& phase, const Mask& mask) {
  const Mask active = mask_and(mask, phase.validity());
  auto usable = [&](int x, int y) { return active.contains(x, y) && active(x, y); };
  auto term = [&](int x, int y, int dx, int dy) {
    if (!usable(x - dx, y - dy) || !usable(x + dx, y + dy)) return 0.0;
    const double c = phase(x, y);
    return wrap(phase(x - dx, y - dy) - c) - wrap(c - phase(x + dx, y + dy));
  };
  FloatMap out(phase.width(), phase.height());
  for (int y = 0; y < phase.height(); ++y) {
    for (int x = 0; x < phase.width(); ++x) {
      if (!usable(x, y)) continue;
      const double h = term(x, y, 1, 0);
      const double v = term(x, y, 0, 1);
      const double d1 = term(x, y, 1, 1);
      const double d2 = term(x, y, -1, 1);
      out(x, y) = std::sqrt(h * h + v * v + d1 * d1 + d2 * d2);
    }
  }
  return out;
}

UnwrapResult fspu_unwrap(const FloatMap& phase, const Mask& mask) {
  UnwrapState st(phase, mask);
  const FloatMap second = fspu_second_difference(phase, mask);

  std::vector<double> reliability(phase.size(), 0.0);
  for (std::size_t i = 0; i < phase.size(); ++i) {
    if (st.active[i]) reliability[i] = 1.0 / (second[i] + kFspuEpsilon);
  }

  struct Edge {
    double reliability;
    std::size_t id;  // 2 * index for the right neighbour, 2 * index + 1 for the one below
  };
  std::vector<Edge> edges;
  const int w = phase.width();
  for (std::size_t i = 0; i < phase.size(); ++i) {
    if (!st.active[i]) continue;
    const auto [x, y] = phase.pixel(i);
    if (st.active.contains(x + 1, y) && st.active(x + 1, y)) {
      edges.push_back({reliability[i] + reliability[i + 1], 2 * i});
    }
    if (st.active.contains(x, y + 1) && st.active(x, y + 1)) {
      edges.push_back({reliability[i] + reliability[i + static_cast<std::size_t>(w)], 2 * i + 1});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.reliability != b.reliability ? a.reliability > b.reliability : a.id < b.id;
  });

  std::vector<std::size_t> group(phase.size());
  std::vector<std::vector<std::size_t>> group_members(phase.size());
  for (std::size_t i = 0; i < phase.size(); ++i) {
    group[i] = i;
    if (st.active[i]) group_members[i].push_back(i);
  }

  for (const auto& e : edges) {
    const std::size_t p = e.id / 2;
    const std::size_t q = e.id % 2 == 0 ? p + 1 : p + static_cast<std::size_t>(w);
    const std::size_t gp = group[p];
    const std::size_t gq = group[q];
    if (gp == gq) continue;
    const std::int32_t delta = st.order_from(p, q) - st.order[q];
    std::size_t keep = gp, moved = gq;
    std::int32_t shift = delta;
    if (group_members[gq].size() > group_members[gp].size()) {
      keep = gq;
      moved = gp;
      shift = -delta;
    }
    for (auto i : group_members[moved]) {
      st.order[i] += shift;
      group[i] = keep;
    }
    auto& dst = group_members[keep];
    dst.insert(dst.end(), group_members[moved].begin(), group_members[moved].end());
    group_members[moved].clear();
    group_members[moved].shrink_to_fit();
  }

  for (std::size_t r = 0; r < st.members.size(); ++r) {
    const Pixel seed = select_seed(st.region_pixels(r));
    st.seeds.push_back(seed);
    const std::int32_t anchor = st.order(seed.x, seed.y);
    for (auto i : st.members[r]) st.order[i] -= anchor;
  }
  return std::move(st).finish();
}

UnwrapResult unwrap(UnwrapMethod method, const FloatMap& phase, const FloatMap& quality, const Mask& mask) {
  switch (method) {
    case UnwrapMethod::FloodFill:
      return flood_fill_unwrap(phase, mask);
    case UnwrapMethod::ModuSort:
      return modu_sort_unwrap(phase, quality, mask);
    case UnwrapMethod::Fspu:
      return fspu_unwrap(phase, mask);
  }
  throw std::invalid_argument("unknown unwrap method");
}

const char* method_name(UnwrapMethod method) {
  switch (method) {
    case UnwrapMethod::FloodFill:
      return "flood";
    case UnwrapMethod::ModuSort:
      return "modu";
    case UnwrapMethod::Fspu:
      return "fspu";
  }
  return "?";
}

UnwrapMethod parse_method(const std::string& name) {
  if (name == "flood") return UnwrapMethod::FloodFill;
  if (name == "modu") return UnwrapMethod::ModuSort;
  if (name == "fspu") return UnwrapMethod::Fspu;
  throw std::invalid_argument("unknown unwrap method: " + name);
}

}  // namespace fpp
