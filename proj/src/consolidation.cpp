#include "alma/consolidation.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "alma/error.hpp"

namespace alma {

std::vector<MigrationRequest> plan(std::span<const HostSpec> hosts,
                                   std::span<const VMSpec> vms, double submitted_at) {
  std::map<std::string, std::size_t> host_index;
  for (std::size_t h = 0; h < hosts.size(); ++h) {
    if (!(hosts[h].cpu_capacity > 0.0) || !(hosts[h].mem_capacity > 0.0)) {
      throw PlanningError("host " + hosts[h].host_id + " has non-positive capacity");
    }
    host_index.emplace(hosts[h].host_id, h);
  }

  std::vector<double> mem_used(hosts.size(), 0.0);
  std::vector<double> cpu_used(hosts.size(), 0.0);
  std::vector<std::size_t> placement(vms.size());
  std::string unplaceable;
  for (std::size_t v = 0; v < vms.size(); ++v) {
    const auto& vm = vms[v];
    auto it = host_index.find(vm.current_host);
    if (it == host_index.end()) {
      throw PlanningError("VM " + vm.vm_id + " is on unknown host " + vm.current_host);
    }
    placement[v] = it->second;
    mem_used[it->second] += vm.mem;
    cpu_used[it->second] += vm.vcpus;
    const bool fits_somewhere = std::any_of(hosts.begin(), hosts.end(), [&](const HostSpec& h) {
      return vm.mem <= h.mem_capacity && vm.vcpus <= h.cpu_capacity;
    });
    if (!fits_somewhere) unplaceable += (unplaceable.empty() ? "" : ", ") + vm.vm_id;
  }
  if (!unplaceable.empty()) throw PlanningError("no host can hold VM(s): " + unplaceable);

  std::vector<std::size_t> ranking(hosts.size());
  std::iota(ranking.begin(), ranking.end(), std::size_t{0});
  std::stable_sort(ranking.begin(), ranking.end(), [&](std::size_t a, std::size_t b) {
    if (mem_used[a] != mem_used[b]) return mem_used[a] > mem_used[b];
    return cpu_used[a] > cpu_used[b];
  });

  for (std::size_t keep = 1; keep <= ranking.size(); ++keep) {
    std::vector<bool> retained(hosts.size(), false);
    for (std::size_t i = 0; i < keep; ++i) retained[ranking[i]] = true;

    std::vector<double> mem_free(hosts.size()), cpu_free(hosts.size());
    bool overloaded = false;
    for (std::size_t h = 0; h < hosts.size(); ++h) {
      mem_free[h] = hosts[h].mem_capacity - (retained[h] ? mem_used[h] : 0.0);
      cpu_free[h] = hosts[h].cpu_capacity - (retained[h] ? cpu_used[h] : 0.0);
      if (retained[h] && (mem_free[h] < 0.0 || cpu_free[h] < 0.0)) overloaded = true;
    }
    if (overloaded) continue;

    std::vector<std::size_t> movers;
    for (std::size_t v = 0; v < vms.size(); ++v) {
      if (!retained[placement[v]]) movers.push_back(v);
    }
    std::stable_sort(movers.begin(), movers.end(),
                     [&](std::size_t a, std::size_t b) { return vms[a].mem > vms[b].mem; });

    std::vector<MigrationRequest> requests;
    bool packed = true;
    for (std::size_t v : movers) {
      const auto& vm = vms[v];
      bool placed = false;
      for (std::size_t i = 0; i < keep && !placed; ++i) {
        const std::size_t h = ranking[i];
        if (vm.mem <= mem_free[h] && vm.vcpus <= cpu_free[h]) {
          mem_free[h] -= vm.mem;
          cpu_free[h] -= vm.vcpus;
          requests.push_back({vm.vm_id, vm.current_host, hosts[h].host_id, submitted_at});
          placed = true;
        }
      }
      if (!placed) {
        packed = false;
        break;
      }
    }
    if (packed) return requests;
  }
  throw PlanningError("current placement exceeds host capacity");
}

}  // namespace alma
